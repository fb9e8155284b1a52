#include "sparsematch/rsidft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "sparsematch/errors.hpp"
#include "sparsematch/signal.hpp"

namespace sparsematch {

namespace {

constexpr std::int64_t kIncoherenceCap = 65536;

// e^{+j2pi (a*b mod n) / n}
cplx phase_pos(std::int64_t a, std::int64_t b, std::int64_t n) {
    const auto r = static_cast<std::int64_t>((static_cast<__int128>(a) * b) % n);
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
    return {std::cos(ang), std::sin(ang)};
}

double energy_of(const std::vector<cplx>& z) {
    double e = 0.0;
    for (const cplx& v : z)
        e += std::norm(v);
    return e;
}

} // namespace

std::string to_string(BinState s) {
    switch (s) {
    case BinState::ZeroTon:
        return "zero-ton";
    case BinState::Singleton:
        return "singleton";
    case BinState::DoubleTon:
        return "double-ton";
    case BinState::MultiTon:
        return "multi-ton";
    }
    return "?";
}

std::vector<cplx> sensing_column(const StagePlan& plan, std::int64_t p) {
    std::vector<cplx> w(static_cast<std::size_t>(plan.b_shifts));
    for (int b = 0; b < plan.b_shifts; ++b)
        w[static_cast<std::size_t>(b)] =
            phase_pos(p, plan.shifts[static_cast<std::size_t>(b)], plan.padded_n);
    return w;
}

BinSet form_bins(const Sketch& xs, const Sketch& ys) {
    if (xs.plan.canonical_text() != ys.plan.canonical_text())
        throw invalid_input("form_bins: sketches built with different plans");
    xs.validate_shape();
    ys.validate_shape();
    const StagePlan& plan = xs.plan;
    BinSet bins(static_cast<std::size_t>(plan.d));
    for (int i = 0; i < plan.d; ++i) {
        const std::int64_t f = plan.stage_lengths[static_cast<std::size_t>(i)];
        auto& stage = bins[static_cast<std::size_t>(i)];
        stage.resize(static_cast<std::size_t>(f));
        for (std::int64_t k = 0; k < f; ++k) {
            auto& bin = stage[static_cast<std::size_t>(k)];
            bin.stage = i;
            bin.k = k;
            bin.z.assign(static_cast<std::size_t>(plan.b_shifts), cplx(0.0, 0.0));
        }
        std::vector<cplx> prod(static_cast<std::size_t>(f));
        for (int j = 0; j < plan.b_shifts; ++j) {
            const auto& xb = xs.branches[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            const auto& yb = ys.branches[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            // r_{i,j} = DFT_f(conj(X .* Y')) / f; the conjugation flips the
            // modulation sign so the bin contract carries e^{+j...} phases.
            for (std::int64_t q = 0; q < f; ++q)
                prod[static_cast<std::size_t>(q)] =
                    std::conj(xb[static_cast<std::size_t>(q)] * yb[static_cast<std::size_t>(q)]);
            auto r = dft(prod);
            const double inv_f = 1.0 / static_cast<double>(f);
            for (std::int64_t k = 0; k < f; ++k)
                stage[static_cast<std::size_t>(k)].z[static_cast<std::size_t>(j)] =
                    r[static_cast<std::size_t>(k)] * inv_f;
        }
        for (auto& bin : stage)
            bin.energy_sq = energy_of(bin.z);
    }
    return bins;
}

BinState classify_value(double re_z0, std::int64_t m_query, double eta) {
    const double v = re_z0 / static_cast<double>(m_query);
    const double g1 = (1.0 - 2.0 * eta) / 2.0;
    const double g2 = (3.0 - 4.0 * eta) / 2.0;
    const double g3 = (5.0 - 6.0 * eta) / 2.0;
    if (v < g1)
        return BinState::ZeroTon;
    if (v < g2)
        return BinState::Singleton;
    if (v < g3)
        return BinState::DoubleTon;
    return BinState::MultiTon;
}

void classify_all(BinSet& bins, std::int64_t m_query, double eta) {
    for (auto& stage : bins)
        for (auto& bin : stage) {
            bin.state = classify_value(bin.z[0].real(), m_query, eta);
            bin.original_state = bin.state;
            bin.energy_sq = energy_of(bin.z);
            bin.active = true;
        }
}

DecodeResult singleton_decode(const BinObservation& bin, const StagePlan& plan,
                              std::int64_t m_query, std::int64_t k_mismatch) {
    const std::int64_t f = plan.stage_lengths[static_cast<std::size_t>(bin.stage)];
    const std::int64_t g = plan.downsample_factors[static_cast<std::size_t>(bin.stage)];
    const int B = plan.b_shifts;

    // Candidate positions k + l*f share per-branch step phasors
    // e^{+j2pi f s_b / N}; the correlation scan is incremental in l.
    std::vector<cplx> cur(static_cast<std::size_t>(B)), step(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b) {
        cur[static_cast<std::size_t>(b)] =
            phase_pos(bin.k, plan.shifts[static_cast<std::size_t>(b)], plan.padded_n);
        step[static_cast<std::size_t>(b)] =
            phase_pos(f, plan.shifts[static_cast<std::size_t>(b)], plan.padded_n);
    }

    DecodeResult best;
    best.correlation = -std::numeric_limits<double>::infinity();
    for (std::int64_t l = 0; l < g; ++l) {
        double corr = 0.0;
        for (int b = 0; b < B; ++b) {
            const cplx& zb = bin.z[static_cast<std::size_t>(b)];
            const cplx& wb = cur[static_cast<std::size_t>(b)];
            corr += zb.real() * wb.real() + zb.imag() * wb.imag(); // Re(conj(z) * w)
        }
        corr /= static_cast<double>(B);
        if (corr > best.correlation) {
            best.correlation = corr;
            best.position = bin.k + l * f;
        }
        for (int b = 0; b < B; ++b)
            cur[static_cast<std::size_t>(b)] *= step[static_cast<std::size_t>(b)];
        if ((l & 0xFF) == 0xFF) {
            const std::int64_t p =
                (bin.k + ((l + 1) % plan.padded_n) * (f % plan.padded_n)) % plan.padded_n;
            for (int b = 0; b < B; ++b)
                cur[static_cast<std::size_t>(b)] =
                    phase_pos(p, plan.shifts[static_cast<std::size_t>(b)], plan.padded_n);
        }
    }

    best.value = static_cast<double>(m_query - k_mismatch);
    const double energy = bin.energy_sq > 0.0 ? bin.energy_sq : energy_of(bin.z);
    if (energy > 0.0) {
        const double resid = energy - 2.0 * best.value * best.correlation * B +
                             best.value * best.value * B;
        best.residual_ratio = std::max(0.0, resid) / energy;
    } else {
        best.residual_ratio = 1.0;
    }
    return best;
}

MatchReport peel(BinSet& bins, const StagePlan& plan, const ProblemDims& dims,
                 const PeelOptions& opt) {
    MatchReport report;
    const double eta = dims.eta();
    const std::int64_t M = dims.m_query;
    const double accept_corr = (1.0 - 2.0 * eta) * static_cast<double>(M) / 2.0;
    // |z^H w| <= ||z|| sqrt(B), so bins below this energy cannot pass the
    // correlation guard; skipping them bounds decode attempts.
    const double screen = accept_corr * accept_corr * static_cast<double>(plan.b_shifts);
    const bool approx = dims.mode == MatchMode::Approximate;
    const std::int64_t cap = plan.padded_n;

    std::map<std::int64_t, double> found;
    bool progress = true;
    while (progress && !report.diagnostics.iteration_cap_hit) {
        progress = false;
        for (auto& stage : bins) {
            for (auto& bin : stage) {
                if (!bin.active || bin.energy_sq < screen)
                    continue;
                ++report.iterations;
                if (report.iterations > cap) {
                    report.diagnostics.iteration_cap_hit = true;
                    break;
                }
                const DecodeResult res = singleton_decode(bin, plan, M, dims.k_mismatch);
                if (res.correlation < accept_corr || res.residual_ratio > 0.5) {
                    ++report.diagnostics.failed_attempts;
                    bin.active = false;
                    continue;
                }
                if (found.count(res.position)) {
                    ++report.diagnostics.duplicate_rejects;
                    bin.state = BinState::ZeroTon;
                    bin.active = false;
                    continue;
                }
                found.emplace(res.position, res.value);
                ++report.diagnostics.peels;
                progress = true;

                const auto w = sensing_column(plan, res.position);
                for (int i2 = 0; i2 < plan.d; ++i2) {
                    const std::int64_t f2 = plan.stage_lengths[static_cast<std::size_t>(i2)];
                    auto& tgt = bins[static_cast<std::size_t>(i2)]
                                    [static_cast<std::size_t>(res.position % f2)];
                    if (approx) {
                        const BinState gate = opt.use_original_state ? tgt.original_state : tgt.state;
                        if (gate != BinState::Singleton && gate != BinState::DoubleTon)
                            continue;
                    }
                    for (int b = 0; b < plan.b_shifts; ++b)
                        tgt.z[static_cast<std::size_t>(b)] -=
                            res.value * w[static_cast<std::size_t>(b)];
                    tgt.energy_sq = energy_of(tgt.z);
                    tgt.state = classify_value(tgt.z[0].real(), M, eta);
                    ++report.diagnostics.classifications;
                    tgt.active = true;
                }
            }
            if (report.diagnostics.iteration_cap_hit)
                break;
        }
    }

    for (const auto& [p, v] : found) {
        report.positions.push_back(p);
        report.values.push_back(v);
    }
    for (const auto& stage : bins)
        for (const auto& bin : stage)
            report.unresolved_bins += bin.state == BinState::MultiTon;
    return report;
}

double mutual_incoherence(const StagePlan& plan, int i) {
    if (i < 0 || i >= plan.d)
        throw invalid_input("mutual_incoherence: stage out of range");
    const std::int64_t f = plan.stage_lengths[static_cast<std::size_t>(i)];
    const std::int64_t g = plan.downsample_factors[static_cast<std::size_t>(i)];
    if (g > kIncoherenceCap)
        throw invalid_input("mutual_incoherence: stage has too many aliases for the exact diagnostic");
    if (g == 1)
        return 0.0;
    const int B = plan.b_shifts;
    // Column pair (k + l1 f, k + l2 f) depends only on l1 - l2, so scanning
    // the g-1 nonzero offsets covers every distinct pair exactly.
    std::vector<cplx> cur(static_cast<std::size_t>(B)), step(static_cast<std::size_t>(B));
    for (int b = 0; b < B; ++b) {
        step[static_cast<std::size_t>(b)] =
            phase_pos(f, plan.shifts[static_cast<std::size_t>(b)], plan.padded_n);
        cur[static_cast<std::size_t>(b)] = step[static_cast<std::size_t>(b)];
    }
    double mu_max = 0.0;
    for (std::int64_t l = 1; l < g; ++l) {
        cplx acc = 0.0;
        for (int b = 0; b < B; ++b)
            acc += cur[static_cast<std::size_t>(b)];
        mu_max = std::max(mu_max, std::abs(acc) / static_cast<double>(B));
        for (int b = 0; b < B; ++b)
            cur[static_cast<std::size_t>(b)] *= step[static_cast<std::size_t>(b)];
        if ((l & 0xFF) == 0xFF) {
            const std::int64_t off = ((l + 1) % plan.padded_n) * (f % plan.padded_n) % plan.padded_n;
            for (int b = 0; b < B; ++b)
                cur[static_cast<std::size_t>(b)] =
                    phase_pos(off, plan.shifts[static_cast<std::size_t>(b)], plan.padded_n);
        }
    }
    return mu_max;
}

MatchReport recover(const Sketch& db_sketch, const Signal& query, const ProblemDims& dims,
                    const PeelOptions& opt) {
    dims.validate();
    if (db_sketch.kind != SketchKind::Database)
        throw invalid_input("recover: first sketch must be a database sketch");
    const StagePlan& plan = db_sketch.plan;
    const std::int64_t M = query.length();
    if (M != dims.m_query)
        throw invalid_input("recover: query length disagrees with problem dimensions");
    if (M > plan.padded_n)
        throw invalid_input("recover: query longer than padded length");

    // Reversed-conjugate query as a sparse entry list: y'[0] = y[0],
    // y'[padded_n - i] = y[i]. O(M) sketch cost.
    std::vector<std::pair<std::int64_t, double>> entries;
    entries.reserve(static_cast<std::size_t>(M));
    entries.emplace_back(0, query.samples[0]);
    for (std::int64_t i = 1; i < M; ++i)
        entries.emplace_back(plan.padded_n - i, query.samples[static_cast<std::size_t>(i)]);

    const Sketch ys = sketch_sparse(entries, plan, SketchKind::Query);
    BinSet bins = form_bins(db_sketch, ys);
    classify_all(bins, M, dims.eta());
    MatchReport report = peel(bins, plan, dims, opt);

    const std::int64_t hi = plan.n_db - M;
    std::vector<std::int64_t> pos;
    std::vector<double> val;
    for (std::size_t q = 0; q < report.positions.size(); ++q)
        if (report.positions[q] >= 0 && report.positions[q] <= hi) {
            pos.push_back(report.positions[q]);
            val.push_back(report.values[q]);
        }
    report.positions = std::move(pos);
    report.values = std::move(val);
    return report;
}

} // namespace sparsematch
