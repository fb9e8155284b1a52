#include "sparsematch/sketch.hpp"

#include <cmath>
#include <numbers>

#include "sparsematch/errors.hpp"

namespace sparsematch {

namespace {

// e^{-j2pi (a*b mod n) / n}, with the product reduced in integer arithmetic
// so large index*shift products stay exact.
cplx unit_phase(std::int64_t a, std::int64_t b, std::int64_t n) {
    const auto r = static_cast<std::int64_t>((static_cast<__int128>(a) * b) % n);
    const double ang = -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(n);
    return {std::cos(ang), std::sin(ang)};
}

void check_stage_branch(const StagePlan& plan, int i, int j) {
    if (i < 0 || i >= plan.d)
        throw invalid_input("stage index out of range");
    if (j < 0 || j >= plan.b_shifts)
        throw invalid_input("branch index out of range");
}

} // namespace

SketchCounters& sketch_counters() {
    static SketchCounters c;
    return c;
}

void Sketch::validate_shape() const {
    if (static_cast<int>(branches.size()) != plan.d)
        throw invalid_input("sketch: stage count mismatch");
    for (int i = 0; i < plan.d; ++i) {
        if (static_cast<int>(branches[static_cast<std::size_t>(i)].size()) != plan.b_shifts)
            throw invalid_input("sketch: branch count mismatch");
        for (const auto& br : branches[static_cast<std::size_t>(i)])
            if (static_cast<std::int64_t>(br.size()) != plan.stage_lengths[static_cast<std::size_t>(i)])
                throw invalid_input("sketch: branch length mismatch");
    }
}

Sketch& Sketch::operator+=(const Sketch& other) {
    if (plan.canonical_text() != other.plan.canonical_text())
        throw invalid_input("sketch: plan mismatch in addition");
    for (std::size_t i = 0; i < branches.size(); ++i)
        for (std::size_t j = 0; j < branches[i].size(); ++j)
            for (std::size_t k = 0; k < branches[i][j].size(); ++k)
                branches[i][j][k] += other.branches[i][j][k];
    return *this;
}

std::vector<std::int64_t> sampling_set(const StagePlan& plan, int i, int j) {
    check_stage_branch(plan, i, j);
    const std::int64_t f = plan.stage_lengths[static_cast<std::size_t>(i)];
    const std::int64_t g = plan.downsample_factors[static_cast<std::size_t>(i)];
    const std::int64_t s = plan.shifts[static_cast<std::size_t>(j)];
    std::vector<std::int64_t> out(static_cast<std::size_t>(f));
    std::int64_t idx = s % plan.padded_n;
    for (std::int64_t k = 0; k < f; ++k) {
        out[static_cast<std::size_t>(k)] = idx;
        idx += g;
        if (idx >= plan.padded_n)
            idx -= plan.padded_n;
    }
    return out;
}

std::vector<cplx> fold_modulate(const Signal& v, const StagePlan& plan, std::int64_t f,
                                std::int64_t shift) {
    if (f <= 0 || plan.padded_n % f != 0)
        throw invalid_input("fold_modulate: f does not divide padded_n");
    if (v.length() > plan.padded_n)
        throw invalid_input("fold_modulate: signal longer than padded_n");
    std::vector<cplx> out(static_cast<std::size_t>(f), cplx(0.0, 0.0));
    const std::int64_t len = v.length();
    const cplx step = unit_phase(shift, 1, plan.padded_n);
    cplx cur(1.0, 0.0);
    std::int64_t l = 0;
    for (std::int64_t n = 0; n < len; ++n) {
        out[static_cast<std::size_t>(l)] += v.samples[static_cast<std::size_t>(n)] * cur;
        cur *= step;
        if (++l == f)
            l = 0;
        // incremental phasor drift stays ~n*eps; pin it down periodically
        if ((n & 0xFFF) == 0xFFF)
            cur = unit_phase(shift, n + 1, plan.padded_n);
    }
    sketch_counters().fold_mults += len;
    return out;
}

std::vector<cplx> fold_modulate_sparse(const std::vector<std::pair<std::int64_t, double>>& entries,
                                       const StagePlan& plan, std::int64_t f, std::int64_t shift) {
    if (f <= 0 || plan.padded_n % f != 0)
        throw invalid_input("fold_modulate: f does not divide padded_n");
    std::vector<cplx> out(static_cast<std::size_t>(f), cplx(0.0, 0.0));
    for (const auto& [idx, val] : entries) {
        if (idx < 0 || idx >= plan.padded_n)
            throw invalid_input("fold_modulate: entry index outside [0, padded_n)");
        out[static_cast<std::size_t>(idx % f)] += val * unit_phase(shift, idx, plan.padded_n);
    }
    sketch_counters().fold_mults += static_cast<std::int64_t>(entries.size());
    return out;
}

namespace {

template <typename Fold>
Sketch build_sketch(const StagePlan& plan, SketchKind kind, Fold&& fold) {
    Sketch sk;
    sk.plan = plan;
    sk.kind = kind;
    sk.branches.resize(static_cast<std::size_t>(plan.d));
    for (int i = 0; i < plan.d; ++i) {
        const std::int64_t f = plan.stage_lengths[static_cast<std::size_t>(i)];
        auto& stage = sk.branches[static_cast<std::size_t>(i)];
        stage.resize(static_cast<std::size_t>(plan.b_shifts));
        for (int j = 0; j < plan.b_shifts; ++j) {
            stage[static_cast<std::size_t>(j)] = dft(fold(f, plan.shifts[static_cast<std::size_t>(j)]));
            sketch_counters().fft_points += f;
        }
    }
    return sk;
}

} // namespace

Sketch sketch_signal(const Signal& v, const StagePlan& plan, SketchKind kind) {
    if (v.length() > plan.padded_n)
        throw invalid_input("sketch_signal: signal longer than padded_n");
    return build_sketch(plan, kind, [&](std::int64_t f, std::int64_t s) {
        return fold_modulate(v, plan, f, s);
    });
}

Sketch sketch_sparse(const std::vector<std::pair<std::int64_t, double>>& entries,
                     const StagePlan& plan, SketchKind kind) {
    return build_sketch(plan, kind, [&](std::int64_t f, std::int64_t s) {
        return fold_modulate_sparse(entries, plan, f, s);
    });
}

std::vector<cplx> direct_subsampled_dft(const Signal& v, const StagePlan& plan, int i, int j) {
    check_stage_branch(plan, i, j);
    const auto set = sampling_set(plan, i, j);
    const std::int64_t len = std::min<std::int64_t>(v.length(), plan.padded_n);
    std::vector<cplx> out(set.size());
    for (std::size_t q = 0; q < set.size(); ++q) {
        cplx acc = 0.0;
        for (std::int64_t m = 0; m < len; ++m)
            acc += v.samples[static_cast<std::size_t>(m)] * unit_phase(set[q], m, plan.padded_n);
        out[q] = acc;
    }
    return out;
}

} // namespace sparsematch
