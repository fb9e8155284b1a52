#include "sparsematch/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>
#include <unordered_set>

#include "sparsematch/errors.hpp"
#include "sparsematch/rng.hpp"
#include "sparsematch/rsidft.hpp"
#include "sparsematch/sketch.hpp"
#include "sparsematch/signal.hpp"

namespace sparsematch {

namespace {

// L non-overlapping plant positions in [0, n-m], deterministic per seed.
std::vector<std::int64_t> draw_positions(std::int64_t n, std::int64_t m, std::int64_t l,
                                         SplitMix64& rng) {
    std::set<std::int64_t> chosen;
    std::int64_t guard = 0;
    while (static_cast<std::int64_t>(chosen.size()) < l) {
        if (++guard > 1000 * l)
            throw error("bench: cannot place non-overlapping plants (database too dense)");
        const auto p = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - m + 1)));
        auto next = chosen.lower_bound(p);
        if (next != chosen.end() && *next < p + m)
            continue;
        if (next != chosen.begin() && *std::prev(next) > p - m)
            continue;
        chosen.insert(p);
    }
    return {chosen.begin(), chosen.end()};
}

} // namespace

std::string BenchRow::csv_header() {
    return "alpha,d,branches,total_samples,sample_gain,p_miss,trials,avg_query_seconds";
}

std::string BenchRow::csv_line() const {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%.6f,%d,%d,%lld,%.4f,%.6f,%d,%.6f", alpha, d, b_shifts,
                  static_cast<long long>(total_samples), sample_gain, p_miss, trials,
                  avg_query_seconds);
    return buf;
}

BenchRow run_bench_point(const BenchScenario& sc) {
    ProblemDims dims{sc.n_db, sc.m_query, sc.k_mismatch, sc.mode};
    dims.validate();
    if (sc.l_matches < 1 || sc.trials < 1)
        throw config_error("bench: trials and plant count must be >= 1");

    const StagePlan plan = plan_stages(dims, derive_seed(sc.seed, 0), sc.plan_opts);
    const Signal base = random_binary(sc.n_db, derive_seed(sc.seed, 1));
    const Sketch base_sketch = sketch_signal(base, plan, SketchKind::Database);

    double miss_sum = 0.0;
    double query_seconds = 0.0;
    for (int t = 0; t < sc.trials; ++t) {
        SplitMix64 rng(derive_seed(sc.seed, 1000 + static_cast<std::uint64_t>(t)));
        const Signal query = random_binary(sc.m_query, rng.next());
        const auto plants = draw_positions(sc.n_db, sc.m_query, sc.l_matches, rng);

        // Plant by difference: sketch(base with plants) = sketch(base) +
        // sketch(delta), delta supported on the planted windows only.
        std::vector<std::pair<std::int64_t, double>> delta;
        for (std::int64_t pos : plants) {
            std::vector<double> window(query.samples);
            std::int64_t flips = sc.k_mismatch;
            std::vector<char> used(static_cast<std::size_t>(sc.m_query), 0);
            while (flips > 0) {
                const auto j = static_cast<std::int64_t>(
                    rng.below(static_cast<std::uint64_t>(sc.m_query)));
                if (used[static_cast<std::size_t>(j)])
                    continue;
                used[static_cast<std::size_t>(j)] = 1;
                window[static_cast<std::size_t>(j)] *= -1.0;
                --flips;
            }
            for (std::int64_t j = 0; j < sc.m_query; ++j) {
                const double diff =
                    window[static_cast<std::size_t>(j)] -
                    base.samples[static_cast<std::size_t>(pos + j)];
                if (diff != 0.0)
                    delta.emplace_back(pos + j, diff);
            }
        }

        Sketch trial_sketch = base_sketch;
        trial_sketch += sketch_sparse(delta, plan, SketchKind::Database);

        const auto t0 = std::chrono::steady_clock::now();
        const MatchReport report = recover(trial_sketch, query, dims);
        const auto t1 = std::chrono::steady_clock::now();
        query_seconds += std::chrono::duration<double>(t1 - t0).count();

        std::unordered_set<std::int64_t> got(report.positions.begin(), report.positions.end());
        std::int64_t hit = 0;
        for (std::int64_t pos : plants)
            hit += got.count(pos) != 0;
        miss_sum += 1.0 - static_cast<double>(hit) / static_cast<double>(sc.l_matches);
    }

    BenchRow row;
    row.alpha = plan.alpha;
    row.d = plan.d;
    row.b_shifts = plan.b_shifts;
    row.total_samples = plan.total_samples();
    row.sample_gain = static_cast<double>(sc.n_db) / static_cast<double>(plan.total_samples());
    row.p_miss = miss_sum / sc.trials;
    row.trials = sc.trials;
    row.avg_query_seconds = query_seconds / sc.trials;
    return row;
}

std::vector<BenchRow> run_bench_sweep(const BenchScenario& scenario,
                                      const std::vector<double>& alphas) {
    std::vector<BenchRow> rows;
    for (double a : alphas) {
        BenchScenario sc = scenario;
        if (a >= 0.0)
            sc.plan_opts.alpha = a;
        rows.push_back(run_bench_point(sc));
    }
    return rows;
}

} // namespace sparsematch
