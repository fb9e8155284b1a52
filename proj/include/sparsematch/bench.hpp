#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsematch/params.hpp"

namespace sparsematch {

struct BenchScenario {
    std::int64_t n_db = 0;
    std::int64_t m_query = 0;
    std::int64_t k_mismatch = 0;
    MatchMode mode = MatchMode::Exact;
    std::int64_t l_matches = 10;
    int trials = 10;
    std::uint64_t seed = 0;
    PlanOptions plan_opts;
};

struct BenchRow {
    double alpha = 0.0;
    int d = 0;
    int b_shifts = 0;
    std::int64_t total_samples = 0;
    double sample_gain = 0.0; // n_db / total sketch samples used per query
    double p_miss = 0.0;      // 1 - (planted positions found / L), averaged
    int trials = 0;
    double avg_query_seconds = 0.0;

    static std::string csv_header();
    std::string csv_line() const;
};

// T seeded trials of plant -> sketch -> recover at one plan point. The base
// database sketch is computed once; per-trial plants enter through sketch
// linearity as a sparse delta sketch.
BenchRow run_bench_point(const BenchScenario& scenario);

// One row per alpha; alpha < 0 entries mean "planner default".
std::vector<BenchRow> run_bench_sweep(const BenchScenario& scenario,
                                      const std::vector<double>& alphas);

} // namespace sparsematch
