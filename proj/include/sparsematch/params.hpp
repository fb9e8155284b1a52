#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sparsematch {

enum class MatchMode { Exact, Approximate };

struct ProblemDims {
    std::int64_t n_db = 0;       // database length N
    std::int64_t m_query = 0;    // query length M
    std::int64_t k_mismatch = 0; // Hamming budget K
    MatchMode mode = MatchMode::Exact;

    double eta() const { return static_cast<double>(k_mismatch) / static_cast<double>(m_query); }
    double mu_for(std::int64_t length) const;
    void validate() const;
};

struct PlanOptions {
    std::optional<double> alpha;  // target alpha; forces the divisor-based construction
    std::optional<int> stages;    // override d
    std::optional<int> branches;  // override B
    double c1 = 2.0;              // incoherence constant in B = ceil(4 c1^2 ln(5 N))
};

// The RSIDFT geometry. stage_lengths[i] (f_i) is the number of bins in stage
// i; downsample_factors[i] (g_i = padded_n / f_i) is how many positions alias
// into each bin. The co-prime generators of the factorization are the g_i or
// the f_i depending on which side of mu = 1/2 the plan was built for.
struct StagePlan {
    int d = 0;
    std::int64_t n_db = 0;
    std::int64_t padded_n = 0;
    std::vector<std::int64_t> stage_lengths;      // f_i, each divides padded_n
    std::vector<std::int64_t> downsample_factors; // g_i = padded_n / f_i
    double alpha = 0.0;                           // log(min f_i) / log(padded_n)
    int b_shifts = 0;                             // B
    std::vector<std::int64_t> shifts;             // B values, shifts[0] == 0, all distinct
    double c1 = 2.0;
    std::int64_t block_count = 1; // G
    std::int64_t block_len = 0;   // N tilde
    std::uint64_t seed = 0;

    std::int64_t max_stage_length() const;
    std::int64_t min_stage_length() const;
    // B * sum_i f_i: sketch samples consumed by one query.
    std::int64_t total_samples() const;

    void validate_geometry() const;

    // key=value lines, keys sorted; byte-reproducible for a given plan.
    std::string canonical_text() const;
    static StagePlan parse_canonical_text(const std::string& text);
};

// Stage count per the interval rule (exact / approximate, mu below or above
// 1/2). Ties mu = 1/d go to the larger-d interval.
int choose_stage_count(const ProblemDims& dims, double mu);

// Advisory constant delta for F^{d-1} = delta * N^alpha sizing, 2 <= d <= 8.
double table2_delta(int d);

StagePlan plan_stages(const ProblemDims& dims, std::uint64_t seed, const PlanOptions& opt = {});

} // namespace sparsematch
