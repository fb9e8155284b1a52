#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparsematch/dft.hpp"
#include "sparsematch/params.hpp"
#include "sparsematch/sketch.hpp"

namespace sparsematch {

enum class BinState { ZeroTon, Singleton, DoubleTon, MultiTon };

// One aliased coefficient index of one stage: the B shifted observations of
// the sum of correlation values aliasing into this bin.
struct BinObservation {
    int stage = 0;
    std::int64_t k = 0;
    std::vector<cplx> z;                          // length B, z[0] is the zero-shift branch
    BinState state = BinState::ZeroTon;
    BinState original_state = BinState::ZeroTon;  // frozen at the first classification pass
    double energy_sq = 0.0;                       // ||z||^2, kept current by peel
    bool active = true;                           // false after a failed decode, until z changes
};

using BinSet = std::vector<std::vector<BinObservation>>; // [stage][k]

struct MatchReport {
    std::vector<std::int64_t> positions; // sorted
    std::vector<double> values;          // aligned with positions
    std::int64_t iterations = 0;
    std::int64_t unresolved_bins = 0;
    struct Diagnostics {
        std::int64_t classifications = 0;
        std::int64_t peels = 0;
        std::int64_t failed_attempts = 0;
        std::int64_t duplicate_rejects = 0;
        bool iteration_cap_hit = false;
    } diagnostics;
};

struct PeelOptions {
    // Approximate mode: subtract decoded contributions only from bins whose
    // first-pass classification was Singleton or DoubleTon. false switches to
    // the current-state rule.
    bool use_original_state = true;
};

// w^p[b] = e^{+j2pi p s_b / padded_n}
std::vector<cplx> sensing_column(const StagePlan& plan, std::int64_t p);

// z_{i,k}[j] = sum_m r[k + m f_i] * e^{+j2pi (k + m f_i) s_j / padded_n},
// obtained as the scaled length-f_i transform of conj(X[S] .* Y'[S]).
BinSet form_bins(const Sketch& xs, const Sketch& ys);

// Thresholds (gamma1, gamma2, gamma3) = ((1-2eta)/2, (3-4eta)/2, (5-6eta)/2)
// applied to Re(z[0]) / m_query.
BinState classify_value(double re_z0, std::int64_t m_query, double eta);
void classify_all(BinSet& bins, std::int64_t m_query, double eta);

struct DecodeResult {
    std::int64_t position = -1;
    double value = 0.0;
    double correlation = 0.0;    // max_p Re(z^H w^p) / B
    double residual_ratio = 0.0; // ||z - value*w||^2 / ||z||^2
};

// argmax over the g_i candidates {k + l f_i} of Re(z^H w^p)/B; ties go to
// the smallest position. value = M (exact) or M-K (approximate).
DecodeResult singleton_decode(const BinObservation& bin, const StagePlan& plan,
                              std::int64_t m_query, std::int64_t k_mismatch);

MatchReport peel(BinSet& bins, const StagePlan& plan, const ProblemDims& dims,
                 const PeelOptions& opt = {});

// Exact max over distinct sensing-column pairs of one stage's bin matrix;
// 0 for g_i = 1. Diagnostic; refuses g_i beyond the documented cap (65536).
double mutual_incoherence(const StagePlan& plan, int i);

// Full query path: reversed-conjugate query sketch, binning, classification,
// peeling, and filtering of positions to [0, n_db - m_query].
MatchReport recover(const Sketch& db_sketch, const Signal& query, const ProblemDims& dims,
                    const PeelOptions& opt = {});

std::string to_string(BinState s);

} // namespace sparsematch
