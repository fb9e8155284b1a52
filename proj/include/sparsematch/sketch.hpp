#pragma once

#include <atomic>
#include <cstdint>
#include <utility>
#include <vector>

#include "sparsematch/dft.hpp"
#include "sparsematch/params.hpp"
#include "sparsematch/signal.hpp"

namespace sparsematch {

enum class SketchKind { Database, Query };

// Frequency-domain samples of one signal at every stage/shift sampling set.
// branches[i][j] holds the padded_n-point DFT gathered at
// sampling_set(plan, i, j), i.e. f_i values in index order.
struct Sketch {
    StagePlan plan;
    SketchKind kind = SketchKind::Database;
    std::vector<std::vector<std::vector<cplx>>> branches; // [d][B][f_i]

    void validate_shape() const;
    Sketch& operator+=(const Sketch& other); // same plan required
};

// Operation counters for the sample/work-complexity contracts. Cheap enough
// to keep in all builds.
struct SketchCounters {
    std::atomic<std::int64_t> fold_mults{0}; // complex multiply-adds in folding
    std::atomic<std::int64_t> fft_points{0}; // sum of transform lengths
    void reset() {
        fold_mults = 0;
        fft_points = 0;
    }
};
SketchCounters& sketch_counters();

// {s_j + k*g_i mod padded_n : k = 0..f_i-1}
std::vector<std::int64_t> sampling_set(const StagePlan& plan, int i, int j);

// out[l] = sum_m v[mf+l] * w^(mf+l), w = e^{-j2pi s/padded_n}; entries of v
// beyond its length are zero. One pass over v, so a length-M query costs
// O(M) regardless of padded_n.
std::vector<cplx> fold_modulate(const Signal& v, const StagePlan& plan, std::int64_t f,
                                std::int64_t shift);

// Same fold over an explicit sparse entry list (index, value).
std::vector<cplx> fold_modulate_sparse(const std::vector<std::pair<std::int64_t, double>>& entries,
                                       const StagePlan& plan, std::int64_t f, std::int64_t shift);

Sketch sketch_signal(const Signal& v, const StagePlan& plan, SketchKind kind);
Sketch sketch_sparse(const std::vector<std::pair<std::int64_t, double>>& entries,
                     const StagePlan& plan, SketchKind kind);

// Brute-force padded_n-point DFT gathered at S_{i,j}. O(padded_n * f_i);
// test oracle only.
std::vector<cplx> direct_subsampled_dft(const Signal& v, const StagePlan& plan, int i, int j);

} // namespace sparsematch
