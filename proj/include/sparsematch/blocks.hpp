#pragma once

#include <cstdint>
#include <vector>

#include "sparsematch/params.hpp"
#include "sparsematch/rsidft.hpp"
#include "sparsematch/signal.hpp"

namespace sparsematch {

// Partition of the database into block_count segments of block_len samples,
// each extended by overlap = m_query - 1 so no length-M window straddles a
// boundary unseen.
struct BlockLayout {
    std::int64_t block_count = 1;
    std::int64_t block_len = 0; // without overlap
    std::int64_t overlap = 0;
    std::vector<std::int64_t> offsets;

    void validate(std::int64_t n_db, std::int64_t m_query) const;
};

BlockLayout make_layout(std::int64_t n_db, std::int64_t m_query, std::int64_t block_count);

// block b = db[offset_b : offset_b + block_len + overlap], truncated at the
// database end.
std::vector<Signal> split(const Signal& db, const BlockLayout& layout);

// Global positions = offset_b + local positions, deduplicated (first wins),
// sorted, filtered to [0, n_db - m_query].
MatchReport merge(const std::vector<MatchReport>& reports, const BlockLayout& layout,
                  std::int64_t n_db, std::int64_t m_query);

// Per-block plan for the block's own length; seed derived from
// (master seed, block index).
StagePlan plan_block(const ProblemDims& dims, const BlockLayout& layout, std::int64_t block,
                     std::int64_t actual_len, std::uint64_t master_seed,
                     const PlanOptions& opt = {});

} // namespace sparsematch
