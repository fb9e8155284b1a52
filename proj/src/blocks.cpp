#include "sparsematch/blocks.hpp"

#include <algorithm>
#include <map>

#include "sparsematch/errors.hpp"
#include "sparsematch/rng.hpp"

namespace sparsematch {

void BlockLayout::validate(std::int64_t n_db, std::int64_t m_query) const {
    if (block_count < 1 || block_len < 1)
        throw invalid_input("block layout: empty blocks");
    if (block_len < m_query)
        throw invalid_input("block layout: block shorter than query");
    if (overlap != m_query - 1)
        throw invalid_input("block layout: overlap must be m_query - 1");
    if (static_cast<std::int64_t>(offsets.size()) != block_count)
        throw invalid_input("block layout: offset count mismatch");
    for (std::int64_t b = 0; b < block_count; ++b)
        if (offsets[static_cast<std::size_t>(b)] != b * block_len)
            throw invalid_input("block layout: offsets must tile the database");
    if (block_count * block_len < n_db)
        throw invalid_input("block layout: blocks do not cover the database");
}

BlockLayout make_layout(std::int64_t n_db, std::int64_t m_query, std::int64_t block_count) {
    if (block_count < 1)
        throw config_error("block count must be >= 1");
    BlockLayout layout;
    layout.block_count = block_count;
    layout.block_len = (n_db + block_count - 1) / block_count;
    layout.overlap = m_query - 1;
    for (std::int64_t b = 0; b < block_count; ++b)
        layout.offsets.push_back(b * layout.block_len);
    layout.validate(n_db, m_query);
    return layout;
}

std::vector<Signal> split(const Signal& db, const BlockLayout& layout) {
    std::vector<Signal> out;
    const std::int64_t n = db.length();
    for (std::int64_t b = 0; b < layout.block_count; ++b) {
        const std::int64_t start = layout.offsets[static_cast<std::size_t>(b)];
        const std::int64_t stop = std::min(n, start + layout.block_len + layout.overlap);
        if (start >= n)
            throw invalid_input("split: layout extends past the database");
        Signal s;
        s.binary_tag = db.binary_tag;
        s.samples.assign(db.samples.begin() + start, db.samples.begin() + stop);
        out.push_back(std::move(s));
    }
    return out;
}

MatchReport merge(const std::vector<MatchReport>& reports, const BlockLayout& layout,
                  std::int64_t n_db, std::int64_t m_query) {
    if (static_cast<std::int64_t>(reports.size()) != layout.block_count)
        throw invalid_input("merge: one report per block required");
    MatchReport out;
    std::map<std::int64_t, double> found;
    for (std::int64_t b = 0; b < layout.block_count; ++b) {
        const auto& rep = reports[static_cast<std::size_t>(b)];
        const std::int64_t off = layout.offsets[static_cast<std::size_t>(b)];
        out.iterations += rep.iterations;
        out.unresolved_bins += rep.unresolved_bins;
        out.diagnostics.classifications += rep.diagnostics.classifications;
        out.diagnostics.peels += rep.diagnostics.peels;
        out.diagnostics.failed_attempts += rep.diagnostics.failed_attempts;
        out.diagnostics.duplicate_rejects += rep.diagnostics.duplicate_rejects;
        out.diagnostics.iteration_cap_hit |= rep.diagnostics.iteration_cap_hit;
        for (std::size_t q = 0; q < rep.positions.size(); ++q) {
            const std::int64_t p = off + rep.positions[q];
            if (p < 0 || p > n_db - m_query)
                continue;
            found.emplace(p, rep.values[q]); // overlap double-reports: first wins
        }
    }
    for (const auto& [p, v] : found) {
        out.positions.push_back(p);
        out.values.push_back(v);
    }
    return out;
}

StagePlan plan_block(const ProblemDims& dims, const BlockLayout& layout, std::int64_t block,
                     std::int64_t actual_len, std::uint64_t master_seed, const PlanOptions& opt) {
    if (block < 0 || block >= layout.block_count)
        throw invalid_input("plan_block: block index out of range");
    ProblemDims block_dims = dims;
    block_dims.n_db = actual_len;
    StagePlan plan = plan_stages(block_dims, derive_seed(master_seed, static_cast<std::uint64_t>(block)),
                                 opt);
    plan.block_count = layout.block_count;
    plan.block_len = layout.block_len;
    return plan;
}

} // namespace sparsematch
