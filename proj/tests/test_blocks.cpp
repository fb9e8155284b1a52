#include <doctest.h>

#include <set>

#include "sparsematch/blocks.hpp"
#include "sparsematch/errors.hpp"
#include "sparsematch/rng.hpp"
#include "sparsematch/sketch.hpp"
#include "sparsematch/signal.hpp"

using namespace sparsematch;

namespace {

MatchReport run_blocks(const Signal& db, const Signal& query, const ProblemDims& dims,
                       std::int64_t blocks, std::uint64_t seed) {
    const BlockLayout layout = make_layout(dims.n_db, dims.m_query, blocks);
    const auto parts = split(db, layout);
    std::vector<MatchReport> reports;
    for (std::int64_t b = 0; b < layout.block_count; ++b) {
        const StagePlan plan = plan_block(dims, layout, b, parts[b].length(), seed);
        const Sketch sk = sketch_signal(parts[b], plan, SketchKind::Database);
        ProblemDims block_dims = dims;
        block_dims.n_db = parts[b].length();
        reports.push_back(recover(sk, query, block_dims));
    }
    return merge(reports, layout, dims.n_db, dims.m_query);
}

} // namespace

TEST_CASE("layout geometry") {
    const BlockLayout layout = make_layout(100, 10, 2);
    CHECK(layout.block_len == 50);
    CHECK(layout.overlap == 9);
    CHECK(layout.offsets == std::vector<std::int64_t>{0, 50});
    CHECK_THROWS_AS(make_layout(100, 60, 2), invalid_input); // block shorter than query
}

TEST_CASE("split covers every query window") {
    const Signal db = random_binary(100, 1);
    const BlockLayout layout = make_layout(100, 10, 2);
    const auto parts = split(db, layout);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].length() == 59); // 50 + overlap 9
    CHECK(parts[1].length() == 50); // truncated at the database end
    for (std::int64_t i = 0; i < 59; ++i)
        CHECK(parts[0].samples[i] == db.samples[i]);
    for (std::int64_t i = 0; i < 50; ++i)
        CHECK(parts[1].samples[i] == db.samples[50 + i]);
}

TEST_CASE("single-block split is the identity") {
    const Signal db = random_binary(64, 2);
    const auto parts = split(db, make_layout(64, 8, 1));
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].samples == db.samples);
}

TEST_CASE("merge offsets, deduplicates, and sorts") {
    const BlockLayout layout = make_layout(100, 10, 2);
    MatchReport a, b;
    a.positions = {52}; // in the overlap region [50, 59)
    a.values = {10.0};
    b.positions = {2, 30}; // 2 + offset 50 = 52 duplicates block 0's report
    b.values = {10.0, 10.0};
    const MatchReport merged = merge({a, b}, layout, 100, 10);
    CHECK(merged.positions == std::vector<std::int64_t>{52, 80});
    CHECK_THROWS_AS(merge({a}, layout, 100, 10), invalid_input);
}

TEST_CASE("boundary-straddling matches are found via the overlap") {
    const ProblemDims dims{4000, 50, 0, MatchMode::Exact};
    MatchSpec spec;
    spec.positions = {1985, 3000}; // first one straddles the 2-block midpoint at 2000
    spec.flips = {0, 0};
    auto [db, query] = plant_matches(4000, 50, spec, 77);
    const MatchReport merged = run_blocks(db, query, dims, 2, 5);
    CHECK(merged.positions == spec.positions);
}

TEST_CASE("block count does not change the answer") {
    const ProblemDims dims{6000, 60, 0, MatchMode::Exact};
    MatchSpec spec;
    spec.positions = {123, 2900, 5100};
    spec.flips = {0, 0, 0};
    auto [db, query] = plant_matches(6000, 60, spec, 13);
    const MatchReport one = run_blocks(db, query, dims, 1, 9);
    const MatchReport two = run_blocks(db, query, dims, 2, 9);
    const MatchReport four = run_blocks(db, query, dims, 4, 9);
    CHECK(one.positions == spec.positions);
    CHECK(two.positions == one.positions);
    CHECK(four.positions == one.positions);
}
