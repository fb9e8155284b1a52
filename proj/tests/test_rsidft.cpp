#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "sparsematch/errors.hpp"
#include "sparsematch/rng.hpp"
#include "sparsematch/rsidft.hpp"
#include "sparsematch/sketch.hpp"

using namespace sparsematch;

namespace {

// Sketch both sides of a planted instance and form bins.
BinSet bins_of(const Signal& db, const Signal& query, const StagePlan& plan) {
    const Sketch xs = sketch_signal(db, plan, SketchKind::Database);
    std::vector<std::pair<std::int64_t, double>> entries;
    entries.emplace_back(0, query.samples[0]);
    for (std::int64_t i = 1; i < query.length(); ++i)
        entries.emplace_back(plan.padded_n - i, query.samples[static_cast<std::size_t>(i)]);
    const Sketch ys = sketch_sparse(entries, plan, SketchKind::Query);
    return form_bins(xs, ys);
}

} // namespace

TEST_CASE("formed bins match the aliasing contract applied to brute-force r") {
    const StagePlan plan = oracles::toy_plan(30, {6, 10, 15}, {0, 3, 11, 19}, 30);
    MatchSpec spec;
    spec.positions = {4, 17};
    spec.flips = {0, 0};
    auto [db, query] = plant_matches(30, 5, spec, 99);
    const auto r = oracles::circular_correlation(db, query, plan.padded_n);
    const BinSet bins = bins_of(db, query, plan);
    for (int i = 0; i < plan.d; ++i)
        for (std::int64_t k = 0; k < plan.stage_lengths[i]; ++k)
            for (int j = 0; j < plan.b_shifts; ++j) {
                const cplx want = oracles::bin_value_from_r(r, plan, i, k, j);
                const cplx got = bins[i][static_cast<std::size_t>(k)].z[j];
                CHECK(std::abs(got - want) < 1e-6 * std::max(1.0, std::abs(want)));
            }
}

TEST_CASE("five-bin toy graph: bin contents are sums of aliased correlations") {
    // padded 6, stages f = {2, 3}: bin (0, k) aliases {k, k+2, k+4}, bin
    // (1, k) aliases {k, k+3}.
    const StagePlan plan = oracles::toy_plan(6, {2, 3}, {0, 1}, 6);
    std::set<std::int64_t> support = {0};
    const BinSet bins = oracles::bins_from_support(support, 4.0, plan);
    CHECK(bins[0][0].z[0].real() == doctest::Approx(4.0)); // r[0] + r[2] + r[4]
    CHECK(bins[0][1].z[0].real() == doctest::Approx(0.0));
    CHECK(bins[1][0].z[0].real() == doctest::Approx(4.0)); // r[0] + r[3]
    CHECK(bins[1][1].z[0].real() == doctest::Approx(0.0));
    CHECK(bins[1][2].z[0].real() == doctest::Approx(0.0));
}

TEST_CASE("classification thresholds") {
    CHECK(classify_value(1.0 * 100, 100, 0.0) == BinState::Singleton);
    CHECK(classify_value(0.01 * 100, 100, 0.0) == BinState::ZeroTon);
    CHECK(classify_value(-0.4 * 100, 100, 0.0) == BinState::ZeroTon);
    CHECK(classify_value(2.0 * 100, 100, 0.0) == BinState::DoubleTon);
    CHECK(classify_value(3.1 * 100, 100, 0.0) == BinState::MultiTon);
    // eta = 0.1: gamma2 = 1.3, gamma3 = 2.2
    CHECK(classify_value(1.9 * 100, 100, 0.1) == BinState::DoubleTon);
}

TEST_CASE("singleton decode finds every synthetic position") {
    const StagePlan plan = oracles::toy_plan(210, {30, 42, 70}, {0, 1, 13, 44, 101, 177});
    const double m = 14.0;
    for (std::int64_t p = 0; p < 210; p += 7) {
        const BinSet bins = oracles::bins_from_support({p}, m, plan);
        for (int i = 0; i < plan.d; ++i) {
            const auto& bin = bins[i][static_cast<std::size_t>(p % plan.stage_lengths[i])];
            const DecodeResult res = singleton_decode(bin, plan, 14, 0);
            CHECK(res.position == p);
            CHECK(res.correlation == doctest::Approx(m));
            CHECK(res.residual_ratio == doctest::Approx(0.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("singleton decode is scale invariant") {
    const StagePlan plan = oracles::toy_plan(210, {30, 42, 70}, {0, 1, 13, 44});
    BinSet bins = oracles::bins_from_support({45}, 14.0, plan);
    auto& bin = bins[0][45 % 30];
    const DecodeResult base = singleton_decode(bin, plan, 14, 0);
    for (auto& z : bin.z)
        z *= 7.5;
    bin.energy_sq = 0.0;
    const DecodeResult scaled = singleton_decode(bin, plan, 14, 0);
    CHECK(base.position == scaled.position);
}

TEST_CASE("noiseless peeling matches the graph-only reference peeler") {
    const StagePlan plan = oracles::toy_plan(210, {30, 42, 70}, {0, 1, 13, 44, 101, 177}, 210);
    const ProblemDims dims{210, 14, 0, MatchMode::Exact};
    SplitMix64 rng(31337);
    int agreements = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto size = 1 + rng.below(8);
        std::set<std::int64_t> support;
        while (support.size() < size)
            support.insert(static_cast<std::int64_t>(rng.below(197))); // keep within [0, n-m]
        BinSet bins = oracles::bins_from_support(support, 14.0, plan);
        classify_all(bins, 14, 0.0);
        const MatchReport report = peel(bins, plan, dims);
        const std::set<std::int64_t> got(report.positions.begin(), report.positions.end());
        // soundness: never invent positions
        for (std::int64_t p : got)
            CHECK(support.count(p));
        if (oracles::graph_peelable(support, plan)) {
            CHECK(got == support);
            ++agreements;
        }
    }
    CHECK(agreements > 800); // most random supports of size <= 8 peel
}

TEST_CASE("exact peeling never increases |z[0]| when subtracting a true decode") {
    const StagePlan plan = oracles::toy_plan(210, {30, 42, 70}, {0, 1, 13, 44}, 210);
    const ProblemDims dims{210, 14, 0, MatchMode::Exact};
    BinSet bins = oracles::bins_from_support({12, 54, 96}, 14.0, plan);
    classify_all(bins, 14, 0.0);
    std::vector<double> before;
    for (const auto& stage : bins)
        for (const auto& bin : stage)
            before.push_back(std::abs(bin.z[0]));
    peel(bins, plan, dims);
    std::size_t q = 0;
    for (const auto& stage : bins)
        for (const auto& bin : stage)
            CHECK(std::abs(bin.z[0]) <= before[q++] + 1e-9);
}

TEST_CASE("mutual incoherence conventions and bound") {
    const StagePlan one_alias = oracles::toy_plan(30, {30, 15}, {0, 7});
    CHECK(mutual_incoherence(one_alias, 0) == 0.0); // g = 1, no pairs
    const StagePlan single_branch = oracles::toy_plan(30, {10, 15}, {0});
    CHECK(mutual_incoherence(single_branch, 0) == doctest::Approx(1.0));

    // random shifts at N = 2310, B = 64 stay under the theoretical bound
    std::vector<std::int64_t> shifts = {0};
    SplitMix64 rng(4242);
    std::set<std::int64_t> used = {0};
    while (shifts.size() < 64) {
        const auto s = static_cast<std::int64_t>(rng.below(2310));
        if (used.insert(s).second)
            shifts.push_back(s);
    }
    const StagePlan plan = oracles::toy_plan(2310, {110, 210, 330}, shifts);
    const double bound = 2.0 * std::sqrt(std::log(5.0 * 2310.0) / 64.0);
    for (int i = 0; i < plan.d; ++i)
        CHECK(mutual_incoherence(plan, i) < bound);
}

TEST_CASE("end-to-end exact recovery on a small planted instance") {
    const ProblemDims dims{2000, 44, 0, MatchMode::Exact};
    const StagePlan plan = plan_stages(dims, 8);
    MatchSpec spec;
    spec.positions = {100, 777, 1500};
    spec.flips = {0, 0, 0};
    auto [db, query] = plant_matches(2000, 44, spec, 21);
    const Sketch xs = sketch_signal(db, plan, SketchKind::Database);
    const MatchReport report = recover(xs, query, dims);
    CHECK(report.positions == spec.positions);
}

TEST_CASE("end-to-end approximate recovery tolerates planted flips") {
    const ProblemDims dims{8192, 64, 7, MatchMode::Approximate};
    const StagePlan plan = plan_stages(dims, 12);
    MatchSpec spec;
    spec.positions = {500, 2222, 6600};
    spec.flips = {7, 3, 0};
    auto [db, query] = plant_matches(8192, 64, spec, 33);
    const Sketch xs = sketch_signal(db, plan, SketchKind::Database);
    const MatchReport report = recover(xs, query, dims);
    CHECK(report.positions == spec.positions);
}

TEST_CASE("recover rejects mismatched dimensions") {
    const ProblemDims dims{2000, 44, 0, MatchMode::Exact};
    const StagePlan plan = plan_stages(dims, 8);
    const Signal db = random_binary(2000, 1);
    const Sketch xs = sketch_signal(db, plan, SketchKind::Database);
    const Signal wrong = random_binary(20, 2);
    CHECK_THROWS_AS(recover(xs, wrong, dims), invalid_input);
}
