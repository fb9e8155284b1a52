#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sparsematch/errors.hpp"
#include "sparsematch/rng.hpp"
#include "sparsematch/sketch.hpp"

using namespace sparsematch;

namespace {

double max_rel_err(const std::vector<cplx>& got, const std::vector<cplx>& want) {
    REQUIRE(got.size() == want.size());
    double scale = 0.0;
    for (const cplx& v : want)
        scale = std::max(scale, std::abs(v));
    scale = std::max(scale, 1.0);
    double err = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i)
        err = std::max(err, std::abs(got[i] - want[i]) / scale);
    return err;
}

Signal random_real(std::int64_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Signal s;
    s.samples.resize(static_cast<std::size_t>(n));
    for (auto& v : s.samples)
        v = 2.0 * rng.unit() - 1.0;
    return s;
}

} // namespace

TEST_CASE("sampling sets match the toy geometry") {
    const StagePlan plan = oracles::toy_plan(6, {2, 3}, {0, 1});
    CHECK(sampling_set(plan, 0, 0) == std::vector<std::int64_t>{0, 3});
    CHECK(sampling_set(plan, 1, 0) == std::vector<std::int64_t>{0, 2, 4});
    CHECK(sampling_set(plan, 0, 1) == std::vector<std::int64_t>{1, 4});
}

TEST_CASE("fold-DFT identity at toy sizes") {
    for (std::int64_t padded : {6, 12, 30}) {
        std::vector<std::int64_t> fs;
        for (std::int64_t f = 2; f < padded; ++f)
            if (padded % f == 0)
                fs.push_back(f);
        const StagePlan plan = oracles::toy_plan(padded, fs, {0, 1, 5 % padded});
        for (int trial = 0; trial < 10; ++trial) {
            const Signal v = random_real(padded, 100 * static_cast<std::uint64_t>(padded) + trial);
            for (int i = 0; i < plan.d; ++i)
                for (int j = 0; j < plan.b_shifts; ++j) {
                    const auto got = dft(fold_modulate(v, plan, plan.stage_lengths[i],
                                                       plan.shifts[j]));
                    const auto want = direct_subsampled_dft(v, plan, i, j);
                    CHECK(max_rel_err(got, want) < 1e-9);
                }
        }
    }
}

TEST_CASE("fold-DFT identity at N near 1e4") {
    // 10010 = 2*5*7*11*13
    const StagePlan plan = oracles::toy_plan(10010, {70, 143, 110}, {0, 17, 4242});
    const Signal v = random_real(10010, 77);
    for (int i = 0; i < plan.d; ++i)
        for (int j = 0; j < plan.b_shifts; ++j) {
            const auto got = dft(fold_modulate(v, plan, plan.stage_lengths[i], plan.shifts[j]));
            const auto want = direct_subsampled_dft(v, plan, i, j);
            CHECK(max_rel_err(got, want) < 1e-9);
        }
}

TEST_CASE("impulse databases sketch to all-ones branches") {
    const StagePlan plan = oracles::toy_plan(12, {3, 4}, {0, 5});
    Signal impulse;
    impulse.samples.assign(12, 0.0);
    impulse.samples[0] = 1.0;
    const Sketch sk = sketch_signal(impulse, plan, SketchKind::Database);
    for (const auto& stage : sk.branches)
        for (const auto& branch : stage)
            for (const cplx& v : branch)
                CHECK(std::abs(v - cplx(1.0, 0.0)) < 1e-12);
}

TEST_CASE("sketching is linear") {
    const StagePlan plan = oracles::toy_plan(30, {5, 6}, {0, 3, 11});
    const Signal u = random_real(30, 1);
    const Signal v = random_real(30, 2);
    Signal w;
    w.samples.resize(30);
    for (int i = 0; i < 30; ++i)
        w.samples[i] = 2.0 * u.samples[i] - 3.0 * v.samples[i];
    const Sketch su = sketch_signal(u, plan, SketchKind::Database);
    const Sketch sv = sketch_signal(v, plan, SketchKind::Database);
    const Sketch sw = sketch_signal(w, plan, SketchKind::Database);
    for (int i = 0; i < plan.d; ++i)
        for (int j = 0; j < plan.b_shifts; ++j)
            for (std::size_t k = 0; k < sw.branches[i][j].size(); ++k)
                CHECK(std::abs(sw.branches[i][j][k] -
                               (2.0 * su.branches[i][j][k] - 3.0 * sv.branches[i][j][k])) < 1e-9);
}

TEST_CASE("sparse sketch equals dense sketch of the same content") {
    const StagePlan plan = oracles::toy_plan(30, {5, 6}, {0, 7});
    Signal dense;
    dense.samples.assign(30, 0.0);
    std::vector<std::pair<std::int64_t, double>> entries = {{0, 1.0}, {3, -2.0}, {29, 0.5}};
    for (const auto& [idx, val] : entries)
        dense.samples[static_cast<std::size_t>(idx)] = val;
    const Sketch a = sketch_signal(dense, plan, SketchKind::Query);
    const Sketch b = sketch_sparse(entries, plan, SketchKind::Query);
    for (int i = 0; i < plan.d; ++i)
        for (int j = 0; j < plan.b_shifts; ++j)
            for (std::size_t k = 0; k < a.branches[i][j].size(); ++k)
                CHECK(std::abs(a.branches[i][j][k] - b.branches[i][j][k]) < 1e-9);
}

TEST_CASE("query folding cost is linear in the query, not the database") {
    const StagePlan plan = oracles::toy_plan(10010, {70, 143}, {0, 9});
    std::vector<std::pair<std::int64_t, double>> entries;
    for (std::int64_t i = 0; i < 100; ++i)
        entries.emplace_back(i * 7, i % 2 ? 1.0 : -1.0);
    sketch_counters().reset();
    sketch_sparse(entries, plan, SketchKind::Query);
    const std::int64_t branches = static_cast<std::int64_t>(plan.d) * plan.b_shifts;
    CHECK(sketch_counters().fold_mults == branches * 100);
    CHECK(sketch_counters().fft_points == 2 * (70 + 143));
}

TEST_CASE("fold rejects a length that does not divide the padded size") {
    const StagePlan plan = oracles::toy_plan(12, {3, 4}, {0});
    const Signal v = random_real(12, 5);
    CHECK_THROWS_AS(fold_modulate(v, plan, 5, 0), invalid_input);
}
