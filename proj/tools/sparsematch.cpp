#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparsematch/bench.hpp"
#include "sparsematch/blocks.hpp"
#include "sparsematch/errors.hpp"
#include "sparsematch/params.hpp"
#include "sparsematch/rng.hpp"
#include "sparsematch/rsidft.hpp"
#include "sparsematch/signal.hpp"
#include "sparsematch/sketch.hpp"
#include "sparsematch/sketch_file.hpp"

namespace {

using namespace sparsematch;

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
    if (flag)
        return *flag;
    if (const char* env = std::getenv("SPARSEMATCH_SEED"))
        return std::stoull(env);
    return 0;
}

MatchMode parse_mode(const std::string& s) {
    if (s == "exact")
        return MatchMode::Exact;
    if (s == "approx")
        return MatchMode::Approximate;
    throw config_error("--mode must be 'exact' or 'approx'");
}

std::vector<std::int64_t> draw_plants(std::int64_t n, std::int64_t m, std::int64_t l,
                                      SplitMix64& rng) {
    std::set<std::int64_t> chosen;
    std::int64_t guard = 0;
    while (static_cast<std::int64_t>(chosen.size()) < l) {
        if (++guard > 1000 * l)
            throw config_error("cannot place that many non-overlapping matches");
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

// positions with Hamming distance <= k, via the correlation identity
// corr = M - 2 d_H.
std::vector<std::int64_t> oracle_positions(const Signal& db, const Signal& query,
                                           std::int64_t k) {
    const auto r = cross_correlate(db, query);
    const double floor_corr = static_cast<double>(query.length() - 2 * k);
    std::vector<std::int64_t> out;
    for (std::size_t p = 0; p < r.size(); ++p)
        if (r[p] >= floor_corr - 0.5)
            out.push_back(static_cast<std::int64_t>(p));
    return out;
}

struct PlanFlags {
    std::optional<double> alpha;
    std::optional<int> stages;
    std::optional<int> branches;
    double c1 = 2.0;

    PlanOptions options() const {
        PlanOptions o;
        o.alpha = alpha;
        o.stages = stages;
        o.branches = branches;
        o.c1 = c1;
        return o;
    }
};

void add_plan_flags(CLI::App* cmd, PlanFlags& pf) {
    cmd->add_option("--alpha", pf.alpha, "target alpha (stage length ~ N^alpha)");
    cmd->add_option("--stages", pf.stages, "override stage count d");
    cmd->add_option("--branches", pf.branches, "override branch count B");
    cmd->add_option("--c1", pf.c1, "incoherence constant in B = ceil(4 c1^2 ln(5N))");
}

int cmd_gen(std::int64_t n, std::int64_t m, std::int64_t l, std::int64_t k, std::uint64_t seed,
            const std::string& db_out, const std::string& query_out,
            const std::string& positions_out) {
    SplitMix64 rng(derive_seed(seed, 0xA11));
    MatchSpec spec;
    spec.positions = draw_plants(n, m, l, rng);
    spec.flips.assign(spec.positions.size(), k);
    auto [db, query] = plant_matches(n, m, spec, seed);
    save_signal_i8(db, db_out);
    save_signal_i8(query, query_out);
    if (!positions_out.empty()) {
        std::ofstream out(positions_out, std::ios::trunc);
        out << "position\n";
        for (std::int64_t p : spec.positions)
            out << p << "\n";
    }
    std::cout << "wrote " << n << "-sample database with " << l << " planted matches\n";
    return kExitOk;
}

int cmd_sketch(const std::string& db_path, const std::string& out_path, std::int64_t m,
               std::int64_t k, MatchMode mode, std::int64_t blocks, std::uint64_t seed,
               const PlanFlags& pf) {
    const Signal db = load_signal(db_path);
    ProblemDims dims{db.length(), m, k, mode};
    dims.validate();

    SketchFileData data;
    data.n_db = db.length();
    data.m_query = m;
    data.layout = make_layout(db.length(), m, blocks);
    const auto parts = split(db, data.layout);
    for (std::int64_t b = 0; b < data.layout.block_count; ++b) {
        const StagePlan plan =
            plan_block(dims, data.layout, b, parts[static_cast<std::size_t>(b)].length(), seed,
                       pf.options());
        data.block_sketches.push_back(
            sketch_signal(parts[static_cast<std::size_t>(b)], plan, SketchKind::Database));
    }
    save_sketch_file(data, out_path);
    const std::int64_t samples = data.total_samples();
    std::cout << "samples=" << samples << " sample_gain="
              << static_cast<double>(data.n_db) / static_cast<double>(samples) << " blocks="
              << data.layout.block_count << "\n";
    return kExitOk;
}

int cmd_query(const std::string& sketch_path, const std::string& query_path, std::int64_t k,
              MatchMode mode) {
    const SketchFileData data = load_sketch_file(sketch_path);
    const Signal query = load_signal(query_path);
    if (query.length() != data.m_query)
        std::cerr << "warning: sketch was planned for query length " << data.m_query
                  << ", got " << query.length() << "; mu regime may be off\n";

    std::vector<MatchReport> reports;
    for (const auto& sk : data.block_sketches) {
        ProblemDims dims{sk.plan.n_db, query.length(), k, mode};
        dims.validate();
        reports.push_back(recover(sk, query, dims));
    }
    const MatchReport merged = merge(reports, data.layout, data.n_db, query.length());
    std::cout << "position,value\n";
    for (std::size_t i = 0; i < merged.positions.size(); ++i)
        std::cout << merged.positions[i] << "," << merged.values[i] << "\n";
    return kExitOk;
}

int cmd_bench(std::int64_t n, std::int64_t m, std::int64_t k, MatchMode mode, std::int64_t l,
              int trials, const std::string& sweep, std::uint64_t seed, double memory_budget,
              const PlanFlags& pf) {
    BenchScenario sc;
    sc.n_db = n;
    sc.m_query = m;
    sc.k_mismatch = k;
    sc.mode = mode;
    sc.l_matches = l;
    sc.trials = trials;
    sc.seed = seed;
    sc.plan_opts = pf.options();

    std::vector<double> alphas;
    if (sweep.empty()) {
        alphas.push_back(-1.0); // planner default
    } else {
        double lo = 0.0, hi = 0.0;
        int steps = 0;
        if (std::sscanf(sweep.c_str(), "%lf:%lf:%d", &lo, &hi, &steps) != 3 || steps < 2)
            throw config_error("--sweep expects lo:hi:steps with steps >= 2");
        for (int i = 0; i < steps; ++i)
            alphas.push_back(lo + (hi - lo) * i / (steps - 1));
    }

    // two resident sketches (base + trial copy), 16 bytes per complex sample
    const ProblemDims dims{n, m, k, mode};
    dims.validate();
    for (double a : alphas) {
        PlanOptions o = sc.plan_opts;
        if (a >= 0.0)
            o.alpha = a;
        const StagePlan plan = plan_stages(dims, derive_seed(seed, 0), o);
        const double bytes = 2.0 * 16.0 * static_cast<double>(plan.total_samples());
        if (bytes > memory_budget)
            throw config_error("bench point alpha=" + std::to_string(plan.alpha) +
                               " needs ~" + std::to_string(bytes / 1e9) + " GB, over budget");
    }

    std::cout << BenchRow::csv_header() << "\n";
    for (const BenchRow& row : run_bench_sweep(sc, alphas))
        std::cout << row.csv_line() << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& db_path, const std::string& query_path, std::int64_t k,
               MatchMode mode, std::int64_t blocks, std::uint64_t seed, const PlanFlags& pf) {
    const Signal db = load_signal(db_path);
    const Signal query = load_signal(query_path);
    if (query.length() == 0)
        throw invalid_input("empty query");
    ProblemDims dims{db.length(), query.length(), k, mode};
    dims.validate();

    const auto expected = oracle_positions(db, query, mode == MatchMode::Exact ? 0 : k);

    BlockLayout layout = make_layout(db.length(), query.length(), blocks);
    const auto parts = split(db, layout);
    std::vector<MatchReport> reports;
    for (std::int64_t b = 0; b < layout.block_count; ++b) {
        const StagePlan plan = plan_block(dims, layout, b, parts[static_cast<std::size_t>(b)].length(),
                                          seed, pf.options());
        const Sketch sk =
            sketch_signal(parts[static_cast<std::size_t>(b)], plan, SketchKind::Database);
        ProblemDims block_dims = dims;
        block_dims.n_db = parts[static_cast<std::size_t>(b)].length();
        reports.push_back(recover(sk, query, block_dims));
    }
    const MatchReport merged = merge(reports, layout, db.length(), query.length());

    std::set<std::int64_t> want(expected.begin(), expected.end());
    std::set<std::int64_t> got(merged.positions.begin(), merged.positions.end());
    bool same = want == got;
    for (std::int64_t p : want)
        if (!got.count(p))
            std::cout << "missing," << p << "\n";
    for (std::int64_t p : got)
        if (!want.count(p))
            std::cout << "spurious," << p << "\n";
    std::cout << (same ? "identical" : "different") << " oracle=" << want.size()
              << " sketch=" << got.size() << "\n";
    return same ? kExitOk : kExitMismatch;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sub-linear substring matching over a Fourier-domain database sketch"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed_flag;
    app.add_option("--seed", seed_flag, "RNG seed (fallback: env SPARSEMATCH_SEED, then 0)");

    // gen
    auto* gen = app.add_subcommand("gen", "synthesize a database with planted matches");
    std::int64_t g_n = 10000, g_m = 100, g_l = 5, g_k = 0;
    std::string g_db = "db.i8", g_query = "query.i8", g_pos;
    gen->add_option("--n", g_n, "database length");
    gen->add_option("--m", g_m, "query length");
    gen->add_option("--l", g_l, "number of planted matches");
    gen->add_option("--k", g_k, "symbol flips per planted match");
    gen->add_option("--db-out", g_db, "database output path");
    gen->add_option("--query-out", g_query, "query output path");
    gen->add_option("--positions-out", g_pos, "ground-truth positions CSV path");

    // sketch
    auto* sk = app.add_subcommand("sketch", "precompute and store the database sketch");
    std::string s_db, s_out = "db.rsds";
    std::int64_t s_m = 0, s_k = 0, s_blocks = 1;
    std::string s_mode = "exact";
    PlanFlags s_pf;
    sk->add_option("--db", s_db, "database signal path")->required();
    sk->add_option("--out", s_out, "sketch output path");
    sk->add_option("--m", s_m, "query length the sketch is planned for")->required();
    sk->add_option("--k", s_k, "mismatch budget K");
    sk->add_option("--mode", s_mode, "exact|approx");
    sk->add_option("--blocks", s_blocks, "number of parallel blocks G");
    add_plan_flags(sk, s_pf);

    // query
    auto* qu = app.add_subcommand("query", "answer a substring query from the sketch alone");
    std::string q_sketch, q_query, q_mode = "exact";
    std::int64_t q_k = 0;
    qu->add_option("--sketch", q_sketch, "sketch file path")->required();
    qu->add_option("--query", q_query, "query signal path")->required();
    qu->add_option("--k", q_k, "mismatch budget K");
    qu->add_option("--mode", q_mode, "exact|approx");

    // bench
    auto* be = app.add_subcommand("bench", "Monte Carlo miss-probability sweep");
    std::int64_t b_n = 100000, b_m = 316, b_k = 0, b_l = 10;
    int b_trials = 20;
    std::string b_mode = "exact", b_sweep;
    double b_budget = 4e9;
    PlanFlags b_pf;
    be->add_option("--n", b_n, "database length");
    be->add_option("--m", b_m, "query length");
    be->add_option("--k", b_k, "mismatch budget K");
    be->add_option("--mode", b_mode, "exact|approx");
    be->add_option("--l", b_l, "planted matches per trial");
    be->add_option("--trials", b_trials, "trials per sweep point");
    be->add_option("--sweep", b_sweep, "alpha sweep as lo:hi:steps");
    be->add_option("--memory-budget", b_budget, "max resident sketch bytes");
    add_plan_flags(be, b_pf);

    // verify
    auto* ve = app.add_subcommand("verify", "cross-check the sketch pipeline against the naive oracle");
    std::string v_db, v_query, v_mode = "exact";
    std::int64_t v_k = 0, v_blocks = 1;
    PlanFlags v_pf;
    ve->add_option("--db", v_db, "database signal path")->required();
    ve->add_option("--query", v_query, "query signal path")->required();
    ve->add_option("--k", v_k, "mismatch budget K");
    ve->add_option("--mode", v_mode, "exact|approx");
    ve->add_option("--blocks", v_blocks, "number of parallel blocks G");
    add_plan_flags(ve, v_pf);

    for (CLI::App* sub : {gen, sk, qu, be, ve})
        sub->fallthrough(); // lets --seed appear after the subcommand name

    CLI11_PARSE(app, argc, argv);

    try {
        const std::uint64_t seed = resolve_seed(seed_flag);
        if (*gen)
            return cmd_gen(g_n, g_m, g_l, g_k, seed, g_db, g_query, g_pos);
        if (*sk)
            return cmd_sketch(s_db, s_out, s_m, s_k, parse_mode(s_mode), s_blocks, seed, s_pf);
        if (*qu)
            return cmd_query(q_sketch, q_query, q_k, parse_mode(q_mode));
        if (*be)
            return cmd_bench(b_n, b_m, b_k, parse_mode(b_mode), b_l, b_trials, b_sweep, seed,
                             b_budget, b_pf);
        if (*ve)
            return cmd_verify(v_db, v_query, v_k, parse_mode(v_mode), v_blocks, seed, v_pf);
    } catch (const data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const invalid_input& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
