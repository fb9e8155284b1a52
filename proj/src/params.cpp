#include "sparsematch/params.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "sparsematch/errors.hpp"
#include "sparsematch/rng.hpp"

namespace sparsematch {

namespace {

constexpr std::int64_t kCoprimeSearchBudget = 4'000'000; // DFS nodes
constexpr int kSmoothCandidateBudget = 400;              // padded_n candidates per plan

std::string join_i64(const std::vector<std::int64_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out.push_back(',');
        out += std::to_string(v[i]);
    }
    return out;
}

std::vector<std::int64_t> split_i64(const std::string& s) {
    std::vector<std::int64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(std::stoll(item));
    return out;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Smallest product >= n (and <= 2n) of d pairwise co-prime, near-equal
// integers. Near-equality is max <= 2*min + 4; the +4 keeps toy sizes like
// N=30 -> {2,3,5} admissible where the O(1) additive term dominates.
struct CoprimeSearch {
    std::int64_t n, cap;
    int d;
    std::int64_t budget = kCoprimeSearchBudget;
    std::vector<std::int64_t> best;
    std::int64_t best_product = 0;
    std::vector<std::int64_t> cur;

    void run() {
        const double t = std::pow(static_cast<double>(n), 1.0 / d);
        const auto lo = std::max<std::int64_t>(2, static_cast<std::int64_t>(t / 2.0));
        const auto hi = static_cast<std::int64_t>(std::ceil(t * 2.0)) + 4;
        dfs(lo, hi, 1);
    }

    void dfs(std::int64_t from, std::int64_t hi, std::int64_t product) {
        if (budget-- <= 0)
            return;
        const int remaining = d - static_cast<int>(cur.size());
        if (remaining == 0) {
            if (product >= n && product <= cap && (best_product == 0 || product < best_product)) {
                best_product = product;
                best = cur;
            }
            return;
        }
        for (std::int64_t c = from; c <= hi; ++c) {
            if (!cur.empty() && c > 2 * cur.front() + 4)
                break;
            // product * c^remaining must be able to reach n without passing cap
            double lo_reach = static_cast<double>(product) * std::pow(static_cast<double>(c), remaining);
            if (lo_reach > static_cast<double>(cap))
                break;
            double hi_reach = static_cast<double>(product) *
                              std::pow(static_cast<double>(std::min(hi, 2 * (cur.empty() ? c : cur.front()) + 4)),
                                       remaining);
            if (hi_reach < static_cast<double>(n))
                continue;
            if (best_product != 0 && lo_reach >= static_cast<double>(best_product))
                break;
            bool ok = true;
            for (std::int64_t p : cur)
                if (std::gcd(p, c) != 1) {
                    ok = false;
                    break;
                }
            if (!ok)
                continue;
            cur.push_back(c);
            dfs(c + 1, hi, product * c);
            cur.pop_back();
            if (budget <= 0)
                return;
        }
    }
};

std::optional<std::vector<std::int64_t>> find_coprime_factors(std::int64_t n, int d) {
    CoprimeSearch s;
    s.n = n;
    s.cap = 2 * n;
    s.d = d;
    s.run();
    if (s.best.empty())
        return std::nullopt;
    return s.best;
}

// All 13-smooth integers in [n, 2n], ascending, plus their factorizations.
struct SmoothNumber {
    std::int64_t value;
    std::array<int, 6> exp; // exponents of 2,3,5,7,11,13
};

constexpr std::array<std::int64_t, 6> kSmoothPrimes = {2, 3, 5, 7, 11, 13};

void enumerate_smooth(std::int64_t value, std::array<int, 6> exp, std::size_t idx,
                      std::int64_t lo, std::int64_t hi, std::vector<SmoothNumber>& out) {
    if (value >= lo)
        out.push_back({value, exp});
    if (idx >= kSmoothPrimes.size())
        return;
    for (std::size_t i = idx; i < kSmoothPrimes.size(); ++i) {
        const std::int64_t p = kSmoothPrimes[i];
        if (value > hi / p)
            continue;
        auto e = exp;
        ++e[i];
        enumerate_smooth(value * p, e, i, lo, hi, out);
    }
}

std::vector<std::int64_t> all_divisors(const SmoothNumber& s) {
    std::vector<std::int64_t> divs = {1};
    for (std::size_t i = 0; i < kSmoothPrimes.size(); ++i) {
        const std::size_t base = divs.size();
        std::int64_t pk = 1;
        for (int e = 1; e <= s.exp[i]; ++e) {
            pk *= kSmoothPrimes[i];
            for (std::size_t j = 0; j < base; ++j)
                divs.push_back(divs[j] * pk);
        }
    }
    return divs;
}

// Pick d distinct divisors of padded near padded^alpha (within sqrt(2) either
// way, so max/min <= 2) whose co-generators P_i = padded/f_i are collectively
// co-prime and pairwise as disjoint as the divisor pool allows.
std::optional<std::vector<std::int64_t>> pick_stage_divisors(const SmoothNumber& s, int d,
                                                             double alpha, double window) {
    const double target = std::pow(static_cast<double>(s.value), alpha);
    const auto lo = static_cast<std::int64_t>(std::floor(target / window));
    const auto hi = static_cast<std::int64_t>(std::ceil(target * window));
    std::vector<std::int64_t> pool;
    for (std::int64_t f : all_divisors(s))
        if (f >= lo && f <= hi && f >= 2 && f < s.value)
            pool.push_back(f);
    if (static_cast<int>(pool.size()) < d)
        return std::nullopt;
    std::sort(pool.begin(), pool.end(), [&](std::int64_t a, std::int64_t b) {
        const double da = std::abs(std::log(static_cast<double>(a)) - std::log(target));
        const double db = std::abs(std::log(static_cast<double>(b)) - std::log(target));
        if (da != db)
            return da < db;
        return a < b;
    });

    for (std::int64_t gcd_cap : {1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 128, 256}) {
        std::vector<std::int64_t> picked;
        std::int64_t overall = 0;
        for (std::int64_t f : pool) {
            const std::int64_t p = s.value / f;
            bool ok = true;
            for (std::int64_t other : picked)
                if (std::gcd(s.value / other, p) > gcd_cap) {
                    ok = false;
                    break;
                }
            if (ok && !picked.empty()) {
                // near-equality across the picked set, same slack as
                // validate_geometry
                const std::int64_t mn =
                    std::min(f, *std::min_element(picked.begin(), picked.end()));
                const std::int64_t mx =
                    std::max(f, *std::max_element(picked.begin(), picked.end()));
                if (mx > 2 * mn + 4 * (s.value / mn))
                    ok = false;
            }
            if (!ok)
                continue;
            picked.push_back(f);
            overall = overall == 0 ? p : std::gcd(overall, p);
            if (static_cast<int>(picked.size()) == d)
                break;
        }
        if (static_cast<int>(picked.size()) == d && overall == 1) {
            std::sort(picked.begin(), picked.end());
            return picked;
        }
    }
    return std::nullopt;
}

struct Geometry {
    std::int64_t padded_n;
    std::vector<std::int64_t> stage_lengths;
};

Geometry divisor_route(std::int64_t n_db, int d, double alpha) {
    std::vector<SmoothNumber> candidates;
    std::array<int, 6> zero{};
    enumerate_smooth(1, zero, 0, n_db, 2 * n_db, candidates);
    std::sort(candidates.begin(), candidates.end(),
              [](const SmoothNumber& a, const SmoothNumber& b) { return a.value < b.value; });
    // Prefer a tight sqrt(2) window around N^alpha; widen to the full
    // ratio-2 window only if no candidate fits (small N, large d).
    for (double window : {std::sqrt(2.0), 2.0}) {
        int examined = 0;
        for (const auto& s : candidates) {
            if (++examined > kSmoothCandidateBudget)
                break;
            if (auto f = pick_stage_divisors(s, d, alpha, window))
                return {s.value, std::move(*f)};
        }
    }
    throw planning_error("no padded length in [N, 2N] admits " + std::to_string(d) +
                         " stage lengths near N^" + fmt_double(alpha) + " (searched " +
                         std::to_string(std::min<std::size_t>(candidates.size(), kSmoothCandidateBudget)) +
                         " smooth candidates)");
}

Geometry coprime_route(std::int64_t n_db, int d, bool stage_len_is_cofactor) {
    auto factors = find_coprime_factors(n_db, d);
    if (!factors)
        throw planning_error("no " + std::to_string(d) +
                             "-factor pairwise co-prime factorization with padding <= 2N found "
                             "(DFS budget " + std::to_string(kCoprimeSearchBudget) + " nodes)");
    std::int64_t padded = 1;
    for (std::int64_t p : *factors)
        padded *= p;
    std::vector<std::int64_t> f;
    for (std::int64_t p : *factors)
        f.push_back(stage_len_is_cofactor ? padded / p : p);
    std::sort(f.begin(), f.end());
    return {padded, std::move(f)};
}

} // namespace

double ProblemDims::mu_for(std::int64_t length) const {
    return std::log(static_cast<double>(m_query)) / std::log(static_cast<double>(length));
}

void ProblemDims::validate() const {
    if (n_db <= 0 || m_query <= 0)
        throw config_error("dimensions must be positive");
    if (m_query > n_db)
        throw config_error("query longer than database");
    if (k_mismatch < 0)
        throw config_error("negative mismatch budget");
    if (mode == MatchMode::Exact && k_mismatch != 0)
        throw config_error("exact mode requires K = 0");
    if (mode == MatchMode::Approximate && eta() >= 1.0 / 6.0)
        throw config_error("approximate mode requires K/M < 1/6");
}

int choose_stage_count(const ProblemDims& dims, double mu) {
    dims.validate();
    if (!(mu > 0.0 && mu < 1.0))
        throw config_error("mu outside (0,1)");
    const auto interval_low = [](double m) {
        // d with m in (1/d, 1/(d-1)]; ties at m = 1/k land in the larger-d interval
        double inv = 1.0 / m;
        double r = std::round(inv);
        std::int64_t fl = (std::abs(inv - r) < 1e-12) ? static_cast<std::int64_t>(r)
                                                      : static_cast<std::int64_t>(std::floor(inv));
        return static_cast<int>(fl + 1);
    };
    const auto interval_high = [](double m) {
        // d with m in (1 - 1/(d-1), 1 - 1/d]
        double inv = 1.0 / (1.0 - m);
        double r = std::round(inv);
        if (std::abs(inv - r) < 1e-12)
            return static_cast<int>(r);
        return static_cast<int>(std::ceil(inv));
    };
    if (dims.mode == MatchMode::Exact)
        return std::max(3, mu <= 0.5 ? interval_low(mu) : interval_high(mu));
    // Approximate: d >= 8 always
    if (mu <= 0.5)
        return mu > 0.125 ? 8 : std::max(8, interval_low(mu));
    return mu < 0.875 ? 8 : std::max(8, interval_high(mu));
}

double table2_delta(int d) {
    static constexpr std::array<double, 7> kDelta = {1.000, 0.4073, 0.3237, 0.2850,
                                                     0.2616, 0.2456, 0.2336};
    if (d < 2 || d > 8)
        throw config_error("table2_delta: d outside [2, 8]");
    return kDelta[static_cast<std::size_t>(d - 2)];
}

std::int64_t StagePlan::max_stage_length() const {
    return *std::max_element(stage_lengths.begin(), stage_lengths.end());
}

std::int64_t StagePlan::min_stage_length() const {
    return *std::min_element(stage_lengths.begin(), stage_lengths.end());
}

std::int64_t StagePlan::total_samples() const {
    std::int64_t sum = 0;
    for (std::int64_t f : stage_lengths)
        sum += f;
    return sum * b_shifts;
}

void StagePlan::validate_geometry() const {
    if (d < 2 || static_cast<int>(stage_lengths.size()) != d ||
        static_cast<int>(downsample_factors.size()) != d)
        throw config_error("plan: inconsistent stage count");
    if (padded_n < n_db)
        throw config_error("plan: padded length below database length");
    std::int64_t overall_gcd = 0;
    for (int i = 0; i < d; ++i) {
        const std::int64_t f = stage_lengths[static_cast<std::size_t>(i)];
        const std::int64_t g = downsample_factors[static_cast<std::size_t>(i)];
        if (f < 2 || g < 1 || f * g != padded_n)
            throw config_error("plan: f_i * g_i != padded_n");
        overall_gcd = std::gcd(overall_gcd, g);
        for (int j = i + 1; j < d; ++j)
            if (stage_lengths[static_cast<std::size_t>(i)] == stage_lengths[static_cast<std::size_t>(j)])
                throw config_error("plan: duplicate stage length");
    }
    if (overall_gcd != 1)
        throw config_error("plan: aliasing patterns do not jointly resolve positions");
    // P_i = F + O(1) near-equality, as a bounded ratio with O(1) slack
    if (max_stage_length() > 2 * min_stage_length() + 4 * (padded_n / min_stage_length()))
        throw config_error("plan: stage lengths not near-equal");
    if (b_shifts < 1 || static_cast<int>(shifts.size()) != b_shifts)
        throw config_error("plan: shift count mismatch");
    if (shifts[0] != 0)
        throw config_error("plan: first shift must be 0");
    auto sorted = shifts;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] < 0 || sorted[i] >= padded_n)
            throw config_error("plan: shift outside [0, padded_n)");
        if (i > 0 && sorted[i] == sorted[i - 1])
            throw config_error("plan: duplicate shift");
    }
}

std::string StagePlan::canonical_text() const {
    std::map<std::string, std::string> kv;
    kv["alpha"] = fmt_double(alpha);
    kv["b_shifts"] = std::to_string(b_shifts);
    kv["block_count"] = std::to_string(block_count);
    kv["block_len"] = std::to_string(block_len);
    kv["c1"] = fmt_double(c1);
    kv["d"] = std::to_string(d);
    kv["downsample_factors"] = join_i64(downsample_factors);
    kv["n_db"] = std::to_string(n_db);
    kv["padded_n"] = std::to_string(padded_n);
    kv["seed"] = std::to_string(seed);
    kv["shifts"] = join_i64(shifts);
    kv["stage_lengths"] = join_i64(stage_lengths);
    std::string out;
    for (const auto& [k, v] : kv) {
        out += k;
        out.push_back('=');
        out += v;
        out.push_back('\n');
    }
    return out;
}

StagePlan StagePlan::parse_canonical_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw data_error("plan text: malformed line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    const auto need = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end())
            throw data_error(std::string("plan text: missing key ") + key);
        return it->second;
    };
    StagePlan p;
    p.alpha = std::stod(need("alpha"));
    p.b_shifts = std::stoi(need("b_shifts"));
    p.block_count = std::stoll(need("block_count"));
    p.block_len = std::stoll(need("block_len"));
    p.c1 = std::stod(need("c1"));
    p.d = std::stoi(need("d"));
    p.downsample_factors = split_i64(need("downsample_factors"));
    p.n_db = std::stoll(need("n_db"));
    p.padded_n = std::stoll(need("padded_n"));
    p.seed = std::stoull(need("seed"));
    p.shifts = split_i64(need("shifts"));
    p.stage_lengths = split_i64(need("stage_lengths"));
    p.validate_geometry();
    return p;
}

StagePlan plan_stages(const ProblemDims& dims, std::uint64_t seed, const PlanOptions& opt) {
    dims.validate();
    const double mu0 = dims.mu_for(dims.n_db);
    if (!(mu0 > 0.0 && mu0 < 1.0))
        throw config_error("mu outside (0,1): query and database lengths too close or degenerate");

    const int d = opt.stages ? *opt.stages : choose_stage_count(dims, mu0);
    if (d < 2)
        throw config_error("stage count must be >= 2");
    if (dims.mode == MatchMode::Approximate && d < 8)
        throw config_error("approximate mode requires d >= 8");

    Geometry geo;
    if (opt.alpha) {
        if (!(*opt.alpha > 0.0 && *opt.alpha < 1.0))
            throw config_error("alpha must be in (0,1)");
        geo = divisor_route(dims.n_db, d, *opt.alpha);
    } else if (dims.mode == MatchMode::Exact && mu0 <= 0.5) {
        // f_i = padded_n / P_i over a pairwise co-prime factorization
        geo = coprime_route(dims.n_db, d, /*stage_len_is_cofactor=*/true);
    } else if (dims.mode == MatchMode::Exact) {
        // mu > 1/2. The interval rule would set f_i = P_i with alpha = 1/d,
        // which sits at or below the 1 - mu boundary; shrink the factor count
        // until 1/d' clears it, or fall back to the cofactor construction.
        const int d_small = static_cast<int>(std::ceil(1.0 / (1.0 - mu0))) - 1;
        if (d_small >= 3)
            geo = coprime_route(dims.n_db, d_small, /*stage_len_is_cofactor=*/false);
        else
            geo = coprime_route(dims.n_db, 3, /*stage_len_is_cofactor=*/true);
    } else {
        // Approximate: d >= 8 near-equal co-prime generators do not fit below
        // astronomically large N, so build f_i as divisors of a smooth padded
        // length near N^alpha with alpha > 1 - mu.
        const double alpha_target = std::min(0.875, (1.0 - mu0) + 1.0 / 6.0);
        geo = divisor_route(dims.n_db, d, alpha_target);
    }

    StagePlan plan;
    plan.d = static_cast<int>(geo.stage_lengths.size());
    plan.n_db = dims.n_db;
    plan.padded_n = geo.padded_n;
    plan.stage_lengths = geo.stage_lengths;
    for (std::int64_t f : plan.stage_lengths)
        plan.downsample_factors.push_back(geo.padded_n / f);
    plan.alpha = std::log(static_cast<double>(plan.min_stage_length())) /
                 std::log(static_cast<double>(plan.padded_n));
    plan.c1 = opt.c1;
    plan.block_count = 1;
    plan.block_len = dims.n_db;
    plan.seed = seed;

    const auto b_formula = static_cast<std::int64_t>(
        std::ceil(4.0 * opt.c1 * opt.c1 * std::log(5.0 * static_cast<double>(plan.padded_n))));
    std::int64_t b = opt.branches ? *opt.branches : b_formula;
    b = std::min<std::int64_t>(b, plan.padded_n);
    if (b < 1)
        throw config_error("branch count must be >= 1");
    plan.b_shifts = static_cast<int>(b);

    plan.shifts.push_back(0);
    if (b == plan.padded_n) {
        for (std::int64_t s = 1; s < plan.padded_n; ++s)
            plan.shifts.push_back(s);
    } else {
        SplitMix64 rng(derive_seed(seed, 0xB));
        std::vector<char> taken(static_cast<std::size_t>(plan.padded_n), 0);
        taken[0] = 1;
        while (static_cast<std::int64_t>(plan.shifts.size()) < b) {
            const auto s = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(plan.padded_n)));
            if (taken[static_cast<std::size_t>(s)])
                continue;
            taken[static_cast<std::size_t>(s)] = 1;
            plan.shifts.push_back(s);
        }
    }

    plan.validate_geometry();

    // alpha > 1 - mu, measured against the padded length. Equality within
    // rounding is tolerated: toy sizes (N=30, M=5) land exactly on the
    // boundary and padding inside [N, 2N] cannot do better there.
    const double mu = dims.mu_for(plan.padded_n);
    if (!opt.alpha && plan.alpha < 1.0 - mu - 1e-9)
        throw planning_error("planned alpha " + fmt_double(plan.alpha) +
                             " does not exceed 1 - mu = " + fmt_double(1.0 - mu));
    return plan;
}

} // namespace sparsematch
