#include "sparsematch/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "sparsematch/errors.hpp"
#include "sparsematch/rng.hpp"

namespace sparsematch {

Signal Signal::binary(std::vector<double> s) {
    Signal out;
    out.samples = std::move(s);
    out.binary_tag = true;
    out.check_binary("Signal::binary");
    return out;
}

void Signal::check_binary(const char* what) const {
    if (!binary_tag)
        throw invalid_input(std::string(what) + ": signal is not binary-tagged");
    for (double v : samples)
        if (v != 1.0 && v != -1.0)
            throw invalid_input(std::string(what) + ": sample outside {+1,-1}");
}

void MatchSpec::validate(std::int64_t n, std::int64_t m) const {
    if (flips.size() != positions.size())
        throw invalid_input("MatchSpec: positions/flips size mismatch");
    std::int64_t prev_end = -1;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        std::int64_t p = positions[i];
        if (i > 0 && p <= positions[i - 1])
            throw invalid_input("MatchSpec: positions must be strictly increasing");
        if (p < 0 || p > n - m)
            throw invalid_input("MatchSpec: position outside [0, N-M]");
        if (p < prev_end)
            throw invalid_input("MatchSpec: overlapping planted windows");
        if (flips[i] < 0 || flips[i] > m)
            throw invalid_input("MatchSpec: flip count outside [0, M]");
        prev_end = p + m;
    }
}

std::vector<double> cross_correlate(const Signal& x, const Signal& y) {
    const std::int64_t n = x.length();
    const std::int64_t m = y.length();
    if (m == 0)
        throw invalid_input("cross_correlate: empty query");
    if (m > n)
        throw invalid_input("cross_correlate: query longer than database");
    std::vector<double> r(static_cast<std::size_t>(n - m + 1));
    for (std::int64_t pos = 0; pos + m <= n; ++pos) {
        double acc = 0.0;
        const double* xs = x.samples.data() + pos;
        const double* ys = y.samples.data();
        for (std::int64_t i = 0; i < m; ++i)
            acc += xs[i] * ys[i];
        r[static_cast<std::size_t>(pos)] = acc;
    }
    return r;
}

Signal reverse_conjugate(const Signal& y, std::int64_t pad_to) {
    const std::int64_t m = y.length();
    if (m > pad_to)
        throw invalid_input("reverse_conjugate: pad_to shorter than query");
    Signal out;
    out.samples.assign(static_cast<std::size_t>(pad_to), 0.0);
    out.samples[0] = y.samples[0];
    for (std::int64_t i = 1; i < m; ++i)
        out.samples[static_cast<std::size_t>(pad_to - i)] = y.samples[static_cast<std::size_t>(i)];
    return out;
}

Signal random_binary(std::int64_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    Signal s;
    s.binary_tag = true;
    s.samples.resize(static_cast<std::size_t>(n));
    // 64 signs per draw.
    std::uint64_t bits = 0;
    int left = 0;
    for (auto& v : s.samples) {
        if (left == 0) {
            bits = rng.next();
            left = 64;
        }
        v = (bits & 1) ? 1.0 : -1.0;
        bits >>= 1;
        --left;
    }
    return s;
}

std::pair<Signal, Signal> plant_matches(std::int64_t n, std::int64_t m,
                                        const MatchSpec& spec, std::uint64_t seed) {
    spec.validate(n, m);
    Signal db = random_binary(n, derive_seed(seed, 1));
    Signal query = random_binary(m, derive_seed(seed, 2));
    SplitMix64 flip_rng(derive_seed(seed, 3));
    for (std::size_t i = 0; i < spec.positions.size(); ++i) {
        const std::int64_t pos = spec.positions[i];
        for (std::int64_t j = 0; j < m; ++j)
            db.samples[static_cast<std::size_t>(pos + j)] = query.samples[static_cast<std::size_t>(j)];
        // Flip distinct coordinates of this copy.
        std::int64_t want = spec.flips[i];
        std::vector<char> used(static_cast<std::size_t>(m), 0);
        while (want > 0) {
            std::int64_t j = static_cast<std::int64_t>(flip_rng.below(static_cast<std::uint64_t>(m)));
            if (used[static_cast<std::size_t>(j)])
                continue;
            used[static_cast<std::size_t>(j)] = 1;
            db.samples[static_cast<std::size_t>(pos + j)] *= -1.0;
            --want;
        }
    }
    return {std::move(db), std::move(query)};
}

std::int64_t hamming_distance(const Signal& a, const Signal& b) {
    if (a.length() != b.length())
        throw invalid_input("hamming_distance: length mismatch");
    a.check_binary("hamming_distance");
    b.check_binary("hamming_distance");
    std::int64_t d = 0;
    for (std::size_t i = 0; i < a.samples.size(); ++i)
        d += a.samples[i] != b.samples[i];
    return d;
}

Signal load_signal(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw data_error("cannot open signal file: " + path);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.empty())
        throw invalid_input("empty signal file: " + path);

    bool ascii = true;
    for (char c : bytes)
        if (c != '+' && c != '-') {
            ascii = false;
            break;
        }

    Signal s;
    s.binary_tag = true;
    s.samples.reserve(bytes.size());
    if (ascii) {
        for (char c : bytes)
            s.samples.push_back(c == '+' ? 1.0 : -1.0);
    } else {
        for (char c : bytes) {
            const auto v = static_cast<signed char>(c);
            if (v != 1 && v != -1)
                throw data_error("signal file is neither +/- ASCII nor int8 +-1: " + path);
            s.samples.push_back(static_cast<double>(v));
        }
    }
    return s;
}

void save_signal_i8(const Signal& s, const std::string& path) {
    s.check_binary("save_signal_i8");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw data_error("cannot write signal file: " + path);
    std::vector<char> bytes;
    bytes.reserve(s.samples.size());
    for (double v : s.samples)
        bytes.push_back(static_cast<char>(v > 0 ? 1 : -1));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void save_signal_ascii(const Signal& s, const std::string& path) {
    s.check_binary("save_signal_ascii");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw data_error("cannot write signal file: " + path);
    std::string text;
    text.reserve(s.samples.size());
    for (double v : s.samples)
        text.push_back(v > 0 ? '+' : '-');
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

} // namespace sparsematch
