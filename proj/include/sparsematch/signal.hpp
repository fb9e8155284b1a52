#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sparsematch {

// A real-valued signal. Binary (+1/-1) signals are the primary alphabet;
// general reals are allowed as a container (binary_tag distinguishes them).
struct Signal {
    std::vector<double> samples;
    bool binary_tag = false;

    std::int64_t length() const { return static_cast<std::int64_t>(samples.size()); }

    static Signal binary(std::vector<double> s);
    void check_binary(const char* what) const;
};

// Where to plant copies of the query in a synthetic database, and how many
// symbol flips each copy carries.
struct MatchSpec {
    std::vector<std::int64_t> positions; // sorted, pairwise non-overlapping windows
    std::vector<std::int64_t> flips;     // same length as positions, each <= K

    void validate(std::int64_t n, std::int64_t m) const;
};

// r[m] = sum_{i=0}^{M-1} x[m+i] * y[i], m in [0, N-M]. Linear correlation;
// exact integer arithmetic for +-1 inputs (doubles are exact there).
std::vector<double> cross_correlate(const Signal& x, const Signal& y);

// y'[0] = y[0]; y'[pad_to - n] = y[n] for 1 <= n < len(y); zeros elsewhere.
// Conjugation is the identity for real signals.
Signal reverse_conjugate(const Signal& y, std::int64_t pad_to);

// i.i.d. +-1 database with the (possibly flipped) query written at each
// position of spec. Returns {database, query}.
std::pair<Signal, Signal> plant_matches(std::int64_t n, std::int64_t m,
                                        const MatchSpec& spec, std::uint64_t seed);

std::int64_t hamming_distance(const Signal& a, const Signal& b);

// Random +-1 signal, deterministic per seed.
Signal random_binary(std::int64_t n, std::uint64_t seed);

// Import/export: raw little-endian signed 8-bit samples, or newline-free
// ASCII of '+'/'-' characters. load_signal() sniffs the format.
Signal load_signal(const std::string& path);
void save_signal_i8(const Signal& s, const std::string& path);
void save_signal_ascii(const Signal& s, const std::string& path);

} // namespace sparsematch
