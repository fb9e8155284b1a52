#include "sparsematch/dft.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include <fftw3.h>

#include "sparsematch/errors.hpp"

namespace sparsematch {

namespace {

// FFTW's planner is not thread-safe; execution of a ready plan is.
// FFTW_UNALIGNED lets one plan serve any caller-owned buffer.
class PlanCache {
public:
    fftw_plan get(std::size_t n, int sign) {
        const std::uint64_t key = (static_cast<std::uint64_t>(n) << 1) | (sign == FFTW_FORWARD);
        std::lock_guard<std::mutex> lock(mu_);
        auto it = plans_.find(key);
        if (it != plans_.end())
            return it->second;
        std::vector<cplx> scratch(n);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!p)
            throw error("fftw planner failed for n=" + std::to_string(n));
        plans_.emplace(key, p);
        return p;
    }

private:
    std::mutex mu_;
    std::unordered_map<std::uint64_t, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

std::vector<cplx> run(const std::vector<cplx>& in, int sign) {
    if (in.empty())
        throw invalid_input("dft: empty input");
    std::vector<cplx> out(in);
    fftw_plan p = cache().get(in.size(), sign);
    auto* buf = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(p, buf, buf);
    return out;
}

} // namespace

std::vector<cplx> dft(const std::vector<cplx>& in) { return run(in, FFTW_FORWARD); }

std::vector<cplx> idft(const std::vector<cplx>& in) {
    auto out = run(in, FFTW_BACKWARD);
    const double inv = 1.0 / static_cast<double>(in.size());
    for (auto& v : out)
        v *= inv;
    return out;
}

std::vector<cplx> dft_direct(const std::vector<cplx>& in) {
    const std::size_t n = in.size();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(m) *
                               static_cast<double>(k) / static_cast<double>(n);
            acc += in[m] * cplx(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

} // namespace sparsematch
