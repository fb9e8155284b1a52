#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace sparsematch {

using cplx = std::complex<double>;

// Length-n transforms with the convention: forward kernel e^{-j2pi nk/N},
// inverse carries the 1/N factor. Backed by FFTW with a process-wide plan
// cache; safe to call from multiple threads.
std::vector<cplx> dft(const std::vector<cplx>& in);
std::vector<cplx> idft(const std::vector<cplx>& in);

// O(n^2) reference transform, same convention. Test oracle.
std::vector<cplx> dft_direct(const std::vector<cplx>& in);

} // namespace sparsematch
