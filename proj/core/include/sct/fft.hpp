#pragma once

#include <complex>
#include <vector>

namespace sct {

/// In-place iterative radix-2 FFT. Length must be a power of two; inverse
/// applies the 1/n scale.
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse);

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

} // namespace sct
