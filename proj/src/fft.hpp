#pragma once

// Thin FFTW wrapper for the library's internal transforms.

#include <complex>
#include <vector>

namespace zpflab::detail {

enum class FftSign { forward = -1, backward = +1 };

// Unnormalized in-place DFT: out[k] = sum_n in[n] exp(sign 2 pi i n k / N).
void fft_inplace(std::vector<std::complex<double>>& data, FftSign sign);

std::size_t next_pow2(std::size_t n);

}  // namespace zpflab::detail
