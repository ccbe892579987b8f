#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace miltag {

/// In-place radix-2 Cooley-Tukey FFT. Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a);

/// Power spectrum |X_k|^2 for k = 0..n_fft/2 of a real frame, zero-padded
/// to n_fft. frame.size() must be <= n_fft.
std::vector<double> power_spectrum(const std::vector<double>& frame, std::size_t n_fft);

} // namespace miltag
