#pragma once

#include <cstddef>
#include <vector>

namespace miltag {

/// HTK mel scale: mel(f) = 2595 * log10(1 + f / 700).
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular mel filterbank. Peaks are equally spaced on the mel scale
/// between f_lo and f_hi, peak weight 1, triangle edges interpolated
/// linearly in Hz between the neighbouring peaks. Adjacent triangles
/// therefore sum to 1 between the first and last peak.
struct MelFilterbank {
    std::size_t n_mels = 0;
    std::size_t n_fft_bins = 0; // n_fft/2 + 1
    double f_lo = 0.0;
    double f_hi = 0.0;
    std::vector<double> weights; // n_mels x n_fft_bins, row-major

    double weight(std::size_t mel, std::size_t bin) const {
        return weights[mel * n_fft_bins + bin];
    }

    /// mel_energies[m] = sum_k weights[m][k] * power[k]
    void apply(const std::vector<double>& power, std::vector<double>& mel_energies) const;
};

/// Errors: InvalidRange when the frequency bounds are out of order or the
/// FFT resolution leaves some filter with no strictly positive weight.
MelFilterbank mel_filterbank(std::size_t n_mels, std::size_t n_fft, int sample_rate,
                             double f_lo, double f_hi);

} // namespace miltag
