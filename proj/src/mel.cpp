#include "miltag/mel.hpp"

#include <cmath>
#include <string>

#include "miltag/error.hpp"

namespace miltag {

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

void MelFilterbank::apply(const std::vector<double>& power,
                          std::vector<double>& mel_energies) const {
    mel_energies.assign(n_mels, 0.0);
    for (std::size_t m = 0; m < n_mels; ++m) {
        const double* row = weights.data() + m * n_fft_bins;
        double acc = 0.0;
        for (std::size_t k = 0; k < n_fft_bins; ++k) acc += row[k] * power[k];
        mel_energies[m] = acc;
    }
}

MelFilterbank mel_filterbank(std::size_t n_mels, std::size_t n_fft, int sample_rate,
                             double f_lo, double f_hi) {
    if (n_mels < 2) throw Error(Errc::InvalidConfig, "need at least 2 mel bands");
    if (!(0.0 <= f_lo && f_lo < f_hi && f_hi <= sample_rate / 2.0)) {
        throw Error(Errc::InvalidRange,
                    "need 0 <= f_lo < f_hi <= sample_rate/2, got f_lo=" + std::to_string(f_lo) +
                        " f_hi=" + std::to_string(f_hi));
    }

    MelFilterbank fb;
    fb.n_mels = n_mels;
    fb.n_fft_bins = n_fft / 2 + 1;
    fb.f_lo = f_lo;
    fb.f_hi = f_hi;
    fb.weights.assign(n_mels * fb.n_fft_bins, 0.0);

    // n_mels + 2 breakpoints equally spaced in mel; filter m spans
    // (edge[m], edge[m+2]) with its peak at edge[m+1]
    const double mel_lo = hz_to_mel(f_lo);
    const double mel_hi = hz_to_mel(f_hi);
    std::vector<double> edges_hz(n_mels + 2);
    for (std::size_t i = 0; i < edges_hz.size(); ++i) {
        const double mel = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                        static_cast<double>(n_mels + 1);
        edges_hz[i] = mel_to_hz(mel);
    }

    const double hz_per_bin = static_cast<double>(sample_rate) / static_cast<double>(n_fft);
    for (std::size_t m = 0; m < n_mels; ++m) {
        const double left = edges_hz[m];
        const double center = edges_hz[m + 1];
        const double right = edges_hz[m + 2];
        bool any_positive = false;
        for (std::size_t k = 0; k < fb.n_fft_bins; ++k) {
            const double f = hz_per_bin * static_cast<double>(k);
            double w = 0.0;
            if (f > left && f < right) {
                w = f <= center ? (f - left) / (center - left) : (right - f) / (right - center);
            }
            if (w > 0.0) any_positive = true;
            fb.weights[m * fb.n_fft_bins + k] = w;
        }
        if (!any_positive) {
            throw Error(Errc::InvalidRange,
                        "mel band " + std::to_string(m) + " (" + std::to_string(left) + "-" +
                            std::to_string(right) +
                            " Hz) covers no FFT bin; raise f_lo or use fewer bands");
        }
    }
    return fb;
}

} // namespace miltag
