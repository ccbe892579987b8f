#include "miltag/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "miltag/error.hpp"
#include "miltag/fft.hpp"

namespace miltag {

FeatureConfig embedding_feature_config() {
    FeatureConfig cfg;
    cfg.n_mels = 128;
    cfg.with_delta = false;
    cfg.f_lo = 300.0;
    cfg.f_hi = 8000.0;
    return cfg;
}

Tensor LogMelInstance::flatten() const {
    return Tensor({values.size()}, values);
}

Tensor LogMelInstance::to_conv_tensor() const {
    Tensor t({channels, n_mels, n_frames});
    for (std::size_t c = 0; c < channels; ++c)
        for (std::size_t m = 0; m < n_mels; ++m)
            for (std::size_t f = 0; f < n_frames; ++f) t.at(c, m, f) = at(m, f, c);
    return t;
}

namespace {

std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    const double pi = 3.14159265358979323846;
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(n));
    }
    return w;
}

} // namespace

LogMelInstance segment_features(const std::vector<double>& segment, const FeatureConfig& cfg,
                                const MelFilterbank& fb) {
    if (segment.size() != static_cast<std::size_t>(kSampleRate)) {
        throw Error(Errc::InvalidConfig, "segment must hold exactly one second of samples");
    }
    static const std::vector<double> window = hann_window(kFrameLen);

    LogMelInstance inst;
    inst.n_mels = cfg.n_mels;
    inst.n_frames = kFramesPerInstance;
    inst.channels = cfg.channels();
    inst.values.resize(inst.n_mels * inst.n_frames * inst.channels);

    std::vector<double> frame(kFrameLen);
    std::vector<double> mel_energy;
    for (std::size_t t = 0; t < kFramesPerInstance; ++t) {
        const std::size_t start = t * kFrameHop;
        for (std::size_t i = 0; i < kFrameLen; ++i) frame[i] = segment[start + i] * window[i];
        const std::vector<double> power = power_spectrum(frame, kNFft);
        fb.apply(power, mel_energy);
        for (std::size_t m = 0; m < cfg.n_mels; ++m) {
            inst.at(m, t, 0) = std::log(std::max(mel_energy[m], kLogFloor));
        }
    }

    if (cfg.with_delta) {
        // symmetric first difference over time, edges replicated
        const std::size_t T = inst.n_frames;
        for (std::size_t m = 0; m < cfg.n_mels; ++m) {
            for (std::size_t t = 0; t < T; ++t) {
                const double next = inst.at(m, t + 1 < T ? t + 1 : T - 1, 0);
                const double prev = inst.at(m, t > 0 ? t - 1 : 0, 0);
                inst.at(m, t, 1) = 0.5 * (next - prev);
            }
        }
    }
    return inst;
}

std::vector<LogMelInstance> extract_instances(const AudioClip& clip, const FeatureConfig& cfg) {
    if (cfg.n_mels != 64 && cfg.n_mels != 128) {
        throw Error(Errc::InvalidConfig,
                    "n_mels must be 64 or 128, got " + std::to_string(cfg.n_mels));
    }
    if (clip.sample_rate != kSampleRate) {
        throw Error(Errc::InvalidConfig, "clip " + clip.id + " is not 16 kHz");
    }
    for (double s : clip.samples) {
        if (!std::isfinite(s)) {
            throw Error(Errc::InvalidConfig, "clip " + clip.id + " has non-finite samples");
        }
    }

    const std::size_t seg_len = kSampleRate;
    const std::size_t half = seg_len / 2;
    const std::size_t n = clip.samples.size();
    if (n < half) {
        throw Error(Errc::ClipTooShort, "clip " + clip.id + " is shorter than 0.5 s");
    }

    std::size_t n_segments = n / seg_len;
    const std::size_t remainder = n - n_segments * seg_len;
    const bool pad_last = remainder >= half;
    if (pad_last) ++n_segments;

    const MelFilterbank fb =
        mel_filterbank(cfg.n_mels, kNFft, clip.sample_rate, cfg.f_lo, cfg.f_hi);

    std::vector<LogMelInstance> instances;
    instances.reserve(n_segments);
    std::vector<double> segment(seg_len);
    for (std::size_t s = 0; s < n_segments; ++s) {
        const std::size_t start = s * seg_len;
        const std::size_t avail = std::min(seg_len, n - start);
        for (std::size_t i = 0; i < seg_len; ++i) {
            segment[i] = i < avail ? clip.samples[start + i] : 0.0;
        }
        instances.push_back(segment_features(segment, cfg, fb));
    }
    return instances;
}

} // namespace miltag
