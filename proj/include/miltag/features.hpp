#pragma once

#include <cstddef>
#include <vector>

#include "miltag/mel.hpp"
#include "miltag/tensor.hpp"
#include "miltag/wav.hpp"

namespace miltag {

/// Framing is fixed: 25 ms windows (400 samples) with 10 ms shift (160
/// samples), 512-point FFT, Hann window. One instance covers one second of
/// audio, so frames per instance = floor((16000 - 400) / 160) + 1 = 98.
inline constexpr std::size_t kFrameLen = 400;
inline constexpr std::size_t kFrameHop = 160;
inline constexpr std::size_t kNFft = 512;
inline constexpr std::size_t kFramesPerInstance = (kSampleRate - kFrameLen) / kFrameHop + 1;
inline constexpr double kLogFloor = 1e-10;

struct FeatureConfig {
    std::size_t n_mels = 64;
    bool with_delta = true;
    double f_lo = 0.0;
    double f_hi = 8000.0;

    std::size_t channels() const { return with_delta ? 2 : 1; }
    std::size_t flat_dim() const { return n_mels * kFramesPerInstance * channels(); }
};

/// 128-band configuration for the embedding path. No delta channel; the low
/// cutoff is raised to 300 Hz because a 512-point FFT at 16 kHz cannot
/// resolve 128 mel bands starting from 0 Hz (the lowest band would cover no
/// FFT bin).
FeatureConfig embedding_feature_config();

/// One 1-second instance: log-mel values, optionally with a delta channel.
struct LogMelInstance {
    std::size_t n_mels = 0;
    std::size_t n_frames = 0;
    std::size_t channels = 1;
    std::vector<double> values; // mel x frame x channel, row-major

    double at(std::size_t m, std::size_t t, std::size_t c) const {
        return values[(m * n_frames + t) * channels + c];
    }
    double& at(std::size_t m, std::size_t t, std::size_t c) {
        return values[(m * n_frames + t) * channels + c];
    }

    /// Rank-1 tensor in storage order, the dense-model input layout.
    Tensor flatten() const;

    /// Rank-3 tensor (channel, mel, frame), the conv-model input layout.
    Tensor to_conv_tensor() const;
};

/// Splits the clip into non-overlapping 1-second segments and computes a
/// log-mel (+ optional delta) instance per segment. A trailing remainder of
/// at least 0.5 s is zero-padded to a full second; shorter remainders are
/// dropped. Deterministic: identical clip and config give bit-identical
/// output.
///
/// Errors: ClipTooShort (< 0.5 s), InvalidConfig (n_mels not 64 or 128,
/// wrong sample rate, non-finite samples).
std::vector<LogMelInstance> extract_instances(const AudioClip& clip, const FeatureConfig& cfg);

/// Log-mel (+ delta) for exactly one 1-second segment of samples
/// (segment.size() == 16000). Used by extract_instances and the streaming
/// path; both produce bit-identical values for the same samples.
LogMelInstance segment_features(const std::vector<double>& segment, const FeatureConfig& cfg,
                                const MelFilterbank& fb);

} // namespace miltag
