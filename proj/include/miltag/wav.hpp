#pragma once

#include <string>
#include <vector>

namespace miltag {

/// A decoded audio clip: mono samples normalized to [-1, 1].
struct AudioClip {
    std::string id;
    std::vector<double> samples;
    int sample_rate = 0;

    double duration_s() const {
        return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
    }
};

inline constexpr int kSampleRate = 16000;

/// Reads a RIFF/WAVE file (PCM 16-bit or IEEE float 32-bit, any channel
/// count). Multi-channel input is averaged to mono. The clip id is the file
/// name without extension.
///
/// Errors: UnsupportedSampleRate (anything but 16 kHz), MalformedWav,
/// UnsupportedEncoding (non-PCM/non-float codecs).
AudioClip load_wav(const std::string& path);

/// Writes mono 16-bit PCM. Samples are clamped to [-1, 1] before
/// quantization: round(s * 32767).
void write_wav(const std::string& path, const std::vector<double>& samples, int sample_rate);

} // namespace miltag
