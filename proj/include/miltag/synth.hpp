#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "miltag/manifest.hpp"

namespace miltag {

/// Desk-scale weakly labeled corpus: 10-second 16 kHz clips of tone bursts
/// over Gaussian noise. Every positive class contributes 1-3 bursts
/// (0.5-1.5 s, class-distinct base frequency, random +/-5% detune) at random
/// offsets. Only clip-level labels go into the manifest; burst timings are
/// written to a sidecar for diagnostics and never read by training.
struct SynthConfig {
    std::size_t n_clips = 200;
    std::size_t n_classes = 3; // at most 5
    std::uint64_t seed = 1;
    double noise_db = -40.0;            // background noise RMS in dBFS
    std::vector<double> class_ratios;   // relative draw weights; empty = uniform
    double no_event_p = 0.1;            // chance a clip carries no events
    double extra_class_p = 0.0;         // chance of one extra class on event clips
    double clip_seconds = 10.0;
    double tone_amplitude = 0.25;
};

struct SynthResult {
    Manifest manifest;      // class_list "class_0".."class_{n-1}", relative paths
    std::string manifest_path;
    std::string truth_path; // sidecar with per-burst timings
};

/// Writes WAVs under <out_dir>/clips/, the manifest and the ground-truth
/// sidecar. Byte-identical output for a fixed config and seed.
/// Errors: InvalidConfig (n_clips < 4, n_classes 0 or > 5, bad ratios).
SynthResult generate_synthetic(const std::string& out_dir, const SynthConfig& cfg);

} // namespace miltag
