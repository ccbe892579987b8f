#include "miltag/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "miltag/error.hpp"
#include "miltag/rng.hpp"
#include "miltag/wav.hpp"

namespace miltag {

using nlohmann::json;

namespace {

// well separated on the mel axis
constexpr double kBaseFreqs[5] = {440.0, 1000.0, 1800.0, 2800.0, 3900.0};
constexpr double kPi = 3.14159265358979323846;

struct Burst {
    std::size_t cls;
    double onset_s;
    double dur_s;
    double freq_hz;
};

void add_burst(std::vector<double>& samples, const Burst& burst, double amplitude,
               int sample_rate) {
    const std::size_t start = static_cast<std::size_t>(burst.onset_s * sample_rate);
    const std::size_t len = static_cast<std::size_t>(burst.dur_s * sample_rate);
    const std::size_t ramp = sample_rate / 100; // 10 ms fade against clicks
    for (std::size_t i = 0; i < len && start + i < samples.size(); ++i) {
        double env = 1.0;
        if (i < ramp) env = static_cast<double>(i) / ramp;
        const std::size_t from_end = len - 1 - i;
        if (from_end < ramp) env = std::min(env, static_cast<double>(from_end) / ramp);
        const double t = static_cast<double>(i) / sample_rate;
        samples[start + i] += amplitude * env * std::sin(2.0 * kPi * burst.freq_hz * t);
    }
}

} // namespace

SynthResult generate_synthetic(const std::string& out_dir, const SynthConfig& cfg) {
    if (cfg.n_clips < 4) throw Error(Errc::InvalidConfig, "need at least 4 clips");
    if (cfg.n_classes == 0 || cfg.n_classes > 5) {
        throw Error(Errc::InvalidConfig, "n_classes must be between 1 and 5");
    }
    std::vector<double> ratios = cfg.class_ratios;
    if (ratios.empty()) ratios.assign(cfg.n_classes, 1.0);
    if (ratios.size() != cfg.n_classes) {
        throw Error(Errc::InvalidConfig, "class_ratios length must equal n_classes");
    }
    double ratio_sum = 0.0;
    for (double r : ratios) {
        if (!(r > 0.0)) throw Error(Errc::InvalidConfig, "class ratios must be positive");
        ratio_sum += r;
    }
    if (!(cfg.clip_seconds >= 1.0)) {
        throw Error(Errc::InvalidConfig, "clips must be at least one second long");
    }

    namespace fs = std::filesystem;
    const fs::path root(out_dir);
    fs::create_directories(root / "clips");

    Rng rng(cfg.seed);
    const double noise_sigma = std::pow(10.0, cfg.noise_db / 20.0);
    const std::size_t n_samples =
        static_cast<std::size_t>(cfg.clip_seconds * kSampleRate);

    SynthResult result;
    for (std::size_t c = 0; c < cfg.n_classes; ++c) {
        result.manifest.class_list.push_back("class_" + std::to_string(c));
    }

    std::ofstream truth(root / "truth.jsonl", std::ios::trunc);

    for (std::size_t i = 0; i < cfg.n_clips; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "clip_%04zu", i);

        std::vector<double> samples(n_samples);
        for (double& s : samples) s = noise_sigma * rng.normal();

        // label draw: maybe nothing, else a primary class from the ratio
        // distribution plus at most one extra class
        std::vector<int> labels(cfg.n_classes, 0);
        if (rng.uniform() >= cfg.no_event_p) {
            double pick = rng.uniform() * ratio_sum;
            std::size_t primary = cfg.n_classes - 1;
            for (std::size_t c = 0; c < cfg.n_classes; ++c) {
                if (pick < ratios[c]) {
                    primary = c;
                    break;
                }
                pick -= ratios[c];
            }
            labels[primary] = 1;
            if (cfg.n_classes > 1 && rng.uniform() < cfg.extra_class_p) {
                std::size_t extra = static_cast<std::size_t>(rng.below(cfg.n_classes - 1));
                if (extra >= primary) ++extra;
                labels[extra] = 1;
            }
        }

        std::vector<Burst> bursts;
        for (std::size_t c = 0; c < cfg.n_classes; ++c) {
            if (!labels[c]) continue;
            const std::size_t n_bursts = 1 + rng.below(3);
            for (std::size_t b = 0; b < n_bursts; ++b) {
                Burst burst;
                burst.cls = c;
                burst.dur_s = rng.uniform(0.5, 1.5);
                burst.onset_s = rng.uniform(0.0, cfg.clip_seconds - burst.dur_s);
                burst.freq_hz = kBaseFreqs[c] * rng.uniform(0.95, 1.05);
                add_burst(samples, burst, cfg.tone_amplitude, kSampleRate);
                bursts.push_back(burst);
            }
        }

        const std::string wav_rel = std::string("clips/") + name + ".wav";
        write_wav((root / wav_rel).string(), samples, kSampleRate);

        ManifestRecord record;
        record.id = name;
        record.path = wav_rel;
        for (std::size_t c = 0; c < cfg.n_classes; ++c) {
            if (labels[c]) record.labels.push_back(result.manifest.class_list[c]);
        }
        result.manifest.records.push_back(record);

        json events = json::array();
        for (const Burst& burst : bursts) {
            events.push_back(json{{"label", result.manifest.class_list[burst.cls]},
                                  {"onset_s", burst.onset_s},
                                  {"dur_s", burst.dur_s},
                                  {"freq_hz", burst.freq_hz}});
        }
        truth << json{{"id", name}, {"events", events}}.dump() << "\n";
    }

    result.manifest_path = (root / "manifest.jsonl").string();
    result.truth_path = (root / "truth.jsonl").string();
    write_manifest(result.manifest_path, result.manifest);

    // re-read so record paths are resolved like any other manifest
    result.manifest = parse_manifest(result.manifest_path);
    return result;
}

} // namespace miltag
