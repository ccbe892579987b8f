#include "miltag/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "miltag/error.hpp"

namespace miltag {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatIeeeFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void append_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void append_u16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

} // namespace

AudioClip load_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::MalformedWav, "cannot open " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());

    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
        std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
        throw Error(Errc::MalformedWav, path + " is not a RIFF/WAVE file");
    }

    std::uint16_t format = 0;
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint16_t bits = 0;
    bool have_fmt = false;
    const unsigned char* data = nullptr;
    std::size_t data_len = 0;

    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* hdr = bytes.data() + pos;
        std::uint32_t chunk_len = read_u32(hdr + 4);
        pos += 8;
        if (pos + chunk_len > bytes.size()) {
            throw Error(Errc::MalformedWav, path + ": chunk extends past end of file");
        }
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (chunk_len < 16) throw Error(Errc::MalformedWav, path + ": fmt chunk too short");
            const unsigned char* f = bytes.data() + pos;
            format = read_u16(f);
            channels = read_u16(f + 2);
            sample_rate = read_u32(f + 4);
            bits = read_u16(f + 14);
            if (format == kFormatExtensible && chunk_len >= 40) {
                // sub-format GUID starts with the effective format code
                format = read_u16(f + 24);
            }
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            data = bytes.data() + pos;
            data_len = chunk_len;
        }
        pos += chunk_len + (chunk_len & 1); // chunks are word-aligned
    }

    if (!have_fmt || data == nullptr) {
        throw Error(Errc::MalformedWav, path + ": missing fmt or data chunk");
    }
    if (channels == 0) throw Error(Errc::MalformedWav, path + ": zero channels");
    if (format != kFormatPcm && format != kFormatIeeeFloat) {
        throw Error(Errc::UnsupportedEncoding,
                    path + ": format code " + std::to_string(format) + " (need PCM or float)");
    }
    const bool is_float = format == kFormatIeeeFloat;
    if ((is_float && bits != 32) || (!is_float && bits != 16)) {
        throw Error(Errc::UnsupportedEncoding,
                    path + ": " + std::to_string(bits) + "-bit " +
                        (is_float ? "float" : "PCM") + " is not supported");
    }
    if (sample_rate != kSampleRate) {
        throw Error(Errc::UnsupportedSampleRate,
                    path + ": sample rate " + std::to_string(sample_rate) + " Hz, expected " +
                        std::to_string(kSampleRate) + " Hz");
    }

    const std::size_t bytes_per_sample = bits / 8;
    const std::size_t frame_bytes = bytes_per_sample * channels;
    const std::size_t n_frames = data_len / frame_bytes;
    if (n_frames == 0) throw Error(Errc::MalformedWav, path + ": empty data chunk");

    AudioClip clip;
    clip.id = std::filesystem::path(path).stem().string();
    clip.sample_rate = static_cast<int>(sample_rate);
    clip.samples.resize(n_frames);

    for (std::size_t i = 0; i < n_frames; ++i) {
        double acc = 0.0;
        const unsigned char* frame = data + i * frame_bytes;
        for (std::uint16_t c = 0; c < channels; ++c) {
            const unsigned char* s = frame + c * bytes_per_sample;
            if (is_float) {
                std::uint32_t u = read_u32(s);
                float v;
                std::memcpy(&v, &u, 4);
                if (!std::isfinite(v)) {
                    throw Error(Errc::MalformedWav, path + ": non-finite sample");
                }
                acc += v;
            } else {
                std::int16_t v = static_cast<std::int16_t>(read_u16(s));
                acc += static_cast<double>(v) / 32768.0;
            }
        }
        clip.samples[i] = acc / channels;
    }
    return clip;
}

void write_wav(const std::string& path, const std::vector<double>& samples, int sample_rate) {
    const std::uint32_t data_len = static_cast<std::uint32_t>(samples.size() * 2);
    std::string out;
    out.reserve(44 + data_len);
    out += "RIFF";
    append_u32(out, 36 + data_len);
    out += "WAVE";
    out += "fmt ";
    append_u32(out, 16);
    append_u16(out, kFormatPcm);
    append_u16(out, 1); // mono
    append_u32(out, static_cast<std::uint32_t>(sample_rate));
    append_u32(out, static_cast<std::uint32_t>(sample_rate) * 2);
    append_u16(out, 2);  // block align
    append_u16(out, 16); // bits
    out += "data";
    append_u32(out, data_len);
    for (double s : samples) {
        double clamped = std::clamp(s, -1.0, 1.0);
        auto q = static_cast<std::int16_t>(std::lround(clamped * 32767.0));
        append_u16(out, static_cast<std::uint16_t>(q));
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::InvalidConfig, "cannot write " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

} // namespace miltag
