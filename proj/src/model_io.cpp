#include "miltag/model_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "miltag/error.hpp"

namespace miltag {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;
constexpr const char* kFormatName = "miltag-model";

constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::string& bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= bytes.size()) {
        const std::uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                                (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                                static_cast<unsigned char>(bytes[i + 2]);
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(kB64Alphabet[(v >> 6) & 63]);
        out.push_back(kB64Alphabet[v & 63]);
        i += 3;
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const std::uint32_t v = static_cast<unsigned char>(bytes[i]) << 16;
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out += "==";
    } else if (rest == 2) {
        const std::uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                                (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out.push_back(kB64Alphabet[(v >> 18) & 63]);
        out.push_back(kB64Alphabet[(v >> 12) & 63]);
        out.push_back(kB64Alphabet[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

int b64_value(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}

std::string base64_decode(const std::string& text) {
    std::string out;
    out.reserve(text.size() / 4 * 3);
    std::uint32_t acc = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=') break;
        const int v = b64_value(c);
        if (v < 0) {
            throw Error(Errc::ChecksumMismatch, "parameter payload is not valid base64");
        }
        acc = (acc << 6) | static_cast<std::uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((acc >> bits) & 0xFF));
        }
    }
    return out;
}

std::string tensor_bytes(const Tensor& t, bool as_float32) {
    std::string bytes;
    if (as_float32) {
        bytes.resize(t.size() * 4);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const float v = static_cast<float>(t[i]);
            std::memcpy(bytes.data() + i * 4, &v, 4);
        }
    } else {
        bytes.resize(t.size() * 8);
        std::memcpy(bytes.data(), t.data(), bytes.size());
    }
    return bytes;
}

std::string doubles_bytes(const std::vector<double>& v) {
    std::string bytes(v.size() * 8, '\0');
    std::memcpy(bytes.data(), v.data(), bytes.size());
    return bytes;
}

std::vector<double> bytes_to_doubles(const std::string& bytes, const std::string& dtype,
                                     const std::string& what) {
    const std::size_t width = dtype == "f32" ? 4 : 8;
    if (bytes.size() % width != 0) {
        throw Error(Errc::ChecksumMismatch, what + ": payload size is not a multiple of " +
                                                std::to_string(width));
    }
    std::vector<double> out(bytes.size() / width);
    if (width == 4) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            float v;
            std::memcpy(&v, bytes.data() + i * 4, 4);
            out[i] = v;
        }
    } else {
        std::memcpy(out.data(), bytes.data(), bytes.size());
    }
    return out;
}

json layer_to_json(const LayerSpec& layer) {
    json j{{"kind", layer_kind_name(layer.kind)}};
    switch (layer.kind) {
        case LayerKind::Dense:
            j["in"] = layer.in;
            j["out"] = layer.out;
            break;
        case LayerKind::Conv2d:
            j["in_ch"] = layer.in_ch;
            j["out_ch"] = layer.out_ch;
            j["kh"] = layer.kh;
            j["kw"] = layer.kw;
            break;
        case LayerKind::MaxPool2d:
            j["ph"] = layer.ph;
            j["pw"] = layer.pw;
            break;
        default:
            break;
    }
    return j;
}

LayerSpec layer_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "dense") return LayerSpec::dense(j.at("in"), j.at("out"));
    if (kind == "conv2d") {
        return LayerSpec::conv2d(j.at("in_ch"), j.at("out_ch"), j.at("kh"), j.at("kw"));
    }
    if (kind == "relu") return LayerSpec::relu();
    if (kind == "flatten") return LayerSpec::flatten();
    if (kind == "maxpool2d") return LayerSpec::maxpool2d(j.at("ph"), j.at("pw"));
    throw Error(Errc::MalformedLine, "unknown layer kind '" + kind + "'");
}

/// Digest input: the structural JSON (layers, shapes, classes) plus every
/// parameter and standardization byte, so any payload corruption shows.
std::string digest_material(const json& layers, const std::vector<std::size_t>& input_shape,
                            std::size_t n_classes,
                            const std::vector<std::string>& param_bytes,
                            const std::string& std_bytes) {
    std::string material = layers.dump();
    material += json(input_shape).dump();
    material += std::to_string(n_classes);
    for (const std::string& b : param_bytes) material += b;
    material += std_bytes;
    return material;
}

} // namespace

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

void save_model(const std::string& path, const Model& model, const ModelFileMeta& meta,
                bool as_float32) {
    json layers = json::array();
    for (const LayerSpec& layer : model.layers) layers.push_back(layer_to_json(layer));

    std::vector<std::string> param_bytes;
    json params = json::array();
    for (const Tensor& t : model.params) {
        param_bytes.push_back(tensor_bytes(t, as_float32));
        params.push_back(json{{"shape", t.shape()},
                              {"dtype", as_float32 ? "f32" : "f64"},
                              {"data", base64_encode(param_bytes.back())}});
    }

    std::string std_bytes;
    json standardization;
    if (model.standardization) {
        const std::string mean_b = doubles_bytes(model.standardization->mean);
        const std::string inv_b = doubles_bytes(model.standardization->inv_std);
        std_bytes = mean_b + inv_b;
        standardization = json{{"mean", base64_encode(mean_b)},
                               {"inv_std", base64_encode(inv_b)}};
    }

    json doc{
        {"format", kFormatName},
        {"version", kFormatVersion},
        {"input_shape", model.input_shape},
        {"n_classes", model.n_classes},
        {"class_list", meta.class_list},
        {"input_kind", meta.input_kind},
        {"feature",
         json{{"n_mels", meta.feature.n_mels},
              {"with_delta", meta.feature.with_delta},
              {"f_lo", meta.feature.f_lo},
              {"f_hi", meta.feature.f_hi}}},
        {"layers", layers},
        {"params", params},
        {"standardization", standardization},
        {"provenance", json{{"seed", meta.seed}, {"config_digest", meta.config_digest}}},
    };
    doc["digest"] = fnv1a64_hex(
        digest_material(layers, model.input_shape, model.n_classes, param_bytes, std_bytes));

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(Errc::InvalidConfig, "cannot write " + path);
    out << doc.dump(2) << "\n";
}

SavedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::MalformedLine, "cannot open model file " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(Errc::MalformedLine, path + ": " + e.what());
    }

    if (!doc.is_object() || doc.value("format", "") != kFormatName) {
        throw Error(Errc::MalformedLine, path + " is not a model file");
    }
    const int version = doc.value("version", -1);
    if (version != kFormatVersion) {
        throw Error(Errc::VersionMismatch, path + ": file version " + std::to_string(version) +
                                               ", this build reads version " +
                                               std::to_string(kFormatVersion));
    }

    SavedModel saved;
    Model& model = saved.model;
    try {
        model.input_shape = doc.at("input_shape").get<std::vector<std::size_t>>();
        model.n_classes = doc.at("n_classes").get<std::size_t>();
        for (const json& j : doc.at("layers")) model.layers.push_back(layer_from_json(j));

        std::vector<std::string> param_bytes;
        for (const json& j : doc.at("params")) {
            const std::string dtype = j.at("dtype").get<std::string>();
            if (dtype != "f32" && dtype != "f64") {
                throw Error(Errc::MalformedLine, "unknown dtype '" + dtype + "'");
            }
            if (dtype == "f32") model.inference_only = true;
            param_bytes.push_back(base64_decode(j.at("data").get<std::string>()));
            const auto shape = j.at("shape").get<std::vector<std::size_t>>();
            std::vector<double> data =
                bytes_to_doubles(param_bytes.back(), dtype, "parameter tensor");
            Tensor t(shape, std::move(data));
            std::size_t want = 1;
            for (std::size_t d : shape) want *= d;
            if (t.size() != want) {
                throw Error(Errc::ChecksumMismatch,
                            "parameter payload does not fill its declared shape");
            }
            model.params.push_back(std::move(t));
        }

        std::string std_bytes;
        if (doc.contains("standardization") && !doc.at("standardization").is_null()) {
            const json& st = doc.at("standardization");
            const std::string mean_b = base64_decode(st.at("mean").get<std::string>());
            const std::string inv_b = base64_decode(st.at("inv_std").get<std::string>());
            std_bytes = mean_b + inv_b;
            Standardization s;
            s.mean = bytes_to_doubles(mean_b, "f64", "standardization mean");
            s.inv_std = bytes_to_doubles(inv_b, "f64", "standardization inv_std");
            model.standardization = std::move(s);
        }

        const std::string digest = fnv1a64_hex(digest_material(
            doc.at("layers"), model.input_shape, model.n_classes, param_bytes, std_bytes));
        if (digest != doc.value("digest", "")) {
            throw Error(Errc::ChecksumMismatch, path + ": content digest does not match");
        }

        saved.meta.class_list = doc.at("class_list").get<std::vector<std::string>>();
        saved.meta.input_kind = doc.at("input_kind").get<std::string>();
        const json& f = doc.at("feature");
        saved.meta.feature.n_mels = f.at("n_mels").get<std::size_t>();
        saved.meta.feature.with_delta = f.at("with_delta").get<bool>();
        saved.meta.feature.f_lo = f.at("f_lo").get<double>();
        saved.meta.feature.f_hi = f.at("f_hi").get<double>();
        const json& prov = doc.at("provenance");
        saved.meta.seed = prov.at("seed").get<std::uint64_t>();
        saved.meta.config_digest = prov.value("config_digest", "");
        model.seed = saved.meta.seed;
    } catch (const json::exception& e) {
        throw Error(Errc::MalformedLine, path + ": " + e.what());
    }

    // parameter shapes must match the layer chain
    std::size_t p = 0;
    for (const LayerSpec& layer : model.layers) {
        if (!layer.parametric()) continue;
        if (p + 2 > model.params.size()) {
            throw Error(Errc::ShapeMismatch, path + ": missing parameter tensors");
        }
        const std::vector<std::size_t> want_w =
            layer.kind == LayerKind::Dense
                ? std::vector<std::size_t>{layer.out, layer.in}
                : std::vector<std::size_t>{layer.out_ch, layer.in_ch, layer.kh, layer.kw};
        const std::vector<std::size_t> want_b =
            layer.kind == LayerKind::Dense ? std::vector<std::size_t>{layer.out}
                                           : std::vector<std::size_t>{layer.out_ch};
        if (model.params[p].shape() != want_w || model.params[p + 1].shape() != want_b) {
            throw Error(Errc::ShapeMismatch,
                        path + ": parameter shapes do not match " + layer.describe());
        }
        p += 2;
    }
    if (p != model.params.size()) {
        throw Error(Errc::ShapeMismatch, path + ": extra parameter tensors");
    }
    chain_output_shape(model.layers, model.input_shape);
    return saved;
}

} // namespace miltag
