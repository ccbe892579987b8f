#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "miltag/features.hpp"
#include "miltag/nn.hpp"

namespace miltag {

/// Everything a model file carries beyond the network itself, so a saved
/// model is loadable without external context.
struct ModelFileMeta {
    std::string input_kind = "logmel"; // "logmel" or "embedding"
    FeatureConfig feature;             // how to featurize audio when input_kind == "logmel"
    std::vector<std::string> class_list;
    std::uint64_t seed = 0;
    std::string config_digest; // digest of the training configuration
};

struct SavedModel {
    Model model;
    ModelFileMeta meta;
};

/// JSON envelope; parameters are base64 of the raw little-endian float
/// bytes, 64-bit by default. Saving with as_float32 halves the file and
/// marks the model inference-only. The envelope carries an fnv1a-64 digest
/// of the structure and parameter bytes.
void save_model(const std::string& path, const Model& model, const ModelFileMeta& meta,
                bool as_float32 = false);

/// Errors: VersionMismatch (checked before anything else is read),
/// ChecksumMismatch (digest disagrees or the payload fails to decode),
/// MalformedLine (not a model file at all).
SavedModel load_model(const std::string& path);

std::string fnv1a64_hex(const std::string& bytes);

} // namespace miltag
