#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "miltag/embedding_io.hpp"
#include "miltag/manifest.hpp"
#include "miltag/mil.hpp"
#include "miltag/nn.hpp"

namespace miltag {

/// Architecture of the frame-wise embedding model: a backbone ending in a
/// hidden layer of embed_dim units, then a classifier head. When backbone
/// is empty a dense stack is generated from `hidden` + embed_dim.
struct EmbeddingModelConfig {
    std::vector<LayerSpec> backbone;  // optional explicit stack (must end at embed_dim)
    std::vector<std::size_t> hidden;  // widths before the embedding layer
    std::size_t embed_dim = 512;
};

/// Layer chain for the embedding model over a flat input. The penultimate
/// activation has exactly embed_dim entries.
std::vector<LayerSpec> embedding_model_spec(std::size_t input_dim,
                                            const EmbeddingModelConfig& cfg,
                                            std::size_t n_classes);

/// One single-instance bag per (clip, instance); every instance inherits
/// its clip's full label vector.
std::vector<Bag> instance_level_bags(const std::vector<Bag>& clip_bags);

/// Frame-wise training on weak clip labels: each instance is trained
/// against its clip's label vector, and checkpoints are selected by
/// clip-level validation where instance predictions are pooled with max.
/// Errors: EmptyDataset, DivergedLoss.
TrainResult train_embedding_model(const std::vector<Bag>& train_clips,
                                  const std::vector<Bag>& val_clips,
                                  const EmbeddingModelConfig& cfg, TrainConfig train_cfg);

/// Penultimate-layer activations for every instance of every clip, in input
/// order. Errors: TooShallow, ShapeMismatch.
EmbeddingSet extract_embeddings(const Model& model, const std::vector<Bag>& clip_bags);

/// Reads an externally produced embedding file (MILE format) and marks the
/// set external. Errors: BadMagic, DimMismatch, TruncatedFile.
EmbeddingSet ingest_external(const std::string& path);

/// Embedding vectors become bag instances; labels come from the manifest,
/// in manifest order. Errors: MissingClip listing the absent ids.
std::vector<Bag> bags_from_embeddings(const EmbeddingSet& set, const Manifest& manifest);

} // namespace miltag
