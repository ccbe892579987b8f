#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace miltag {

enum class EmbeddingSource { Trained, External };

struct ClipEmbeddings {
    std::string id;
    std::vector<std::vector<float>> vectors; // one per instance, all length dim
};

/// Instance vectors per clip, in the clip and instance order they were
/// produced. Values are float32, matching the on-disk format.
struct EmbeddingSet {
    std::uint32_t dim = 0;
    std::vector<ClipEmbeddings> clips;
    EmbeddingSource source = EmbeddingSource::Trained;

    const ClipEmbeddings* find(const std::string& id) const;
};

/// "MILE" container, little-endian throughout:
///   magic "MILE", u32 version = 1, u32 dim, u32 clip_count,
///   then per clip: u16 id_length, UTF-8 id bytes, u32 instance_count,
///   instance_count * dim float32 values.
/// An empty set is exactly the 16-byte header.
/// Errors: BadMagic, VersionMismatch, TruncatedFile (structure cut short),
/// DimMismatch (a clip's float payload does not fill instance_count * dim,
/// or a vector of the wrong length is written).
void write_embeddings(const std::string& path, const EmbeddingSet& set);
EmbeddingSet read_embeddings(const std::string& path);

} // namespace miltag
