#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace miltag {

struct ManifestRecord {
    std::string id;
    std::string path; // resolved relative to the manifest file
    std::vector<std::string> labels;
};

/// A dataset listing: one record per clip plus the ordered class list the
/// label vectors are indexed by.
struct Manifest {
    std::vector<std::string> class_list;
    std::vector<ManifestRecord> records;

    std::vector<int> label_vector(const ManifestRecord& record) const;
    std::size_t class_index(const std::string& name) const; // throws UnknownLabel
};

struct ClassInfo {
    std::string name;
    std::size_t sample_count;
};

/// The 17-class DCASE 2017 task-4 label set with per-class sample counts,
/// warning sounds first then vehicle sounds.
const std::vector<ClassInfo>& dcase17_classes();
std::vector<std::string> dcase17_class_names();
std::vector<std::size_t> dcase17_class_counts();

/// Parses a JSON Lines manifest. Each line is an object
/// {"id": ..., "path": ..., "labels": [...]}. An optional first line
/// {"class_list": [...]} fixes the class order; without it the DCASE-17
/// list is assumed. Relative clip paths are resolved against the manifest's
/// directory. Errors: DuplicateId, UnknownLabel (with line number),
/// MalformedLine.
Manifest parse_manifest(const std::string& path);

/// Writes records with paths as given; the class list goes into the header
/// line. parse_manifest(write_manifest(m)) reproduces m with resolved paths.
void write_manifest(const std::string& path, const Manifest& manifest);

} // namespace miltag
