#pragma once

#include <stdexcept>
#include <string>

namespace miltag {

enum class Errc {
    // audio / features
    UnsupportedSampleRate,
    MalformedWav,
    UnsupportedEncoding,
    InvalidRange,
    ClipTooShort,
    InvalidConfig,
    // nn
    IncompatibleDims,
    ShapeMismatch,
    StaleCache,
    TooShallow,
    // mil
    EmptyBag,
    DimensionMismatch,
    StalePrediction,
    EmptyClass,
    EmptyDataset,
    DivergedLoss,
    // embeddings / formats
    BadMagic,
    DimMismatch,
    TruncatedFile,
    MissingClip,
    // metrics / fusion
    EmptyResults,
    NoReferenceLabel,
    AllZeroWeights,
    AllZeroScores,
    // manifests / model files
    DuplicateId,
    UnknownLabel,
    MalformedLine,
    VersionMismatch,
    ChecksumMismatch,
};

const char* errc_name(Errc code);

/// All library failures are reported as Error with a stable code plus a
/// human-readable message. Codes map one-to-one onto the conditions named
/// in the public API docs.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message),
          code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace miltag
