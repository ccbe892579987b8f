#include "miltag/error.hpp"

namespace miltag {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::UnsupportedSampleRate: return "UnsupportedSampleRate";
        case Errc::MalformedWav: return "MalformedWav";
        case Errc::UnsupportedEncoding: return "UnsupportedEncoding";
        case Errc::InvalidRange: return "InvalidRange";
        case Errc::ClipTooShort: return "ClipTooShort";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::IncompatibleDims: return "IncompatibleDims";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::StaleCache: return "StaleCache";
        case Errc::TooShallow: return "TooShallow";
        case Errc::EmptyBag: return "EmptyBag";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::StalePrediction: return "StalePrediction";
        case Errc::EmptyClass: return "EmptyClass";
        case Errc::EmptyDataset: return "EmptyDataset";
        case Errc::DivergedLoss: return "DivergedLoss";
        case Errc::BadMagic: return "BadMagic";
        case Errc::DimMismatch: return "DimMismatch";
        case Errc::TruncatedFile: return "TruncatedFile";
        case Errc::MissingClip: return "MissingClip";
        case Errc::EmptyResults: return "EmptyResults";
        case Errc::NoReferenceLabel: return "NoReferenceLabel";
        case Errc::AllZeroWeights: return "AllZeroWeights";
        case Errc::AllZeroScores: return "AllZeroScores";
        case Errc::DuplicateId: return "DuplicateId";
        case Errc::UnknownLabel: return "UnknownLabel";
        case Errc::MalformedLine: return "MalformedLine";
        case Errc::VersionMismatch: return "VersionMismatch";
        case Errc::ChecksumMismatch: return "ChecksumMismatch";
    }
    return "UnknownError";
}

} // namespace miltag
