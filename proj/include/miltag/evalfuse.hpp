#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace miltag {

/// One clip's tagging outcome: binary decisions against the reference
/// labels, plus the raw scores behind the decisions.
struct TagResult {
    std::string id;
    std::vector<int> predicted; // multi-hot
    std::vector<int> reference; // multi-hot
    std::vector<double> scores;
};

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Micro-averaged precision/recall/F1 over all (clip, class) pairs.
/// Undefined ratios (zero denominator) are reported as 0.
/// Errors: EmptyResults, DimensionMismatch.
Prf micro_prf(const std::vector<TagResult>& results);

/// Per-class P/R/F1 with the same zero-denominator convention.
std::vector<Prf> per_class_prf(const std::vector<TagResult>& results, std::size_t n_classes);

/// Single-label confusion counts: row = reference (first positive reference
/// label), column = prediction (highest-scoring class, ties to the lowest
/// index). Errors: NoReferenceLabel naming the clip.
struct ConfusionMatrix {
    std::size_t n_classes = 0;
    std::vector<std::size_t> counts; // n_classes x n_classes, row-major

    std::size_t at(std::size_t ref, std::size_t pred) const {
        return counts[ref * n_classes + pred];
    }
};

ConfusionMatrix confusion_matrix(const std::vector<TagResult>& results, std::size_t n_classes);

/// Weighted majority vote over per-model binary decision matrices
/// (clips x classes). A cell is positive when the weight mass voting
/// positive reaches half the total mass (ties positive). Scale of the
/// weights does not matter. Errors: ShapeMismatch, AllZeroWeights.
std::vector<std::vector<int>> fuse(
    const std::vector<std::vector<std::vector<int>>>& per_model_decisions,
    const std::vector<double>& weights);

/// Voting weights from per-model validation scores, normalized to sum 1.
/// Errors: AllZeroScores.
std::vector<double> validation_weights(const std::vector<double>& val_scores);

/// A fused committee: member identifiers with their voting weights.
struct FusionEnsemble {
    std::vector<std::string> members;
    std::vector<double> weights;
};

} // namespace miltag
