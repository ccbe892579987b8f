#include "miltag/evalfuse.hpp"

#include <cmath>

#include "miltag/error.hpp"

namespace miltag {

namespace {

struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0;
};

Prf counts_to_prf(const Counts& c) {
    Prf out;
    out.precision = (c.tp + c.fp) ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    out.recall = (c.tp + c.fn) ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    out.f1 = (out.precision + out.recall) > 0.0
                 ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
                 : 0.0;
    return out;
}

void check_result(const TagResult& r) {
    if (r.predicted.size() != r.reference.size()) {
        throw Error(Errc::DimensionMismatch,
                    "clip " + r.id + ": predicted and reference lengths differ");
    }
}

} // namespace

Prf micro_prf(const std::vector<TagResult>& results) {
    if (results.empty()) throw Error(Errc::EmptyResults, "no tag results");
    Counts c;
    for (const TagResult& r : results) {
        check_result(r);
        for (std::size_t n = 0; n < r.predicted.size(); ++n) {
            const bool pred = r.predicted[n] != 0;
            const bool ref = r.reference[n] != 0;
            if (pred && ref) ++c.tp;
            else if (pred) ++c.fp;
            else if (ref) ++c.fn;
        }
    }
    return counts_to_prf(c);
}

std::vector<Prf> per_class_prf(const std::vector<TagResult>& results, std::size_t n_classes) {
    if (results.empty()) throw Error(Errc::EmptyResults, "no tag results");
    std::vector<Counts> counts(n_classes);
    for (const TagResult& r : results) {
        check_result(r);
        if (r.predicted.size() != n_classes) {
            throw Error(Errc::DimensionMismatch, "clip " + r.id + ": expected " +
                                                     std::to_string(n_classes) + " classes");
        }
        for (std::size_t n = 0; n < n_classes; ++n) {
            const bool pred = r.predicted[n] != 0;
            const bool ref = r.reference[n] != 0;
            if (pred && ref) ++counts[n].tp;
            else if (pred) ++counts[n].fp;
            else if (ref) ++counts[n].fn;
        }
    }
    std::vector<Prf> out(n_classes);
    for (std::size_t n = 0; n < n_classes; ++n) out[n] = counts_to_prf(counts[n]);
    return out;
}

ConfusionMatrix confusion_matrix(const std::vector<TagResult>& results, std::size_t n_classes) {
    ConfusionMatrix cm;
    cm.n_classes = n_classes;
    cm.counts.assign(n_classes * n_classes, 0);
    for (const TagResult& r : results) {
        check_result(r);
        std::size_t ref = n_classes;
        for (std::size_t n = 0; n < r.reference.size(); ++n) {
            if (r.reference[n] != 0) {
                ref = n;
                break;
            }
        }
        if (ref == n_classes) {
            throw Error(Errc::NoReferenceLabel, "clip " + r.id + " has no positive label");
        }
        if (r.scores.size() != n_classes) {
            throw Error(Errc::DimensionMismatch, "clip " + r.id + ": expected " +
                                                     std::to_string(n_classes) + " scores");
        }
        std::size_t pred = 0;
        for (std::size_t n = 1; n < n_classes; ++n) {
            if (r.scores[n] > r.scores[pred]) pred = n;
        }
        ++cm.counts[ref * n_classes + pred];
    }
    return cm;
}

std::vector<std::vector<int>> fuse(
    const std::vector<std::vector<std::vector<int>>>& per_model_decisions,
    const std::vector<double>& weights) {
    if (per_model_decisions.empty()) {
        throw Error(Errc::ShapeMismatch, "no decision matrices");
    }
    if (per_model_decisions.size() != weights.size()) {
        throw Error(Errc::ShapeMismatch, "have " + std::to_string(per_model_decisions.size()) +
                                             " matrices and " + std::to_string(weights.size()) +
                                             " weights");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error(Errc::AllZeroWeights, "weights must be finite and non-negative");
        }
        total += w;
    }
    if (total <= 0.0) throw Error(Errc::AllZeroWeights, "weights sum to zero");

    const std::size_t n_clips = per_model_decisions[0].size();
    for (const auto& mat : per_model_decisions) {
        if (mat.size() != n_clips) {
            throw Error(Errc::ShapeMismatch, "decision matrices have differing clip counts");
        }
        for (std::size_t c = 0; c < n_clips; ++c) {
            if (mat[c].size() != per_model_decisions[0][c].size()) {
                throw Error(Errc::ShapeMismatch, "decision matrices have differing class counts");
            }
        }
    }

    std::vector<std::vector<int>> fused(n_clips);
    for (std::size_t c = 0; c < n_clips; ++c) {
        const std::size_t n_classes = per_model_decisions[0][c].size();
        fused[c].assign(n_classes, 0);
        for (std::size_t n = 0; n < n_classes; ++n) {
            double positive = 0.0;
            for (std::size_t m = 0; m < weights.size(); ++m) {
                if (per_model_decisions[m][c][n] != 0) positive += weights[m];
            }
            // half the total mass or more, ties positive
            fused[c][n] = (2.0 * positive >= total) ? 1 : 0;
        }
    }
    return fused;
}

std::vector<double> validation_weights(const std::vector<double>& val_scores) {
    double total = 0.0;
    for (double s : val_scores) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw Error(Errc::AllZeroScores, "validation scores must be finite and non-negative");
        }
        total += s;
    }
    if (total <= 0.0 || val_scores.empty()) {
        throw Error(Errc::AllZeroScores, "validation scores sum to zero");
    }
    std::vector<double> weights(val_scores.size());
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = val_scores[i] / total;
    return weights;
}

} // namespace miltag
