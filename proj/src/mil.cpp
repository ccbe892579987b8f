#include "miltag/mil.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "miltag/error.hpp"
#include "miltag/evalfuse.hpp"
#include "miltag/optimizer.hpp"
#include "miltag/rng.hpp"

namespace miltag {

namespace {

constexpr double kProbClamp = 1e-12;

/// -(y log s + (1-y) log(1-s)) for s = sigmoid(z), without forming s.
double bce_with_logit(double z, double y) {
    return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

void finalize_pooling(BagPrediction& pred) {
    const std::size_t n_classes = pred.instance_logits.empty() ? 0
                                                               : pred.instance_logits[0].size();
    pred.bag_scores.resize(n_classes);
    pred.bag_logits.resize(n_classes);
    pred.argmax_idx.resize(n_classes);
    for (std::size_t n = 0; n < n_classes; ++n) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < pred.instance_scores.size(); ++j) {
            if (pred.instance_scores[j][n] > pred.instance_scores[best][n]) best = j;
        }
        pred.argmax_idx[n] = best;
        pred.bag_scores[n] = pred.instance_scores[best][n];
        pred.bag_logits[n] = pred.instance_logits[best][n];
    }
}

} // namespace

BagPrediction BagPrediction::from_scores(const std::vector<std::vector<double>>& scores) {
    BagPrediction pred;
    pred.instance_scores = scores;
    pred.instance_logits.resize(scores.size());
    for (std::size_t j = 0; j < scores.size(); ++j) {
        pred.instance_logits[j].resize(scores[j].size());
        for (std::size_t n = 0; n < scores[j].size(); ++n) {
            const double p = std::clamp(scores[j][n], kProbClamp, 1.0 - kProbClamp);
            pred.instance_logits[j][n] = std::log(p / (1.0 - p));
        }
    }
    finalize_pooling(pred);
    return pred;
}

ClassWeights class_weights(const std::vector<std::size_t>& label_counts, double cap) {
    if (label_counts.empty()) throw Error(Errc::EmptyClass, "no classes");
    if (!(cap > 0.0)) throw Error(Errc::InvalidConfig, "weight cap must be positive");
    double total = 0.0;
    for (std::size_t n = 0; n < label_counts.size(); ++n) {
        if (label_counts[n] == 0) {
            throw Error(Errc::EmptyClass, "class " + std::to_string(n) + " has no samples");
        }
        total += static_cast<double>(label_counts[n]);
    }
    ClassWeights weights;
    weights.w.resize(label_counts.size());
    const double c = static_cast<double>(label_counts.size());
    for (std::size_t n = 0; n < label_counts.size(); ++n) {
        weights.w[n] = std::min(cap, total / (c * static_cast<double>(label_counts[n])));
    }
    return weights;
}

BagPrediction bag_forward(const Model& model, const Bag& bag) {
    if (bag.instances.empty()) throw Error(Errc::EmptyBag, "bag " + bag.id + " has no instances");
    BagPrediction pred;
    pred.instance_scores.reserve(bag.instances.size());
    pred.instance_logits.reserve(bag.instances.size());
    for (const Tensor& inst : bag.instances) {
        ForwardResult r = forward(model, inst);
        pred.instance_scores.push_back(r.scores);
        pred.instance_logits.push_back(r.cache.logits.values());
    }
    finalize_pooling(pred);
    return pred;
}

double mil_loss(const BagPrediction& pred, const std::vector<int>& labels,
                const ClassWeights& weights) {
    const std::size_t n_classes = pred.n_classes();
    if (labels.size() != n_classes || weights.w.size() != n_classes) {
        throw Error(Errc::DimensionMismatch,
                    "labels/weights length does not match " + std::to_string(n_classes) +
                        " classes");
    }
    double loss = 0.0;
    for (std::size_t n = 0; n < n_classes; ++n) {
        loss += weights.w[n] * bce_with_logit(pred.bag_logits[n], labels[n] ? 1.0 : 0.0);
    }
    return loss;
}

Gradients mil_backward(const Model& model, const Bag& bag, const BagPrediction& pred,
                       const std::vector<int>& labels, const ClassWeights& weights) {
    const std::size_t n_classes = pred.n_classes();
    if (labels.size() != n_classes || weights.w.size() != n_classes) {
        throw Error(Errc::DimensionMismatch, "labels/weights length mismatch");
    }
    if (pred.n_instances() != bag.instances.size()) {
        throw Error(Errc::StalePrediction,
                    "prediction has " + std::to_string(pred.n_instances()) +
                        " instances, bag " + bag.id + " has " +
                        std::to_string(bag.instances.size()));
    }

    // dJ/dz_n at the bag logit, routed to each class's argmax instance
    std::map<std::size_t, std::vector<double>> routed; // instance -> logit grad
    for (std::size_t n = 0; n < n_classes; ++n) {
        const double g = weights.w[n] *
                         (stable_sigmoid(pred.bag_logits[n]) - (labels[n] ? 1.0 : 0.0));
        auto [it, inserted] = routed.try_emplace(pred.argmax_idx[n],
                                                 std::vector<double>(n_classes, 0.0));
        it->second[n] += g;
    }

    Gradients grads;
    grads.params = zeros_like(model.params);
    for (const auto& [j, logit_grad] : routed) {
        ForwardResult r = forward(model, bag.instances[j]);
        if (r.cache.logits.values() != pred.instance_logits[j]) {
            throw Error(Errc::StalePrediction,
                        "bag " + bag.id + ": model output changed since bag_forward");
        }
        Gradients g = backward(model, r.cache, logit_grad);
        accumulate_scaled(grads.params, g.params, 1.0);
    }
    return grads;
}

const char* pooling_name(Pooling p) { return p == Pooling::Max ? "max" : "mean"; }

Pooling pooling_from_name(const std::string& name) {
    if (name == "max") return Pooling::Max;
    if (name == "mean") return Pooling::Mean;
    throw Error(Errc::InvalidConfig, "unknown pooling '" + name + "' (use max or mean)");
}

const char* selection_metric_name(SelectionMetric m) {
    return m == SelectionMetric::MicroF1 ? "micro_f1" : "subset_accuracy";
}

SelectionMetric selection_metric_from_name(const std::string& name) {
    if (name == "micro_f1") return SelectionMetric::MicroF1;
    if (name == "subset_accuracy") return SelectionMetric::SubsetAccuracy;
    throw Error(Errc::InvalidConfig, "unknown selection metric '" + name + "'");
}

std::vector<double> clip_scores(const Model& model, const Bag& bag, Pooling pooling) {
    const BagPrediction pred = bag_forward(model, bag);
    if (pooling == Pooling::Max) return pred.bag_scores;
    std::vector<double> mean(pred.n_classes(), 0.0);
    for (const auto& row : pred.instance_scores) {
        for (std::size_t n = 0; n < mean.size(); ++n) mean[n] += row[n];
    }
    for (double& v : mean) v /= static_cast<double>(pred.n_instances());
    return mean;
}

double clip_metric(const Model& model, const std::vector<Bag>& bags, Pooling pooling,
                   SelectionMetric metric, double threshold) {
    if (bags.empty()) throw Error(Errc::EmptyDataset, "no validation clips");
    std::vector<TagResult> results;
    results.reserve(bags.size());
    std::size_t exact = 0;
    for (const Bag& bag : bags) {
        TagResult r;
        r.id = bag.id;
        r.scores = clip_scores(model, bag, pooling);
        r.reference = bag.labels;
        r.predicted.resize(r.scores.size());
        bool all_match = true;
        for (std::size_t n = 0; n < r.scores.size(); ++n) {
            r.predicted[n] = r.scores[n] >= threshold ? 1 : 0;
            if (r.predicted[n] != (bag.labels[n] ? 1 : 0)) all_match = false;
        }
        if (all_match) ++exact;
        results.push_back(std::move(r));
    }
    if (metric == SelectionMetric::SubsetAccuracy) {
        return static_cast<double>(exact) / static_cast<double>(bags.size());
    }
    return micro_prf(results).f1;
}

TrainResult train(const Model& init, const std::vector<Bag>& train_bags,
                  const std::vector<Bag>& val_bags, const TrainConfig& cfg) {
    if (train_bags.empty() || val_bags.empty()) {
        throw Error(Errc::EmptyDataset, "training and validation sets must be non-empty");
    }
    if (init.inference_only) {
        throw Error(Errc::InvalidConfig, "model was saved for inference only (32-bit weights)");
    }
    if (cfg.batch_size == 0) throw Error(Errc::InvalidConfig, "batch_size must be >= 1");
    const std::size_t n_classes = init.n_classes;
    for (const Bag& bag : train_bags) {
        if (bag.labels.size() != n_classes) {
            throw Error(Errc::DimensionMismatch,
                        "bag " + bag.id + " has " + std::to_string(bag.labels.size()) +
                            " labels, model expects " + std::to_string(n_classes));
        }
    }

    TrainResult result;
    result.model = init;
    if (cfg.epochs == 0) return result;

    std::vector<std::size_t> counts(n_classes, 0);
    for (const Bag& bag : train_bags) {
        for (std::size_t n = 0; n < n_classes; ++n) {
            if (bag.labels[n]) ++counts[n];
        }
    }
    const ClassWeights weights = class_weights(counts, cfg.weight_cap);

    Model cur = init;
    if (cfg.standardize) {
        // per-feature mean/std over every training instance
        const std::size_t dim =
            std::accumulate(cur.input_shape.begin(), cur.input_shape.end(), std::size_t{1},
                            std::multiplies<>());
        std::vector<double> mean(dim, 0.0);
        std::size_t count = 0;
        for (const Bag& bag : train_bags) {
            for (const Tensor& inst : bag.instances) {
                if (inst.size() != dim) {
                    throw Error(Errc::ShapeMismatch, "instance in bag " + bag.id +
                                                         " does not match model input");
                }
                for (std::size_t i = 0; i < dim; ++i) mean[i] += inst[i];
                ++count;
            }
        }
        for (double& v : mean) v /= static_cast<double>(count);
        std::vector<double> var(dim, 0.0);
        for (const Bag& bag : train_bags) {
            for (const Tensor& inst : bag.instances) {
                for (std::size_t i = 0; i < dim; ++i) {
                    const double d = inst[i] - mean[i];
                    var[i] += d * d;
                }
            }
        }
        Standardization st;
        st.mean = std::move(mean);
        st.inv_std.resize(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            st.inv_std[i] = 1.0 / std::sqrt(var[i] / static_cast<double>(count) + 1e-8);
        }
        cur.standardization = std::move(st);
    }

    AdamConfig adam_cfg;
    adam_cfg.lr = cfg.lr;
    AdamState adam(cur.params, adam_cfg);
    Rng rng(cfg.seed);

    double best_metric = -1.0;
    std::size_t best_epoch = 0;

    std::vector<std::size_t> order(train_bags.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;

        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(start + cfg.batch_size, order.size());
            std::vector<Tensor> batch_grads = zeros_like(cur.params);
            const double scale = 1.0 / static_cast<double>(end - start);
            for (std::size_t k = start; k < end; ++k) {
                const Bag& bag = train_bags[order[k]];
                const BagPrediction pred = bag_forward(cur, bag);
                const double loss = mil_loss(pred, bag.labels, weights);
                if (!std::isfinite(loss)) {
                    throw Error(Errc::DivergedLoss, "non-finite loss at epoch " +
                                                        std::to_string(epoch) + ", bag " +
                                                        bag.id);
                }
                epoch_loss += loss;
                const Gradients g = mil_backward(cur, bag, pred, bag.labels, weights);
                accumulate_scaled(batch_grads, g.params, scale);
            }
            adam_step(cur.params, batch_grads, adam);
        }

        const double val_metric =
            clip_metric(cur, val_bags, cfg.selection_pooling, cfg.selection_metric,
                        cfg.threshold);

        EpochRecord record;
        record.epoch = epoch;
        record.train_loss = epoch_loss / static_cast<double>(train_bags.size());
        record.val_metric = val_metric;
        record.pooling = cfg.selection_pooling;
        result.log.push_back(record);

        if (val_metric > best_metric) {
            best_metric = val_metric;
            best_epoch = epoch;
            result.model = cur;
        }
    }

    for (EpochRecord& record : result.log) record.selected = record.epoch == best_epoch;
    return result;
}

StreamTagger::StreamTagger(const Model& model, std::vector<double> thresholds)
    : model_(&model), thresholds_(std::move(thresholds)) {}

StreamRecord StreamTagger::push(const Tensor& instance) {
    StreamRecord record;
    record.index = next_++;
    try {
        ForwardResult r = forward(*model_, instance);
        record.scores = std::move(r.scores);
        record.decisions.resize(record.scores.size());
        for (std::size_t n = 0; n < record.scores.size(); ++n) {
            const double threshold = n < thresholds_.size() ? thresholds_[n] : 0.5;
            record.decisions[n] = record.scores[n] >= threshold ? 1 : 0;
        }
    } catch (const Error& e) {
        record.ok = false;
        record.error = e.what();
    }
    return record;
}

std::vector<StreamRecord> stream_tag(const Model& model, const std::vector<Tensor>& instances,
                                     const std::vector<double>& thresholds) {
    StreamTagger tagger(model, thresholds);
    std::vector<StreamRecord> records;
    records.reserve(instances.size());
    for (const Tensor& inst : instances) records.push_back(tagger.push(inst));
    return records;
}

std::vector<double> uniform_thresholds(std::size_t n_classes, double value) {
    return std::vector<double>(n_classes, value);
}

} // namespace miltag
