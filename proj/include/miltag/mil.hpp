#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "miltag/nn.hpp"
#include "miltag/tensor.hpp"

namespace miltag {

/// A weakly labeled clip: ordered instance features plus one multi-hot
/// label vector for the whole bag.
struct Bag {
    std::string id;
    std::vector<Tensor> instances;
    std::vector<int> labels; // length n_classes, entries 0/1
};

/// Per-instance posteriors with the per-class max pooling result.
/// bag_scores[n] is exactly the column max of instance_scores; ties go to
/// the lowest instance index.
struct BagPrediction {
    std::vector<std::vector<double>> instance_scores; // n_instances x n_classes
    std::vector<std::vector<double>> instance_logits; // pre-sigmoid, same shape
    std::vector<double> bag_scores;                   // n_classes
    std::vector<double> bag_logits;                   // n_classes
    std::vector<std::size_t> argmax_idx;              // n_classes

    std::size_t n_instances() const { return instance_scores.size(); }
    std::size_t n_classes() const { return bag_scores.size(); }

    /// Builds a prediction from a probability matrix. Probabilities are
    /// clamped to [1e-12, 1 - 1e-12] before conversion to logits; this is the
    /// only place probabilities enter the loss path.
    static BagPrediction from_scores(const std::vector<std::vector<double>>& scores);
};

struct ClassWeights {
    std::vector<double> w;
};

/// Inverse-frequency weights w_n = min(cap, total / (C * N_n)). Uncapped,
/// w_a / w_b = N_b / N_a. Errors: EmptyClass when some count is zero.
ClassWeights class_weights(const std::vector<std::size_t>& label_counts, double cap = 50.0);

/// Runs the instance classifier over every instance and max-pools per
/// class. Errors: EmptyBag, ShapeMismatch.
BagPrediction bag_forward(const Model& model, const Bag& bag);

/// Class-weighted cross entropy on the bag scores,
/// J = sum_n w_n * -(y_n log s_n + (1 - y_n) log(1 - s_n)),
/// evaluated in logit form. Errors: DimensionMismatch.
double mil_loss(const BagPrediction& pred, const std::vector<int>& labels,
                const ClassWeights& weights);

/// Gradient of mil_loss w.r.t. the model parameters. Each class's loss term
/// back-propagates only through that class's argmax instance; all other
/// instances contribute exactly zero. Errors: StalePrediction when the
/// prediction no longer matches the model, DimensionMismatch.
Gradients mil_backward(const Model& model, const Bag& bag, const BagPrediction& pred,
                       const std::vector<int>& labels, const ClassWeights& weights);

enum class Pooling { Max, Mean };
enum class SelectionMetric { MicroF1, SubsetAccuracy };

const char* pooling_name(Pooling p);
Pooling pooling_from_name(const std::string& name);
const char* selection_metric_name(SelectionMetric m);
SelectionMetric selection_metric_from_name(const std::string& name);

struct TrainConfig {
    std::size_t epochs = 15;
    std::size_t batch_size = 16;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    Pooling selection_pooling = Pooling::Mean;
    SelectionMetric selection_metric = SelectionMetric::MicroF1;
    double weight_cap = 50.0;
    bool standardize = true;
    double threshold = 0.5;
};

struct EpochRecord {
    std::size_t epoch = 0; // 1-based
    double train_loss = 0.0;
    double val_metric = 0.0;
    bool selected = false;
    Pooling pooling = Pooling::Mean;
};

struct TrainResult {
    Model model; // checkpoint with the best validation metric
    std::vector<EpochRecord> log;
};

/// Mini-batch MIL training with Adam. Bags are shuffled per epoch from the
/// seed; gradients within a batch are averaged; after each epoch the model
/// is scored on the validation clips with the configured pooling and the
/// best checkpoint is kept (ties keep the earlier epoch). Fully
/// deterministic for a fixed seed.
/// Errors: EmptyDataset, EmptyClass, DivergedLoss (with epoch/bag context),
/// InvalidConfig for inference-only models.
TrainResult train(const Model& init, const std::vector<Bag>& train_bags,
                  const std::vector<Bag>& val_bags, const TrainConfig& cfg);

/// Instance scores pooled to one clip-level score vector.
std::vector<double> clip_scores(const Model& model, const Bag& bag, Pooling pooling);

/// Clip-level metric over a bag set at the given decision threshold.
double clip_metric(const Model& model, const std::vector<Bag>& bags, Pooling pooling,
                   SelectionMetric metric, double threshold);

/// One emitted streaming decision. When an arriving instance cannot be
/// scored (shape mismatch) the record carries the error and the stream
/// continues.
struct StreamRecord {
    std::size_t index = 0;
    std::vector<double> scores;
    std::vector<int> decisions;
    bool ok = true;
    std::string error;
};

/// Incremental per-instance tagger. Scores are bit-identical to the rows a
/// batch bag_forward would produce for the same instances.
class StreamTagger {
public:
    StreamTagger(const Model& model, std::vector<double> thresholds);

    StreamRecord push(const Tensor& instance);
    std::size_t emitted() const { return next_; }

private:
    const Model* model_;
    std::vector<double> thresholds_;
    std::size_t next_ = 0;
};

std::vector<StreamRecord> stream_tag(const Model& model, const std::vector<Tensor>& instances,
                                     const std::vector<double>& thresholds);

/// Convenience: the same threshold for every class.
std::vector<double> uniform_thresholds(std::size_t n_classes, double value);

} // namespace miltag
