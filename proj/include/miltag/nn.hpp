#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "miltag/tensor.hpp"

namespace miltag {

enum class LayerKind { Dense, Conv2d, Relu, Flatten, MaxPool2d };

const char* layer_kind_name(LayerKind kind);

struct LayerSpec {
    LayerKind kind = LayerKind::Relu;
    std::size_t in = 0, out = 0;                        // dense
    std::size_t in_ch = 0, out_ch = 0, kh = 0, kw = 0;  // conv2d (valid, stride 1)
    std::size_t ph = 0, pw = 0;                         // maxpool2d (stride = window)

    static LayerSpec dense(std::size_t in, std::size_t out);
    static LayerSpec conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kh,
                            std::size_t kw);
    static LayerSpec relu();
    static LayerSpec flatten();
    static LayerSpec maxpool2d(std::size_t ph, std::size_t pw);

    bool parametric() const { return kind == LayerKind::Dense || kind == LayerKind::Conv2d; }
    std::string describe() const;
};

/// Per-feature affine input transform (x - mean) * inv_std, stored with the
/// model. Stands in for batch normalization on raw-feature inputs.
struct Standardization {
    std::vector<double> mean;
    std::vector<double> inv_std;
};

/// An ordered layer stack with its parameter tensors. Immutable once built
/// or trained; forward passes are pure and safe to share across threads.
struct Model {
    std::vector<LayerSpec> layers;
    std::vector<Tensor> params; // W then b for each parametric layer, in order
    std::vector<std::size_t> input_shape;
    std::size_t n_classes = 0;
    std::uint64_t seed = 0;
    bool inference_only = false;
    std::optional<Standardization> standardization;
};

struct ForwardCache {
    std::vector<Tensor> layer_inputs; // input seen by each layer
    Tensor logits;                    // rank-1 pre-sigmoid output
};

struct ForwardResult {
    std::vector<double> scores; // sigmoid(logits), one per class
    ForwardCache cache;
};

struct Gradients {
    std::vector<Tensor> params; // shape-matched to Model::params
    Tensor input;               // gradient w.r.t. the raw (unstandardized) input
};

/// Validates the layer chain against an input shape and returns the output
/// shape. Errors: IncompatibleDims naming the offending pair.
std::vector<std::size_t> chain_output_shape(const std::vector<LayerSpec>& layers,
                                            const std::vector<std::size_t>& input_shape);

/// He-uniform weights (bound sqrt(6/fan_in)) drawn from the seed in layer
/// order, zero biases. Bit-identical for a fixed seed.
Model build_model(const std::vector<LayerSpec>& specs,
                  const std::vector<std::size_t>& input_shape, std::uint64_t seed);

/// The four-hidden-layer dense tagger (512, 512, 256, 128 + classifier head)
/// over a flat input. With input_dim 512 and 17 classes this counts 691,729
/// parameters.
std::vector<LayerSpec> mil_dnn_spec(std::size_t input_dim, std::size_t n_classes);
std::vector<LayerSpec> dense_stack_spec(std::size_t input_dim,
                                        const std::vector<std::size_t>& hidden,
                                        std::size_t n_classes);

ForwardResult forward(const Model& model, const Tensor& input);

/// Gradient of a scalar L w.r.t. all parameters and the input, given
/// dL/dlogits. Errors: StaleCache when the cache does not match the model's
/// layer structure.
Gradients backward(const Model& model, const ForwardCache& cache,
                   const std::vector<double>& logit_grad);

/// Activation vector feeding the final dense layer (post-nonlinearity).
/// Errors: TooShallow (fewer than two parametric layers).
std::vector<double> penultimate(const Model& model, const Tensor& input);

std::size_t count_parameters(const Model& model);

/// Branch form: exp is only taken of non-positive arguments, so no overflow
/// for any finite logit.
double stable_sigmoid(double z);

// gradient-tensor arithmetic used by the optimizers
void accumulate_scaled(std::vector<Tensor>& acc, const std::vector<Tensor>& g, double scale);
std::vector<Tensor> zeros_like(const std::vector<Tensor>& params);

} // namespace miltag
