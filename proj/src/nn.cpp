#include "miltag/nn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "miltag/error.hpp"
#include "miltag/rng.hpp"

namespace miltag {

const char* layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::Dense: return "dense";
        case LayerKind::Conv2d: return "conv2d";
        case LayerKind::Relu: return "relu";
        case LayerKind::Flatten: return "flatten";
        case LayerKind::MaxPool2d: return "maxpool2d";
    }
    return "?";
}

LayerSpec LayerSpec::dense(std::size_t in, std::size_t out) {
    LayerSpec s;
    s.kind = LayerKind::Dense;
    s.in = in;
    s.out = out;
    return s;
}

LayerSpec LayerSpec::conv2d(std::size_t in_ch, std::size_t out_ch, std::size_t kh,
                            std::size_t kw) {
    LayerSpec s;
    s.kind = LayerKind::Conv2d;
    s.in_ch = in_ch;
    s.out_ch = out_ch;
    s.kh = kh;
    s.kw = kw;
    return s;
}

LayerSpec LayerSpec::relu() {
    LayerSpec s;
    s.kind = LayerKind::Relu;
    return s;
}

LayerSpec LayerSpec::flatten() {
    LayerSpec s;
    s.kind = LayerKind::Flatten;
    return s;
}

LayerSpec LayerSpec::maxpool2d(std::size_t ph, std::size_t pw) {
    LayerSpec s;
    s.kind = LayerKind::MaxPool2d;
    s.ph = ph;
    s.pw = pw;
    return s;
}

std::string LayerSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case LayerKind::Dense: os << "dense(" << in << "->" << out << ")"; break;
        case LayerKind::Conv2d:
            os << "conv2d(" << in_ch << "->" << out_ch << ", " << kh << "x" << kw << ")";
            break;
        case LayerKind::Relu: os << "relu"; break;
        case LayerKind::Flatten: os << "flatten"; break;
        case LayerKind::MaxPool2d: os << "maxpool2d(" << ph << "x" << pw << ")"; break;
    }
    return os.str();
}

namespace {

std::size_t flat_size(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

[[noreturn]] void incompatible(const std::string& from, const LayerSpec& layer,
                               const std::string& detail) {
    throw Error(Errc::IncompatibleDims, from + " -> " + layer.describe() + ": " + detail);
}

} // namespace

std::vector<std::size_t> chain_output_shape(const std::vector<LayerSpec>& layers,
                                            const std::vector<std::size_t>& input_shape) {
    std::vector<std::size_t> shape = input_shape;
    std::string from = "input " + shape_str(input_shape);
    for (const LayerSpec& layer : layers) {
        switch (layer.kind) {
            case LayerKind::Dense:
                if (layer.in == 0 || layer.out == 0) incompatible(from, layer, "zero dimension");
                if (shape.size() != 1 || shape[0] != layer.in) {
                    incompatible(from, layer,
                                 "expects a vector of " + std::to_string(layer.in) + ", got " +
                                     shape_str(shape));
                }
                shape = {layer.out};
                break;
            case LayerKind::Conv2d: {
                if (layer.in_ch == 0 || layer.out_ch == 0 || layer.kh == 0 || layer.kw == 0) {
                    incompatible(from, layer, "zero dimension");
                }
                if (shape.size() != 3 || shape[0] != layer.in_ch) {
                    incompatible(from, layer,
                                 "expects (" + std::to_string(layer.in_ch) + ", H, W), got " +
                                     shape_str(shape));
                }
                if (shape[1] < layer.kh || shape[2] < layer.kw) {
                    incompatible(from, layer, "kernel larger than input " + shape_str(shape));
                }
                shape = {layer.out_ch, shape[1] - layer.kh + 1, shape[2] - layer.kw + 1};
                break;
            }
            case LayerKind::Relu:
                break;
            case LayerKind::Flatten:
                shape = {flat_size(shape)};
                break;
            case LayerKind::MaxPool2d: {
                if (layer.ph == 0 || layer.pw == 0) incompatible(from, layer, "zero window");
                if (shape.size() != 3 || shape[1] < layer.ph || shape[2] < layer.pw) {
                    incompatible(from, layer, "needs (C, H, W) at least as large as the window");
                }
                shape = {shape[0], shape[1] / layer.ph, shape[2] / layer.pw};
                break;
            }
        }
        from = layer.describe();
    }
    return shape;
}

Model build_model(const std::vector<LayerSpec>& specs,
                  const std::vector<std::size_t>& input_shape, std::uint64_t seed) {
    const std::vector<std::size_t> out_shape = chain_output_shape(specs, input_shape);

    Model model;
    model.layers = specs;
    model.input_shape = input_shape;
    model.n_classes = flat_size(out_shape);
    model.seed = seed;

    Rng rng(seed);
    for (const LayerSpec& layer : specs) {
        if (layer.kind == LayerKind::Dense) {
            const double bound = std::sqrt(6.0 / static_cast<double>(layer.in));
            Tensor w({layer.out, layer.in});
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-bound, bound);
            model.params.push_back(std::move(w));
            model.params.emplace_back(std::vector<std::size_t>{layer.out});
        } else if (layer.kind == LayerKind::Conv2d) {
            const double fan_in = static_cast<double>(layer.in_ch * layer.kh * layer.kw);
            const double bound = std::sqrt(6.0 / fan_in);
            Tensor w({layer.out_ch, layer.in_ch, layer.kh, layer.kw});
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-bound, bound);
            model.params.push_back(std::move(w));
            model.params.emplace_back(std::vector<std::size_t>{layer.out_ch});
        }
    }
    return model;
}

std::vector<LayerSpec> dense_stack_spec(std::size_t input_dim,
                                        const std::vector<std::size_t>& hidden,
                                        std::size_t n_classes) {
    std::vector<LayerSpec> specs;
    std::size_t width = input_dim;
    for (std::size_t h : hidden) {
        specs.push_back(LayerSpec::dense(width, h));
        specs.push_back(LayerSpec::relu());
        width = h;
    }
    specs.push_back(LayerSpec::dense(width, n_classes));
    return specs;
}

std::vector<LayerSpec> mil_dnn_spec(std::size_t input_dim, std::size_t n_classes) {
    return dense_stack_spec(input_dim, {512, 512, 256, 128}, n_classes);
}

double stable_sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

struct LayerIo {
    Tensor out;
};

Tensor dense_forward(const LayerSpec& layer, const Tensor& w, const Tensor& b,
                     const Tensor& x) {
    Tensor out({layer.out});
    const double* wp = w.data();
    const double* xp = x.data();
    for (std::size_t o = 0; o < layer.out; ++o) {
        const double* row = wp + o * layer.in;
        double acc = b[o];
        for (std::size_t i = 0; i < layer.in; ++i) acc += row[i] * xp[i];
        out[o] = acc;
    }
    return out;
}

Tensor conv2d_forward(const LayerSpec& layer, const Tensor& w, const Tensor& b,
                      const Tensor& x) {
    const std::size_t H = x.shape()[1], W = x.shape()[2];
    const std::size_t oh = H - layer.kh + 1, ow = W - layer.kw + 1;
    Tensor out({layer.out_ch, oh, ow});
    for (std::size_t oc = 0; oc < layer.out_ch; ++oc) {
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t xx = 0; xx < ow; ++xx) {
                double acc = b[oc];
                for (std::size_t ic = 0; ic < layer.in_ch; ++ic) {
                    for (std::size_t dy = 0; dy < layer.kh; ++dy) {
                        const double* xrow = x.data() + (ic * H + (y + dy)) * W + xx;
                        const double* wrow =
                            w.data() + (oc * layer.in_ch + ic) * layer.kh * layer.kw +
                            dy * layer.kw;
                        for (std::size_t dx = 0; dx < layer.kw; ++dx) acc += wrow[dx] * xrow[dx];
                    }
                }
                out.at(oc, y, xx) = acc;
            }
        }
    }
    return out;
}

Tensor maxpool_forward(const LayerSpec& layer, const Tensor& x) {
    const std::size_t C = x.shape()[0], H = x.shape()[1], W = x.shape()[2];
    const std::size_t oh = H / layer.ph, ow = W / layer.pw;
    Tensor out({C, oh, ow});
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t y = 0; y < oh; ++y) {
            for (std::size_t xx = 0; xx < ow; ++xx) {
                double best = x.at(c, y * layer.ph, xx * layer.pw);
                for (std::size_t dy = 0; dy < layer.ph; ++dy) {
                    for (std::size_t dx = 0; dx < layer.pw; ++dx) {
                        best = std::max(best, x.at(c, y * layer.ph + dy, xx * layer.pw + dx));
                    }
                }
                out.at(c, y, xx) = best;
            }
        }
    }
    return out;
}

Tensor apply_standardization(const Standardization& st, const Tensor& x) {
    Tensor out = x;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (out[i] - st.mean[i]) * st.inv_std[i];
    }
    return out;
}

} // namespace

ForwardResult forward(const Model& model, const Tensor& input) {
    if (!shape_equal(input.shape(), model.input_shape)) {
        throw Error(Errc::ShapeMismatch, "input " + shape_str(input.shape()) +
                                             " does not match model input " +
                                             shape_str(model.input_shape));
    }

    ForwardResult result;
    Tensor x = model.standardization ? apply_standardization(*model.standardization, input)
                                     : input;

    std::size_t p = 0;
    for (const LayerSpec& layer : model.layers) {
        result.cache.layer_inputs.push_back(x);
        switch (layer.kind) {
            case LayerKind::Dense:
                x = dense_forward(layer, model.params[p], model.params[p + 1], x);
                p += 2;
                break;
            case LayerKind::Conv2d:
                x = conv2d_forward(layer, model.params[p], model.params[p + 1], x);
                p += 2;
                break;
            case LayerKind::Relu: {
                Tensor out = x;
                for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(0.0, out[i]);
                x = std::move(out);
                break;
            }
            case LayerKind::Flatten:
                x = Tensor({x.size()}, x.values());
                break;
            case LayerKind::MaxPool2d:
                x = maxpool_forward(layer, x);
                break;
        }
    }

    result.cache.logits = Tensor({x.size()}, x.values());
    result.scores.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) result.scores[i] = stable_sigmoid(x[i]);
    return result;
}

Gradients backward(const Model& model, const ForwardCache& cache,
                   const std::vector<double>& logit_grad) {
    if (cache.layer_inputs.size() != model.layers.size()) {
        throw Error(Errc::StaleCache, "cache has " + std::to_string(cache.layer_inputs.size()) +
                                          " layers, model has " +
                                          std::to_string(model.layers.size()));
    }
    if (logit_grad.size() != cache.logits.size()) {
        throw Error(Errc::ShapeMismatch, "logit gradient length " +
                                             std::to_string(logit_grad.size()) + ", expected " +
                                             std::to_string(cache.logits.size()));
    }

    Gradients grads;
    grads.params = zeros_like(model.params);

    // upstream gradient, walked backwards through the stack
    Tensor g({logit_grad.size()}, logit_grad);

    std::size_t p = model.params.size();
    for (std::size_t li = model.layers.size(); li-- > 0;) {
        const LayerSpec& layer = model.layers[li];
        const Tensor& x = cache.layer_inputs[li];
        switch (layer.kind) {
            case LayerKind::Dense: {
                p -= 2;
                const Tensor& w = model.params[p];
                if (x.size() != layer.in || g.size() != layer.out) {
                    throw Error(Errc::StaleCache,
                                "cached activation does not fit " + layer.describe());
                }
                Tensor& dw = grads.params[p];
                Tensor& db = grads.params[p + 1];
                Tensor dx(x.shape());
                for (std::size_t o = 0; o < layer.out; ++o) {
                    const double go = g[o];
                    db[o] += go;
                    const double* wrow = w.data() + o * layer.in;
                    double* dwrow = dw.data() + o * layer.in;
                    for (std::size_t i = 0; i < layer.in; ++i) {
                        dwrow[i] += go * x[i];
                        dx[i] += go * wrow[i];
                    }
                }
                g = std::move(dx);
                break;
            }
            case LayerKind::Conv2d: {
                p -= 2;
                const Tensor& w = model.params[p];
                const std::size_t H = x.shape()[1], W = x.shape()[2];
                const std::size_t oh = H - layer.kh + 1, ow = W - layer.kw + 1;
                if (g.size() != layer.out_ch * oh * ow) {
                    throw Error(Errc::StaleCache,
                                "cached activation does not fit " + layer.describe());
                }
                Tensor gv({layer.out_ch, oh, ow}, g.values());
                Tensor& dw = grads.params[p];
                Tensor& db = grads.params[p + 1];
                Tensor dx(x.shape());
                for (std::size_t oc = 0; oc < layer.out_ch; ++oc) {
                    for (std::size_t y = 0; y < oh; ++y) {
                        for (std::size_t xx = 0; xx < ow; ++xx) {
                            const double go = gv.at(oc, y, xx);
                            if (go == 0.0) continue;
                            db[oc] += go;
                            for (std::size_t ic = 0; ic < layer.in_ch; ++ic) {
                                for (std::size_t dy = 0; dy < layer.kh; ++dy) {
                                    const double* xrow =
                                        x.data() + (ic * H + (y + dy)) * W + xx;
                                    double* dxrow = dx.data() + (ic * H + (y + dy)) * W + xx;
                                    const std::size_t wbase =
                                        (oc * layer.in_ch + ic) * layer.kh * layer.kw +
                                        dy * layer.kw;
                                    for (std::size_t dxk = 0; dxk < layer.kw; ++dxk) {
                                        dw[wbase + dxk] += go * xrow[dxk];
                                        dxrow[dxk] += go * w[wbase + dxk];
                                    }
                                }
                            }
                        }
                    }
                }
                g = std::move(dx);
                break;
            }
            case LayerKind::Relu: {
                Tensor dx(x.shape());
                for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > 0.0 ? g[i] : 0.0;
                g = std::move(dx);
                break;
            }
            case LayerKind::Flatten: {
                g = Tensor(x.shape(), g.values());
                break;
            }
            case LayerKind::MaxPool2d: {
                const std::size_t C = x.shape()[0], H = x.shape()[1], W = x.shape()[2];
                const std::size_t oh = H / layer.ph, ow = W / layer.pw;
                if (g.size() != C * oh * ow) {
                    throw Error(Errc::StaleCache,
                                "cached activation does not fit " + layer.describe());
                }
                Tensor gv({C, oh, ow}, g.values());
                Tensor dx(x.shape());
                for (std::size_t c = 0; c < C; ++c) {
                    for (std::size_t y = 0; y < oh; ++y) {
                        for (std::size_t xx = 0; xx < ow; ++xx) {
                            // max position, first in scan order on ties
                            std::size_t by = y * layer.ph, bx = xx * layer.pw;
                            double best = x.at(c, by, bx);
                            std::size_t best_y = by, best_x = bx;
                            for (std::size_t dy = 0; dy < layer.ph; ++dy) {
                                for (std::size_t dxk = 0; dxk < layer.pw; ++dxk) {
                                    const double v = x.at(c, by + dy, bx + dxk);
                                    if (v > best) {
                                        best = v;
                                        best_y = by + dy;
                                        best_x = bx + dxk;
                                    }
                                }
                            }
                            dx.at(c, best_y, best_x) += gv.at(c, y, xx);
                        }
                    }
                }
                g = std::move(dx);
                break;
            }
        }
    }

    if (model.standardization) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] *= model.standardization->inv_std[i];
        }
    }
    grads.input = std::move(g);
    return grads;
}

std::vector<double> penultimate(const Model& model, const Tensor& input) {
    std::size_t parametric = 0;
    std::size_t last_dense = model.layers.size();
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        if (model.layers[i].parametric()) ++parametric;
        if (model.layers[i].kind == LayerKind::Dense) last_dense = i;
    }
    if (parametric < 2 || last_dense == model.layers.size()) {
        throw Error(Errc::TooShallow, "model needs at least two parametric layers");
    }

    Model head_off = model;
    head_off.layers.resize(last_dense);
    std::size_t p = 0;
    for (const LayerSpec& layer : head_off.layers) {
        if (layer.parametric()) p += 2;
    }
    head_off.params.resize(p);
    head_off.n_classes = 0;

    ForwardResult r = forward(head_off, input);
    return r.cache.logits.values();
}

std::size_t count_parameters(const Model& model) {
    std::size_t n = 0;
    for (const Tensor& t : model.params) n += t.size();
    return n;
}

void accumulate_scaled(std::vector<Tensor>& acc, const std::vector<Tensor>& g, double scale) {
    for (std::size_t t = 0; t < acc.size(); ++t) {
        double* a = acc[t].data();
        const double* b = g[t].data();
        for (std::size_t i = 0; i < acc[t].size(); ++i) a[i] += scale * b[i];
    }
}

std::vector<Tensor> zeros_like(const std::vector<Tensor>& params) {
    std::vector<Tensor> out;
    out.reserve(params.size());
    for (const Tensor& p : params) out.push_back(Tensor::zeros_like(p));
    return out;
}

} // namespace miltag
