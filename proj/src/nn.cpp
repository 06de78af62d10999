#include "xbarsim/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace xbarsim {

namespace {

std::size_t numel(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape)
        n *= static_cast<std::size_t>(d);
    return n;
}

void conv_out_dims(const Layer& l, int h, int w, int& oh, int& ow, int& pad_top, int& pad_left) {
    if (l.padding == PaddingMode::Same) {
        oh = (h + l.stride_h - 1) / l.stride_h;
        ow = (w + l.stride_w - 1) / l.stride_w;
        const int pad_h = std::max((oh - 1) * l.stride_h + l.k_h - h, 0);
        const int pad_w = std::max((ow - 1) * l.stride_w + l.k_w - w, 0);
        pad_top = pad_h / 2;
        pad_left = pad_w / 2;
    } else {
        oh = (h - l.k_h) / l.stride_h + 1;
        ow = (w - l.k_w) / l.stride_w + 1;
        pad_top = pad_left = 0;
    }
}

void check_weight_alphabet(const IntMatrix& w, bool ternary, std::size_t layer_idx) {
    for (int v : w.data) {
        const bool ok = ternary ? (v >= -1 && v <= 1) : (v == -1 || v == 1);
        if (!ok)
            throw ModelError("layer " + std::to_string(layer_idx) + ": weight value " +
                             std::to_string(v) + " outside the declared alphabet");
    }
}

int to_quantized_int(float x, std::size_t layer_idx) {
    const float r = std::round(x);
    if (std::abs(x - r) > 1e-4f || r < -1.0f || r > 1.0f)
        throw ModelError("layer " + std::to_string(layer_idx) +
                         ": crossbar layer input is not quantized (" + std::to_string(x) + ")");
    return static_cast<int>(r);
}

} // namespace

std::vector<int> QuantizedModel::shape_after(std::size_t count) const {
    std::vector<int> s = input_shape;
    for (std::size_t idx = 0; idx < count; ++idx) {
        const Layer& l = layers[idx];
        switch (l.type) {
        case LayerType::QuantDense: {
            const int in = static_cast<int>(numel(s));
            if (l.weights.cols != in)
                throw ModelError("layer " + std::to_string(idx) + ": dense expects " +
                                 std::to_string(l.weights.cols) + " inputs, got " + std::to_string(in));
            s = {l.weights.rows};
            break;
        }
        case LayerType::QuantConv2D: {
            if (s.size() != 3)
                throw ModelError("layer " + std::to_string(idx) + ": conv2d needs HWC input");
            if (s[2] != l.k_i)
                throw ModelError("layer " + std::to_string(idx) + ": conv2d expects " +
                                 std::to_string(l.k_i) + " channels, got " + std::to_string(s[2]));
            int oh, ow, pt, pl;
            conv_out_dims(l, s[0], s[1], oh, ow, pt, pl);
            if (oh < 1 || ow < 1)
                throw ModelError("layer " + std::to_string(idx) + ": conv output is empty");
            s = {oh, ow, l.k_o};
            break;
        }
        case LayerType::MaxPool:
            if (s.size() != 3)
                throw ModelError("layer " + std::to_string(idx) + ": maxpool needs HWC input");
            s = {s[0] / l.pool_h, s[1] / l.pool_w, s[2]};
            break;
        case LayerType::Affine: {
            const int ch = s.back();
            if (l.scale.size() != l.shift.size())
                throw ModelError("layer " + std::to_string(idx) + ": affine scale/shift size mismatch");
            if (l.scale.size() != 1 && static_cast<int>(l.scale.size()) != ch)
                throw ModelError("layer " + std::to_string(idx) + ": affine has " +
                                 std::to_string(l.scale.size()) + " channels, tensor has " +
                                 std::to_string(ch));
            break;
        }
        case LayerType::Quantize:
            break;
        case LayerType::Flatten:
            s = {static_cast<int>(numel(s))};
            break;
        }
    }
    return s;
}

void QuantizedModel::validate() const {
    if (input_shape.empty())
        throw ModelError("model has no input shape");
    for (int d : input_shape)
        if (d < 1)
            throw ModelError("non-positive input dimension");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Layer& l = layers[i];
        if (l.type == LayerType::QuantDense) {
            check_weight_alphabet(l.weights, l.ternary_weights, i);
        } else if (l.type == LayerType::QuantConv2D) {
            if (l.weights.rows != l.k_o || l.weights.cols != l.k_h * l.k_w * l.k_i)
                throw ModelError("layer " + std::to_string(i) + ": kernel tensor shape mismatch");
            check_weight_alphabet(l.weights, l.ternary_weights, i);
        }
    }
    shape_after(layers.size()); // shape chaining
}

Tensor sign_quantize(const Tensor& x) {
    Tensor out = x;
    for (float& v : out.data)
        v = (v >= 0.0f) ? 1.0f : -1.0f;
    return out;
}

Tensor ternary_quantize(const Tensor& x, float delta_t) {
    if (delta_t < 0.0f)
        throw ModelError("ternary threshold must be >= 0");
    Tensor out = x;
    for (float& v : out.data)
        v = (v > delta_t) ? 1.0f : (v < -delta_t ? -1.0f : 0.0f);
    return out;
}

namespace {

std::vector<const Layer*> crossbar_layers(const QuantizedModel& model) {
    std::vector<const Layer*> out;
    for (const Layer& l : model.layers)
        if (l.type == LayerType::QuantDense || l.type == LayerType::QuantConv2D)
            out.push_back(&l);
    return out;
}

class HostBackend final : public MvmBackend {
public:
    explicit HostBackend(const QuantizedModel& model) : layers_(crossbar_layers(model)) {}

    std::vector<long long> mvm(int layer_id, std::span<const int> v) override {
        const IntMatrix& w = layers_[static_cast<std::size_t>(layer_id)]->weights;
        if (static_cast<int>(v.size()) != w.cols)
            throw ShapeError("host mvm: length mismatch");
        std::vector<long long> r(static_cast<std::size_t>(w.rows), 0);
        for (int m = 0; m < w.rows; ++m) {
            long long acc = 0;
            for (int i = 0; i < w.cols; ++i)
                acc += static_cast<long long>(w.at(m, i)) * v[static_cast<std::size_t>(i)];
            r[static_cast<std::size_t>(m)] = acc;
        }
        return r;
    }

private:
    std::vector<const Layer*> layers_;
};

class CrossbarBackend final : public MvmBackend {
public:
    CrossbarBackend(const QuantizedModel& model, const MappingScheme& scheme,
                    const CrossbarConfig& cfg, const TilerConfig& tiles) {
        const auto layers = crossbar_layers(model);
        handles_.reserve(layers.size());
        for (std::size_t i = 0; i < layers.size(); ++i) {
            CrossbarConfig layer_cfg = cfg;
            layer_cfg.seed = mix_seed(cfg.seed, 0xc5a1u, i);
            handles_.push_back(std::make_unique<MatrixHandle>(scheme, layer_cfg, tiles));
            handles_.back()->write(layers[i]->weights);
        }
    }

    std::vector<long long> mvm(int layer_id, std::span<const int> v) override {
        return handles_[static_cast<std::size_t>(layer_id)]->mvm(v);
    }

    WriteStats stats() const override {
        WriteStats s;
        for (const auto& h : handles_) {
            s.writes += h->stats().writes;
            s.mvms += h->stats().mvms;
        }
        return s;
    }

private:
    std::vector<std::unique_ptr<MatrixHandle>> handles_;
};

} // namespace

std::unique_ptr<MvmBackend> make_host_backend(const QuantizedModel& model) {
    return std::make_unique<HostBackend>(model);
}

std::unique_ptr<MvmBackend> make_crossbar_backend(const QuantizedModel& model,
                                                  const MappingScheme& scheme,
                                                  const CrossbarConfig& cfg,
                                                  const TilerConfig& tiles) {
    return std::make_unique<CrossbarBackend>(model, scheme, cfg, tiles);
}

Tensor im2col_conv2d(const Tensor& ifm, const Layer& layer, int layer_id, MvmBackend& backend) {
    if (ifm.shape.size() != 3 || ifm.shape[2] != layer.k_i)
        throw ShapeError("im2col_conv2d: input shape mismatch");
    const int h = ifm.shape[0], w = ifm.shape[1], ci = ifm.shape[2];
    int oh, ow, pad_top, pad_left;
    conv_out_dims(layer, h, w, oh, ow, pad_top, pad_left);
    Tensor ofm({oh, ow, layer.k_o});
    std::vector<int> col(static_cast<std::size_t>(layer.k_h) * layer.k_w * ci);
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            std::size_t idx = 0;
            for (int kh = 0; kh < layer.k_h; ++kh) {
                const int iy = oy * layer.stride_h + kh - pad_top;
                for (int kw = 0; kw < layer.k_w; ++kw) {
                    const int ix = ox * layer.stride_w + kw - pad_left;
                    const bool inside = iy >= 0 && iy < h && ix >= 0 && ix < w;
                    for (int ki = 0; ki < ci; ++ki, ++idx) {
                        col[idx] = inside
                                       ? to_quantized_int(
                                             ifm.data[(static_cast<std::size_t>(iy) * w + ix) * ci + ki], 0)
                                       : 0;
                    }
                }
            }
            const std::vector<long long> r = backend.mvm(layer_id, col);
            for (int ko = 0; ko < layer.k_o; ++ko)
                ofm.data[(static_cast<std::size_t>(oy) * ow + ox) * layer.k_o + ko] =
                    static_cast<float>(r[static_cast<std::size_t>(ko)]);
        }
    }
    return ofm;
}

namespace {

Tensor host_float_dense(const Tensor& x, const Layer& l) {
    Tensor out({l.weights.rows});
    for (int m = 0; m < l.weights.rows; ++m) {
        double acc = 0.0;
        for (int i = 0; i < l.weights.cols; ++i)
            acc += l.weights.at(m, i) * static_cast<double>(x.data[static_cast<std::size_t>(i)]);
        out.data[static_cast<std::size_t>(m)] = static_cast<float>(acc);
    }
    return out;
}

Tensor host_float_conv(const Tensor& ifm, const Layer& l) {
    const int h = ifm.shape[0], w = ifm.shape[1], ci = ifm.shape[2];
    int oh, ow, pad_top, pad_left;
    conv_out_dims(l, h, w, oh, ow, pad_top, pad_left);
    Tensor ofm({oh, ow, l.k_o});
    for (int oy = 0; oy < oh; ++oy)
        for (int ox = 0; ox < ow; ++ox)
            for (int ko = 0; ko < l.k_o; ++ko) {
                double acc = 0.0;
                for (int kh = 0; kh < l.k_h; ++kh)
                    for (int kw = 0; kw < l.k_w; ++kw) {
                        const int iy = oy * l.stride_h + kh - pad_top;
                        const int ix = ox * l.stride_w + kw - pad_left;
                        if (iy < 0 || iy >= h || ix < 0 || ix >= w)
                            continue;
                        for (int ki = 0; ki < ci; ++ki)
                            acc += l.weights.at(ko, (kh * l.k_w + kw) * ci + ki) *
                                   static_cast<double>(
                                       ifm.data[(static_cast<std::size_t>(iy) * w + ix) * ci + ki]);
                    }
                ofm.data[(static_cast<std::size_t>(oy) * ow + ox) * l.k_o + ko] =
                    static_cast<float>(acc);
            }
    return ofm;
}

} // namespace

Tensor forward(const QuantizedModel& model, const Tensor& sample, MvmBackend& backend,
               const InferenceOptions& opts) {
    Tensor cur = sample;
    int layer_id = 0;
    for (std::size_t idx = 0; idx < model.layers.size(); ++idx) {
        const Layer& l = model.layers[idx];
        switch (l.type) {
        case LayerType::QuantDense: {
            if (opts.first_layer_on_host && layer_id == 0) {
                cur = host_float_dense(cur, l);
            } else {
                std::vector<int> v(cur.size());
                for (std::size_t i = 0; i < cur.size(); ++i)
                    v[i] = to_quantized_int(cur.data[i], idx);
                const std::vector<long long> r = backend.mvm(layer_id, v);
                cur = Tensor({l.weights.rows});
                for (std::size_t i = 0; i < r.size(); ++i)
                    cur.data[i] = static_cast<float>(r[i]);
            }
            ++layer_id;
            break;
        }
        case LayerType::QuantConv2D:
            if (opts.first_layer_on_host && layer_id == 0)
                cur = host_float_conv(cur, l);
            else
                cur = im2col_conv2d(cur, l, layer_id, backend);
            ++layer_id;
            break;
        case LayerType::MaxPool: {
            const int h = cur.shape[0], w = cur.shape[1], c = cur.shape[2];
            const int oh = h / l.pool_h, ow = w / l.pool_w;
            Tensor out({oh, ow, c});
            for (int oy = 0; oy < oh; ++oy)
                for (int ox = 0; ox < ow; ++ox)
                    for (int ch = 0; ch < c; ++ch) {
                        float best = -std::numeric_limits<float>::infinity();
                        for (int py = 0; py < l.pool_h; ++py)
                            for (int px = 0; px < l.pool_w; ++px)
                                best = std::max(best,
                                                cur.data[(static_cast<std::size_t>(oy * l.pool_h + py) * w +
                                                          (ox * l.pool_w + px)) *
                                                             c +
                                                         ch]);
                        out.data[(static_cast<std::size_t>(oy) * ow + ox) * c + ch] = best;
                    }
            cur = std::move(out);
            break;
        }
        case LayerType::Affine: {
            const int ch = cur.shape.back();
            for (std::size_t i = 0; i < cur.size(); ++i) {
                const std::size_t c = l.scale.size() == 1 ? 0 : i % static_cast<std::size_t>(ch);
                cur.data[i] = l.scale[c] * cur.data[i] + l.shift[c];
            }
            break;
        }
        case LayerType::Quantize:
            cur = l.qmode == QuantMode::Sign ? sign_quantize(cur) : ternary_quantize(cur, l.delta_t);
            break;
        case LayerType::Flatten:
            cur.shape = {static_cast<int>(cur.size())};
            break;
        }
    }
    return cur;
}

InferenceResult run_inference(const QuantizedModel& model, const Tensor& inputs,
                              std::span<const int> labels, MvmBackend& backend,
                              const InferenceOptions& opts) {
    if (inputs.shape.empty())
        throw ShapeError("empty input batch");
    const int n_total = inputs.shape[0];
    if (static_cast<int>(labels.size()) != n_total)
        throw ShapeError("label count != sample count");
    const std::vector<int> sample_shape(inputs.shape.begin() + 1, inputs.shape.end());
    const std::size_t stride = numel(sample_shape);
    const int n = (opts.sample_limit >= 0) ? std::min(opts.sample_limit, n_total) : n_total;

    InferenceResult res;
    res.samples = n;
    res.predictions.reserve(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        Tensor sample(sample_shape);
        std::copy_n(inputs.data.begin() + static_cast<std::ptrdiff_t>(s * stride), stride,
                    sample.data.begin());
        const Tensor logits = forward(model, sample, backend, opts);
        const int pred = static_cast<int>(
            std::max_element(logits.data.begin(), logits.data.end()) - logits.data.begin());
        res.predictions.push_back(pred);
        if (pred == labels[static_cast<std::size_t>(s)])
            ++res.correct;
    }
    res.accuracy = n ? static_cast<double>(res.correct) / n : 0.0;
    res.stats = backend.stats();
    return res;
}

} // namespace xbarsim
