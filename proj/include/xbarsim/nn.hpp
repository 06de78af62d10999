#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "xbarsim/tiler.hpp"
#include "xbarsim/types.hpp"

namespace xbarsim {

// Dense float tensor, NHWC layout for images.
struct Tensor {
    std::vector<int> shape;
    std::vector<float> data;

    Tensor() = default;
    explicit Tensor(std::vector<int> s) : shape(std::move(s)) {
        std::size_t n = 1;
        for (int d : shape)
            n *= static_cast<std::size_t>(d);
        data.assign(n, 0.0f);
    }
    std::size_t size() const { return data.size(); }
};

enum class LayerType { QuantDense, QuantConv2D, MaxPool, Affine, Quantize, Flatten };
enum class QuantMode { Sign, Ternary };
enum class PaddingMode { Valid, Same };

struct Layer {
    LayerType type = LayerType::Flatten;

    // QuantDense: weights out_features x in_features.
    // QuantConv2D: kernels flattened K_O x (K_H*K_W*K_I), row-major (kh, kw, ki).
    IntMatrix weights;
    bool ternary_weights = false;
    int k_h = 1, k_w = 1, k_i = 1, k_o = 1;
    int stride_h = 1, stride_w = 1;
    PaddingMode padding = PaddingMode::Valid;

    int pool_h = 2, pool_w = 2;

    std::vector<float> scale, shift; // Affine, per channel

    QuantMode qmode = QuantMode::Sign;
    float delta_t = 0.0f; // ternary threshold
};

struct QuantizedModel {
    std::vector<int> input_shape; // [H, W, C] or [D]
    std::vector<Layer> layers;

    // Checks alphabet membership and shape chaining; ModelError on violation.
    void validate() const;
    // Shape after layer `count` layers (count = layers.size() => output shape).
    std::vector<int> shape_after(std::size_t count) const;
};

Tensor sign_quantize(const Tensor& x);
Tensor ternary_quantize(const Tensor& x, float delta_t);

// All matrix products of the forward pass go through one of these.
class MvmBackend {
public:
    virtual ~MvmBackend() = default;
    // layer_id indexes the crossbar layers of the model in order.
    virtual std::vector<long long> mvm(int layer_id, std::span<const int> v) = 0;
    virtual WriteStats stats() const { return {}; }
};

// Pure-host integer execution (the reference path).
std::unique_ptr<MvmBackend> make_host_backend(const QuantizedModel& model);

// Crossbar-backed execution: one MatrixHandle per crossbar layer, written once.
std::unique_ptr<MvmBackend> make_crossbar_backend(const QuantizedModel& model,
                                                  const MappingScheme& scheme,
                                                  const CrossbarConfig& cfg,
                                                  const TilerConfig& tiles = {});

struct InferenceOptions {
    bool first_layer_on_host = false; // run the first crossbar layer on host at full precision
    int sample_limit = -1;            // -1 = all samples
};

// im2col lowering of one conv layer: unrolls each output pixel's input patch
// and offloads the MVM. ifm is H x W x C.
Tensor im2col_conv2d(const Tensor& ifm, const Layer& layer, int layer_id, MvmBackend& backend);

// Forward pass for one sample; returns the final activation (logits).
Tensor forward(const QuantizedModel& model, const Tensor& sample, MvmBackend& backend,
               const InferenceOptions& opts = {});

struct InferenceResult {
    std::vector<int> predictions;
    int correct = 0;
    int samples = 0;
    double accuracy = 0.0;
    WriteStats stats;
};

// Runs argmax classification over a batch tensor [N, ...]; weights of every
// crossbar layer are written exactly once for the whole dataset.
InferenceResult run_inference(const QuantizedModel& model, const Tensor& inputs,
                              std::span<const int> labels, MvmBackend& backend,
                              const InferenceOptions& opts = {});

} // namespace xbarsim
