#include "xbarsim/model_io.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "xbarsim/errors.hpp"

namespace xbarsim {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::vector<char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ModelError("cannot open file: " + path);
    return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct BlobReader {
    const std::vector<char>& blob;
    const std::string& path;

    void check(std::size_t offset, std::size_t bytes) const {
        if (offset + bytes > blob.size())
            throw ModelError(path + ": tensor record [" + std::to_string(offset) + ", +" +
                             std::to_string(bytes) + ") exceeds blob size " +
                             std::to_string(blob.size()));
    }

    std::vector<int> read_i8(std::size_t offset, std::size_t count) const {
        check(offset, count);
        std::vector<int> out(count);
        for (std::size_t i = 0; i < count; ++i)
            out[i] = static_cast<std::int8_t>(blob[offset + i]);
        return out;
    }

    std::vector<float> read_f32(std::size_t offset, std::size_t count) const {
        check(offset, count * 4);
        std::vector<float> out(count);
        std::memcpy(out.data(), blob.data() + offset, count * 4);
        return out;
    }
};

struct BlobWriter {
    std::vector<char> bytes;

    std::size_t append_i8(const std::vector<int>& v) {
        const std::size_t off = bytes.size();
        for (int x : v)
            bytes.push_back(static_cast<char>(static_cast<std::int8_t>(x)));
        return off;
    }

    std::size_t append_f32(const std::vector<float>& v) {
        const std::size_t off = bytes.size();
        bytes.resize(off + v.size() * 4);
        std::memcpy(bytes.data() + off, v.data(), v.size() * 4);
        return off;
    }
};

std::string layer_ctx(std::size_t idx) { return "layer " + std::to_string(idx) + ": "; }

} // namespace

QuantizedModel load_model(const std::string& manifest_path) {
    json j;
    try {
        j = json::parse(read_file(manifest_path));
    } catch (const json::parse_error& e) {
        throw ModelError(manifest_path + ": " + e.what());
    }
    try {
        if (j.at("format") != "xbarsim-model")
            throw ModelError(manifest_path + ": not an xbarsim model manifest");
        const fs::path blob_path =
            fs::path(manifest_path).parent_path() / j.at("weights_file").get<std::string>();
        const std::vector<char> blob = read_file(blob_path.string());
        BlobReader reader{blob, manifest_path};

        QuantizedModel model;
        model.input_shape = j.at("input_shape").get<std::vector<int>>();
        std::size_t idx = 0;
        for (const json& lj : j.at("layers")) {
            Layer l;
            const std::string type = lj.at("type").get<std::string>();
            if (type == "quant_dense") {
                l.type = LayerType::QuantDense;
                l.ternary_weights = lj.at("alphabet") == "ternary";
                const int out = lj.at("out").get<int>();
                const int in = lj.at("in").get<int>();
                if (out < 1 || in < 1)
                    throw ModelError(layer_ctx(idx) + "non-positive dense dimensions");
                l.weights = IntMatrix(out, in);
                l.weights.data = reader.read_i8(lj.at("weights_offset").get<std::size_t>(),
                                                static_cast<std::size_t>(out) * in);
            } else if (type == "quant_conv2d") {
                l.type = LayerType::QuantConv2D;
                l.ternary_weights = lj.at("alphabet") == "ternary";
                const auto k = lj.at("kernel").get<std::vector<int>>(); // [k_o, k_h, k_w, k_i]
                if (k.size() != 4)
                    throw ModelError(layer_ctx(idx) + "kernel must be [k_o, k_h, k_w, k_i]");
                l.k_o = k[0];
                l.k_h = k[1];
                l.k_w = k[2];
                l.k_i = k[3];
                const auto s = lj.value("stride", std::vector<int>{1, 1});
                l.stride_h = s[0];
                l.stride_w = s.size() > 1 ? s[1] : s[0];
                const std::string pad = lj.value("padding", "valid");
                if (pad != "valid" && pad != "same")
                    throw ModelError(layer_ctx(idx) + "unknown padding '" + pad + "'");
                l.padding = pad == "same" ? PaddingMode::Same : PaddingMode::Valid;
                l.weights = IntMatrix(l.k_o, l.k_h * l.k_w * l.k_i);
                l.weights.data = reader.read_i8(lj.at("weights_offset").get<std::size_t>(),
                                                l.weights.data.size());
            } else if (type == "maxpool") {
                l.type = LayerType::MaxPool;
                const auto wnd = lj.at("window").get<std::vector<int>>();
                l.pool_h = wnd[0];
                l.pool_w = wnd.size() > 1 ? wnd[1] : wnd[0];
            } else if (type == "affine") {
                l.type = LayerType::Affine;
                const std::size_t ch = lj.at("channels").get<std::size_t>();
                l.scale = reader.read_f32(lj.at("scale_offset").get<std::size_t>(), ch);
                l.shift = reader.read_f32(lj.at("shift_offset").get<std::size_t>(), ch);
            } else if (type == "quantize") {
                l.type = LayerType::Quantize;
                const std::string mode = lj.at("mode").get<std::string>();
                if (mode == "sign") {
                    l.qmode = QuantMode::Sign;
                } else if (mode == "ternary") {
                    l.qmode = QuantMode::Ternary;
                    l.delta_t = lj.at("delta").get<float>();
                } else {
                    throw ModelError(layer_ctx(idx) + "unknown quantize mode '" + mode + "'");
                }
            } else if (type == "flatten") {
                l.type = LayerType::Flatten;
            } else {
                throw ModelError(layer_ctx(idx) + "unsupported layer type '" + type + "'");
            }
            model.layers.push_back(std::move(l));
            ++idx;
        }
        model.validate();
        return model;
    } catch (const json::exception& e) {
        throw ModelError(manifest_path + ": " + e.what());
    }
}

void save_model(const QuantizedModel& model, const std::string& manifest_path) {
    model.validate();
    const fs::path mpath(manifest_path);
    fs::path blob_path = mpath;
    blob_path.replace_extension(".bin");

    BlobWriter blob;
    json layers = json::array();
    for (const Layer& l : model.layers) {
        json lj;
        switch (l.type) {
        case LayerType::QuantDense:
            lj["type"] = "quant_dense";
            lj["alphabet"] = l.ternary_weights ? "ternary" : "binary";
            lj["out"] = l.weights.rows;
            lj["in"] = l.weights.cols;
            lj["weights_offset"] = blob.append_i8(l.weights.data);
            break;
        case LayerType::QuantConv2D:
            lj["type"] = "quant_conv2d";
            lj["alphabet"] = l.ternary_weights ? "ternary" : "binary";
            lj["kernel"] = {l.k_o, l.k_h, l.k_w, l.k_i};
            lj["stride"] = {l.stride_h, l.stride_w};
            lj["padding"] = l.padding == PaddingMode::Same ? "same" : "valid";
            lj["weights_offset"] = blob.append_i8(l.weights.data);
            break;
        case LayerType::MaxPool:
            lj["type"] = "maxpool";
            lj["window"] = {l.pool_h, l.pool_w};
            break;
        case LayerType::Affine:
            lj["type"] = "affine";
            lj["channels"] = l.scale.size();
            lj["scale_offset"] = blob.append_f32(l.scale);
            lj["shift_offset"] = blob.append_f32(l.shift);
            break;
        case LayerType::Quantize:
            lj["type"] = "quantize";
            lj["mode"] = l.qmode == QuantMode::Sign ? "sign" : "ternary";
            if (l.qmode == QuantMode::Ternary)
                lj["delta"] = l.delta_t;
            break;
        case LayerType::Flatten:
            lj["type"] = "flatten";
            break;
        }
        layers.push_back(std::move(lj));
    }
    json j;
    j["format"] = "xbarsim-model";
    j["version"] = 1;
    j["weights_file"] = blob_path.filename().string();
    j["input_shape"] = model.input_shape;
    j["layers"] = std::move(layers);

    std::ofstream mout(manifest_path, std::ios::binary);
    if (!mout)
        throw ModelError("cannot write " + manifest_path);
    mout << j.dump(2) << "\n";
    std::ofstream bout(blob_path, std::ios::binary);
    if (!bout)
        throw ModelError("cannot write " + blob_path.string());
    bout.write(blob.bytes.data(), static_cast<std::streamsize>(blob.bytes.size()));
}

namespace {

constexpr char kDatasetMagic[4] = {'X', 'D', 'S', 'T'};

void write_u32(std::ostream& out, std::uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                 static_cast<char>(v >> 24)};
    out.write(b, 4);
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw ModelError(path + ": truncated dataset file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

} // namespace

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ModelError("cannot open dataset: " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kDatasetMagic, 4) != 0)
        throw ModelError(path + ": not an xbarsim dataset file");

    Dataset ds;
    const std::uint32_t ndim = read_u32(in, path);
    if (ndim < 1 || ndim > 8)
        throw ModelError(path + ": bad tensor rank");
    std::size_t n = 1;
    ds.inputs.shape.resize(ndim);
    for (std::uint32_t i = 0; i < ndim; ++i) {
        ds.inputs.shape[i] = static_cast<int>(read_u32(in, path));
        n *= static_cast<std::size_t>(ds.inputs.shape[i]);
    }
    ds.inputs.data.resize(n);
    if (!in.read(reinterpret_cast<char*>(ds.inputs.data.data()), static_cast<std::streamsize>(n * 4)))
        throw ModelError(path + ": truncated input tensor");

    const std::uint32_t n_labels = read_u32(in, path);
    if (static_cast<int>(n_labels) != ds.inputs.shape[0])
        throw ModelError(path + ": label count does not match sample count");
    ds.labels.resize(n_labels);
    for (std::uint32_t i = 0; i < n_labels; ++i)
        ds.labels[i] = static_cast<int>(read_u32(in, path));
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) {
    if (ds.inputs.shape.empty() || ds.inputs.shape[0] != static_cast<int>(ds.labels.size()))
        throw ModelError("dataset: label count must match sample count");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ModelError("cannot write dataset: " + path);
    out.write(kDatasetMagic, 4);
    write_u32(out, static_cast<std::uint32_t>(ds.inputs.shape.size()));
    for (int d : ds.inputs.shape)
        write_u32(out, static_cast<std::uint32_t>(d));
    out.write(reinterpret_cast<const char*>(ds.inputs.data.data()),
              static_cast<std::streamsize>(ds.inputs.data.size() * 4));
    write_u32(out, static_cast<std::uint32_t>(ds.labels.size()));
    for (int l : ds.labels)
        write_u32(out, static_cast<std::uint32_t>(l));
}

} // namespace xbarsim
