#pragma once

#include <string>
#include <vector>

#include "xbarsim/nn.hpp"

namespace xbarsim {

// Model files: a JSON manifest plus a little-endian binary weight blob with
// per-tensor byte offsets. See docs/model_format.md for the byte-exact layout.
QuantizedModel load_model(const std::string& manifest_path);
void save_model(const QuantizedModel& model, const std::string& manifest_path);

struct Dataset {
    Tensor inputs;           // [N, ...], float32
    std::vector<int> labels; // length N
};

// Dataset files: "XDST" header followed by an input tensor record (float32)
// and a label tensor record (int32).
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& ds, const std::string& path);

} // namespace xbarsim
