#pragma once

// Desk-scale 10-class digit task: noisy 8x8 glyph bitmaps plus a straight-
// through-estimator trainer for a small binary-weight MLP. Kept inside the
// test tree; the library itself never trains.

#include <cstdint>

#include "xbarsim/model_io.hpp"
#include "xbarsim/nn.hpp"

namespace toy {

// n samples cycling through the 10 classes; each pixel is the glyph bit plus
// clamped Gaussian noise of the given std dev.
xbarsim::Dataset make_digits(int n, std::uint64_t seed, double noise = 0.3);

struct TrainResult {
    xbarsim::QuantizedModel model;
    double test_accuracy = 0.0; // deployed quantized model on the test set
};

// Trains 64 -> hidden -> 10 with sign activations and binary weights (STE on
// sign, clipped float shadow weights) and returns the deployed integer model.
TrainResult train_digit_bnn(const xbarsim::Dataset& train, const xbarsim::Dataset& test,
                            int hidden = 48, int epochs = 40, std::uint64_t seed = 7);

} // namespace toy
