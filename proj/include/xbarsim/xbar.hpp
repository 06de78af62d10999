#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "xbarsim/errors.hpp"
#include "xbarsim/types.hpp"

namespace xbarsim {

enum class AdcMode { Differential, SingleEnded };

// Simplified ADC: input range plus resolution. resolution_bits == nullopt
// disables quantization but clipping still applies.
struct AdcConfig {
    std::optional<int> resolution_bits; // B; nullopt = infinite
    double alpha = 1.0;                 // clipping factor, (0, 1]
    AdcMode mode = AdcMode::Differential;

    void validate() const;
};

// One physical binary crossbar. All cell state is expressed as read current
// in microamperes; conductances and the read voltage never appear.
struct CrossbarConfig {
    int rows_c = 256;
    int cols_c = 256;
    double i_hrs = 5.0;  // uA, nominal HRS read current
    double i_lrs = 10.0; // uA, nominal LRS read current
    double sigma_hrs = 0.0;
    double sigma_lrs = 0.0;
    AdcConfig adc;
    std::uint64_t seed = 0;

    double i_mm() const { return i_lrs - i_hrs; }
    void validate() const;
};

// Programmed conductance state, sampled once at program time.
struct AnalogTile {
    int rows_used = 0;
    int cols_used = 0;
    std::vector<double> currents; // rows_used x cols_used, uA, all >= 0

    double& at(int r, int c) { return currents[static_cast<std::size_t>(r) * cols_used + c]; }
    double at(int r, int c) const { return currents[static_cast<std::size_t>(r) * cols_used + c]; }
};

// Samples cell read currents for a {0,1} target pattern. 1 -> LRS, 0 -> HRS.
// Negative samples are clamped to zero.
AnalogTile program_cells(const BitMatrix& target, const CrossbarConfig& cfg, std::mt19937_64& rng);

// Ideal Kirchhoff column summation: out[j] = sum_i drive[i] * currents[i][j].
std::vector<double> column_currents(const AnalogTile& tile, std::span<const std::uint8_t> drive);

// Mid-rise quantizer with clipping factor alpha. Differential mode treats x as
// signed with range [-alpha*i_max, alpha*i_max]; single-ended mode clips to
// [0, alpha*i_max] with the step formula applied to that range.
double adc_convert(double x, double i_max, const AdcConfig& adc);

// Analog column-pair subtraction followed by one ADC conversion per pair.
std::vector<double> differential_read(const AnalogTile& tile,
                                      std::span<const int> plus_cols,
                                      std::span<const int> minus_cols,
                                      std::span<const std::uint8_t> drive,
                                      double i_max, const AdcConfig& adc);

class Crossbar {
public:
    explicit Crossbar(const CrossbarConfig& cfg) : Crossbar(cfg, cfg.seed) {}
    Crossbar(const CrossbarConfig& cfg, std::uint64_t seed) : cfg_(cfg), rng_(seed) {
        cfg_.validate();
    }

    const CrossbarConfig& config() const { return cfg_; }
    const AnalogTile& tile() const { return tile_; }
    bool programmed() const { return tile_.rows_used > 0; }

    // Consumes the crossbar-owned RNG stream; deterministic per seed.
    void program(const BitMatrix& target);

    std::vector<double> read_columns(std::span<const std::uint8_t> drive) const {
        return column_currents(tile_, drive);
    }

private:
    CrossbarConfig cfg_;
    std::mt19937_64 rng_;
    AnalogTile tile_;
};

} // namespace xbarsim
