#include "xbarsim/xbar.hpp"

#include <algorithm>
#include <cmath>

namespace xbarsim {

void AdcConfig::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw ConfigError("adc alpha must be in (0, 1]");
    if (resolution_bits && *resolution_bits < 1)
        throw ConfigError("adc resolution must be >= 1 bit");
}

void CrossbarConfig::validate() const {
    if (rows_c < 1 || cols_c < 1)
        throw ConfigError("crossbar dimensions must be >= 1");
    if (!(i_hrs > 0.0) || !(i_lrs > i_hrs))
        throw ConfigError("requires 0 < i_hrs < i_lrs");
    if (sigma_hrs < 0.0 || sigma_lrs < 0.0)
        throw ConfigError("sigma must be >= 0");
    adc.validate();
}

AnalogTile program_cells(const BitMatrix& target, const CrossbarConfig& cfg, std::mt19937_64& rng) {
    if (target.rows > cfg.rows_c || target.cols > cfg.cols_c)
        throw TileTooLarge("target " + std::to_string(target.rows) + "x" + std::to_string(target.cols) +
                           " exceeds physical " + std::to_string(cfg.rows_c) + "x" + std::to_string(cfg.cols_c));
    AnalogTile tile;
    tile.rows_used = target.rows;
    tile.cols_used = target.cols;
    tile.currents.resize(static_cast<std::size_t>(target.rows) * target.cols);
    std::normal_distribution<double> lrs(cfg.i_lrs, cfg.sigma_lrs);
    std::normal_distribution<double> hrs(cfg.i_hrs, cfg.sigma_hrs);
    for (int r = 0; r < target.rows; ++r) {
        for (int c = 0; c < target.cols; ++c) {
            double i;
            if (target.at(r, c)) {
                i = cfg.sigma_lrs > 0.0 ? lrs(rng) : cfg.i_lrs;
            } else {
                i = cfg.sigma_hrs > 0.0 ? hrs(rng) : cfg.i_hrs;
            }
            tile.at(r, c) = std::max(i, 0.0); // negative read currents are not physical
        }
    }
    return tile;
}

std::vector<double> column_currents(const AnalogTile& tile, std::span<const std::uint8_t> drive) {
    if (static_cast<int>(drive.size()) != tile.rows_used)
        throw ShapeError("drive length " + std::to_string(drive.size()) + " != rows_used " +
                         std::to_string(tile.rows_used));
    std::vector<double> out(static_cast<std::size_t>(tile.cols_used), 0.0);
    for (int r = 0; r < tile.rows_used; ++r) {
        if (!drive[static_cast<std::size_t>(r)])
            continue;
        const double* row = tile.currents.data() + static_cast<std::size_t>(r) * tile.cols_used;
        for (int c = 0; c < tile.cols_used; ++c)
            out[static_cast<std::size_t>(c)] += row[c];
    }
    return out;
}

double adc_convert(double x, double i_max, const AdcConfig& adc) {
    const double bound = adc.alpha * i_max;
    if (adc.mode == AdcMode::SingleEnded) {
        const double xc = std::clamp(x, 0.0, bound);
        if (!adc.resolution_bits)
            return xc;
        const double delta = bound / static_cast<double>(1ull << *adc.resolution_bits);
        return delta * (std::floor(xc / delta) + 0.5);
    }
    const double sgn = (x > 0.0) ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
    const double mag = std::clamp(std::abs(x), 0.0, bound);
    if (!adc.resolution_bits)
        return sgn * mag;
    const double delta = adc.alpha * 2.0 * i_max / static_cast<double>(1ull << *adc.resolution_bits);
    return sgn * delta * (std::floor(mag / delta) + 0.5);
}

std::vector<double> differential_read(const AnalogTile& tile,
                                      std::span<const int> plus_cols,
                                      std::span<const int> minus_cols,
                                      std::span<const std::uint8_t> drive,
                                      double i_max, const AdcConfig& adc) {
    if (plus_cols.size() != minus_cols.size())
        throw ShapeError("differential_read: unpaired column sets");
    const std::vector<double> currents = column_currents(tile, drive);
    std::vector<double> out(plus_cols.size());
    for (std::size_t j = 0; j < plus_cols.size(); ++j) {
        const double diff = currents[static_cast<std::size_t>(plus_cols[j])] -
                            currents[static_cast<std::size_t>(minus_cols[j])];
        out[j] = adc_convert(diff, i_max, adc);
    }
    return out;
}

void Crossbar::program(const BitMatrix& target) {
    tile_ = program_cells(target, cfg_, rng_);
}

} // namespace xbarsim
