#pragma once

#include <optional>
#include <string>
#include <vector>

#include "xbarsim/mapping.hpp"
#include "xbarsim/model_io.hpp"
#include "xbarsim/nn.hpp"

namespace xbarsim {

// Grid sweep over mapping × ADC resolution × α × cell variability × current
// placement. The point index enumerates the Cartesian product in a fixed
// nested order (mapping outermost, currents innermost).
struct SweepConfig {
    std::string model_path;
    std::string dataset_path;
    int samples = -1; // -1 = whole dataset

    std::vector<std::string> mappings;
    std::vector<std::optional<int>> adc_bits; // nullopt = infinite resolution
    std::vector<double> alphas;
    std::vector<double> sigma_lrs;
    std::vector<double> sigma_hrs;
    std::vector<std::pair<double, double>> currents; // (i_hrs, i_lrs)
    int trials = 1;
    std::uint64_t seed = 1;

    int rows_c = 256, cols_c = 256;
    int m_int = 0, n_int = 0; // 0 = largest tile that fits

    void validate() const; // ConfigError on violation
    std::size_t point_count() const;
};

SweepConfig load_sweep_config(const std::string& path);

struct ResultRow {
    std::size_t point = 0;
    int trial = 0;
    std::string mapping;
    std::optional<int> adc_bits;
    double alpha = 1.0;
    double sigma_lrs = 0.0, sigma_hrs = 0.0;
    double i_hrs = 0.0, i_lrs = 0.0;
    std::uint64_t row_seed = 0;
    int samples = 0;
    double accuracy = 0.0;
    long long writes = 0, mvms = 0;
    double wall_seconds = 0.0; // informational; never serialized (determinism)
    std::string status = "ok"; // "ok" or an error summary
};

// Evaluates one (point, trial) cell in isolation; the row seed depends only on
// (cfg.seed, point, trial). A failing point yields status != "ok", never throws.
ResultRow run_point(const SweepConfig& cfg, const QuantizedModel& model, const Dataset& ds,
                    std::size_t point, int trial);

// workers <= 0 selects hardware concurrency. Rows come back in canonical
// (point, trial) order regardless of worker count.
std::vector<ResultRow> run_sweep(const SweepConfig& cfg, int workers = 0);

// CSV with a stable column order; identical inputs give identical bytes.
void write_csv(const std::vector<ResultRow>& rows, std::ostream& out);

struct PointSummary {
    std::string mapping;
    std::optional<int> adc_bits;
    double alpha = 1.0;
    double sigma_lrs = 0.0, sigma_hrs = 0.0;
    double i_hrs = 0.0, i_lrs = 0.0;
    double mean = 0.0, min = 0.0, max = 0.0;
    int trials = 0;
};

struct AlphaInterval {
    std::string mapping;
    std::optional<int> adc_bits;
    double alpha_lo = 0.0, alpha_hi = 0.0;
    double baseline = 0.0; // ideal reference accuracy
    bool found = false;
};

struct SweepSummary {
    std::vector<PointSummary> points;
    // Per (mapping, B): widest contiguous α interval whose mean accuracy stays
    // within 0.01 of the ideal baseline (σ = 0, α = 1, B = ∞ rows).
    std::vector<AlphaInterval> alpha_intervals;
};

SweepSummary summarize(const std::vector<ResultRow>& rows); // EmptyInput on empty

void write_summary_csv(const SweepSummary& s, std::ostream& points_out, std::ostream& alpha_out);

} // namespace xbarsim
