#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "xbarsim/mapping.hpp"
#include "xbarsim/xbar.hpp"

namespace xbarsim {

struct TilerConfig {
    int m_int = 0; // logical tile rows (outputs); 0 = largest that fits
    int n_int = 0; // logical tile cols (inputs); 0 = largest that fits
};

struct WriteStats {
    long long writes = 0; // tile programmings
    long long mvms = 0;   // physical crossbar passes
    double reuse_factor() const { return writes ? static_cast<double>(mvms) / writes : 0.0; }
};

// Largest logical (m_int, n_int) a single physical crossbar supports for a
// scheme, after the cells-per-weight expansion.
std::pair<int, int> max_tile_dims(const MappingScheme& scheme, const CrossbarConfig& cfg);

// Implements the write_matrix/mvm functional interface over logical integer
// matrices of arbitrary size. Logical matrix rows (outputs) map to physical
// columns; logical columns (inputs) map to physical rows.
class MatrixHandle {
public:
    MatrixHandle(MappingScheme scheme, CrossbarConfig xbar_cfg, TilerConfig tiles = {});

    // Partitions, encodes, and programs; tiles whose content hash is unchanged
    // are not reprogrammed.
    void write(const IntMatrix& m);

    // r = m * v with host-side accumulation of tile partial results.
    std::vector<long long> mvm(std::span<const int> v);

    const WriteStats& stats() const { return stats_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    int tile_count() const { return static_cast<int>(tiles_.size()); }
    const MappingScheme& scheme() const { return scheme_; }

    MvmOptions& mvm_options() { return mvm_opts_; }

private:
    struct Tile {
        int r0 = 0, m_t = 0; // logical output range
        int c0 = 0, n_t = 0; // logical input range
        std::uint64_t content_hash = 0;
        bool programmed = false;
        DigitalPlan plan;
        std::unique_ptr<Crossbar> xbar;
    };

    MappingScheme scheme_;
    CrossbarConfig cfg_;
    TilerConfig tiling_;
    int rows_ = 0, cols_ = 0;
    std::vector<Tile> tiles_;
    WriteStats stats_;
    MvmOptions mvm_opts_;
};

} // namespace xbarsim
