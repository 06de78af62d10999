#include "xbarsim/tiler.hpp"

#include <string>

namespace xbarsim {

namespace {

std::uint64_t hash_tile(const IntMatrix& m, int r0, int m_t, int c0, int n_t) {
    std::uint64_t h = 0xcbf29ce484222325ull; // FNV-1a
    auto mixb = [&h](std::uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ull;
    };
    mixb(static_cast<std::uint64_t>(m_t) << 32 | static_cast<std::uint32_t>(n_t));
    for (int r = r0; r < r0 + m_t; ++r)
        for (int c = c0; c < c0 + n_t; ++c)
            mixb(static_cast<std::uint64_t>(static_cast<std::int64_t>(m.at(r, c)) + 2));
    return h;
}

} // namespace

std::pair<int, int> max_tile_dims(const MappingScheme& scheme, const CrossbarConfig& cfg) {
    return {cfg.cols_c / scheme.cols_per_output(), cfg.rows_c / scheme.row_blocks()};
}

MatrixHandle::MatrixHandle(MappingScheme scheme, CrossbarConfig xbar_cfg, TilerConfig tiles)
    : scheme_(scheme), cfg_(xbar_cfg), tiling_(tiles) {
    cfg_.validate();
    auto [m_max, n_max] = max_tile_dims(scheme_, cfg_);
    if (m_max < 1 || n_max < 1)
        throw TileTooLarge("crossbar too small for one weight of mapping " + scheme_.name());
    if (tiling_.m_int <= 0)
        tiling_.m_int = m_max;
    if (tiling_.n_int <= 0)
        tiling_.n_int = n_max;
    if (tiling_.m_int > m_max || tiling_.n_int > n_max)
        throw TileTooLarge("tile " + std::to_string(tiling_.m_int) + "x" + std::to_string(tiling_.n_int) +
                           " exceeds physical capacity " + std::to_string(m_max) + "x" +
                           std::to_string(n_max) + " for mapping " + scheme_.name());
}

void MatrixHandle::write(const IntMatrix& m) {
    if (m.rows < 1 || m.cols < 1)
        throw ShapeError("write_matrix: empty matrix");
    if (m.rows != rows_ || m.cols != cols_) {
        // Dimension change: rebuild the tile grid (ceiling partition).
        rows_ = m.rows;
        cols_ = m.cols;
        tiles_.clear();
        int tile_idx = 0;
        for (int r0 = 0; r0 < rows_; r0 += tiling_.m_int) {
            for (int c0 = 0; c0 < cols_; c0 += tiling_.n_int) {
                Tile t;
                t.r0 = r0;
                t.m_t = std::min(tiling_.m_int, rows_ - r0);
                t.c0 = c0;
                t.n_t = std::min(tiling_.n_int, cols_ - c0);
                t.xbar = std::make_unique<Crossbar>(cfg_, mix_seed(cfg_.seed, 0x7169u, tile_idx));
                tiles_.push_back(std::move(t));
                ++tile_idx;
            }
        }
    }
    for (Tile& t : tiles_) {
        const std::uint64_t h = hash_tile(m, t.r0, t.m_t, t.c0, t.n_t);
        if (t.programmed && h == t.content_hash)
            continue;
        IntMatrix sub(t.m_t, t.n_t);
        for (int r = 0; r < t.m_t; ++r)
            for (int c = 0; c < t.n_t; ++c)
                sub.at(r, c) = m.at(t.r0 + r, t.c0 + c);
        t.plan = encode_weights(sub, scheme_);
        t.xbar->program(t.plan.cell_targets);
        t.content_hash = h;
        t.programmed = true;
        ++stats_.writes;
    }
}

std::vector<long long> MatrixHandle::mvm(std::span<const int> v) {
    if (tiles_.empty())
        throw ShapeError("mvm before write_matrix");
    if (static_cast<int>(v.size()) != cols_)
        throw ShapeError("mvm: vector length " + std::to_string(v.size()) + " != matrix cols " +
                         std::to_string(cols_));
    std::vector<long long> r(static_cast<std::size_t>(rows_), 0);
    for (Tile& t : tiles_) {
        const EncodedInput enc = encode_inputs(v.subspan(static_cast<std::size_t>(t.c0),
                                                         static_cast<std::size_t>(t.n_t)),
                                               scheme_);
        const std::vector<long long> part = mvm_on_crossbar(t.plan, enc, *t.xbar, mvm_opts_);
        for (int k = 0; k < t.m_t; ++k)
            r[static_cast<std::size_t>(t.r0 + k)] += part[static_cast<std::size_t>(k)];
        stats_.mvms += scheme_.passes();
    }
    return r;
}

} // namespace xbarsim
