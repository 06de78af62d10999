#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "xbarsim/tiler.hpp"

using namespace xbarsim;

namespace {

CrossbarConfig ideal_cfg(int rows = 256, int cols = 256) {
    CrossbarConfig cfg;
    cfg.rows_c = rows;
    cfg.cols_c = cols;
    cfg.i_hrs = 5.0;
    cfg.i_lrs = 10.0;
    return cfg;
}

IntMatrix random_bnn_matrix(int m, int n, std::mt19937_64& rng) {
    IntMatrix w(m, n);
    std::uniform_int_distribution<int> d(0, 1);
    for (int& x : w.data)
        x = d(rng) ? 1 : -1;
    return w;
}

std::vector<int> random_bnn_vec(int n, std::mt19937_64& rng) {
    std::vector<int> v(static_cast<std::size_t>(n));
    std::uniform_int_distribution<int> d(0, 1);
    for (int& x : v)
        x = d(rng) ? 1 : -1;
    return v;
}

} // namespace

TEST_CASE("max tile dims follow the cell expansion") {
    const CrossbarConfig cfg = ideal_cfg();
    auto [m1, n1] = max_tile_dims(MappingScheme::from_name("bnn-i"), cfg);
    CHECK(m1 == 128); // 2 columns per output
    CHECK(n1 == 256);
    auto [m2, n2] = max_tile_dims(MappingScheme::from_name("bnn-v"), cfg);
    CHECK(m2 == 256);
    CHECK(n2 == 128); // 2 row blocks
    auto [m3, n3] = max_tile_dims(MappingScheme::from_name("tnn-ii+cells"), cfg);
    CHECK(m3 == 64); // 4 columns per output
    CHECK(n3 == 128);
}

TEST_CASE("ceiling partition and per-tile write accounting") {
    MatrixHandle h(MappingScheme::from_name("bnn-i"), ideal_cfg(), {2, 2});
    std::mt19937_64 rng(3);
    h.write(random_bnn_matrix(3, 3, rng));
    CHECK(h.tile_count() == 4); // ceil(3/2) x ceil(3/2)
    CHECK(h.stats().writes == 4);
}

TEST_CASE("unchanged tiles are not reprogrammed") {
    std::mt19937_64 rng(4);
    const IntMatrix w = random_bnn_matrix(6, 6, rng);
    MatrixHandle h(MappingScheme::from_name("bnn-vi+cells"), ideal_cfg(), {3, 3});
    h.write(w);
    CHECK(h.stats().writes == 4);
    h.write(w);
    CHECK(h.stats().writes == 4); // cache hit everywhere
    IntMatrix w2 = w;
    w2.at(5, 5) = -w2.at(5, 5); // touches exactly one tile
    h.write(w2);
    CHECK(h.stats().writes == 5);
}

TEST_CASE("mvm counts physical passes per tile") {
    std::mt19937_64 rng(9);
    const MappingScheme scheme = MappingScheme::from_name("bnn-iii+cycles"); // 2 passes
    MatrixHandle h(scheme, ideal_cfg(), {2, 2});
    h.write(random_bnn_matrix(4, 4, rng));
    CHECK(h.tile_count() == 4);
    const std::vector<int> v = random_bnn_vec(4, rng);
    h.mvm(v);
    h.mvm(v);
    CHECK(h.stats().mvms == 2 * 4 * 2); // calls x tiles x passes
    CHECK(h.stats().reuse_factor() == doctest::Approx(4.0));
}

TEST_CASE("tiled execution equals the untiled oracle") {
    std::mt19937_64 rng(11);
    const IntMatrix w = random_bnn_matrix(64, 64, rng);
    const std::vector<int> v = random_bnn_vec(64, rng);
    const std::vector<long long> want = oracles::int_mvm(w, v);
    for (const char* name : {"bnn-i", "bnn-v", "bnn-vi+cells", "tnn-iv+cycles"}) {
        for (int tile : {3, 8, 17, 64}) {
            MatrixHandle h(MappingScheme::from_name(name), ideal_cfg(), {tile, tile});
            h.write(w);
            CAPTURE(name);
            CAPTURE(tile);
            CHECK(h.mvm(v) == want);
        }
    }
}

TEST_CASE("shape and capacity errors") {
    CHECK_THROWS_AS(MatrixHandle(MappingScheme::from_name("bnn-i"), ideal_cfg(8, 8), {8, 8}),
                    TileTooLarge); // 8 outputs need 16 physical columns
    MatrixHandle h(MappingScheme::from_name("bnn-i"), ideal_cfg(), {4, 4});
    std::mt19937_64 rng(1);
    h.write(random_bnn_matrix(4, 4, rng));
    const std::vector<int> wrong_len = {1, -1};
    CHECK_THROWS_AS(h.mvm(wrong_len), ShapeError);
}

TEST_CASE("per-tile seeds are stable across rewrites") {
    std::mt19937_64 rng(21);
    CrossbarConfig cfg = ideal_cfg();
    cfg.sigma_lrs = 2.0;
    cfg.sigma_hrs = 1.0;
    cfg.seed = 77;
    const IntMatrix w = random_bnn_matrix(32, 32, rng);
    const std::vector<int> v = random_bnn_vec(32, rng);
    MatrixHandle a(MappingScheme::from_name("bnn-vi+cells"), cfg, {8, 8});
    MatrixHandle b(MappingScheme::from_name("bnn-vi+cells"), cfg, {8, 8});
    a.write(w);
    b.write(w);
    CHECK(a.mvm(v) == b.mvm(v));
}
