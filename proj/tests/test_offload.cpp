#include <doctest.h>

#include <random>
#include <vector>

#include "support/oracles.hpp"
#include "xbarsim/offload.h"
#include "xbarsim/types.hpp"

namespace {

xbs_offload_config ideal_config(const char* mapping) {
    xbs_offload_config cfg{};
    cfg.mapping = mapping;
    cfg.rows_c = 256;
    cfg.cols_c = 256;
    cfg.i_hrs = 5.0;
    cfg.i_lrs = 10.0;
    cfg.alpha = 1.0;
    cfg.adc_bits = 0; // infinite
    cfg.seed = 1;
    return cfg;
}

} // namespace

TEST_CASE("calls before configuration fail cleanly") {
    xbs_offload_config bad = ideal_config("bnn-vii");
    CHECK(xbs_configure(&bad) == XBS_ERR_BAD_ARG);
    int m[4] = {1, -1, 1, -1};
    int v[2] = {1, 1};
    int r[2] = {0, 0};
    CHECK(write_matrix(m, 2, 2) == XBS_ERR_NOT_CONFIGURED);
    CHECK(mvm(r, v, 2, 2) == XBS_ERR_NOT_CONFIGURED);
    CHECK(xbs_stats(nullptr, nullptr) == XBS_ERR_NOT_CONFIGURED);
    CHECK(xbs_configure(nullptr) == XBS_ERR_BAD_ARG);
}

TEST_CASE("configure, write, mvm contract") {
    xbs_offload_config cfg = ideal_config("bnn-vi+cells");
    REQUIRE(xbs_configure(&cfg) == XBS_OK);

    const int m_int = 12, n_int = 20;
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> pm(0, 1);
    xbarsim::IntMatrix w(m_int, n_int);
    std::vector<int> v(n_int);
    for (int& x : w.data)
        x = pm(rng) ? 1 : -1;
    for (int& x : v)
        x = pm(rng) ? 1 : -1;

    REQUIRE(write_matrix(w.data.data(), m_int, n_int) == XBS_OK);
    std::vector<int> r(m_int, 0);
    REQUIRE(mvm(r.data(), v.data(), m_int, n_int) == XBS_OK);
    const std::vector<long long> want = oracles::int_mvm(w, v);
    for (int i = 0; i < m_int; ++i)
        CHECK(static_cast<long long>(r[static_cast<std::size_t>(i)]) ==
              want[static_cast<std::size_t>(i)]);

    // Dimension mismatch with the written matrix.
    CHECK(mvm(r.data(), v.data(), m_int + 1, n_int) == XBS_ERR_BAD_ARG);
    CHECK(write_matrix(nullptr, m_int, n_int) == XBS_ERR_BAD_ARG);
    CHECK(mvm(nullptr, v.data(), m_int, n_int) == XBS_ERR_BAD_ARG);

    long long writes = 0, mvms = 0;
    REQUIRE(xbs_stats(&writes, &mvms) == XBS_OK);
    CHECK(writes == 1);
    CHECK(mvms == 1); // one tile, one pass

    // Rewriting identical content is a cache hit.
    REQUIRE(write_matrix(w.data.data(), m_int, n_int) == XBS_OK);
    REQUIRE(xbs_stats(&writes, &mvms) == XBS_OK);
    CHECK(writes == 1);
}

TEST_CASE("alphabet violations surface as encoding errors") {
    xbs_offload_config cfg = ideal_config("bnn-i");
    REQUIRE(xbs_configure(&cfg) == XBS_OK);
    int m[4] = {1, 2, -1, 1}; // 2 is outside {-1, +1}
    CHECK(write_matrix(m, 2, 2) == XBS_ERR_ENCODING);
}

TEST_CASE("oversized tiles surface as capacity errors") {
    xbs_offload_config cfg = ideal_config("bnn-i");
    cfg.rows_c = 8;
    cfg.cols_c = 8;
    cfg.m_int = 8; // needs 16 physical columns
    cfg.n_int = 8;
    CHECK(xbs_configure(&cfg) == XBS_ERR_TOO_LARGE);
}
