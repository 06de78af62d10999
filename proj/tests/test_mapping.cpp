#include <doctest.h>

#include <random>

#include "support/oracles.hpp"
#include "xbarsim/mapping.hpp"

using namespace xbarsim;

namespace {

CrossbarConfig ideal_cfg(int rows = 64, int cols = 64) {
    CrossbarConfig cfg;
    cfg.rows_c = rows;
    cfg.cols_c = cols;
    cfg.i_hrs = 5.0;
    cfg.i_lrs = 10.0;
    return cfg;
}

std::vector<long long> run_mvm(const MappingScheme& scheme, const IntMatrix& w,
                               const std::vector<int>& v, const CrossbarConfig& cfg,
                               const MvmOptions& opts = {}) {
    const DigitalPlan plan = encode_weights(w, scheme);
    Crossbar xbar(cfg);
    xbar.program(plan.cell_targets);
    return mvm_on_crossbar(plan, encode_inputs(v, scheme), xbar, opts);
}

IntMatrix single(int w) {
    IntMatrix m(1, 1);
    m.at(0, 0) = w;
    return m;
}

} // namespace

TEST_CASE("scheme names round-trip and reject unknowns") {
    for (const MappingScheme& s : MappingScheme::all_schemes()) {
        const MappingScheme back = MappingScheme::from_name(s.name());
        CHECK(back.kind() == s.kind());
        CHECK(back.variant() == s.variant());
    }
    CHECK(MappingScheme::all_schemes().size() == 19); // 8 variant kinds x 2 + 3 fixed
    CHECK_THROWS_AS(MappingScheme::from_name("bnn-vii"), ConfigError);
    try {
        MappingScheme::from_name("bnn-vii");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bnn-i") != std::string::npos);
    }
    // Kinds with a single realization take no variant suffix.
    CHECK_THROWS_AS(MappingScheme::from_name("bnn-v+cycles"), ConfigError);
    CHECK_THROWS_AS(MappingScheme::from_name("bnn-i+cells"), ConfigError);
}

TEST_CASE("cycle and cells-per-weight table") {
    struct Row {
        const char* name;
        int cycles, cells;
    };
    const Row rows[] = {
        {"bnn-i", 1, 2},          {"bnn-ii", 1, 2},
        {"bnn-iii+cells", 1, 2},  {"bnn-iii+cycles", 2, 1},
        {"bnn-iv+cells", 1, 2},   {"bnn-iv+cycles", 2, 1},
        {"bnn-v", 1, 2},          {"bnn-vi+cells", 1, 4},
        {"bnn-vi+cycles", 2, 2},  {"tnn-i+cells", 1, 4},
        {"tnn-i+cycles", 2, 2},   {"tnn-ii+cells", 1, 4},
        {"tnn-ii+cycles", 2, 2},  {"tnn-iii+cells", 1, 4},
        {"tnn-iii+cycles", 2, 2}, {"tnn-iv+cells", 1, 4},
        {"tnn-iv+cycles", 2, 2},  {"tnn-v+cells", 1, 4},
        {"tnn-v+cycles", 2, 2},
    };
    for (const Row& r : rows) {
        const MappingScheme s = MappingScheme::from_name(r.name);
        CAPTURE(r.name);
        CHECK(s.cycles() == r.cycles);
        CHECK(s.cells_per_weight() == r.cells);
    }
}

TEST_CASE("hand-checked 1x1 results") {
    const CrossbarConfig cfg = ideal_cfg(4, 4);
    CHECK(run_mvm(MappingScheme::from_name("bnn-v"), single(1), {1}, cfg) ==
          std::vector<long long>{1});
    CHECK(run_mvm(MappingScheme::from_name("bnn-v"), single(-1), {1}, cfg) ==
          std::vector<long long>{-1});
    for (int x : {-1, 0, 1})
        CHECK(run_mvm(MappingScheme::from_name("tnn-iii+cells"), single(1), {x}, cfg) ==
              std::vector<long long>{x});
    CHECK(run_mvm(MappingScheme::from_name("tnn-ii+cycles"), single(-1), {-1}, cfg) ==
          std::vector<long long>{1});
    CHECK(run_mvm(MappingScheme::from_name("tnn-iv+cells"), single(-1), {1}, cfg) ==
          std::vector<long long>{-1});
    CHECK(run_mvm(MappingScheme::from_name("tnn-v+cycles"), single(0), {-1}, cfg) ==
          std::vector<long long>{0});
}

TEST_CASE("ideal crossbar equals integer mvm for every scheme") {
    std::mt19937_64 rng(2024);
    const CrossbarConfig cfg = ideal_cfg(32, 32);
    for (const MappingScheme& scheme : MappingScheme::all_schemes()) {
        CAPTURE(scheme.name());
        std::uniform_int_distribution<int> wdist(scheme.ternary() ? -1 : 0, 1);
        for (int trial = 0; trial < 50; ++trial) {
            std::uniform_int_distribution<int> dim(1, 6);
            const int m = dim(rng), n = dim(rng);
            IntMatrix w(m, n);
            for (int& x : w.data) {
                x = wdist(rng);
                if (!scheme.ternary() && x == 0)
                    x = -1;
            }
            std::vector<int> v(static_cast<std::size_t>(n));
            for (int& x : v) {
                x = wdist(rng);
                if (!scheme.ternary() && x == 0)
                    x = -1;
            }
            CHECK(run_mvm(scheme, w, v, cfg) == oracles::int_mvm(w, v));
        }
    }
}

TEST_CASE("variant realizations agree") {
    std::mt19937_64 rng(5);
    const CrossbarConfig cfg = ideal_cfg(32, 64);
    const char* kinds[] = {"bnn-iii", "bnn-iv", "bnn-vi", "tnn-i",
                           "tnn-ii",  "tnn-iii", "tnn-iv", "tnn-v"};
    for (const char* k : kinds) {
        const MappingScheme cells = MappingScheme::from_name(std::string(k) + "+cells");
        const MappingScheme cycles = MappingScheme::from_name(std::string(k) + "+cycles");
        std::uniform_int_distribution<int> dist(cells.ternary() ? -1 : 0, 1);
        for (int trial = 0; trial < 20; ++trial) {
            IntMatrix w(5, 7);
            std::vector<int> v(7);
            for (int& x : w.data) {
                x = dist(rng);
                if (!cells.ternary() && x == 0)
                    x = 1;
            }
            for (int& x : v) {
                x = dist(rng);
                if (!cells.ternary() && x == 0)
                    x = 1;
            }
            CAPTURE(k);
            CHECK(run_mvm(cells, w, v, cfg) == run_mvm(cycles, w, v, cfg));
        }
    }
}

TEST_CASE("bnn schemes treat zero inputs as padding") {
    std::mt19937_64 rng(17);
    const CrossbarConfig cfg = ideal_cfg(32, 32);
    const char* names[] = {"bnn-i",         "bnn-ii",        "bnn-iii+cells", "bnn-iii+cycles",
                           "bnn-iv+cells",  "bnn-iv+cycles", "bnn-v",         "bnn-vi+cells",
                           "bnn-vi+cycles"};
    std::uniform_int_distribution<int> dist(-1, 1);
    for (const char* name : names) {
        const MappingScheme scheme = MappingScheme::from_name(name);
        for (int trial = 0; trial < 20; ++trial) {
            IntMatrix w(4, 8);
            for (int& x : w.data)
                x = dist(rng) >= 0 ? 1 : -1;
            std::vector<int> v(8);
            for (int& x : v)
                x = dist(rng); // zeros appear ~1/3 of the time
            CAPTURE(name);
            CHECK(run_mvm(scheme, w, v, cfg) == oracles::int_mvm(w, v));
        }
    }
}

TEST_CASE("alphabet violations are rejected") {
    const MappingScheme bnn = MappingScheme::from_name("bnn-i");
    const MappingScheme tnn = MappingScheme::from_name("tnn-ii+cells");
    CHECK_THROWS_AS(encode_weights(single(0), bnn), EncodingError);
    CHECK_THROWS_AS(encode_weights(single(2), bnn), EncodingError);
    CHECK_THROWS_AS(encode_weights(single(-2), tnn), EncodingError);
    CHECK_NOTHROW(encode_weights(single(0), tnn));
    CHECK_THROWS_AS(encode_inputs(std::vector<int>{2}, bnn), EncodingError);
    CHECK_THROWS_AS(encode_inputs(std::vector<int>{-3}, tnn), EncodingError);
}

TEST_CASE("cell planes decode back to the weights") {
    std::mt19937_64 rng(31);
    for (const MappingScheme& scheme : MappingScheme::all_schemes()) {
        std::uniform_int_distribution<int> dist(scheme.ternary() ? -1 : 0, 1);
        IntMatrix w(6, 5);
        for (int& x : w.data) {
            x = dist(rng);
            if (!scheme.ternary() && x == 0)
                x = -1;
        }
        const DigitalPlan plan = encode_weights(w, scheme);
        const IntMatrix back = decode_weights(plan);
        CAPTURE(scheme.name());
        CHECK(back.data == w.data);
    }
}

TEST_CASE("analog correction is load-bearing for linear-scaling schemes") {
    // With distinguishable currents (I_hrs = 5, I_lrs = 10) the host-side
    // offset term is what cancels the HRS baseline; removing it must change
    // results whenever the scheme reads single-ended columns.
    const CrossbarConfig cfg = ideal_cfg(32, 32);
    MvmOptions off;
    off.apply_analog_correction = false;

    // BNN V: offset is proportional to the driven-row count, so any nonzero
    // input breaks.
    {
        const MappingScheme s = MappingScheme::from_name("bnn-v");
        IntMatrix w(1, 4);
        for (int& x : w.data)
            x = 1;
        const std::vector<int> v = {1, 1, -1, 1};
        CHECK(run_mvm(s, w, v, cfg) == oracles::int_mvm(w, v));
        CHECK(run_mvm(s, w, v, cfg, off) != oracles::int_mvm(w, v));
    }
    // BNN III/IV per-pass realizations: offset is proportional to sum(i) and
    // breaks iff sum(i) != 0.
    for (const char* name : {"bnn-iii+cycles", "bnn-iv+cycles"}) {
        const MappingScheme s = MappingScheme::from_name(name);
        IntMatrix w(2, 3);
        for (int& x : w.data)
            x = -1;
        const std::vector<int> unbalanced = {1, 1, -1}; // sum = +1
        const std::vector<int> balanced = {1, -1, 1, -1};
        CAPTURE(name);
        CHECK(run_mvm(s, w, unbalanced, cfg, off) != oracles::int_mvm(w, unbalanced));
        IntMatrix w4(2, 4);
        for (int& x : w4.data)
            x = 1;
        CHECK(run_mvm(s, w4, balanced, cfg, off) == oracles::int_mvm(w4, balanced));
    }
    // The folded realizations of III/IV pair their two single-ended reads with
    // opposite signs, so the offsets cancel structurally even without the
    // host-side term.
    for (const char* name : {"bnn-iii+cells", "bnn-iv+cells"}) {
        const MappingScheme s = MappingScheme::from_name(name);
        IntMatrix w(2, 3);
        for (int& x : w.data)
            x = -1;
        const std::vector<int> v = {1, 1, -1};
        CAPTURE(name);
        CHECK(run_mvm(s, w, v, cfg, off) == oracles::int_mvm(w, v));
    }
    // Differential schemes need no offset: the HRS baseline cancels in analog.
    {
        const MappingScheme s = MappingScheme::from_name("bnn-vi+cells");
        IntMatrix w(1, 4);
        for (int& x : w.data)
            x = 1;
        const std::vector<int> v = {1, 1, -1, 1};
        CHECK(run_mvm(s, w, v, cfg, off) == oracles::int_mvm(w, v));
    }
}
