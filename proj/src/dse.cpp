#include "xbarsim/dse.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "xbarsim/errors.hpp"

namespace xbarsim {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& what) {
    if (!ok)
        throw ConfigError("sweep config: " + what);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string fmt_bits(const std::optional<int>& b) {
    return b ? std::to_string(*b) : std::string("inf");
}

} // namespace

void SweepConfig::validate() const {
    require(!model_path.empty(), "model path missing");
    require(!dataset_path.empty(), "dataset path missing");
    require(!mappings.empty(), "mappings list empty");
    require(!adc_bits.empty(), "adc_bits list empty");
    require(!alphas.empty(), "alphas list empty");
    require(!sigma_lrs.empty(), "sigma_lrs list empty");
    require(!sigma_hrs.empty(), "sigma_hrs list empty");
    require(!currents.empty(), "currents list empty");
    require(trials >= 1, "trials must be >= 1");
    require(rows_c >= 1 && cols_c >= 1, "crossbar dims must be positive");
    require(samples == -1 || samples >= 1, "samples must be -1 or >= 1");
    for (const std::string& m : mappings)
        MappingScheme::from_name(m); // throws ConfigError on unknown names
    for (const auto& b : adc_bits)
        require(!b || *b >= 1, "adc_bits entries must be >= 1 or \"inf\"");
    for (double a : alphas)
        require(a > 0.0 && a <= 1.0, "alpha entries must lie in (0, 1]");
    for (double s : sigma_lrs)
        require(s >= 0.0, "sigma_lrs entries must be >= 0");
    for (double s : sigma_hrs)
        require(s >= 0.0, "sigma_hrs entries must be >= 0");
    for (const auto& [h, l] : currents)
        require(h > 0.0 && l > h, "currents entries need 0 < i_hrs < i_lrs");
}

std::size_t SweepConfig::point_count() const {
    return mappings.size() * adc_bits.size() * alphas.size() * sigma_lrs.size() *
           sigma_hrs.size() * currents.size();
}

SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open sweep config: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    try {
        SweepConfig cfg;
        cfg.model_path = j.at("model").get<std::string>();
        cfg.dataset_path = j.at("dataset").get<std::string>();
        cfg.samples = j.value("samples", -1);
        cfg.mappings = j.at("mappings").get<std::vector<std::string>>();
        for (const json& b : j.at("adc_bits")) {
            if (b.is_string()) {
                if (b.get<std::string>() != "inf")
                    throw ConfigError(path + ": adc_bits strings must be \"inf\"");
                cfg.adc_bits.push_back(std::nullopt);
            } else {
                cfg.adc_bits.push_back(b.get<int>());
            }
        }
        cfg.alphas = j.at("alphas").get<std::vector<double>>();
        cfg.sigma_lrs = j.at("sigma_lrs").get<std::vector<double>>();
        cfg.sigma_hrs = j.at("sigma_hrs").get<std::vector<double>>();
        for (const json& c : j.at("currents")) {
            const auto pair = c.get<std::vector<double>>();
            if (pair.size() != 2)
                throw ConfigError(path + ": currents entries must be [i_hrs, i_lrs]");
            cfg.currents.emplace_back(pair[0], pair[1]);
        }
        cfg.trials = j.value("trials", 1);
        cfg.seed = j.value("seed", std::uint64_t{1});
        if (j.contains("crossbar")) {
            const json& xb = j.at("crossbar");
            cfg.rows_c = xb.value("rows", 256);
            cfg.cols_c = xb.value("cols", 256);
            cfg.m_int = xb.value("m_int", 0);
            cfg.n_int = xb.value("n_int", 0);
        }
        cfg.validate();
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

namespace {

// Decodes a point index into its grid coordinates, mapping outermost.
ResultRow decode_point(const SweepConfig& cfg, std::size_t point) {
    ResultRow row;
    row.point = point;
    std::size_t rest = point;
    const std::size_t nc = cfg.currents.size();
    const std::size_t nsh = cfg.sigma_hrs.size();
    const std::size_t nsl = cfg.sigma_lrs.size();
    const std::size_t na = cfg.alphas.size();
    const std::size_t nb = cfg.adc_bits.size();
    const auto [ih, il] = cfg.currents[rest % nc];
    rest /= nc;
    row.i_hrs = ih;
    row.i_lrs = il;
    row.sigma_hrs = cfg.sigma_hrs[rest % nsh];
    rest /= nsh;
    row.sigma_lrs = cfg.sigma_lrs[rest % nsl];
    rest /= nsl;
    row.alpha = cfg.alphas[rest % na];
    rest /= na;
    row.adc_bits = cfg.adc_bits[rest % nb];
    rest /= nb;
    row.mapping = cfg.mappings.at(rest);
    return row;
}

} // namespace

ResultRow run_point(const SweepConfig& cfg, const QuantizedModel& model, const Dataset& ds,
                    std::size_t point, int trial) {
    ResultRow row = decode_point(cfg, point);
    row.trial = trial;
    row.row_seed = mix_seed(cfg.seed, point, static_cast<std::uint64_t>(trial));
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const MappingScheme scheme = MappingScheme::from_name(row.mapping);
        CrossbarConfig xc;
        xc.rows_c = cfg.rows_c;
        xc.cols_c = cfg.cols_c;
        xc.i_hrs = row.i_hrs;
        xc.i_lrs = row.i_lrs;
        xc.sigma_hrs = row.sigma_hrs;
        xc.sigma_lrs = row.sigma_lrs;
        xc.adc.resolution_bits = row.adc_bits;
        xc.adc.alpha = row.alpha;
        xc.seed = row.row_seed;
        auto backend = make_crossbar_backend(model, scheme, xc, {cfg.m_int, cfg.n_int});
        InferenceOptions opts;
        opts.sample_limit = cfg.samples;
        const InferenceResult res = run_inference(model, ds.inputs, ds.labels, *backend, opts);
        row.samples = res.samples;
        row.accuracy = res.accuracy;
        row.writes = res.stats.writes;
        row.mvms = res.stats.mvms;
    } catch (const std::exception& e) {
        row.status = e.what();
        std::replace(row.status.begin(), row.status.end(), ',', ';');
        std::replace(row.status.begin(), row.status.end(), '\n', ' ');
    }
    row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

std::vector<ResultRow> run_sweep(const SweepConfig& cfg, int workers) {
    cfg.validate();
    const QuantizedModel model = load_model(cfg.model_path);
    const Dataset ds = load_dataset(cfg.dataset_path);

    const std::size_t points = cfg.point_count();
    const std::size_t trials = static_cast<std::size_t>(cfg.trials);
    const std::size_t total = points * trials;
    std::vector<ResultRow> rows(total);

    if (workers <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        workers = hw ? static_cast<int>(hw) : 1;
    }
    workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), total));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
            const std::size_t point = i / trials;
            const int trial = static_cast<int>(i % trials);
            rows[i] = run_point(cfg, model, ds, point, trial);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(worker);
        for (std::thread& t : pool)
            t.join();
    }
    return rows;
}

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
    out << "point,trial,mapping,adc_bits,alpha,sigma_lrs,sigma_hrs,i_hrs,i_lrs,"
           "seed,samples,accuracy,writes,mvms,status\n";
    char acc[32];
    for (const ResultRow& r : rows) {
        std::snprintf(acc, sizeof acc, "%.6f", r.accuracy);
        out << r.point << ',' << r.trial << ',' << r.mapping << ',' << fmt_bits(r.adc_bits) << ','
            << fmt_double(r.alpha) << ',' << fmt_double(r.sigma_lrs) << ','
            << fmt_double(r.sigma_hrs) << ',' << fmt_double(r.i_hrs) << ','
            << fmt_double(r.i_lrs) << ',' << r.row_seed << ',' << r.samples << ',' << acc << ','
            << r.writes << ',' << r.mvms << ',' << r.status << '\n';
    }
}

SweepSummary summarize(const std::vector<ResultRow>& rows) {
    if (rows.empty())
        throw EmptyInput("summarize: empty result table");

    SweepSummary out;
    std::map<std::size_t, PointSummary> by_point;
    for (const ResultRow& r : rows) {
        if (r.status != "ok")
            continue;
        auto [it, fresh] = by_point.try_emplace(r.point);
        PointSummary& ps = it->second;
        if (fresh) {
            ps.mapping = r.mapping;
            ps.adc_bits = r.adc_bits;
            ps.alpha = r.alpha;
            ps.sigma_lrs = r.sigma_lrs;
            ps.sigma_hrs = r.sigma_hrs;
            ps.i_hrs = r.i_hrs;
            ps.i_lrs = r.i_lrs;
            ps.min = ps.max = r.accuracy;
        }
        ps.mean += r.accuracy;
        ps.min = std::min(ps.min, r.accuracy);
        ps.max = std::max(ps.max, r.accuracy);
        ++ps.trials;
    }
    for (auto& [pt, ps] : by_point) {
        ps.mean /= ps.trials;
        out.points.push_back(ps);
    }

    // Ideal baseline per mapping: noiseless cells, no clipping, infinite ADC.
    std::map<std::string, std::pair<double, int>> baseline;
    for (const PointSummary& ps : out.points)
        if (ps.sigma_lrs == 0.0 && ps.sigma_hrs == 0.0 && ps.alpha == 1.0 && !ps.adc_bits) {
            auto& [sum, n] = baseline[ps.mapping];
            sum += ps.mean;
            ++n;
        }

    // Mean accuracy per (mapping, B, α), restricted to noiseless cells when
    // such rows exist so the interval isolates the ADC effect.
    const bool have_ideal_sigma =
        std::any_of(out.points.begin(), out.points.end(),
                    [](const PointSummary& p) { return p.sigma_lrs == 0.0 && p.sigma_hrs == 0.0; });
    std::map<std::pair<std::string, std::string>, std::map<double, std::pair<double, int>>> grid;
    for (const PointSummary& ps : out.points) {
        if (have_ideal_sigma && (ps.sigma_lrs != 0.0 || ps.sigma_hrs != 0.0))
            continue;
        auto& [sum, n] = grid[{ps.mapping, fmt_bits(ps.adc_bits)}][ps.alpha];
        sum += ps.mean;
        ++n;
    }
    for (const auto& [key, alphas] : grid) {
        const auto bit = baseline.find(key.first);
        if (bit == baseline.end() || bit->second.second == 0)
            continue;
        const double base = bit->second.first / bit->second.second;
        AlphaInterval iv;
        iv.mapping = key.first;
        iv.adc_bits = key.second == "inf" ? std::nullopt : std::optional<int>(std::stoi(key.second));
        iv.baseline = base;
        // Widest contiguous run of α values keeping mean accuracy within 0.01.
        std::vector<std::pair<double, double>> pts;
        for (const auto& [alpha, acc] : alphas)
            pts.emplace_back(alpha, acc.first / acc.second);
        std::size_t best_len = 0, run_start = 0;
        for (std::size_t i = 0; i <= pts.size(); ++i) {
            const bool good = i < pts.size() && pts[i].second >= base - 0.01;
            if (good)
                continue;
            if (i - run_start > best_len) {
                best_len = i - run_start;
                iv.alpha_lo = pts[run_start].first;
                iv.alpha_hi = pts[i - 1].first;
            }
            run_start = i + 1;
        }
        iv.found = best_len > 0;
        out.alpha_intervals.push_back(iv);
    }
    return out;
}

void write_summary_csv(const SweepSummary& s, std::ostream& points_out, std::ostream& alpha_out) {
    points_out << "mapping,adc_bits,alpha,sigma_lrs,sigma_hrs,i_hrs,i_lrs,"
                  "trials,mean,min,max\n";
    char buf[32];
    for (const PointSummary& p : s.points) {
        points_out << p.mapping << ',' << fmt_bits(p.adc_bits) << ',' << fmt_double(p.alpha) << ','
                   << fmt_double(p.sigma_lrs) << ',' << fmt_double(p.sigma_hrs) << ','
                   << fmt_double(p.i_hrs) << ',' << fmt_double(p.i_lrs) << ',' << p.trials;
        std::snprintf(buf, sizeof buf, ",%.6f", p.mean);
        points_out << buf;
        std::snprintf(buf, sizeof buf, ",%.6f", p.min);
        points_out << buf;
        std::snprintf(buf, sizeof buf, ",%.6f", p.max);
        points_out << buf << '\n';
    }
    alpha_out << "mapping,adc_bits,alpha_lo,alpha_hi,baseline,found\n";
    for (const AlphaInterval& iv : s.alpha_intervals) {
        std::snprintf(buf, sizeof buf, "%.6f", iv.baseline);
        alpha_out << iv.mapping << ',' << fmt_bits(iv.adc_bits) << ',' << fmt_double(iv.alpha_lo)
                  << ',' << fmt_double(iv.alpha_hi) << ',' << buf << ','
                  << (iv.found ? "yes" : "no") << '\n';
    }
}

} // namespace xbarsim
