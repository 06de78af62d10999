#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "xbarsim/dse.hpp"
#include "xbarsim/errors.hpp"
#include "xbarsim/mapping.hpp"
#include "xbarsim/model_io.hpp"
#include "xbarsim/nn.hpp"

namespace {

using namespace xbarsim;

std::optional<int> parse_bits(const std::string& s) {
    if (s == "inf")
        return std::nullopt;
    return std::stoi(s);
}

int default_workers() {
    if (const char* env = std::getenv("XBARSIM_WORKERS"))
        return std::atoi(env);
    return 0; // run_sweep picks hardware concurrency
}

void print_scheme(const MappingScheme& s) {
    std::cout << s.name() << "\tcycles=" << s.cycles()
              << "\tcells_per_weight=" << s.cells_per_weight()
              << "\trow_blocks=" << s.row_blocks()
              << "\tcols_per_output=" << s.cols_per_output()
              << "\tscale=" << s.layout().scale_num << "\talphabet="
              << (s.ternary() ? "ternary" : "binary") << "\n";
}

int cmd_infer(const std::string& model_path, const std::string& dataset_path,
              const std::string& mapping, const CrossbarConfig& xc, const TilerConfig& tiles,
              int samples, bool first_layer_host) {
    const QuantizedModel model = load_model(model_path);
    const Dataset ds = load_dataset(dataset_path);
    std::unique_ptr<MvmBackend> backend;
    if (mapping == "host") {
        backend = make_host_backend(model);
    } else {
        const MappingScheme scheme = MappingScheme::from_name(mapping);
        backend = make_crossbar_backend(model, scheme, xc, tiles);
    }
    InferenceOptions opts;
    opts.sample_limit = samples;
    opts.first_layer_on_host = first_layer_host;
    const InferenceResult res = run_inference(model, ds.inputs, ds.labels, *backend, opts);
    char acc[32];
    std::snprintf(acc, sizeof acc, "%.6f", res.accuracy);
    std::cout << "mapping=" << mapping << " samples=" << res.samples << " correct=" << res.correct
              << " accuracy=" << acc << " writes=" << res.stats.writes
              << " mvms=" << res.stats.mvms << " seed=" << xc.seed << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path,
              const std::string& summary_prefix, int workers) {
    const SweepConfig cfg = load_sweep_config(config_path);
    const std::vector<ResultRow> rows = run_sweep(cfg, workers);
    if (out_path.empty() || out_path == "-") {
        write_csv(rows, std::cout);
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out)
            throw ConfigError("cannot write " + out_path);
        write_csv(rows, out);
        std::cerr << "wrote " << rows.size() << " rows to " << out_path << "\n";
    }
    if (!summary_prefix.empty()) {
        const SweepSummary s = summarize(rows);
        std::ofstream pts(summary_prefix + "_points.csv", std::ios::binary);
        std::ofstream alp(summary_prefix + "_alpha.csv", std::ios::binary);
        if (!pts || !alp)
            throw ConfigError("cannot write summary files with prefix " + summary_prefix);
        write_summary_csv(s, pts, alp);
        std::cerr << "wrote summary to " << summary_prefix << "_{points,alpha}.csv\n";
    }
    return 0;
}

int cmd_verify(const std::string& model_path) {
    const QuantizedModel model = load_model(model_path); // validates
    std::cout << "ok layers=" << model.layers.size() << " input_shape=[";
    for (std::size_t i = 0; i < model.input_shape.size(); ++i)
        std::cout << (i ? "," : "") << model.input_shape[i];
    std::cout << "] output_shape=[";
    const auto out = model.shape_after(model.layers.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        std::cout << (i ? "," : "") << out[i];
    std::cout << "]\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Binary RRAM crossbar simulator and BNN/TNN inference toolkit"};
    app.require_subcommand(1);

    // infer
    std::string model_path, dataset_path, mapping = "host";
    CrossbarConfig xc;
    TilerConfig tiles;
    std::string bits_str = "inf";
    int samples = -1;
    bool first_layer_host = false;
    CLI::App* infer = app.add_subcommand("infer", "Run inference over a dataset");
    infer->add_option("--model", model_path, "Model manifest path")->required();
    infer->add_option("--dataset", dataset_path, "Dataset path")->required();
    infer->add_option("--mapping", mapping,
                      "Mapping scheme name, or 'host' for the reference integer path")
        ->default_val("host");
    infer->add_option("--rows", xc.rows_c, "Crossbar rows")->default_val(256);
    infer->add_option("--cols", xc.cols_c, "Crossbar columns")->default_val(256);
    infer->add_option("--m-int", tiles.m_int, "Tile outputs (0 = max)")->default_val(0);
    infer->add_option("--n-int", tiles.n_int, "Tile inputs (0 = max)")->default_val(0);
    infer->add_option("--i-hrs", xc.i_hrs, "HRS read current (uA)")->default_val(5.0);
    infer->add_option("--i-lrs", xc.i_lrs, "LRS read current (uA)")->default_val(10.0);
    infer->add_option("--sigma-hrs", xc.sigma_hrs, "HRS current std dev (uA)")->default_val(0.0);
    infer->add_option("--sigma-lrs", xc.sigma_lrs, "LRS current std dev (uA)")->default_val(0.0);
    infer->add_option("--adc-bits", bits_str, "ADC resolution bits, or 'inf'")->default_val("inf");
    infer->add_option("--alpha", xc.adc.alpha, "ADC clipping factor in (0,1]")->default_val(1.0);
    infer->add_option("--seed", xc.seed, "Cell programming seed")->default_val(1);
    infer->add_option("--samples", samples, "Sample budget (-1 = all)")->default_val(-1);
    infer->add_flag("--first-layer-host", first_layer_host,
                    "Keep the first crossbar layer on the host at full precision");

    // sweep
    std::string config_path, out_path = "-", summary_prefix;
    int workers = default_workers();
    CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep from a config file");
    sweep->add_option("config", config_path, "Sweep config (JSON)")->required();
    sweep->add_option("-o,--out", out_path, "Result CSV path ('-' = stdout)")->default_val("-");
    sweep->add_option("--summary", summary_prefix,
                      "Write <prefix>_points.csv and <prefix>_alpha.csv summaries");
    sweep->add_option("-j,--workers", workers,
                      "Worker threads (0 = hardware concurrency; env XBARSIM_WORKERS)");

    // verify-model
    std::string verify_path;
    CLI::App* verify = app.add_subcommand("verify-model", "Validate a model file");
    verify->add_option("model", verify_path, "Model manifest path")->required();

    // mapping-info
    std::string info_name;
    bool info_all = false;
    CLI::App* info = app.add_subcommand("mapping-info", "Print mapping scheme parameters");
    info->add_option("name", info_name, "Mapping scheme name");
    info->add_flag("--all", info_all, "Print every known scheme");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(infer)) {
            xc.adc.resolution_bits = parse_bits(bits_str);
            return cmd_infer(model_path, dataset_path, mapping, xc, tiles, samples,
                             first_layer_host);
        }
        if (app.got_subcommand(sweep))
            return cmd_sweep(config_path, out_path, summary_prefix, workers);
        if (app.got_subcommand(verify))
            return cmd_verify(verify_path);
        if (app.got_subcommand(info)) {
            if (info_all) {
                for (const MappingScheme& s : MappingScheme::all_schemes())
                    print_scheme(s);
                return 0;
            }
            if (info_name.empty())
                throw ConfigError("mapping-info: give a scheme name or --all");
            print_scheme(MappingScheme::from_name(info_name));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
