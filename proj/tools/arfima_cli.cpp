// arfima: long-memory traffic forecasting toolkit command line.
//
// Exit codes:
//   0  success
//   2  usage / argument parse error
//   3  malformed model configuration string
//   4  I/O failure
//   5  numeric or domain error

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arfima/arfima.hpp"
#include "arfima/hurst.hpp"
#include "arfima/metrics.hpp"
#include "arfima/sampling.hpp"
#include "arfima/timeseries.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
    std::string input;
    std::string output;  // empty => stdout
    std::string column = "traffic";
    std::int64_t granularity = 3600;
    long seed = 42;
    double normalization = 1e7;
};

std::string provenance_line(const std::string& subcommand, const CommonOpts& opts,
                            const std::string& extra = "") {
    std::ostringstream os;
    os << "# arfima-toolkit v" << kVersion << " subcommand=" << subcommand
       << " seed=" << opts.seed << " normalization=scale_by:" << opts.normalization;
    if (!extra.empty()) os << ' ' << extra;
    return os.str();
}

nlohmann::json provenance_json(const std::string& subcommand, const CommonOpts& opts,
                               const std::string& extra = "") {
    nlohmann::json j{{"toolkit_version", kVersion},
                     {"subcommand", subcommand},
                     {"seed", opts.seed},
                     {"normalization", "scale_by:" + std::to_string(opts.normalization)}};
    if (!extra.empty()) j["args"] = extra;
    return j;
}

// temp file + rename so a failed run never leaves a partial output
void write_atomically(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

arfima::TimeSeries load(const CommonOpts& opts) {
    return arfima::load_series(opts.input, opts.column, {opts.granularity});
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_output_default = false) {
    cmd->add_option("input", opts.input, "input series file (.csv or .json)")->required();
    cmd->add_option("-o,--output", opts.output, "output file (default: stdout)");
    cmd->add_option("--column", opts.column, "CSV column name or index (default: traffic)");
    cmd->add_option("--granularity", opts.granularity, "series granularity in seconds");
    cmd->add_option("--seed", opts.seed, "random seed recorded in outputs");
    cmd->add_option("--normalization", opts.normalization,
                    "divide values by this scale before modeling (default 1e7)");
    (void)needs_output_default;
}

int run_ingest(const CommonOpts& opts) {
    auto s = load(opts);
    nlohmann::json j = arfima::to_json(s);
    j["provenance"] = provenance_json("ingest", opts);
    write_atomically(opts.output, j.dump(2) + "\n");
    return 0;
}

int run_hurst(const CommonOpts& opts) {
    auto s = load(opts);
    auto est = arfima::estimate_hurst(s);
    std::ostringstream os;
    os.precision(10);
    os << provenance_line("hurst", opts) << '\n';
    os << "h,d,r_squared\n";
    os << est.h << ',' << est.d << ',' << est.r_squared << '\n';
    os << "log_n,log_mean_rs\n";
    for (auto [ln, lrs] : est.log_rs_points) os << ln << ',' << lrs << '\n';
    write_atomically(opts.output, os.str());
    return 0;
}

int run_fracdiff(const CommonOpts& opts, double d, unsigned eta, bool inverse) {
    auto s = load(opts);
    arfima::TimeSeries out = s;
    if (inverse) {
        out = arfima::apply_inverse_fracdiff(out, d);
    } else {
        if (eta > 0) out = arfima::integer_difference(out, eta).first;
        out = arfima::apply_fracdiff(out, d);
    }
    nlohmann::json j = arfima::to_json(out);
    std::ostringstream extra;
    extra << "d=" << d << " eta=" << eta << " inverse=" << inverse;
    j["provenance"] = provenance_json("fracdiff", opts, extra.str());
    write_atomically(opts.output, j.dump(2) + "\n");
    return 0;
}

int run_fit(const CommonOpts& opts, unsigned p, unsigned q, bool auto_order,
            unsigned max_p, unsigned max_q) {
    auto s = load(opts);
    auto [norm, rec] = arfima::normalize_scale(s, opts.normalization);
    if (auto_order) std::tie(p, q) = arfima::select_order(norm, max_p, max_q);
    auto model = arfima::fit_arma(norm, p, q);
    nlohmann::json j = arfima::to_json(model);
    j["provenance"] = provenance_json("fit", opts);
    write_atomically(opts.output, j.dump(2) + "\n");
    return 0;
}

int run_forecast(const CommonOpts& opts, const std::string& model_config,
                 std::size_t horizon, const std::string& format) {
    auto s = load(opts);
    auto [norm, rec] = arfima::normalize_scale(s, opts.normalization);
    auto cfg = arfima::parse_model_config(model_config);
    auto model = arfima::fit_arfima(norm, cfg, rec);
    auto fc = arfima::forecast(model, horizon);

    if (format == "csv") {
        std::ostringstream os;
        os.precision(10);
        os << provenance_line("forecast", opts, "model=" + model_config) << '\n';
        os << "step,value,differenced_value\n";
        for (std::size_t j = 0; j < horizon; ++j)
            os << (j + 1) << ',' << fc.values[j] << ',' << fc.differenced_values[j] << '\n';
        write_atomically(opts.output, os.str());
    } else {
        nlohmann::json j{{"horizon", fc.horizon},
                         {"values", fc.values},
                         {"differenced_values", fc.differenced_values},
                         {"model", arfima::to_json(model)}};
        j["provenance"] = provenance_json("forecast", opts, "model=" + model_config);
        write_atomically(opts.output, j.dump(2) + "\n");
    }
    return 0;
}

int run_compare(const CommonOpts& opts, const std::vector<std::string>& models,
                double train_fraction) {
    auto s = load(opts);
    auto [norm, rec] = arfima::normalize_scale(s, opts.normalization);
    arfima::EvaluationReport report;
    for (const auto& text : models) {
        auto cfg = arfima::parse_model_config(text);
        report.rows.push_back(arfima::rolling_evaluate(norm, cfg, train_fraction, rec));
    }
    std::ostringstream os;
    os << provenance_line("compare", opts) << '\n' << report.to_csv();
    write_atomically(opts.output, os.str());
    return 0;
}

int run_sample_sweep(const CommonOpts& opts, const std::vector<std::string>& models,
                     const std::string& ratios_text, double train_fraction) {
    auto s = load(opts);
    std::vector<arfima::ArfimaConfig> configs;
    for (const auto& text : models) configs.push_back(arfima::parse_model_config(text));
    std::vector<arfima::SamplingRatio> ratios;
    {
        std::stringstream ss(ratios_text);
        std::string tok;
        while (std::getline(ss, tok, ','))
            ratios.push_back({static_cast<unsigned>(std::stoul(tok))});
    }
    auto report = arfima::sampling_sweep(s, configs, ratios, train_fraction, opts.normalization);

    std::ostringstream os;
    os.precision(10);
    os << provenance_line("sample-sweep", opts, "ratios=" + ratios_text) << '\n';
    os << report.to_csv();
    // pivots in the layout of the paper's sampling figures: rows = ratio,
    // columns = model
    for (const char* metric : {"rmse", "rrmse"}) {
        os << "\npivot," << metric << '\n';
        os << "ratio";
        for (const auto& cfg : configs) os << ',' << arfima::csv_field(cfg.label);
        os << '\n';
        for (const auto& ratio : ratios) {
            std::string cond = std::to_string(ratio.n_to_one) + ":1";
            os << cond;
            for (const auto& cfg : configs) {
                for (const auto& row : report.rows) {
                    if (row.condition == cond && row.label == cfg.label) {
                        if (row.failed)
                            os << ",failed";
                        else
                            os << ',' << (std::string(metric) == "rmse" ? row.rmse : row.rrmse);
                    }
                }
            }
            os << '\n';
        }
    }
    write_atomically(opts.output, os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ARFIMA long-memory traffic forecasting toolkit"};
    app.require_subcommand(1);
    app.footer(
        "Exit codes: 0 success, 2 usage error, 3 bad model config, 4 I/O failure,\n"
        "5 numeric/domain error.\n"
        "Model configs: arma:p,q | arima:p,eta,q | arfima:p,d-or-auto,q[,eta]");

    CommonOpts opts;

    auto* ingest = app.add_subcommand("ingest", "read a CSV series and emit the JSON series format");
    add_common(ingest, opts);

    auto* hurst = app.add_subcommand("hurst", "R/S Hurst estimate: prints H, d, R^2 and the log-log table");
    add_common(hurst, opts);

    double fd_d = 0.0;
    unsigned fd_eta = 0;
    bool fd_inverse = false;
    auto* fracdiff = app.add_subcommand("fracdiff", "apply (1-L)^eta (1-L)^d or its fractional inverse");
    add_common(fracdiff, opts);
    fracdiff->add_option("--d", fd_d, "fractional order")->required();
    fracdiff->add_option("--eta", fd_eta, "integer differencing order");
    fracdiff->add_flag("--inverse", fd_inverse, "apply (1-L)^{-d} instead");

    unsigned fit_p = 0, fit_q = 0, fit_max_p = 3, fit_max_q = 3;
    bool fit_auto = false;
    auto* fit = app.add_subcommand("fit", "fit an ARMA(p,q) model by conditional sum of squares");
    add_common(fit, opts);
    fit->add_option("--p", fit_p, "AR order");
    fit->add_option("--q", fit_q, "MA order");
    fit->add_flag("--auto", fit_auto, "select (p,q) by AIC grid search");
    fit->add_option("--max-p", fit_max_p, "AIC grid limit for p (<=5)");
    fit->add_option("--max-q", fit_max_q, "AIC grid limit for q (<=5)");

    std::string fc_model = "arfima:1,auto,1";
    std::size_t fc_horizon = 1;
    std::string fc_format = "json";
    auto* forecast = app.add_subcommand("forecast", "fit a model and forecast h steps ahead");
    add_common(forecast, opts);
    forecast->add_option("--model", fc_model, "model config string");
    forecast->add_option("--horizon", fc_horizon, "steps ahead")->required();
    forecast->add_option("--format", fc_format, "output format: json (default) or csv");

    std::vector<std::string> cmp_models{"arma:0,1", "arima:0,1,1", "arfima:1,auto,1"};
    double cmp_train = 2.0 / 3.0;
    auto* compare = app.add_subcommand("compare", "walk-forward model comparison report (CSV)");
    add_common(compare, opts);
    compare->add_option("--models", cmp_models, "model config strings");
    compare->add_option("--train-fraction", cmp_train, "training prefix fraction (default 2/3)");

    std::vector<std::string> sw_models{"arma:0,1", "arima:0,1,1", "arfima:1,auto,1"};
    std::string sw_ratios = "1024,256,64,8,1";
    double sw_train = 2.0 / 3.0;
    auto* sweep = app.add_subcommand("sample-sweep", "systematic-sampling sensitivity sweep (CSV + pivots)");
    add_common(sweep, opts);
    sweep->add_option("--models", sw_models, "model config strings");
    sweep->add_option("--ratios", sw_ratios, "comma-separated N:1 ratios");
    sweep->add_option("--train-fraction", sw_train, "training prefix fraction (default 2/3)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*ingest) return run_ingest(opts);
        if (*hurst) return run_hurst(opts);
        if (*fracdiff) return run_fracdiff(opts, fd_d, fd_eta, fd_inverse);
        if (*fit) return run_fit(opts, fit_p, fit_q, fit_auto, fit_max_p, fit_max_q);
        if (*forecast) return run_forecast(opts, fc_model, fc_horizon, fc_format);
        if (*compare) return run_compare(opts, cmp_models, cmp_train);
        if (*sweep) return run_sample_sweep(opts, sw_models, sw_ratios, sw_train);
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        std::cerr << "error: " << msg << '\n';
        return msg.find("model config") != std::string::npos ? 3 : 5;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::runtime_error& e) {
        std::string msg = e.what();
        std::cerr << "error: " << msg << '\n';
        bool io = msg.find("cannot open") != std::string::npos ||
                  msg.find("write failed") != std::string::npos ||
                  msg.find("ingest_csv") != std::string::npos;
        return io ? 4 : 5;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 5;
    }
    return 2;
}
