// fracfit: fit fractional-order growth/kinetics models to time series,
// evaluate model curves, and compare classical vs fractional variants.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fracfit/dataio.hpp"
#include "fracfit/errors.hpp"
#include "fracfit/fitting.hpp"
#include "fracfit/kernels.hpp"
#include "fracfit/models.hpp"
#include "fracfit/report.hpp"
#include "fracfit/version.hpp"

namespace ff = fracfit;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

struct BoundsOverride {
    std::string name;
    double lower, upper;
};

struct FitFlags {
    int starts = 16;
    std::uint64_t seed = 1;
    int series_order = 45;
    int threads = 0;
    std::vector<std::string> bounds;
    std::string out;
};

std::vector<BoundsOverride> parse_bounds(const std::vector<std::string>& specs) {
    std::vector<BoundsOverride> out;
    for (const auto& s : specs) {
        const auto c1 = s.find(':');
        const auto c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw ff::DomainError("--bounds expects name:lo:hi, got '" + s + "'");
        }
        BoundsOverride b;
        b.name = s.substr(0, c1);
        b.lower = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
        b.upper = std::stod(s.substr(c2 + 1));
        out.push_back(b);
    }
    return out;
}

ff::models::ModelSpec build_model(const std::string& name, const FitFlags& flags) {
    ff::models::SeriesConfig cfg;
    cfg.double_series_order = flags.series_order;
    cfg.max_terms = std::max(cfg.max_terms, flags.series_order);
    auto model = ff::models::make_model(name, cfg);
    for (const auto& b : parse_bounds(flags.bounds)) {
        model = model.with_param_bounds(b.name, b.lower, b.upper);
    }
    return model;
}

struct LoadedData {
    ff::dataio::TimeSeries series;
    std::string ref;
    std::string sha256;
};

LoadedData load_data(const std::string& spec, const std::filesystem::path& data_dir) {
    LoadedData out;
    if (spec.rfind("bundled:", 0) == 0) {
        const std::string name = spec.substr(8);
        out.series = ff::dataio::bundled_dataset(name, data_dir);
        out.ref = spec;
        for (const auto& d : ff::dataio::dataset_catalog()) {
            if (d.name == name) {
                const auto path = ff::dataio::resolve_data_dir(data_dir) / d.file;
                out.sha256 = ff::dataio::sha256_file_hex(path);
            }
        }
    } else {
        out.series = ff::dataio::load_csv(spec);
        out.ref = spec;
        out.sha256 = ff::dataio::sha256_file_hex(spec);
    }
    return out;
}

void write_json(const json& doc, const std::string& out_path) {
    if (out_path.empty()) return;
    std::ofstream f(out_path, std::ios::trunc);
    if (!f) throw ff::Error("cannot write '" + out_path + "'");
    f << doc.dump(2) << '\n';
}

void print_fit_summary(const ff::report::FitReport& rep) {
    const auto& fit = rep.fit;
    std::printf("model      %s\n", rep.model.c_str());
    std::printf("dataset    %s (%zu points)\n", rep.dataset_ref.c_str(), rep.t.size());
    std::printf("sse        %.10g\n", fit.sse);
    if (rep.efficiency_gain) std::printf("gain       %.6g\n", *rep.efficiency_gain);
    std::printf("converged  %s (%s, %d iterations, start #%d)\n",
                fit.converged ? "yes" : "no",
                ff::fitting::stop_reason_name(fit.stop_reason), fit.iterations,
                fit.start_index);
    const auto& pv = fit.best_params;
    for (std::size_t i = 0; i < pv.size(); ++i) {
        std::printf("  theta[%zu] = %-14.10g  in [%g, %g]\n", i, pv.values()[i],
                    pv.bounds()[i].lower, pv.bounds()[i].upper);
    }
}

ff::report::FitReport run_fit(const std::string& model_name, const LoadedData& data,
                              const FitFlags& flags,
                              std::optional<double> gain = std::nullopt) {
    const auto model = build_model(model_name, flags);
    ff::fitting::FitOptions opts;
    opts.threads = flags.threads;
    const auto fit = ff::fitting::multistart_fit(model, data.series, flags.starts,
                                                 flags.seed, opts);
    auto rep = ff::report::build_fit_report(model, data.ref, data.series, fit,
                                            flags.seed, flags.starts, gain);
    rep.dataset_sha256 = data.sha256;
    return rep;
}

int cmd_fit(const std::string& model_name, const std::string& data_spec,
            const FitFlags& flags, const std::filesystem::path& data_dir) {
    const auto data = load_data(data_spec, data_dir);
    const auto rep = run_fit(model_name, data, flags);
    print_fit_summary(rep);
    write_json(ff::report::to_json(rep), flags.out);
    return rep.fit.converged ? kExitOk : kExitNotConverged;
}

int cmd_compare(const std::string& classical, const std::string& fractional,
                const std::string& data_spec, const FitFlags& flags,
                const std::filesystem::path& data_dir) {
    const auto data = load_data(data_spec, data_dir);
    auto rep_c = run_fit(classical, data, flags);
    auto rep_f = run_fit(fractional, data, flags);
    const double gain = ff::fitting::efficiency_gain(rep_c.fit.sse, rep_f.fit.sse);
    rep_f.efficiency_gain = gain;

    std::printf("%10s %14s %14s %14s\n", "t", "observed", classical.c_str(),
                fractional.c_str());
    for (std::size_t i = 0; i < rep_c.t.size(); ++i) {
        std::printf("%10.4g %14.6f %14.6f %14.6f\n", rep_c.t[i], rep_c.observed[i],
                    rep_c.predicted[i], rep_f.predicted[i]);
    }
    std::printf("sse        %-14.10g vs %-14.10g\n", rep_c.fit.sse, rep_f.fit.sse);
    std::printf("gain       %.6g\n", gain);

    json doc = {
        {"tool", {{"name", "fracfit"}, {"version", ff::kVersion}}},
        {"classical", ff::report::to_json(rep_c)},
        {"fractional", ff::report::to_json(rep_f)},
        {"efficiency_gain", gain},
    };
    write_json(doc, flags.out);
    return (rep_c.fit.converged && rep_f.fit.converged) ? kExitOk : kExitNotConverged;
}

int cmd_eval(const std::string& model_name, const std::string& params_csv,
             const std::string& range, int n_points, int series_order,
             const std::string& out_path) {
    if (n_points < 2) throw ff::DomainError("eval: need --n >= 2");
    const auto colon = range.find(':');
    if (colon == std::string::npos) {
        throw ff::DomainError("eval: --range expects a:b, got '" + range + "'");
    }
    const double t_min = std::stod(range.substr(0, colon));
    const double t_max = std::stod(range.substr(colon + 1));
    if (!(t_min < t_max)) throw ff::DomainError("eval: need t_min < t_max");

    std::vector<double> theta;
    {
        std::size_t pos = 0;
        while (pos <= params_csv.size()) {
            const auto comma = params_csv.find(',', pos);
            const std::string field =
                params_csv.substr(pos, comma == std::string::npos ? std::string::npos
                                                                  : comma - pos);
            if (field.empty()) throw ff::DomainError("eval: empty entry in --params");
            theta.push_back(std::stod(field));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }

    ff::dataio::TimeSeries curve;
    curve.name = model_name;
    const double step = (t_max - t_min) / double(n_points - 1);

    if (model_name == "caputo-of-t") {
        if (theta.size() != 1) {
            throw ff::DomainError("eval: caputo-of-t takes one parameter (alpha)");
        }
        for (int i = 0; i < n_points; ++i) {
            const double t = t_min + step * double(i);
            curve.points.emplace_back(t, ff::models::caputo_of_t_curve(t, theta[0]));
        }
    } else {
        ff::models::SeriesConfig cfg;
        cfg.double_series_order = series_order;
        const auto model = ff::models::make_model(model_name, cfg);
        if (theta.size() != model.size()) {
            throw ff::DomainError("eval: model '" + model_name + "' expects " +
                                  std::to_string(model.size()) + " parameters");
        }
        std::vector<double> ts(std::size_t(n_points));
        for (int i = 0; i < n_points; ++i) ts[std::size_t(i)] = t_min + step * double(i);
        const auto vals = model.evaluate_many(ts, theta);
        for (int i = 0; i < n_points; ++i) {
            curve.points.emplace_back(ts[std::size_t(i)], vals[std::size_t(i)]);
        }
    }

    if (out_path.empty()) {
        std::printf("t,value\n");
        for (const auto& [t, v] : curve.points) std::printf("%.17g,%.17g\n", t, v);
    } else {
        ff::dataio::save_csv(curve, out_path);
    }
    return kExitOk;
}

int cmd_verify(const std::string& report_path, const std::filesystem::path& data_dir) {
    std::ifstream in(report_path);
    if (!in) throw ff::Error("cannot open report '" + report_path + "'");
    json doc = json::parse(in);
    if (doc.contains("classical") && doc.contains("fractional")) {
        // comparison report: verify both halves
        bool all_ok = true;
        for (const char* part : {"classical", "fractional"}) {
            for (const auto& c : ff::report::verify_report(doc.at(part), data_dir)) {
                std::printf("[%s] %s/%s%s%s\n", c.ok ? "ok" : "FAIL", part,
                            c.check.c_str(), c.detail.empty() ? "" : ": ",
                            c.detail.c_str());
                all_ok = all_ok && c.ok;
            }
        }
        return all_ok ? kExitOk : kExitError;
    }
    bool all_ok = true;
    for (const auto& c : ff::report::verify_report(doc, data_dir)) {
        std::printf("[%s] %s%s%s\n", c.ok ? "ok" : "FAIL", c.check.c_str(),
                    c.detail.empty() ? "" : ": ", c.detail.c_str());
        all_ok = all_ok && c.ok;
    }
    return all_ok ? kExitOk : kExitError;
}

int cmd_datasets_list(const std::filesystem::path& data_dir) {
    for (const auto& d : ff::dataio::dataset_catalog()) {
        const auto path = ff::dataio::resolve_data_dir(data_dir) / d.file;
        const bool present = std::filesystem::exists(path);
        std::printf("%-15s %-9s %-8s %s [%s]\n", d.name.c_str(),
                    d.bundled ? "bundled" : "ingest", present ? "present" : "absent",
                    d.file.c_str(), d.source.c_str());
        if (present) {
            std::printf("%-15s sha256 %s\n", "", ff::dataio::sha256_file_hex(path).c_str());
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fractional-order model fitting toolkit"};
    app.set_version_flag("--version", std::string("fracfit ") + ff::kVersion);
    app.require_subcommand(1);

    std::string data_dir;
    app.add_option("--data-dir", data_dir, "directory holding the bundled datasets");

    // fit
    auto* fit = app.add_subcommand("fit", "fit a model to a time series");
    std::string fit_model, fit_data;
    FitFlags fit_flags;
    fit->add_option("model", fit_model, "model name")->required();
    fit->add_option("data", fit_data, "bundled:<name> or a CSV path")->required();
    fit->add_option("--starts", fit_flags.starts, "number of multi-start points");
    fit->add_option("--seed", fit_flags.seed, "multi-start RNG seed");
    fit->add_option("--series-order", fit_flags.series_order, "double-series order");
    fit->add_option("--threads", fit_flags.threads, "worker threads (0 = auto)");
    fit->add_option("--bounds", fit_flags.bounds, "override bounds, name:lo:hi")
        ->take_all();
    fit->add_option("--out", fit_flags.out, "write the JSON report here");

    // compare
    auto* cmp = app.add_subcommand("compare",
                                   "fit a classical/fractional pair and report the gain");
    std::string cmp_classical, cmp_fractional, cmp_data;
    FitFlags cmp_flags;
    cmp->add_option("classical", cmp_classical, "classical model name")->required();
    cmp->add_option("fractional", cmp_fractional, "fractional model name")->required();
    cmp->add_option("data", cmp_data, "bundled:<name> or a CSV path")->required();
    cmp->add_option("--starts", cmp_flags.starts, "number of multi-start points");
    cmp->add_option("--seed", cmp_flags.seed, "multi-start RNG seed");
    cmp->add_option("--series-order", cmp_flags.series_order, "double-series order");
    cmp->add_option("--threads", cmp_flags.threads, "worker threads (0 = auto)");
    cmp->add_option("--bounds", cmp_flags.bounds, "override bounds, name:lo:hi")
        ->take_all();
    cmp->add_option("--out", cmp_flags.out, "write the JSON report here");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate a model curve to CSV");
    std::string ev_model, ev_params, ev_range = "0:1", ev_out;
    int ev_n = 201, ev_order = 45;
    ev->add_option("model", ev_model, "model name or caputo-of-t")->required();
    ev->add_option("--params", ev_params, "comma-separated parameter values")->required();
    ev->add_option("--range", ev_range, "t range as a:b");
    ev->add_option("--n", ev_n, "number of uniform samples");
    ev->add_option("--series-order", ev_order, "double-series order");
    ev->add_option("--out", ev_out, "output CSV path (stdout when omitted)");

    // verify
    auto* ver = app.add_subcommand("verify", "recompute and check a JSON report");
    std::string ver_path;
    ver->add_option("report", ver_path, "report JSON path")->required();

    // datasets
    auto* ds = app.add_subcommand("datasets", "dataset registry");
    auto* ds_list = ds->add_subcommand("list", "list datasets and availability");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*fit) return cmd_fit(fit_model, fit_data, fit_flags, data_dir);
        if (*cmp) return cmd_compare(cmp_classical, cmp_fractional, cmp_data, cmp_flags,
                                     data_dir);
        if (*ev) return cmd_eval(ev_model, ev_params, ev_range, ev_n, ev_order, ev_out);
        if (*ver) return cmd_verify(ver_path, data_dir);
        if (*ds) {
            if (*ds_list || ds->get_subcommands().empty()) return cmd_datasets_list(data_dir);
        }
        std::cerr << "error: no subcommand\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
}
