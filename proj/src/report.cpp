#include "fracfit/report.hpp"

#include <cmath>

#include "fracfit/errors.hpp"
#include "fracfit/version.hpp"

namespace fracfit::report {

using nlohmann::json;

FitReport build_fit_report(const models::ModelSpec& model,
                           const std::string& dataset_ref,
                           const dataio::TimeSeries& data,
                           const fitting::FitResult& fit,
                           std::uint64_t seed, int starts,
                           std::optional<double> gain) {
    FitReport rep;
    rep.model = model.name();
    rep.dataset_ref = dataset_ref;
    rep.dataset_name = data.name;
    rep.fit = fit;
    rep.series = model.series_config();
    rep.seed = seed;
    rep.starts = starts;
    rep.efficiency_gain = gain;
    rep.tool_version = kVersion;
    rep.t = data.times();
    rep.observed = data.values();
    rep.predicted.resize(rep.observed.size());
    for (std::size_t i = 0; i < rep.observed.size(); ++i) {
        rep.predicted[i] = rep.observed[i] - fit.residuals[i];
    }
    return rep;
}

json to_json(const FitReport& rep) {
    json params = json::array();
    const auto& pv = rep.fit.best_params;
    const auto& sv = rep.fit.start_point;
    for (std::size_t i = 0; i < pv.size(); ++i) {
        params.push_back({
            {"value", pv.values()[i]},
            {"lower", pv.bounds()[i].lower},
            {"upper", pv.bounds()[i].upper},
            {"start", i < sv.size() ? sv.values()[i] : pv.values()[i]},
        });
    }
    json points = json::array();
    for (std::size_t i = 0; i < rep.t.size(); ++i) {
        points.push_back({
            {"t", rep.t[i]},
            {"observed", rep.observed[i]},
            {"predicted", rep.predicted[i]},
            {"residual", rep.fit.residuals[i]},
        });
    }
    json doc = {
        {"tool", {{"name", "fracfit"}, {"version", rep.tool_version}}},
        {"model", rep.model},
        {"dataset",
         {{"ref", rep.dataset_ref},
          {"name", rep.dataset_name},
          {"sha256", rep.dataset_sha256},
          {"points", rep.t.size()}}},
        {"series_order", rep.series.double_series_order},
        {"seed", rep.seed},
        {"starts", rep.starts},
        {"params", params},
        {"sse", rep.fit.sse},
        {"solver",
         {{"iterations", rep.fit.iterations},
          {"converged", rep.fit.converged},
          {"stop_reason", fitting::stop_reason_name(rep.fit.stop_reason)},
          {"n_evaluations", rep.fit.n_evaluations},
          {"start_index", rep.fit.start_index}}},
        {"points", points},
    };
    if (rep.efficiency_gain) doc["efficiency_gain"] = *rep.efficiency_gain;
    return doc;
}

namespace {

bool close(double a, double b, double tol) {
    return std::fabs(a - b) <= tol * std::fmax(1.0, std::fmax(std::fabs(a), std::fabs(b)));
}

}  // namespace

std::vector<CheckResult> verify_report(const json& doc,
                                       const std::filesystem::path& data_dir) {
    std::vector<CheckResult> out;
    const auto fail = [&](const std::string& check, const std::string& why) {
        out.push_back({check, false, why});
    };
    const auto pass = [&](const std::string& check) { out.push_back({check, true, {}}); };

    models::SeriesConfig cfg;
    cfg.double_series_order = doc.at("series_order").get<int>();
    const auto model = models::make_model(doc.at("model").get<std::string>(), cfg);

    std::vector<double> theta;
    for (const auto& p : doc.at("params")) theta.push_back(p.at("value").get<double>());
    if (theta.size() != model.size()) {
        fail("params", "parameter count does not match the model");
        return out;
    }
    pass("params");

    std::vector<double> ts, observed, predicted, residual;
    for (const auto& p : doc.at("points")) {
        ts.push_back(p.at("t").get<double>());
        observed.push_back(p.at("observed").get<double>());
        predicted.push_back(p.at("predicted").get<double>());
        residual.push_back(p.at("residual").get<double>());
    }

    // predictions re-derivable from best_params through the named model
    bool pred_ok = true;
    const auto recomputed = model.evaluate_many(ts, theta);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!close(recomputed[i], predicted[i], 1e-10)) {
            pred_ok = false;
            fail("predicted",
                 "t = " + std::to_string(ts[i]) + ": stored " +
                     std::to_string(predicted[i]) + " vs recomputed " +
                     std::to_string(recomputed[i]));
            break;
        }
    }
    if (pred_ok) pass("predicted");

    bool res_ok = true;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!close(observed[i] - predicted[i], residual[i], 1e-10)) {
            res_ok = false;
            fail("residuals", "row " + std::to_string(i) + " inconsistent");
            break;
        }
    }
    if (res_ok) pass("residuals");

    double ss = 0.0, comp = 0.0;
    for (double r : residual) {
        const double t = r * r;
        const double s = ss + t;
        comp += std::fabs(ss) >= std::fabs(t) ? (ss - s) + t : (t - s) + ss;
        ss = s;
    }
    ss += comp;
    const double stored_sse = doc.at("sse").get<double>();
    if (std::fabs(ss - stored_sse) <= 1e-12 * std::fmax(stored_sse, 1e-300)) {
        pass("sse");
    } else {
        fail("sse", "stored " + std::to_string(stored_sse) + " vs recomputed " +
                        std::to_string(ss));
    }

    // dataset hash, when the reference can be resolved locally
    const std::string ref = doc.at("dataset").at("ref").get<std::string>();
    const std::string stored_hash = doc.at("dataset").at("sha256").get<std::string>();
    if (!stored_hash.empty()) {
        std::filesystem::path path;
        if (ref.rfind("bundled:", 0) == 0) {
            const std::string name = ref.substr(8);
            for (const auto& d : dataio::dataset_catalog()) {
                if (d.name == name) path = dataio::resolve_data_dir(data_dir) / d.file;
            }
        } else {
            path = ref;
        }
        if (!path.empty() && std::filesystem::exists(path)) {
            const auto h = dataio::sha256_file_hex(path);
            if (h == stored_hash) {
                pass("dataset_sha256");
            } else {
                fail("dataset_sha256", "stored " + stored_hash + " vs file " + h);
            }
        } else {
            out.push_back({"dataset_sha256", true, "dataset not resolvable; skipped"});
        }
    }
    return out;
}

}  // namespace fracfit::report
