#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "fracfit/fitting.hpp"

// Machine-readable fit reports: built from a FitResult, serialized as JSON,
// and re-checkable (every number in a report is re-derivable from the model
// name, the best parameters and the dataset).

namespace fracfit::report {

struct FitReport {
    std::string model;
    std::string dataset_ref;   ///< "bundled:<name>" or a file path
    std::string dataset_name;
    std::string dataset_sha256;  ///< empty when not resolvable
    fitting::FitResult fit;
    models::SeriesConfig series;
    std::uint64_t seed = 0;
    int starts = 1;
    std::optional<double> efficiency_gain;
    std::string tool_version;

    /// Times, observations, predictions (predicted = observed - residual).
    std::vector<double> t, observed, predicted;
};

FitReport build_fit_report(const models::ModelSpec& model,
                           const std::string& dataset_ref,
                           const dataio::TimeSeries& data,
                           const fitting::FitResult& fit,
                           std::uint64_t seed, int starts,
                           std::optional<double> gain = std::nullopt);

nlohmann::json to_json(const FitReport& rep);

/// One verification finding; ok == false carries a human-readable reason.
struct CheckResult {
    std::string check;
    bool ok = true;
    std::string detail;
};

/// Recomputes a serialized report: model predictions from best_params
/// (|recomputed - stored| <= 1e-10 * max(1, |stored|) per point), residual
/// consistency, SSE = sum of squared residuals to 1e-12 relative, and the
/// dataset hash when the dataset reference is resolvable.
std::vector<CheckResult> verify_report(const nlohmann::json& doc,
                                       const std::filesystem::path& data_dir);

}  // namespace fracfit::report
