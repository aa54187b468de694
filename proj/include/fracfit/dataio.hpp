#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fracfit::dataio {

/// An observed time series: ordered (t, y) pairs, strictly increasing in t,
/// at least two points, all values finite.
struct TimeSeries {
    std::string name;
    std::string t_unit;
    std::string y_unit;
    std::vector<std::pair<double, double>> points;

    std::size_t size() const { return points.size(); }
    std::vector<double> times() const;
    std::vector<double> values() const;

    /// Throws ValidationError naming the violated invariant.
    void validate() const;
};

/// Strict CSV reader. Format: UTF-8, mandatory "t,value" header line,
/// one "t,value" record per line, decimal point, no thousands separators.
/// Throws ParseError (with line number) or ValidationError.
TimeSeries load_csv(const std::filesystem::path& path);

/// Writer for the same format; numbers round-trip exactly.
void save_csv(const TimeSeries& series, const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file_hex(const std::filesystem::path& path);

struct DatasetInfo {
    std::string name;      ///< registry name ("bal", "population-un", "tape")
    std::string file;      ///< file name under the data directory
    std::string t_unit;
    std::string y_unit;
    std::string source;    ///< provenance of the measurements
    bool bundled = false;  ///< shipped with the project vs. user-ingested
};

const std::vector<DatasetInfo>& dataset_catalog();

/// Resolves the data directory: explicit argument if non-empty, else the
/// FRACFIT_DATA_DIR environment variable, else "data" under the current
/// working directory.
std::filesystem::path resolve_data_dir(const std::filesystem::path& hint = {});

/// Loads a catalog dataset by name and validates its expected shape:
///   bal            9 points at t = 0,10,20,30,45,80,90,110,170 (bundled)
///   population-un  11 decennial points t = 0..100, first value 1750
///   tape           49 points at t = 0,5,...,240
/// Throws DatasetError for unknown names and MissingDataError when a
/// non-bundled dataset has not been ingested into the data directory.
TimeSeries bundled_dataset(std::string_view name,
                           const std::filesystem::path& data_dir = {});

}  // namespace fracfit::dataio
