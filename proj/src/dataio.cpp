#include "fracfit/dataio.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <system_error>

#include "fracfit/errors.hpp"

namespace fracfit::dataio {

std::vector<double> TimeSeries::times() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& [t, y] : points) out.push_back(t);
    return out;
}

std::vector<double> TimeSeries::values() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& [t, y] : points) out.push_back(y);
    return out;
}

void TimeSeries::validate() const {
    if (points.size() < 2) {
        throw ValidationError("time series '" + name + "': needs at least 2 points");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].first) || !std::isfinite(points[i].second)) {
            throw ValidationError("time series '" + name + "': non-finite value at row " +
                                  std::to_string(i + 1));
        }
        if (i > 0 && !(points[i].first > points[i - 1].first)) {
            throw ValidationError(
                "time series '" + name + "': t must be strictly increasing (rows " +
                std::to_string(i) + "-" + std::to_string(i + 1) + ")");
        }
    }
}

namespace {

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

double parse_number(const std::string& field, const std::filesystem::path& path,
                    int line_no) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last) {
        throw ParseError(path.string() + ":" + std::to_string(line_no) +
                         ": cannot parse number '" + field + "'");
    }
    return v;
}

}  // namespace

TimeSeries load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(path.string() + ":1: empty file");
    }
    if (strip_cr(line) != "t,value") {
        throw ParseError(path.string() + ":1: expected header 't,value'");
    }

    TimeSeries series;
    series.name = path.stem().string();
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected exactly two comma-separated fields");
        }
        const double t = parse_number(line.substr(0, comma), path, line_no);
        const double y = parse_number(line.substr(comma + 1), path, line_no);
        if (!std::isfinite(t) || !std::isfinite(y)) {
            throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                                  ": non-finite value");
        }
        series.points.emplace_back(t, y);
    }
    series.validate();
    return series;
}

void save_csv(const TimeSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
    out << "t,value\n";
    char buf[64];
    for (const auto& [t, y] : series.points) {
        auto r1 = std::to_chars(buf, buf + sizeof buf, t);
        out.write(buf, r1.ptr - buf);
        out.put(',');
        auto r2 = std::to_chars(buf, buf + sizeof buf, y);
        out.write(buf, r2.ptr - buf);
        out.put('\n');
    }
    if (!out) throw ParseError("write failed: '" + path.string() + "'");
}

std::string sha256_file_hex(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw Error("sha256: cannot allocate digest context");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx, buf, std::size_t(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

const std::vector<DatasetInfo>& dataset_catalog() {
    static const std::vector<DatasetInfo> catalog = {
        {"bal", "bal.csv", "minutes", "mg/l",
         "Ludwin, Undergraduate Journal of Mathematical Modeling 3(2), 2011: "
         "blood alcohol concentration, 9 samples",
         true},
        {"population-un", "population_un.csv", "years since 1910", "millions",
         "United Nations world population estimates, decennial 1910-2010 "
         "(ingest manually; see data/README.md)",
         false},
        {"tape", "tape.csv", "minutes", "revolutions",
         "UNCW tape counter readings every 5 minutes "
         "(people.uncw.edu/lugo/MCP/DIFF_EQ/deproj/deproj.htm; ingest manually)",
         false},
    };
    return catalog;
}

std::filesystem::path resolve_data_dir(const std::filesystem::path& hint) {
    if (!hint.empty()) return hint;
    if (const char* env = std::getenv("FRACFIT_DATA_DIR")) {
        if (*env) return env;
    }
    return "data";
}

namespace {

void check_grid(const TimeSeries& s, double t0, double step, std::size_t count,
                const std::string& name) {
    if (s.points.size() != count) {
        throw ValidationError("dataset '" + name + "': expected " +
                              std::to_string(count) + " points, got " +
                              std::to_string(s.points.size()));
    }
    for (std::size_t i = 0; i < count; ++i) {
        const double expect = t0 + step * double(i);
        if (s.points[i].first != expect) {
            throw ValidationError("dataset '" + name + "': expected t = " +
                                  std::to_string(expect) + " at row " +
                                  std::to_string(i + 1));
        }
    }
}

}  // namespace

TimeSeries bundled_dataset(std::string_view name, const std::filesystem::path& data_dir) {
    const DatasetInfo* info = nullptr;
    for (const auto& d : dataset_catalog()) {
        if (d.name == name) {
            info = &d;
            break;
        }
    }
    if (!info) {
        throw DatasetError("unknown dataset '" + std::string(name) +
                           "' (known: bal, population-un, tape)");
    }
    const auto dir = resolve_data_dir(data_dir);
    const auto path = dir / info->file;
    if (!std::filesystem::exists(path)) {
        if (info->bundled) {
            throw DatasetError("bundled dataset file missing: " + path.string());
        }
        throw MissingDataError(
            "dataset '" + info->name + "' is an ingestion slot: place the series at " +
            path.string() + " (source: " + info->source + ")");
    }
    TimeSeries s = load_csv(path);
    s.name = info->name;
    s.t_unit = info->t_unit;
    s.y_unit = info->y_unit;

    if (info->name == "bal") {
        static const double kTimes[9] = {0, 10, 20, 30, 45, 80, 90, 110, 170};
        if (s.points.size() != 9) {
            throw ValidationError("dataset 'bal': expected 9 points");
        }
        for (int i = 0; i < 9; ++i) {
            if (s.points[std::size_t(i)].first != kTimes[i]) {
                throw ValidationError("dataset 'bal': unexpected time grid");
            }
        }
    } else if (info->name == "population-un") {
        check_grid(s, 0.0, 10.0, 11, "population-un");
        if (s.points[0].second != 1750.0) {
            throw ValidationError(
                "dataset 'population-un': first value must be 1750 (millions)");
        }
    } else if (info->name == "tape") {
        check_grid(s, 0.0, 5.0, 49, "tape");
    }
    return s;
}

}  // namespace fracfit::dataio
