#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace arfima {

/// Aggregation interval of a traffic series, in seconds.
/// T5m = 300, T1h = 3600, T2h = 7200; any positive value is allowed.
struct Granularity {
    std::int64_t seconds = 3600;

    static Granularity t5m() { return {300}; }
    static Granularity t1h() { return {3600}; }
    static Granularity t2h() { return {7200}; }
};

/// Ordered real-valued observations with a fixed time granularity.
/// Values are immutable after construction; all operations below are
/// pure functions returning new series.
struct TimeSeries {
    std::vector<double> values;
    Granularity granularity{3600};
    std::int64_t origin = 0;  // epoch seconds of first observation, informational

    TimeSeries() = default;
    TimeSeries(std::vector<double> v, Granularity g, std::int64_t orig = 0)
        : values(std::move(v)), granularity(g), origin(orig) {
        validate();
    }

    std::size_t size() const { return values.size(); }

    void validate() const {
        if (values.empty())
            throw std::invalid_argument("TimeSeries: length must be >= 1");
        if (granularity.seconds <= 0)
            throw std::invalid_argument("TimeSeries: granularity must be positive");
        for (double v : values)
            if (!std::isfinite(v))
                throw std::invalid_argument("TimeSeries: non-finite value");
    }
};

/// Record of a normalization, sufficient to invert it exactly:
/// normalized = (x - offset) / scale, original = normalized * scale + offset.
struct NormalizationRecord {
    double scale = 1.0;
    double offset = 0.0;
    std::string mode = "none";  // "none" | "scale_by" | "zscore"

    double apply(double x) const { return (x - offset) / scale; }
    double invert(double y) const { return y * scale + offset; }

    std::string label() const {
        if (mode == "scale_by") {
            std::ostringstream os;
            os << "scale_by:" << scale;
            return os.str();
        }
        if (mode == "zscore") return "zscore";
        return "none";
    }
};

namespace detail {

inline double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// population (divide-by-n) standard deviation
inline double pop_stddev(const std::vector<double>& v) {
    double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace detail

/// Reads one numeric column of a CSV file, rows in file order.
/// `column` is a zero-based index or a header name; a header row is
/// detected by its first cell failing to parse as a number.
inline TimeSeries ingest_csv(const std::string& path, const std::string& column = "1",
                             Granularity granularity = {3600}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("ingest_csv: cannot open " + path);

    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::string cell;
        std::stringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        return cells;
    };
    auto parse_number = [](const std::string& s, double& out) {
        try {
            std::size_t pos = 0;
            out = std::stod(s, &pos);
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
            return pos == s.size();
        } catch (...) {
            return false;
        }
    };

    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    if (lines.empty()) throw std::runtime_error("ingest_csv: empty file " + path);

    std::size_t col = 0;
    std::size_t first_row = 0;
    auto head = split(lines[0]);
    double dummy;
    bool has_header = !head.empty() && !parse_number(head[0], dummy);

    bool numeric_index = !column.empty() &&
        column.find_first_not_of("0123456789") == std::string::npos;
    if (numeric_index) {
        col = std::stoul(column);
    } else {
        if (!has_header)
            throw std::runtime_error("ingest_csv: column name '" + column + "' but file has no header");
        bool found = false;
        for (std::size_t i = 0; i < head.size(); ++i)
            if (head[i] == column) { col = i; found = true; break; }
        if (!found) throw std::runtime_error("ingest_csv: no column named '" + column + "'");
    }
    if (has_header) first_row = 1;

    std::vector<double> values;
    for (std::size_t r = first_row; r < lines.size(); ++r) {
        auto cells = split(lines[r]);
        if (col >= cells.size())
            throw std::runtime_error("ingest_csv: row " + std::to_string(r + 1) +
                                     " has no column " + std::to_string(col));
        double v;
        if (!parse_number(cells[col], v) || !std::isfinite(v))
            throw std::runtime_error("ingest_csv: non-numeric cell at row " + std::to_string(r + 1));
        values.push_back(v);
    }
    if (values.empty()) throw std::runtime_error("ingest_csv: empty column in " + path);
    return TimeSeries(std::move(values), granularity);
}

/// Divide every value by `scale`. Returns the scaled series and the record
/// needed to invert the transform exactly.
inline std::pair<TimeSeries, NormalizationRecord> normalize_scale(const TimeSeries& s, double scale) {
    if (scale == 0.0 || !std::isfinite(scale))
        throw std::invalid_argument("normalize: scale must be nonzero and finite");
    NormalizationRecord rec{scale, 0.0, "scale_by"};
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = rec.apply(s.values[i]);
    return {TimeSeries(std::move(out), s.granularity, s.origin), rec};
}

/// Standardize to zero mean and unit population variance.
inline std::pair<TimeSeries, NormalizationRecord> normalize_zscore(const TimeSeries& s) {
    double sd = detail::pop_stddev(s.values);
    if (sd == 0.0)
        throw std::invalid_argument("normalize: zero-variance series under zscore");
    NormalizationRecord rec{sd, detail::mean(s.values), "zscore"};
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = rec.apply(s.values[i]);
    return {TimeSeries(std::move(out), s.granularity, s.origin), rec};
}

inline TimeSeries denormalize(const TimeSeries& s, const NormalizationRecord& rec) {
    std::vector<double> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = rec.invert(s.values[i]);
    return TimeSeries(std::move(out), s.granularity, s.origin);
}

/// Aggregate to a coarser granularity by summing covered values.
/// The trailing partial window is dropped.
inline TimeSeries resample(const TimeSeries& s, Granularity target) {
    if (target.seconds <= 0)
        throw std::invalid_argument("resample: target granularity must be positive");
    if (target.seconds < s.granularity.seconds)
        throw std::invalid_argument("resample: refinement not supported (target finer than source)");
    if (target.seconds % s.granularity.seconds != 0)
        throw std::invalid_argument("resample: target must be an integer multiple of source granularity");
    std::size_t ratio = static_cast<std::size_t>(target.seconds / s.granularity.seconds);
    std::size_t n_out = s.size() / ratio;
    if (n_out == 0)
        throw std::invalid_argument("resample: series shorter than one target window");
    std::vector<double> out(n_out, 0.0);
    for (std::size_t i = 0; i < n_out; ++i)
        for (std::size_t j = 0; j < ratio; ++j)
            out[i] += s.values[i * ratio + j];
    return TimeSeries(std::move(out), target, s.origin);
}

/// JSON series format: {"granularity_seconds":..., "origin":..., "values":[...]}
inline nlohmann::json to_json(const TimeSeries& s) {
    return nlohmann::json{{"granularity_seconds", s.granularity.seconds},
                          {"origin", s.origin},
                          {"values", s.values}};
}

inline TimeSeries series_from_json(const nlohmann::json& j) {
    TimeSeries s;
    s.values = j.at("values").get<std::vector<double>>();
    s.granularity.seconds = j.at("granularity_seconds").get<std::int64_t>();
    s.origin = j.value("origin", std::int64_t{0});
    s.validate();
    return s;
}

/// Loads a series from either the JSON series format or a CSV file,
/// keyed on the file extension.
inline TimeSeries load_series(const std::string& path, const std::string& column = "1",
                              Granularity granularity = {3600}) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("load_series: cannot open " + path);
        nlohmann::json j;
        in >> j;
        return series_from_json(j);
    }
    return ingest_csv(path, column, granularity);
}

}  // namespace arfima
