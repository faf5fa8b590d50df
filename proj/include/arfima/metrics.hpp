#pragma once

#include <cmath>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace arfima {

/// Root mean square error, sqrt(sum (X_k - Xhat_k)^2 / n).
inline double rmse(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size())
        throw std::invalid_argument("rmse: length mismatch");
    if (actual.empty()) throw std::invalid_argument("rmse: empty input");
    double ss = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        double e = actual[i] - predicted[i];
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(actual.size()));
}

/// Relative root mean square error, sqrt(sum ((X_k - Xhat_k)/X_k)^2 / n).
/// Zero actual values are rejected: the ratio is undefined there, and
/// skipping them would silently change n.
inline double rrmse(std::span<const double> actual, std::span<const double> predicted) {
    if (actual.size() != predicted.size())
        throw std::invalid_argument("rrmse: length mismatch");
    if (actual.empty()) throw std::invalid_argument("rrmse: empty input");
    double ss = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0)
            throw std::invalid_argument("rrmse: zero actual value at index " + std::to_string(i));
        double e = (actual[i] - predicted[i]) / actual[i];
        ss += e * e;
    }
    return std::sqrt(ss / static_cast<double>(actual.size()));
}

/// One scored (model, condition) cell.
struct EvaluationRow {
    std::string label;
    std::string condition;
    double rmse = 0.0;
    double rrmse = 0.0;
    std::size_t n = 0;
    std::string normalization;
    bool failed = false;
    std::string error;
};

/// Quote a CSV field when it contains a comma or quote.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

struct EvaluationReport {
    std::vector<EvaluationRow> rows;

    std::string to_csv() const {
        std::ostringstream os;
        os.precision(10);
        os << "label,condition,rmse,rrmse,n,normalization\n";
        for (const auto& r : rows) {
            os << csv_field(r.label) << ',' << csv_field(r.condition) << ',';
            if (r.failed) {
                os << "failed,failed,0," << csv_field(r.normalization) << '\n';
            } else {
                os << r.rmse << ',' << r.rrmse << ',' << r.n << ','
                   << csv_field(r.normalization) << '\n';
            }
        }
        return os.str();
    }
};

}  // namespace arfima
