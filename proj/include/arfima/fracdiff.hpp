#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "arfima/timeseries.hpp"

namespace arfima {

/// Fractional differencing order with generated expansion weights for (1-L)^d.
struct FracDiffSpec {
    double d = 0.0;
    unsigned eta = 0;
    std::vector<double> coefficients;  // pi_0..pi_K
};

/// Leading values dropped by integer differencing, retained so the
/// transform can be inverted exactly.
struct IntegerDiffRecord {
    unsigned eta = 0;
    // initial_values[k] is the first element of the series after k
    // differencing passes, k = 0..eta-1.
    std::vector<double> initial_values;
};

/// Weights pi_0..pi_{count-1} of (1-L)^d via the stable recursion
/// pi_0 = 1, pi_k = pi_{k-1} * (k-1-d) / k. The recursion avoids the
/// sign-alternating Gamma poles of the closed form.
inline std::vector<double> expansion_coefficients(double d, std::size_t count) {
    if (!std::isfinite(d)) throw std::invalid_argument("expansion_coefficients: non-finite d");
    if (count == 0) throw std::invalid_argument("expansion_coefficients: count must be >= 1");
    std::vector<double> pi(count);
    pi[0] = 1.0;
    for (std::size_t k = 1; k < count; ++k)
        pi[k] = pi[k - 1] * (static_cast<double>(k) - 1.0 - d) / static_cast<double>(k);
    return pi;
}

namespace detail {

// out_t = sum_{k=0}^{t} pi_k * in_{t-k}; full available history, pre-sample
// values treated as zero. Ascending-k summation order, fixed for
// reproducibility.
inline std::vector<double> fracdiff_convolve(const std::vector<double>& in, double d) {
    std::size_t n = in.size();
    auto pi = expansion_coefficients(d, n);
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        double acc = 0.0;
        for (std::size_t k = 0; k <= t; ++k) acc += pi[k] * in[t - k];
        out[t] = acc;
    }
    return out;
}

}  // namespace detail

/// Apply (1-L)^d with full-history truncation; output length equals input length.
inline TimeSeries apply_fracdiff(const TimeSeries& series, double d) {
    return TimeSeries(detail::fracdiff_convolve(series.values, d),
                      series.granularity, series.origin);
}

/// Apply (1-L)^{-d}; inverse of apply_fracdiff up to the shared truncation.
inline TimeSeries apply_inverse_fracdiff(const TimeSeries& series, double d) {
    return apply_fracdiff(series, -d);
}

/// Apply (1-L) eta times. Output shrinks by eta; dropped leading values go
/// into the record for exact inversion.
inline std::pair<TimeSeries, IntegerDiffRecord> integer_difference(const TimeSeries& series,
                                                                   unsigned eta) {
    if (series.size() <= eta)
        throw std::invalid_argument("integer_difference: series length must exceed eta");
    IntegerDiffRecord rec;
    rec.eta = eta;
    std::vector<double> cur = series.values;
    for (unsigned pass = 0; pass < eta; ++pass) {
        rec.initial_values.push_back(cur.front());
        std::vector<double> next(cur.size() - 1);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) next[i] = cur[i + 1] - cur[i];
        cur = std::move(next);
    }
    return {TimeSeries(std::move(cur), series.granularity, series.origin), rec};
}

/// Exact inverse of integer_difference (cumulative reconstruction).
inline TimeSeries integer_undifference(const TimeSeries& series, const IntegerDiffRecord& rec) {
    std::vector<double> cur = series.values;
    for (unsigned pass = rec.eta; pass-- > 0;) {
        std::vector<double> next(cur.size() + 1);
        next[0] = rec.initial_values[pass];
        for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] = next[i] + cur[i];
        cur = std::move(next);
    }
    return TimeSeries(std::move(cur), series.granularity, series.origin);
}

}  // namespace arfima
