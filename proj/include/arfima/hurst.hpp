#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "arfima/timeseries.hpp"

namespace arfima {

/// Result of rescaled-range analysis: H plus the regression behind it.
struct HurstEstimate {
    double h = 0.5;
    double d = 0.0;  // = h - 0.5
    std::vector<std::size_t> window_sizes;
    std::vector<std::pair<double, double>> log_rs_points;  // (log n, log mean R/S)
    double regression_slope = 0.0;
    double regression_intercept = 0.0;
    double r_squared = 0.0;
};

/// R/S statistic of one segment: range of the cumulative mean-centered
/// partial sums divided by the population standard deviation.
/// Throws on zero variance; callers averaging over segments should skip
/// such segments instead of failing.
inline double rs_statistic(std::span<const double> segment) {
    if (segment.size() < 2)
        throw std::invalid_argument("rs_statistic: segment length must be >= 2");
    double m = 0.0;
    for (double x : segment) m += x;
    m /= static_cast<double>(segment.size());

    double cum = 0.0, lo = 0.0, hi = 0.0, ss = 0.0;
    bool first = true;
    for (double x : segment) {
        cum += x - m;
        if (first) { lo = hi = cum; first = false; }
        lo = std::min(lo, cum);
        hi = std::max(hi, cum);
        ss += (x - m) * (x - m);
    }
    double sd = std::sqrt(ss / static_cast<double>(segment.size()));
    if (sd == 0.0)
        throw std::invalid_argument("rs_statistic: zero-variance segment");
    return (hi - lo) / sd;
}

namespace detail {

struct OlsFit {
    double slope, intercept, r_squared;
};

inline OlsFit ols(const std::vector<std::pair<double, double>>& pts) {
    double n = static_cast<double>(pts.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    double denom = n * sxx - sx * sx;
    double slope = (n * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0, my = sy / n;
    for (auto [x, y] : pts) {
        double e = y - (slope * x + intercept);
        ss_res += e * e;
        ss_tot += (y - my) * (y - my);
    }
    double r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return {slope, intercept, r2};
}

}  // namespace detail

/// Rescaled-range Hurst estimate. Window sizes follow a geometric ladder
/// (x2 steps) from min_window up to max_window; within each window size the
/// series is cut into floor(len/n) disjoint segments whose R/S values are
/// averaged. H is the OLS slope of log mean R/S against log n.
///
/// max_window = 0 means "series length". The top rungs then hold few
/// segments, but dropping them biases H upward badly on short series.
inline HurstEstimate estimate_hurst(const TimeSeries& series,
                                    std::size_t min_window = 8,
                                    std::size_t max_window = 0) {
    const auto& x = series.values;
    std::size_t n = x.size();
    if (n < 16) throw std::invalid_argument("estimate_hurst: series length must be >= 16");
    if (max_window == 0) max_window = n;
    if (min_window < 8 || min_window >= max_window || max_window > n)
        throw std::invalid_argument("estimate_hurst: need 8 <= min_window < max_window <= length");

    HurstEstimate est;
    for (std::size_t w = min_window; w <= max_window; w *= 2) {
        std::size_t k = n / w;
        double sum = 0.0;
        std::size_t valid = 0;
        for (std::size_t i = 0; i < k; ++i) {
            try {
                sum += rs_statistic(std::span<const double>(x.data() + i * w, w));
                ++valid;
            } catch (const std::invalid_argument&) {
                // zero-variance segment, skipped
            }
        }
        if (valid == 0) continue;
        est.window_sizes.push_back(w);
        est.log_rs_points.emplace_back(std::log(static_cast<double>(w)),
                                       std::log(sum / static_cast<double>(valid)));
    }
    if (est.log_rs_points.size() < 3)
        throw std::invalid_argument("estimate_hurst: fewer than 3 usable window sizes");

    auto fit = detail::ols(est.log_rs_points);
    est.regression_slope = fit.slope;
    est.regression_intercept = fit.intercept;
    est.r_squared = fit.r_squared;
    est.h = fit.slope;
    est.d = est.h - 0.5;
    return est;
}

}  // namespace arfima
