#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "arfima/timeseries.hpp"

namespace arfima {

/// ARMA(p, q) model fitted by conditional sum of squares.
struct ArmaModel {
    unsigned p = 0;
    unsigned q = 0;
    std::vector<double> ar;  // phi_1..phi_p
    std::vector<double> ma;  // theta_1..theta_q
    double mean = 0.0;       // subtracted before fitting, re-added on forecast
    double sigma2 = 0.0;     // innovation variance, CSS / n
    std::vector<double> residuals;  // one per training point
    double aic = 0.0;
    bool converged = true;
    bool roots_adjusted = false;  // a root was reflected outside the unit circle
};

namespace detail {

// Innovations e_t = x_t - sum phi_i x_{t-i} - sum theta_j e_{t-j} with
// pre-sample x and e set to zero. x must already be mean-centered.
inline std::vector<double> css_innovations(const std::vector<double>& x,
                                           const std::vector<double>& ar,
                                           const std::vector<double>& ma) {
    std::size_t n = x.size();
    std::vector<double> e(n);
    for (std::size_t t = 0; t < n; ++t) {
        double v = x[t];
        for (std::size_t i = 0; i < ar.size(); ++i)
            if (t > i) v -= ar[i] * x[t - 1 - i];
        for (std::size_t j = 0; j < ma.size(); ++j)
            if (t > j) v -= ma[j] * e[t - 1 - j];
        e[t] = v;
    }
    return e;
}

inline double css_objective(const std::vector<double>& x,
                            const std::vector<double>& ar,
                            const std::vector<double>& ma) {
    double ss = 0.0;
    for (double e : css_innovations(x, ar, ma)) ss += e * e;
    return ss;
}

// Least-squares regression of x_t on its own lags 1..order and, when
// resid != nullptr, on lagged residuals 1..q_lags of *resid. Pre-sample
// regressors are zero.
inline std::vector<double> lagged_ols(const std::vector<double>& x, std::size_t p_lags,
                                      const std::vector<double>* resid, std::size_t q_lags) {
    std::size_t n = x.size();
    std::size_t cols = p_lags + q_lags;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(cols));
    Eigen::VectorXd b(static_cast<Eigen::Index>(n));
    for (std::size_t t = 0; t < n; ++t) {
        b(static_cast<Eigen::Index>(t)) = x[t];
        for (std::size_t i = 0; i < p_lags; ++i)
            if (t > i) A(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i)) = x[t - 1 - i];
        for (std::size_t j = 0; j < q_lags; ++j)
            if (t > j)
                A(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(p_lags + j)) =
                    (*resid)[t - 1 - j];
    }
    Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
    return {sol.data(), sol.data() + sol.size()};
}

// Hannan-Rissanen two-stage initial point: long-AR regression for proxy
// innovations, then joint regression on lagged x and lagged innovations.
inline std::pair<std::vector<double>, std::vector<double>>
hannan_rissanen(const std::vector<double>& x, unsigned p, unsigned q) {
    if (p + q == 0) return {{}, {}};
    std::size_t n = x.size();
    std::size_t long_ar = std::min<std::size_t>(20, std::max<std::size_t>(1, n / 4));
    auto a = lagged_ols(x, long_ar, nullptr, 0);
    std::vector<double> e(n);
    for (std::size_t t = 0; t < n; ++t) {
        double v = x[t];
        for (std::size_t i = 0; i < long_ar; ++i)
            if (t > i) v -= a[i] * x[t - 1 - i];
        e[t] = v;
    }
    auto coef = lagged_ols(x, p, &e, q);
    return {std::vector<double>(coef.begin(), coef.begin() + p),
            std::vector<double>(coef.begin() + p, coef.end())};
}

// Nelder-Mead with a bounded objective-evaluation budget.
struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    bool converged = false;
};

inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> x0, std::size_t max_evals = 500,
                                    double rel_tol = 1e-10) {
    std::size_t dim = x0.size();
    std::size_t evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };

    std::vector<std::pair<double, std::vector<double>>> simplex;
    simplex.reserve(dim + 1);
    simplex.emplace_back(eval(x0), x0);
    for (std::size_t i = 0; i < dim; ++i) {
        auto v = x0;
        v[i] += (v[i] != 0.0) ? 0.05 * std::abs(v[i]) : 0.025;
        simplex.emplace_back(eval(v), v);
    }
    auto order = [&] {
        std::stable_sort(simplex.begin(), simplex.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
    };
    order();

    NelderMeadResult res;
    while (evals < max_evals) {
        double best = simplex.front().first, worst = simplex.back().first;
        if (std::abs(worst - best) <= rel_tol * (std::abs(best) + rel_tol)) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(dim, 0.0);
        for (std::size_t s = 0; s < dim; ++s)
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += simplex[s].second[i];
        for (double& c : centroid) c /= static_cast<double>(dim);

        auto mix = [&](double t) {
            std::vector<double> v(dim);
            for (std::size_t i = 0; i < dim; ++i)
                v[i] = centroid[i] + t * (centroid[i] - simplex.back().second[i]);
            return v;
        };
        auto refl = mix(1.0);
        double fr = eval(refl);
        if (fr < simplex.front().first) {
            auto exp_ = mix(2.0);
            double fe = eval(exp_);
            simplex.back() = fe < fr ? std::make_pair(fe, exp_) : std::make_pair(fr, refl);
        } else if (fr < simplex[dim - 1].first) {
            simplex.back() = {fr, refl};
        } else {
            auto con = mix(fr < simplex.back().first ? 0.5 : -0.5);
            double fc = eval(con);
            if (fc < std::min(fr, simplex.back().first)) {
                simplex.back() = {fc, con};
            } else {
                // shrink toward the best vertex
                for (std::size_t s = 1; s <= dim; ++s) {
                    for (std::size_t i = 0; i < dim; ++i)
                        simplex[s].second[i] =
                            0.5 * (simplex[s].second[i] + simplex[0].second[i]);
                    simplex[s].first = eval(simplex[s].second);
                }
            }
        }
        order();
    }
    res.x = simplex.front().second;
    res.fx = simplex.front().first;
    return res;
}

// Roots of 1 - c_1 z - ... - c_k z^k via the companion matrix of the
// reversed polynomial.
inline std::vector<std::complex<double>> lag_poly_roots(const std::vector<double>& c) {
    std::size_t k = c.size();
    while (k > 0 && c[k - 1] == 0.0) --k;
    if (k == 0) return {};
    // p(z) = 1 - c_1 z - ... - c_k z^k; monic form p(z)/(-c_k) has
    // coefficients a_0 = -1/c_k and a_j = c_j/c_k for 1 <= j < k.
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                                 static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i + 1 < k; ++i)
        comp(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
        double a_j = (j == 0) ? -1.0 / c[k - 1] : c[j - 1] / c[k - 1];
        comp(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k - 1)) = -a_j;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
    std::vector<std::complex<double>> roots;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        roots.push_back(es.eigenvalues()(i));
    return roots;
}

// Rebuild lag-polynomial coefficients from roots: prod (1 - z/r_i).
inline std::vector<double> lag_poly_from_roots(const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> poly{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i] += poly[i];
            next[i + 1] -= poly[i] / r;
        }
        poly = std::move(next);
    }
    std::vector<double> c(poly.size() - 1);
    for (std::size_t j = 1; j < poly.size(); ++j) c[j - 1] = -poly[j].real();
    return c;
}

// Reflect any root on/inside the unit circle to its reciprocal conjugate.
// Returns true if anything moved.
inline bool enforce_roots_outside(std::vector<double>& c) {
    if (c.empty()) return false;
    auto roots = lag_poly_roots(c);
    bool moved = false;
    for (auto& r : roots) {
        double mag = std::abs(r);
        if (mag <= 1.0) {
            double target = mag < 1e-8 ? 1.05 : 1.0 / mag;
            // push strictly outside even for near-unit roots
            if (target <= 1.0 + 1e-8) target = 1.0 + 1e-3;
            r = (mag < 1e-8) ? std::complex<double>(target, 0.0)
                             : r / mag * target;
            moved = true;
        }
    }
    if (moved) {
        auto rebuilt = lag_poly_from_roots(roots);
        rebuilt.resize(c.size(), 0.0);
        c = rebuilt;
    }
    return moved;
}

}  // namespace detail

/// Fit ARMA(p, q) by conditional sum of squares from a Hannan-Rissanen
/// start. The sample mean is removed before fitting and stored in the model.
inline ArmaModel fit_arma(const TimeSeries& series, unsigned p, unsigned q,
                          std::size_t max_evals = 500, bool assume_zero_mean = false) {
    const auto& raw = series.values;
    std::size_t n = raw.size();
    if (n <= static_cast<std::size_t>(p) + q + 1)
        throw std::invalid_argument("fit_arma: series too short for requested orders");

    ArmaModel model;
    model.p = p;
    model.q = q;
    model.mean = assume_zero_mean ? 0.0 : detail::mean(raw);
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = raw[i] - model.mean;

    double var = 0.0;
    for (double v : x) var += v * v;
    if (var == 0.0) throw std::invalid_argument("fit_arma: zero-variance input");

    if (p + q == 0) {
        model.residuals = x;
        model.sigma2 = var / static_cast<double>(n);
    } else {
        auto [phi0, th0] = detail::hannan_rissanen(x, p, q);
        auto unpack = [p, q](const std::vector<double>& v) {
            return std::make_pair(std::vector<double>(v.begin(), v.begin() + p),
                                  std::vector<double>(v.begin() + p, v.end()));
        };
        auto objective = [&](const std::vector<double>& params) {
            auto [ar, ma] = unpack(params);
            return detail::css_objective(x, ar, ma);
        };
        std::vector<double> x0(phi0);
        x0.insert(x0.end(), th0.begin(), th0.end());
        double f0 = objective(x0);
        auto res = detail::nelder_mead(objective, x0, max_evals);
        model.converged = res.converged;
        // the optimizer must never worsen its start
        const std::vector<double>& best = res.fx <= f0 ? res.x : x0;
        std::tie(model.ar, model.ma) = unpack(best);

        bool ar_moved = detail::enforce_roots_outside(model.ar);
        bool ma_moved = detail::enforce_roots_outside(model.ma);
        model.roots_adjusted = ar_moved || ma_moved;

        model.residuals = detail::css_innovations(x, model.ar, model.ma);
        double ss = 0.0;
        for (double e : model.residuals) ss += e * e;
        model.sigma2 = ss / static_cast<double>(n);
    }
    if (model.sigma2 <= 0.0) model.sigma2 = std::numeric_limits<double>::min();
    model.aic = static_cast<double>(n) * std::log(model.sigma2) +
                2.0 * (static_cast<double>(p) + q + 1.0);
    return model;
}

/// AIC grid search over (p, q), ties broken by smaller p+q then smaller p.
inline std::pair<unsigned, unsigned> select_order(const TimeSeries& series,
                                                  unsigned max_p, unsigned max_q) {
    if (max_p > 5 || max_q > 5)
        throw std::invalid_argument("select_order: max orders limited to 5");
    double best_aic = std::numeric_limits<double>::infinity();
    unsigned best_p = 0, best_q = 0;
    bool any = false;
    for (unsigned p = 0; p <= max_p; ++p) {
        for (unsigned q = 0; q <= max_q; ++q) {
            double aic;
            try {
                aic = fit_arma(series, p, q).aic;
            } catch (const std::exception&) {
                continue;
            }
            bool better = aic < best_aic ||
                          (aic == best_aic &&
                           (p + q < best_p + best_q ||
                            (p + q == best_p + best_q && p < best_p)));
            if (!any || better) {
                best_aic = aic;
                best_p = p;
                best_q = q;
                any = true;
            }
        }
    }
    if (!any) throw std::runtime_error("select_order: no grid cell could be fitted");
    return {best_p, best_q};
}

/// Simulate from a stationary ARMA model with Gaussian innovations.
/// Deterministic for a fixed seed; burn-in of 10*(p+q+1)+50 samples discarded.
inline TimeSeries simulate_arma(const ArmaModel& model, std::size_t n, std::uint64_t seed) {
    {
        auto ar = model.ar;
        auto roots = detail::lag_poly_roots(ar);
        for (const auto& r : roots)
            if (std::abs(r) <= 1.0)
                throw std::invalid_argument("simulate_arma: non-stationary AR polynomial");
    }
    std::size_t burn = 10 * (model.p + model.q + 1) + 50;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, std::sqrt(model.sigma2));

    std::size_t total = n + burn;
    std::vector<double> x(total, model.mean), e(total, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        e[t] = noise(rng);
        double v = model.mean + e[t];
        for (std::size_t i = 0; i < model.ar.size(); ++i)
            if (t > i) v += model.ar[i] * (x[t - 1 - i] - model.mean);
        for (std::size_t j = 0; j < model.ma.size(); ++j)
            if (t > j) v += model.ma[j] * e[t - 1 - j];
        x[t] = v;
    }
    return TimeSeries(std::vector<double>(x.begin() + static_cast<std::ptrdiff_t>(burn), x.end()),
                      {3600}, 0);
}

/// Minimum-MSE h-step forecasts on the model's own (undifferenced) scale:
/// future innovations are zero, past values and residuals are taken from
/// the recursion over `history`.
inline std::vector<double> forecast_arma(const ArmaModel& model,
                                         const std::vector<double>& history,
                                         std::size_t horizon) {
    std::size_t n = history.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = history[i] - model.mean;
    auto e = detail::css_innovations(x, model.ar, model.ma);

    std::vector<double> ext = x;
    ext.resize(n + horizon);
    e.resize(n + horizon, 0.0);  // E[mu_{T+j}] = 0 for j > 0
    for (std::size_t t = n; t < n + horizon; ++t) {
        double v = 0.0;
        for (std::size_t i = 0; i < model.ar.size(); ++i)
            if (t > i) v += model.ar[i] * ext[t - 1 - i];
        for (std::size_t j = 0; j < model.ma.size(); ++j)
            if (t > j) v += model.ma[j] * e[t - 1 - j];
        ext[t] = v;
    }
    std::vector<double> out(horizon);
    for (std::size_t h = 0; h < horizon; ++h) out[h] = ext[n + h] + model.mean;
    return out;
}

inline nlohmann::json to_json(const ArmaModel& m) {
    return nlohmann::json{{"p", m.p},           {"q", m.q},
                          {"ar", m.ar},         {"ma", m.ma},
                          {"mean", m.mean},     {"sigma2", m.sigma2},
                          {"aic", m.aic},       {"converged", m.converged},
                          {"roots_adjusted", m.roots_adjusted}};
}

inline ArmaModel arma_from_json(const nlohmann::json& j) {
    ArmaModel m;
    m.p = j.at("p").get<unsigned>();
    m.q = j.at("q").get<unsigned>();
    m.ar = j.at("ar").get<std::vector<double>>();
    m.ma = j.at("ma").get<std::vector<double>>();
    m.mean = j.at("mean").get<double>();
    m.sigma2 = j.at("sigma2").get<double>();
    m.aic = j.value("aic", 0.0);
    m.converged = j.value("converged", true);
    m.roots_adjusted = j.value("roots_adjusted", false);
    return m;
}

}  // namespace arfima
