#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arfima/arma.hpp"
#include "arfima/fracdiff.hpp"
#include "arfima/hurst.hpp"
#include "arfima/metrics.hpp"
#include "arfima/timeseries.hpp"

namespace arfima {

/// Requested model configuration. d unset means "auto" (estimate via R/S).
struct ArfimaConfig {
    std::string label = "arfima";
    unsigned p = 0;
    unsigned q = 0;
    unsigned eta = 0;
    std::optional<double> d;  // nullopt => estimate from Hurst exponent
};

/// Fitted ARFIMA(p, eta, d, q) pipeline. Pipeline order: integer-difference
/// by eta, (optionally) estimate d = H - 1/2 by R/S, center to zero mean,
/// fractionally difference by d, fit ARMA(p, q) on the result. Everything
/// needed to invert each stage is retained.
struct ArfimaModel {
    FracDiffSpec spec;
    ArmaModel arma;
    std::optional<HurstEstimate> hurst;  // present when d was estimated
    double training_mean = 0.0;          // mean of the eta-differenced training series
    NormalizationRecord normalization;   // how the training series was normalized
    bool d_clamped = false;
    std::vector<double> training_values;  // normalized-scale training series
    Granularity granularity{3600};
};

/// h-step forecast on both scales.
struct Forecast {
    std::size_t horizon = 0;
    std::vector<double> values;             // original (denormalized) series scale
    std::vector<double> differenced_values; // ARMA modeling scale
};

inline ArfimaModel fit_arfima(const TimeSeries& series, const ArfimaConfig& cfg,
                              NormalizationRecord normalization = {}) {
    ArfimaModel model;
    model.normalization = normalization;
    model.training_values = series.values;
    model.granularity = series.granularity;
    model.spec.eta = cfg.eta;

    auto [z, rec] = integer_difference(series, cfg.eta);

    double d;
    if (cfg.d) {
        d = *cfg.d;
    } else {
        model.hurst = estimate_hurst(z);
        d = model.hurst->d;
    }
    if (d <= -0.5 || d >= 0.5) {
        d = std::clamp(d, -0.49, 0.49);
        model.d_clamped = true;
    }
    model.spec.d = d;

    model.training_mean = detail::mean(z.values);
    std::vector<double> centered(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) centered[i] = z.values[i] - model.training_mean;

    TimeSeries w(detail::fracdiff_convolve(centered, d), z.granularity, z.origin);
    model.spec.coefficients = expansion_coefficients(d, w.size());
    model.arma = fit_arma(w, cfg.p, cfg.q, 500, /*assume_zero_mean=*/true);
    return model;
}

inline ArfimaModel fit_arfima(const TimeSeries& series, unsigned p, unsigned q, unsigned eta,
                              std::optional<double> d,
                              NormalizationRecord normalization = {}) {
    ArfimaConfig cfg;
    cfg.p = p;
    cfg.q = q;
    cfg.eta = eta;
    cfg.d = d;
    return fit_arfima(series, cfg, normalization);
}

/// Forecast `horizon` steps ahead of `history`, which must be on the same
/// (normalized) scale as the training series and extend it in time. The
/// fitted coefficients, d, eta and centering are reused; differencing is
/// recomputed over the given history.
inline Forecast forecast_from_history(const ArfimaModel& model,
                                      const std::vector<double>& history,
                                      std::size_t horizon) {
    if (horizon == 0) throw std::invalid_argument("forecast: horizon must be >= 1");
    if (horizon > 10 * model.training_values.size())
        throw std::invalid_argument("forecast: horizon exceeds 10x training length");
    unsigned eta = model.spec.eta;
    if (history.size() <= eta)
        throw std::invalid_argument("forecast: history too short for eta differencing");

    // difference levels 0..eta; level 0 is the history itself
    std::vector<std::vector<double>> levels;
    levels.push_back(history);
    for (unsigned k = 0; k < eta; ++k) {
        const auto& prev = levels.back();
        std::vector<double> next(prev.size() - 1);
        for (std::size_t i = 0; i + 1 < prev.size(); ++i) next[i] = prev[i + 1] - prev[i];
        levels.push_back(std::move(next));
    }
    const auto& z = levels.back();

    std::vector<double> centered(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) centered[i] = z[i] - model.training_mean;
    std::vector<double> w = detail::fracdiff_convolve(centered, model.spec.d);

    Forecast fc;
    fc.horizon = horizon;
    fc.differenced_values = forecast_arma(model.arma, w, horizon);

    // invert fractional differencing: extend w and run (1-L)^{-d} over the
    // extended sequence, keeping the tail
    std::vector<double> ext = w;
    ext.insert(ext.end(), fc.differenced_values.begin(), fc.differenced_values.end());
    std::vector<double> zext = detail::fracdiff_convolve(ext, -model.spec.d);
    std::vector<double> zf(horizon);
    for (std::size_t j = 0; j < horizon; ++j) zf[j] = zext[w.size() + j] + model.training_mean;

    // invert integer differencing level by level, seeding each level with
    // its last observed value
    std::vector<double> cur = std::move(zf);
    for (unsigned k = eta; k-- > 0;) {
        double last = levels[k].back();
        std::vector<double> up(horizon);
        for (std::size_t j = 0; j < horizon; ++j) {
            last += cur[j];
            up[j] = last;
        }
        cur = std::move(up);
    }

    fc.values.resize(horizon);
    for (std::size_t j = 0; j < horizon; ++j) fc.values[j] = model.normalization.invert(cur[j]);
    return fc;
}

inline Forecast forecast(const ArfimaModel& model, std::size_t horizon) {
    return forecast_from_history(model, model.training_values, horizon);
}

/// Walk-forward one-step-ahead evaluation: fit once on the first
/// ceil(train_fraction * n) points, then slide forward one point at a time
/// reusing the fitted coefficients. Metrics are computed on the
/// normalized modeling scale.
inline EvaluationRow rolling_evaluate(const TimeSeries& series, const ArfimaConfig& cfg,
                                      double train_fraction = 2.0 / 3.0,
                                      NormalizationRecord normalization = {},
                                      const std::string& condition = "full") {
    std::size_t n = series.size();
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw std::invalid_argument("rolling_evaluate: train_fraction must be in (0,1)");
    std::size_t train_n = static_cast<std::size_t>(
        std::ceil(train_fraction * static_cast<double>(n)));
    train_n = std::min(train_n, n - 1);  // keep at least one test point
    if (train_n < 10)
        throw std::invalid_argument("rolling_evaluate: degenerate split");

    TimeSeries train(std::vector<double>(series.values.begin(),
                                         series.values.begin() + static_cast<std::ptrdiff_t>(train_n)),
                     series.granularity, series.origin);
    ArfimaModel model = fit_arfima(train, cfg, normalization);

    std::vector<double> actual, predicted;
    for (std::size_t t = train_n; t < n; ++t) {
        std::vector<double> history(series.values.begin(),
                                    series.values.begin() + static_cast<std::ptrdiff_t>(t));
        Forecast fc = forecast_from_history(model, history, 1);
        // score on the modeling scale
        predicted.push_back(model.normalization.apply(fc.values[0]));
        actual.push_back(series.values[t]);
    }

    EvaluationRow row;
    row.label = cfg.label;
    row.condition = condition;
    row.n = actual.size();
    row.normalization = normalization.label();
    row.rmse = rmse(actual, predicted);
    row.rrmse = rrmse(actual, predicted);
    return row;
}

/// Parse the model mini-grammar:
///   arma:p,q | arima:p,eta,q | arfima:p,d-or-auto,q[,eta]
inline ArfimaConfig parse_model_config(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("model config '" + text + "': expected kind:args");
    std::string kind = text.substr(0, colon);
    std::vector<std::string> parts;
    {
        std::string rest = text.substr(colon + 1);
        std::size_t pos = 0;
        while (true) {
            auto comma = rest.find(',', pos);
            parts.push_back(rest.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
    }
    auto to_uint = [&](const std::string& s) {
        try {
            return static_cast<unsigned>(std::stoul(s));
        } catch (...) {
            throw std::invalid_argument("model config '" + text + "': bad integer '" + s + "'");
        }
    };

    ArfimaConfig cfg;
    cfg.label = text;
    if (kind == "arma") {
        if (parts.size() != 2) throw std::invalid_argument("arma config needs p,q");
        cfg.p = to_uint(parts[0]);
        cfg.q = to_uint(parts[1]);
        cfg.eta = 0;
        cfg.d = 0.0;
    } else if (kind == "arima") {
        if (parts.size() != 3) throw std::invalid_argument("arima config needs p,eta,q");
        cfg.p = to_uint(parts[0]);
        cfg.eta = to_uint(parts[1]);
        cfg.q = to_uint(parts[2]);
        cfg.d = 0.0;
    } else if (kind == "arfima") {
        if (parts.size() != 3 && parts.size() != 4)
            throw std::invalid_argument("arfima config needs p,d-or-auto,q[,eta]");
        cfg.p = to_uint(parts[0]);
        cfg.q = to_uint(parts[2]);
        cfg.eta = parts.size() == 4 ? to_uint(parts[3]) : 0;
        if (parts[1] == "auto") {
            cfg.d = std::nullopt;
        } else {
            try {
                cfg.d = std::stod(parts[1]);
            } catch (...) {
                throw std::invalid_argument("model config '" + text + "': bad d '" + parts[1] + "'");
            }
        }
    } else {
        throw std::invalid_argument("model config '" + text + "': unknown kind '" + kind + "'");
    }
    return cfg;
}

inline nlohmann::json to_json(const ArfimaModel& m) {
    nlohmann::json j{{"d", m.spec.d},
                     {"eta", m.spec.eta},
                     {"arma", to_json(m.arma)},
                     {"training_mean", m.training_mean},
                     {"d_clamped", m.d_clamped},
                     {"normalization", {{"scale", m.normalization.scale},
                                        {"offset", m.normalization.offset},
                                        {"mode", m.normalization.mode}}},
                     {"granularity_seconds", m.granularity.seconds},
                     {"training_values", m.training_values}};
    if (m.hurst) {
        j["hurst"] = {{"h", m.hurst->h}, {"d", m.hurst->d}, {"r_squared", m.hurst->r_squared}};
    }
    return j;
}

inline ArfimaModel arfima_from_json(const nlohmann::json& j) {
    ArfimaModel m;
    m.spec.d = j.at("d").get<double>();
    m.spec.eta = j.at("eta").get<unsigned>();
    m.arma = arma_from_json(j.at("arma"));
    m.training_mean = j.at("training_mean").get<double>();
    m.d_clamped = j.value("d_clamped", false);
    const auto& nj = j.at("normalization");
    m.normalization = {nj.at("scale").get<double>(), nj.at("offset").get<double>(),
                       nj.at("mode").get<std::string>()};
    m.granularity.seconds = j.value("granularity_seconds", std::int64_t{3600});
    m.training_values = j.at("training_values").get<std::vector<double>>();
    m.spec.coefficients = expansion_coefficients(m.spec.d, m.training_values.size());
    if (j.contains("hurst")) {
        HurstEstimate h;
        h.h = j["hurst"].at("h").get<double>();
        h.d = j["hurst"].at("d").get<double>();
        h.r_squared = j["hurst"].value("r_squared", 0.0);
        m.hurst = h;
    }
    return m;
}

}  // namespace arfima
