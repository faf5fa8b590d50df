#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "arfima/arfima.hpp"
#include "arfima/metrics.hpp"
#include "arfima/timeseries.hpp"

namespace arfima {

/// N:1 systematic sampling ratio. 1:1 means no sampling.
struct SamplingRatio {
    unsigned n_to_one = 1;
};

/// Per-event form: select every N-th event size starting at `offset`.
inline std::vector<double> systematic_sample_events(std::span<const double> events,
                                                    SamplingRatio ratio, unsigned offset = 0) {
    if (ratio.n_to_one < 1) throw std::invalid_argument("systematic_sample: ratio must be >= 1");
    if (offset >= ratio.n_to_one)
        throw std::invalid_argument("systematic_sample: offset must be < ratio");
    std::vector<double> out;
    for (std::size_t i = offset; i < events.size(); i += ratio.n_to_one)
        out.push_back(events[i]);
    return out;
}

/// Counted form: with only per-interval counts available, thin each count to
/// count/N, rounding to nearest with the running remainder carried forward so
/// total sampled mass equals round(total/N).
inline TimeSeries systematic_sample_counts(const TimeSeries& counts, SamplingRatio ratio) {
    if (ratio.n_to_one < 1) throw std::invalid_argument("systematic_sample: ratio must be >= 1");
    if (ratio.n_to_one == 1) return counts;
    double acc = 0.0;
    double emitted = 0.0;
    std::vector<double> out(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        acc += counts.values[i] / static_cast<double>(ratio.n_to_one);
        double v = std::round(acc) - emitted;
        emitted += v;
        out[i] = v;
    }
    return TimeSeries(std::move(out), counts.granularity, counts.origin);
}

/// Figs. 3-4 style sweep: for each (ratio, model) cell, thin the counted
/// series, rescale by N back to estimated volume, and walk-forward evaluate.
/// A cell whose thinned series breaks a model precondition is reported as
/// failed rather than aborting the sweep. Rows are emitted in (ratio, model)
/// order regardless of evaluation order.
inline EvaluationReport sampling_sweep(const TimeSeries& series,
                                       const std::vector<ArfimaConfig>& configs,
                                       const std::vector<SamplingRatio>& ratios,
                                       double train_fraction = 2.0 / 3.0,
                                       double normalization_scale = 1e7) {
    EvaluationReport report;
    for (const auto& ratio : ratios) {
        TimeSeries thinned = systematic_sample_counts(series, ratio);
        std::vector<double> rescaled(thinned.size());
        for (std::size_t i = 0; i < thinned.size(); ++i)
            rescaled[i] = thinned.values[i] * static_cast<double>(ratio.n_to_one);
        TimeSeries estimated(std::move(rescaled), series.granularity, series.origin);

        std::string condition = std::to_string(ratio.n_to_one) + ":1";
        for (const auto& cfg : configs) {
            EvaluationRow row;
            try {
                auto [norm, rec] = normalize_scale(estimated, normalization_scale);
                row = rolling_evaluate(norm, cfg, train_fraction, rec, condition);
            } catch (const std::exception& e) {
                row.label = cfg.label;
                row.condition = condition;
                row.failed = true;
                row.error = e.what();
            }
            report.rows.push_back(row);
        }
    }
    return report;
}

}  // namespace arfima
