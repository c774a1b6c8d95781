#include "varbreak/pipeline.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "varbreak/errors.hpp"
#include "varbreak/variance_poly.hpp"

namespace varbreak {

namespace {

constexpr std::size_t kMinimumObservations = 10;

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const Error& e) {
        throw PipelineError(name, e.what());
    }
}

TestReport base_report(const char* statistic, double value, const DecisionRule& rule,
                       const ArFit& ar, const SubsampleWindow& window) {
    TestReport report;
    report.statistic = statistic;
    report.value = value;
    report.p_value = pvalue(value);
    report.decision = rule;
    report.reject = rule.rejects(value);
    report.ar_order = ar.order;
    report.ar_mean = ar.mean;
    report.ar_intercept = ar.mean == ArMean::demean ? ar.removed_mean : ar.intercept;
    report.ar_coefficients = ar.coefficients;
    report.window_offset = window.offset();
    report.window_length = window.length();
    report.sample_size = window.sample_size();
    report.window_center = window.center();
    return report;
}

}  // namespace

PipelineResult run_test_pipeline(const SeriesFile& series, const PipelineConfig& config) {
    PipelineResult result;
    result.source_id = series.source_id;
    result.frequency = to_string(series.frequency);
    result.n_raw = series.size();
    result.dropped_missing = series.dropped_missing;
    result.diff_order = config.diff_order;

    if (series.size() < kMinimumObservations) {
        throw PipelineError("load", "series has " + std::to_string(series.size()) +
                                        " observations; at least " +
                                        std::to_string(kMinimumObservations) + " are required");
    }
    if (config.diff_order < 0) {
        throw PipelineError("difference", "difference order must be nonnegative");
    }

    const SeriesFile working = stage("difference", [&] {
        return config.diff_order == 0 ? series : difference(series, config.diff_order);
    });
    result.n_differenced = working.size();

    const ArFit ar = stage("ar", [&] {
        int order = 0;
        if (config.ar_order) {
            order = *config.ar_order;
        } else {
            int m_max = config.ar_max_order.value_or(
                default_ar_max_order(series.frequency, working.size()));
            // Keep enough observations for the common-sample comparison.
            m_max = std::clamp(m_max, 0, static_cast<int>(working.size()) / 4);
            const ArOrderSelection selection =
                select_ar_order(working.values, m_max, config.ar_mean);
            order = selection.chosen_m;
            result.ar_order_selected = true;
            result.ar_max_order = m_max;
            result.ar_aic_scores = selection.scores;
        }
        return fit_ar_ols(working.values, order, config.ar_mean);
    });

    const ResidualSeries residuals =
        stage("ar", [&] { return ResidualSeries(ar.residuals); });
    result.n_residuals = residuals.size();
    const std::size_t n = residuals.size();

    const double q_std = stage("q_std", [&] { return statistic_sanso(residuals); });
    result.q_std = base_report("Q_std", q_std, config.decision, ar, SubsampleWindow::full(n));

    const SubsampleWindow window = stage("window", [&] {
        return config.gamma ? SubsampleWindow::from_gamma(*config.gamma, config.start_fraction, n)
                            : SubsampleWindow::full(n);
    });
    const OrderSelection selection =
        stage("q_mod", [&] { return select_poly_order_aic(residuals, window, config.p_max); });
    const PositivityReport positivity =
        check_positivity(selection.fit, config.correction.floor_fraction);
    const double q_mod = stage("q_mod", [&] {
        return statistic_corrected(residuals, window, selection.fit, config.correction);
    });

    TestReport mod = base_report("Q_mod", q_mod, config.decision, ar, window);
    mod.poly_order = selection.chosen_p;
    mod.poly_coefficients = selection.fit.coefficients;
    mod.aic_scores = selection.scores;
    mod.poly_min_variance = positivity.min_value;
    mod.positivity_policy = to_string(config.correction.positivity);
    if (!positivity.passed) {
        mod.warnings.push_back(
            std::string("fitted variance minimum ") + std::to_string(positivity.min_value) +
            " at t = " + std::to_string(positivity.argmin_t) + " is not above the floor " +
            std::to_string(positivity.floor) +
            (config.correction.positivity == PositivityPolicy::clamp ? "; clamped to the floor"
                                                                     : "; used as fitted"));
    }
    result.q_mod = std::move(mod);

    for (const std::string& w : series.warnings) {
        result.q_std.warnings.push_back(w);
        result.q_mod.warnings.push_back(w);
    }
    return result;
}

}  // namespace varbreak
