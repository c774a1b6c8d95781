#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "varbreak/armodel.hpp"
#include "varbreak/csv_series.hpp"
#include "varbreak/cusum.hpp"
#include "varbreak/nulldist.hpp"

namespace varbreak {

struct PipelineConfig {
    int diff_order = 1;
    /// Fixed AR order; empty selects it by AIC.
    std::optional<int> ar_order;
    /// Upper bound for AIC selection; empty uses default_ar_max_order.
    std::optional<int> ar_max_order;
    ArMean ar_mean = ArMean::intercept;
    int p_max = kDefaultPolyMaxOrder;
    /// Subsample window for Q_mod; empty uses the full residual sample.
    std::optional<double> gamma;
    double start_fraction = 0.0;
    DecisionRule decision = DecisionRule::asymptotic();
    CorrectionOptions correction;
};

/// One test outcome with every choice needed to reproduce it.
struct TestReport {
    /// "Q_std" or "Q_mod".
    std::string statistic;
    double value = 0.0;
    double p_value = 1.0;
    DecisionRule decision;
    bool reject = false;

    int ar_order = 0;
    ArMean ar_mean = ArMean::none;
    double ar_intercept = 0.0;
    std::vector<double> ar_coefficients;

    /// Polynomial order and fit (Q_mod only).
    std::optional<int> poly_order;
    std::vector<double> poly_coefficients;
    std::vector<double> aic_scores;
    double poly_min_variance = 0.0;
    std::string positivity_policy;

    std::size_t window_offset = 0;
    std::size_t window_length = 0;
    std::size_t sample_size = 0;
    double window_center = 0.0;

    std::vector<std::string> warnings;
};

struct PipelineResult {
    std::string source_id;
    std::string frequency;
    std::size_t n_raw = 0;
    std::size_t dropped_missing = 0;
    int diff_order = 0;
    std::size_t n_differenced = 0;
    /// AR order came from AIC selection rather than the config.
    bool ar_order_selected = false;
    int ar_max_order = 0;
    std::vector<double> ar_aic_scores;
    std::size_t n_residuals = 0;
    TestReport q_std;
    TestReport q_mod;
};

/// Differences the series, fits the AR prewhitening model, and runs Q_std
/// and Q_mod on the residuals. Component errors are rethrown as
/// PipelineError labelled with the failing stage.
PipelineResult run_test_pipeline(const SeriesFile& series, const PipelineConfig& config = {});

}  // namespace varbreak
