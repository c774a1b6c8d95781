#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace varbreak {

/// How the mean of the raw series enters the AR regression.
enum class ArMean {
    /// x_t regressed on its lags only.
    none,
    /// Sample mean removed first, then no-intercept regression.
    demean,
    /// Constant term estimated jointly with the lags.
    intercept,
};

const char* to_string(ArMean mean) noexcept;

struct ArFit {
    int order = 0;
    ArMean mean = ArMean::none;
    /// Sample mean removed before fitting (demean only; 0 otherwise).
    double removed_mean = 0.0;
    /// Constant term (intercept only; 0 otherwise).
    double intercept = 0.0;
    /// a_1 .. a_m.
    std::vector<double> coefficients;
    /// u_t = y_{t+m} - c - sum_i a_i y_{t+m-i} with y the (possibly demeaned)
    /// input; length n - m.
    std::vector<double> residuals;
    std::size_t n_effective = 0;
    double rss = 0.0;
};

/// OLS AR(m) fit over t = m+1..n. Throws SingularDesignError (order m) for a
/// rank-deficient regressor matrix and LengthError when n <= m + 1.
ArFit fit_ar_ols(std::span<const double> series, int m, ArMean mean = ArMean::none);

struct ArOrderSelection {
    int chosen_m = 0;
    int m_max = 0;
    /// AIC for m = 0..m_max on the common sample t = m_max+1..n.
    std::vector<double> scores;
};

/// AIC order choice over m = 0..m_max, scored on one common effective sample
/// so the values are comparable. Smallest m wins ties.
ArOrderSelection select_ar_order(std::span<const double> series, int m_max,
                                 ArMean mean = ArMean::intercept);

enum class Frequency { monthly, quarterly, unknown };

const char* to_string(Frequency frequency) noexcept;

/// 12 for monthly, 8 for quarterly, otherwise round(4 (n/100)^(1/4)).
int default_ar_max_order(Frequency frequency, std::size_t n) noexcept;

}  // namespace varbreak
