#pragma once

#include <cstddef>
#include <vector>

#include "varbreak/series.hpp"

namespace varbreak {

inline constexpr int kDefaultPolyMaxOrder = 5;
inline constexpr double kDefaultPositivityFloorFraction = 0.01;

/// OLS fit of squared residuals on powers of (t/n - r0) over a window.
struct VariancePolyFit {
    int order = 0;
    double center = 0.0;
    /// alpha_0 .. alpha_p, lowest power first.
    std::vector<double> coefficients;
    double rss = 0.0;
    SubsampleWindow window = SubsampleWindow::full(2);
    /// Mean of u_t^2 over the window; scales the positivity floor.
    double mean_square = 0.0;

    /// Fitted variance at rescaled time r (Horner evaluation).
    double at(double r) const noexcept;
};

/// Fits u_t^2 = sum_i alpha_i (t/n - r0)^i + xi_t for t in the window.
///
/// Solved by column-pivoted Householder QR of the design matrix. Requires
/// p >= 1 and window length >= p + 2; otherwise, or if the design is
/// rank-deficient, throws SingularDesignError carrying p.
VariancePolyFit fit_variance_poly(const ResidualSeries& series,
                                  const SubsampleWindow& window, int p);

struct OrderSelection {
    int chosen_p = 0;
    int p_max = 0;
    /// AIC for p = 1..p_max (index 0 holds p = 1).
    std::vector<double> scores;
    /// Fit at the chosen order.
    VariancePolyFit fit;
};

/// AIC score q*ln(RSS/q) + 2(p+1); RSS below 1e-12*mean(u^4) is floored
/// there so exact fits do not send the score to -inf.
double poly_aic(double rss, std::size_t q, int p, double mean_fourth) noexcept;

/// Fits p = 1..p_max and returns the AIC minimizer, smallest p on ties.
OrderSelection select_poly_order_aic(const ResidualSeries& series,
                                     const SubsampleWindow& window,
                                     int p_max = kDefaultPolyMaxOrder);

/// g^2(t/n) = sum_i alpha_i (t/n - r0)^i.
double eval_variance(const VariancePolyFit& fit, std::size_t t, std::size_t n) noexcept;

struct PositivityReport {
    double min_value = 0.0;
    /// 1-based time index where the minimum occurs.
    std::size_t argmin_t = 0;
    double floor = 0.0;
    bool passed = false;
};

/// Evaluates the fit at every in-window t and compares the minimum against
/// floor_fraction * (window mean of u_t^2).
PositivityReport check_positivity(const VariancePolyFit& fit,
                                  double floor_fraction = kDefaultPositivityFloorFraction);

}  // namespace varbreak
