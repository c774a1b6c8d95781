#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "varbreak/series.hpp"
#include "varbreak/variance_poly.hpp"

namespace varbreak {

/// Intermediate quantities of a CUSUM-of-squares statistic on one window.
struct CusumTrace {
    /// C_k = sum of the first k squares, k = 1..q.
    std::vector<double> cumsums;
    /// Mean of fourth powers over the window.
    double eta = 0.0;
    /// B_k = (C_k - (k/q) C_q) / sqrt(eta - (C_q/q)^2).
    std::vector<double> bridge;
    double statistic = 0.0;
};

/// How statistic_corrected treats a fitted variance that is not positive.
enum class PositivityPolicy {
    /// NonpositiveVarianceError when check_positivity fails.
    reject,
    /// Values below the floor are replaced by the floor.
    clamp,
    /// Use the fitted values as they are; only an exact zero is an error.
    allow,
};

const char* to_string(PositivityPolicy policy) noexcept;

struct CorrectionOptions {
    PositivityPolicy positivity = PositivityPolicy::reject;
    double floor_fraction = kDefaultPositivityFloorFraction;
};

/// C_k for k = 1..q over the window, by left-to-right summation.
CusumTrace cumulative_squares(const ResidualSeries& series, const SubsampleWindow& window);

/// Builds the full trace (cumsums, eta, bridge, sup) from already-squared
/// values. Throws ZeroDispersionError when eta - (C_q/q)^2 <= 0.
CusumTrace sanso_trace(std::span<const double> squares);

/// Normalized cumulative sum of squares: sup_k sqrt(n/2) |C_k/C_n - k/n|.
double statistic_it(const ResidualSeries& series);

/// Kurtosis-corrected cumulative-squares statistic on the full sample.
double statistic_sanso(const ResidualSeries& series);

/// The kurtosis-corrected statistic restricted to a subsample window.
double statistic_subsample(const ResidualSeries& series, const SubsampleWindow& window);

/// The statistic on u_t^2 / g^2(t/n) with g^2 the fitted variance polynomial.
///
/// The window must lie in a series of the length the fit was made on.
double statistic_corrected(const ResidualSeries& series, const SubsampleWindow& window,
                           const VariancePolyFit& fit, const CorrectionOptions& options = {});

/// Scaled squares u_t^2 / g^2(t/n) for the window after applying the
/// positivity policy; the input to the corrected statistic.
std::vector<double> variance_scaled_squares(const ResidualSeries& series,
                                            const SubsampleWindow& window,
                                            const VariancePolyFit& fit,
                                            const CorrectionOptions& options = {});

}  // namespace varbreak
