#include "varbreak/cusum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "varbreak/errors.hpp"

namespace varbreak {

namespace {

// eta - (C_q/q)^2 below this fraction of eta counts as zero: a sum of q
// identical squares does not always divide back to exactly the same value.
constexpr long double kRelativeDispersionFloor = 1e-14L;

long double dispersion(long double sum, long double sum_fourth, std::size_t q) {
    const long double qd = static_cast<long double>(q);
    const long double eta = sum_fourth / qd;
    const long double mean = sum / qd;
    const long double d = eta - mean * mean;
    if (!(d > kRelativeDispersionFloor * eta)) {
        throw ZeroDispersionError("squared residuals have zero dispersion on the window (q = " +
                                  std::to_string(q) + ")");
    }
    return d;
}

// sup_k |q^{-1/2} (C_k - (k/q) C_q)| / sqrt(eta - (C_q/q)^2) without storing
// the trace. Uses the same accumulation order as sanso_trace.
double sanso_sup(std::span<const double> squares) {
    const std::size_t q = squares.size();
    long double total = 0.0L;
    long double fourth = 0.0L;
    for (double s : squares) {
        total += s;
        fourth += static_cast<long double>(s) * s;
    }
    const long double scale = std::sqrt(dispersion(total, fourth, q));
    const long double qd = static_cast<long double>(q);

    long double running = 0.0L;
    long double sup = 0.0L;
    for (std::size_t k = 0; k < q; ++k) {
        running += squares[k];
        const long double dev = running - (static_cast<long double>(k + 1) / qd) * total;
        sup = std::max(sup, std::fabs(dev));
    }
    return static_cast<double>(sup / scale / std::sqrt(qd));
}

std::vector<double> window_squares(const ResidualSeries& series, const SubsampleWindow& window) {
    const auto values = window.slice(series);
    std::vector<double> squares(values.size());
    std::transform(values.begin(), values.end(), squares.begin(), [](double u) { return u * u; });
    return squares;
}

}  // namespace

const char* to_string(PositivityPolicy policy) noexcept {
    switch (policy) {
        case PositivityPolicy::reject: return "reject";
        case PositivityPolicy::clamp: return "clamp";
        case PositivityPolicy::allow: return "allow";
    }
    return "unknown";
}

CusumTrace cumulative_squares(const ResidualSeries& series, const SubsampleWindow& window) {
    const auto values = window.slice(series);
    CusumTrace trace;
    trace.cumsums.reserve(values.size());
    long double running = 0.0L;
    for (double u : values) {
        running += static_cast<long double>(u) * u;
        trace.cumsums.push_back(static_cast<double>(running));
    }
    return trace;
}

CusumTrace sanso_trace(std::span<const double> squares) {
    const std::size_t q = squares.size();
    if (q < 2) {
        throw WindowBoundsError("statistic needs at least 2 observations");
    }
    CusumTrace trace;
    trace.cumsums.reserve(q);
    trace.bridge.reserve(q);

    long double total = 0.0L;
    long double fourth = 0.0L;
    for (double s : squares) {
        total += s;
        fourth += static_cast<long double>(s) * s;
    }
    const long double qd = static_cast<long double>(q);
    const long double scale = std::sqrt(dispersion(total, fourth, q));
    trace.eta = static_cast<double>(fourth / qd);

    long double running = 0.0L;
    long double sup = 0.0L;
    for (std::size_t k = 0; k < q; ++k) {
        running += squares[k];
        trace.cumsums.push_back(static_cast<double>(running));
        const long double dev = running - (static_cast<long double>(k + 1) / qd) * total;
        trace.bridge.push_back(static_cast<double>(dev / scale));
        sup = std::max(sup, std::fabs(dev));
    }
    trace.statistic = static_cast<double>(sup / scale / std::sqrt(qd));
    return trace;
}

double statistic_it(const ResidualSeries& series) {
    const auto values = series.values();
    const std::size_t n = values.size();
    long double total = 0.0L;
    for (double u : values) {
        total += static_cast<long double>(u) * u;
    }
    if (!(total > 0.0L)) {
        throw DegenerateSeriesError("sum of squared residuals is zero");
    }
    const long double nd = static_cast<long double>(n);
    long double running = 0.0L;
    long double sup = 0.0L;
    for (std::size_t k = 0; k < n; ++k) {
        running += static_cast<long double>(values[k]) * values[k];
        const long double d = running / total - static_cast<long double>(k + 1) / nd;
        sup = std::max(sup, std::fabs(d));
    }
    return static_cast<double>(std::sqrt(nd / 2.0L) * sup);
}

double statistic_sanso(const ResidualSeries& series) {
    return statistic_subsample(series, SubsampleWindow::full(series.size()));
}

double statistic_subsample(const ResidualSeries& series, const SubsampleWindow& window) {
    return sanso_sup(window_squares(series, window));
}

std::vector<double> variance_scaled_squares(const ResidualSeries& series,
                                            const SubsampleWindow& window,
                                            const VariancePolyFit& fit,
                                            const CorrectionOptions& options) {
    const auto values = window.slice(series);
    const std::size_t n = window.sample_size();
    if (fit.window.sample_size() != n) {
        throw WindowBoundsError("variance fit was made on a sample of length " +
                                std::to_string(fit.window.sample_size()) + ", not " +
                                std::to_string(n));
    }

    std::vector<double> variance(values.size());
    long double mean_square = 0.0L;
    double min_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        variance[i] = eval_variance(fit, window.offset() + i + 1, n);
        min_value = std::min(min_value, variance[i]);
        mean_square += static_cast<long double>(values[i]) * values[i];
    }
    const double floor =
        options.floor_fraction * static_cast<double>(mean_square / values.size());

    switch (options.positivity) {
        case PositivityPolicy::reject:
            if (!(min_value > floor)) {
                throw NonpositiveVarianceError(
                    "fitted variance falls to " + std::to_string(min_value) +
                        " on the window, not above the floor " + std::to_string(floor),
                    min_value);
            }
            break;
        case PositivityPolicy::clamp:
            if (!(floor > 0.0) && min_value <= 0.0) {
                throw NonpositiveVarianceError("clamp floor is zero", min_value);
            }
            for (double& g : variance) {
                g = std::max(g, floor);
            }
            break;
        case PositivityPolicy::allow:
            if (std::any_of(variance.begin(), variance.end(), [](double g) { return g == 0.0; })) {
                throw NonpositiveVarianceError("fitted variance is exactly zero on the window", 0.0);
            }
            break;
    }

    std::vector<double> scaled(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        scaled[i] = values[i] * values[i] / variance[i];
    }
    return scaled;
}

double statistic_corrected(const ResidualSeries& series, const SubsampleWindow& window,
                           const VariancePolyFit& fit, const CorrectionOptions& options) {
    return sanso_sup(variance_scaled_squares(series, window, fit, options));
}

}  // namespace varbreak
