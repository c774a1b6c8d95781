#include "varbreak/armodel.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "varbreak/errors.hpp"

namespace varbreak {

namespace {

struct LagRegression {
    std::vector<double> coefficients;
    double intercept = 0.0;
    std::vector<double> residuals;
    double rss = 0.0;
};

// Regresses y_t on (y_{t-1}, ..., y_{t-m}) for t = first..n-1 (0-based),
// with an optional constant column.
LagRegression regress_on_lags(std::span<const double> y, int m, std::size_t first,
                              bool with_intercept) {
    const std::size_t rows = y.size() - first;
    const int cols = m + (with_intercept ? 1 : 0);
    LagRegression out;
    out.residuals.resize(rows);

    if (cols == 0) {
        for (std::size_t r = 0; r < rows; ++r) {
            out.residuals[r] = y[first + r];
        }
    } else {
        Eigen::MatrixXd design(static_cast<Eigen::Index>(rows), cols);
        Eigen::VectorXd response(static_cast<Eigen::Index>(rows));
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t t = first + r;
            const auto row = static_cast<Eigen::Index>(r);
            for (int i = 0; i < m; ++i) {
                design(row, i) = y[t - 1 - static_cast<std::size_t>(i)];
            }
            if (with_intercept) {
                design(row, m) = 1.0;
            }
            response(row) = y[t];
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        if (qr.rank() < cols) {
            throw SingularDesignError("rank-deficient AR regressor matrix at order " +
                                          std::to_string(m),
                                      m);
        }
        const Eigen::VectorXd beta = qr.solve(response);
        out.coefficients.assign(beta.data(), beta.data() + m);
        out.intercept = with_intercept ? beta(m) : 0.0;
        // Residuals from the coefficients directly, matching the ArFit contract.
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t t = first + r;
            double fitted = out.intercept;
            for (int i = 0; i < m; ++i) {
                fitted += out.coefficients[static_cast<std::size_t>(i)] *
                          y[t - 1 - static_cast<std::size_t>(i)];
            }
            out.residuals[r] = y[t] - fitted;
        }
    }
    long double rss = 0.0L;
    for (double e : out.residuals) {
        rss += static_cast<long double>(e) * e;
    }
    out.rss = static_cast<double>(rss);
    return out;
}

std::vector<double> prepared(std::span<const double> series, ArMean mean, double& removed) {
    std::vector<double> y(series.begin(), series.end());
    removed = 0.0;
    if (mean == ArMean::demean) {
        long double sum = 0.0L;
        for (double v : y) {
            sum += v;
        }
        removed = static_cast<double>(sum / static_cast<long double>(y.size()));
        for (double& v : y) {
            v -= removed;
        }
    }
    return y;
}

void check_finite(std::span<const double> series) {
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!std::isfinite(series[i])) {
            throw DomainError("series value " + std::to_string(i + 1) + " is not finite");
        }
    }
}

}  // namespace

const char* to_string(ArMean mean) noexcept {
    switch (mean) {
        case ArMean::none: return "none";
        case ArMean::demean: return "demean";
        case ArMean::intercept: return "intercept";
    }
    return "unknown";
}

const char* to_string(Frequency frequency) noexcept {
    switch (frequency) {
        case Frequency::monthly: return "monthly";
        case Frequency::quarterly: return "quarterly";
        case Frequency::unknown: return "unknown";
    }
    return "unknown";
}

ArFit fit_ar_ols(std::span<const double> series, int m, ArMean mean) {
    if (m < 0) {
        throw DomainError("AR order must be nonnegative");
    }
    if (series.size() <= static_cast<std::size_t>(m) + 1) {
        throw LengthError("series of length " + std::to_string(series.size()) +
                          " too short for AR order " + std::to_string(m));
    }
    check_finite(series);

    ArFit fit;
    fit.order = m;
    fit.mean = mean;
    const std::vector<double> y = prepared(series, mean, fit.removed_mean);
    // Intercept with m = 0 is the sample mean; handled by the regression.
    LagRegression reg =
        regress_on_lags(y, m, static_cast<std::size_t>(m), mean == ArMean::intercept);
    fit.coefficients = std::move(reg.coefficients);
    fit.intercept = reg.intercept;
    fit.residuals = std::move(reg.residuals);
    fit.rss = reg.rss;
    fit.n_effective = fit.residuals.size();
    return fit;
}

ArOrderSelection select_ar_order(std::span<const double> series, int m_max, ArMean mean) {
    if (m_max < 0) {
        throw DomainError("m_max must be nonnegative");
    }
    if (series.size() <= static_cast<std::size_t>(m_max) + 2) {
        throw LengthError("series of length " + std::to_string(series.size()) +
                          " too short for AR order selection up to " + std::to_string(m_max));
    }
    check_finite(series);

    double removed = 0.0;
    const std::vector<double> y = prepared(series, mean, removed);
    const auto first = static_cast<std::size_t>(m_max);
    const double n_eff = static_cast<double>(y.size() - first);

    ArOrderSelection selection;
    selection.m_max = m_max;
    double best = std::numeric_limits<double>::infinity();
    for (int m = 0; m <= m_max; ++m) {
        const LagRegression reg = regress_on_lags(y, m, first, mean == ArMean::intercept);
        // Demeaning or an intercept turns a constant series into zero residuals.
        if (!(reg.rss > 0.0) && m == 0) {
            throw SingularDesignError("series is constant; AR regressors have zero variance", 1);
        }
        const int params = m + 1;
        const double score =
            n_eff * std::log(std::max(reg.rss, std::numeric_limits<double>::min()) / n_eff) +
            2.0 * params;
        selection.scores.push_back(score);
        if (score < best) {
            best = score;
            selection.chosen_m = m;
        }
    }
    return selection;
}

int default_ar_max_order(Frequency frequency, std::size_t n) noexcept {
    switch (frequency) {
        case Frequency::monthly: return 12;
        case Frequency::quarterly: return 8;
        case Frequency::unknown: break;
    }
    return static_cast<int>(std::lround(4.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

}  // namespace varbreak
