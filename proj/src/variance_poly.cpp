#include "varbreak/variance_poly.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "varbreak/errors.hpp"

namespace varbreak {

double VariancePolyFit::at(double r) const noexcept {
    const double x = r - center;
    double acc = 0.0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

VariancePolyFit fit_variance_poly(const ResidualSeries& series, const SubsampleWindow& window,
                                  int p) {
    if (p < 1) {
        throw SingularDesignError("polynomial order must be at least 1", p);
    }
    const auto values = window.slice(series);
    const auto q = static_cast<Eigen::Index>(values.size());
    if (q < p + 2) {
        throw SingularDesignError("window length " + std::to_string(q) +
                                      " too short for polynomial order " + std::to_string(p),
                                  p);
    }

    const double n = static_cast<double>(window.sample_size());
    const double center = window.center();
    Eigen::MatrixXd design(q, p + 1);
    Eigen::VectorXd response(q);
    long double mean_square = 0.0L;
    for (Eigen::Index row = 0; row < q; ++row) {
        const double t = static_cast<double>(window.offset() + static_cast<std::size_t>(row) + 1);
        const double x = t / n - center;
        double power = 1.0;
        for (int col = 0; col <= p; ++col) {
            design(row, col) = power;
            power *= x;
        }
        const double u = values[static_cast<std::size_t>(row)];
        response(row) = u * u;
        mean_square += response(row);
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < p + 1) {
        throw SingularDesignError("rank-deficient design for polynomial order " + std::to_string(p),
                                  p);
    }
    const Eigen::VectorXd beta = qr.solve(response);

    VariancePolyFit fit;
    fit.order = p;
    fit.center = center;
    fit.coefficients.assign(beta.data(), beta.data() + beta.size());
    fit.rss = (response - design * beta).squaredNorm();
    fit.window = window;
    fit.mean_square = static_cast<double>(mean_square / q);
    for (double c : fit.coefficients) {
        if (!std::isfinite(c)) {
            throw SingularDesignError("non-finite coefficient at polynomial order " +
                                          std::to_string(p),
                                      p);
        }
    }
    return fit;
}

double poly_aic(double rss, std::size_t q, int p, double mean_fourth) noexcept {
    const double qd = static_cast<double>(q);
    const double guarded = std::max(rss, 1e-12 * mean_fourth);
    return qd * std::log(guarded / qd) + 2.0 * (p + 1);
}

OrderSelection select_poly_order_aic(const ResidualSeries& series, const SubsampleWindow& window,
                                     int p_max) {
    if (p_max < 1) {
        throw DomainError("p_max must be at least 1");
    }
    const auto values = window.slice(series);
    long double fourth = 0.0L;
    for (double u : values) {
        const long double s = static_cast<long double>(u) * u;
        fourth += s * s;
    }
    const double mean_fourth = static_cast<double>(fourth / values.size());

    OrderSelection selection;
    selection.p_max = p_max;
    selection.scores.reserve(static_cast<std::size_t>(p_max));
    double best = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= p_max; ++p) {
        VariancePolyFit fit = fit_variance_poly(series, window, p);
        const double score = poly_aic(fit.rss, values.size(), p, mean_fourth);
        selection.scores.push_back(score);
        if (score < best) {
            best = score;
            selection.chosen_p = p;
            selection.fit = std::move(fit);
        }
    }
    return selection;
}

double eval_variance(const VariancePolyFit& fit, std::size_t t, std::size_t n) noexcept {
    return fit.at(static_cast<double>(t) / static_cast<double>(n));
}

PositivityReport check_positivity(const VariancePolyFit& fit, double floor_fraction) {
    PositivityReport report;
    report.floor = floor_fraction * fit.mean_square;
    report.min_value = std::numeric_limits<double>::infinity();
    const std::size_t n = fit.window.sample_size();
    for (std::size_t t = fit.window.offset() + 1; t <= fit.window.offset() + fit.window.length();
         ++t) {
        const double g = eval_variance(fit, t, n);
        if (g < report.min_value) {
            report.min_value = g;
            report.argmin_t = t;
        }
    }
    report.passed = report.min_value > report.floor;
    return report;
}

}  // namespace varbreak
