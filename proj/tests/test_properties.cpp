#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "varbreak/cusum.hpp"
#include "varbreak/variance_poly.hpp"

using namespace varbreak;

namespace {

struct Case {
    std::vector<double> u;
    std::size_t offset = 0;
    std::size_t q = 0;
};

// Random heteroscedastic series of length 5..50 with a random interior window.
Case random_case(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> length(5, 50);
    Case c;
    const std::size_t n = length(rng);
    c.u = oracle::normal_draws(n, rng);
    const double slope = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    for (std::size_t t = 1; t <= n; ++t) c.u[t - 1] *= std::sqrt(1.0 + slope * double(t) / n);
    c.q = std::uniform_int_distribution<std::size_t>(std::min<std::size_t>(n, 4), n)(rng);
    c.offset = std::uniform_int_distribution<std::size_t>(0, n - c.q)(rng);
    return c;
}

double min_on_window(const std::vector<double>& coefficients, const Case& c) {
    const std::size_t n = c.u.size();
    const double r0 = (2.0 * double(c.offset) / n + double(c.q) / n) / 2.0;
    double m = INFINITY;
    for (std::size_t t = c.offset + 1; t <= c.offset + c.q; ++t) {
        m = std::min(m, oracle::poly_naive(coefficients, double(t) / n, r0));
    }
    return m;
}

}  // namespace

TEST_CASE("all statistics match the literal formulas on random inputs") {
    std::mt19937_64 rng(2718);
    int corrected_cases = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const Case c = random_case(rng);
        const ResidualSeries series(c.u);
        const std::size_t n = c.u.size();
        const SubsampleWindow window(c.offset, c.q, n);

        CHECK(std::fabs(statistic_it(series) - oracle::it_statistic(c.u)) < 1e-10);
        CHECK(std::fabs(statistic_sanso(series) - oracle::sanso(c.u)) < 1e-10);
        CHECK(std::fabs(statistic_subsample(series, window) - oracle::subsample(c.u, c.offset, c.q)) <
              1e-10);

        // The corrected statistic uses the oracle's own OLS fit.
        const VariancePolyFit fit = fit_variance_poly(series, window, 1);
        const std::vector<double> coefficients = oracle::poly_ols(c.u, c.offset, c.q, 1);
        if (min_on_window(coefficients, c) <= 0.05) {
            continue;
        }
        ++corrected_cases;
        const CorrectionOptions allow{PositivityPolicy::allow, 0.0};
        CHECK(std::fabs(statistic_corrected(series, window, fit, allow) -
                        oracle::corrected(c.u, c.offset, c.q, coefficients)) < 1e-10);
    }
    MESSAGE("corrected statistic compared on " << corrected_cases << " of 100 inputs");
    CHECK(corrected_cases >= 50);
}

TEST_CASE("all statistics are invariant to rescaling the series") {
    std::mt19937_64 rng(3141);
    for (int rep = 0; rep < 100; ++rep) {
        const Case c = random_case(rng);
        const std::size_t n = c.u.size();
        if (n < 12) continue;
        const SubsampleWindow window = SubsampleWindow::full(n);
        const ResidualSeries base(c.u);
        const OrderSelection sel = select_poly_order_aic(base, window, 2);
        const CorrectionOptions allow{PositivityPolicy::allow, 0.0};
        const double it = statistic_it(base);
        const double sanso = statistic_sanso(base);
        const double sub = statistic_subsample(base, SubsampleWindow(c.offset, c.q, n));
        const double corrected = statistic_corrected(base, window, sel.fit, allow);

        for (double scale : {1e-3, 0.5, 7.0, 1e4}) {
            std::vector<double> v(c.u);
            for (double& x : v) x *= scale;
            const ResidualSeries scaled(v);
            CHECK(std::fabs(statistic_it(scaled) - it) < 1e-8);
            CHECK(std::fabs(statistic_sanso(scaled) - sanso) < 1e-8);
            CHECK(std::fabs(statistic_subsample(scaled, SubsampleWindow(c.offset, c.q, n)) - sub) < 1e-8);
            const OrderSelection refit = select_poly_order_aic(scaled, window, 2);
            CHECK(refit.chosen_p == sel.chosen_p);
            CHECK(std::fabs(statistic_corrected(scaled, window, refit.fit, allow) - corrected) < 1e-8);
        }
    }
}
