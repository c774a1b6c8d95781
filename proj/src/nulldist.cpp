#include "varbreak/nulldist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "varbreak/errors.hpp"

namespace varbreak {

namespace {

constexpr double kTermTolerance = 1e-12;
constexpr int kMaxTerms = 100;
constexpr double kSeriesSwitch = 0.6;

// 2 sum_{k>=1} (-1)^(k+1) exp(-2 k^2 x^2), the upper tail.
double alternating_tail(double x) {
    double sum = 0.0;
    for (int k = 1; k <= kMaxTerms; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1) ? term : -term;
        if (term < kTermTolerance) {
            break;
        }
    }
    return 2.0 * sum;
}

// sqrt(2 pi)/x sum_{k>=1} exp(-(2k-1)^2 pi^2 / (8 x^2)), the CDF near zero.
double theta_cdf(double x) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int k = 1; k <= kMaxTerms; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double term = std::exp(-odd * odd * pi2 / (8.0 * x * x));
        sum += term;
        if (term < kTermTolerance * std::max(sum, 1e-300)) {
            break;
        }
    }
    return std::sqrt(2.0 * std::numbers::pi) / x * sum;
}

}  // namespace

double kolmogorov_cdf(double x) {
    if (std::isnan(x) || x < 0.0) {
        throw DomainError("Kolmogorov CDF argument must be nonnegative");
    }
    if (x == 0.0) {
        return 0.0;
    }
    const double value = x < kSeriesSwitch ? theta_cdf(x) : 1.0 - alternating_tail(x);
    return std::clamp(value, 0.0, 1.0);
}

double kolmogorov_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("quantile level must lie in (0, 1)");
    }
    double lo = 0.2;
    double hi = 4.0;
    for (int iter = 0; iter < 100 && hi - lo > 1e-14; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (kolmogorov_cdf(mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double pvalue(double statistic) {
    if (std::isnan(statistic) || statistic < 0.0) {
        throw DomainError("statistic must be nonnegative");
    }
    if (statistic == 0.0) {
        return 1.0;
    }
    // Direct tail sum avoids cancellation in 1 - cdf for large statistics.
    if (statistic >= kSeriesSwitch) {
        return std::clamp(alternating_tail(statistic), 0.0, 1.0);
    }
    return 1.0 - kolmogorov_cdf(statistic);
}

const char* to_string(RuleSource source) noexcept {
    switch (source) {
        case RuleSource::asymptotic: return "asymptotic";
        case RuleSource::paper_boundary: return "paper_boundary";
        case RuleSource::user: return "user";
    }
    return "unknown";
}

DecisionRule DecisionRule::asymptotic(double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw DomainError("test level must lie in (0, 1)");
    }
    return DecisionRule{kolmogorov_quantile(1.0 - level), level, RuleSource::asymptotic};
}

DecisionRule DecisionRule::paper_boundary() {
    return DecisionRule{kPaperBoundary, 0.05, RuleSource::paper_boundary};
}

DecisionRule DecisionRule::user(double critical_value, double level) {
    if (!(critical_value > 0.0)) {
        throw DomainError("critical value must be positive");
    }
    return DecisionRule{critical_value, level, RuleSource::user};
}

}  // namespace varbreak
