#pragma once

namespace varbreak {

/// Fixed 5% boundary used for the macroeconomic applications and table runs.
inline constexpr double kPaperBoundary = 1.33;

/// P(sup_s |W(s)| <= x) for a standard Brownian bridge W.
///
/// Uses 1 - 2 sum_k (-1)^(k+1) exp(-2 k^2 x^2), stopping once a term drops
/// below 1e-12 (at most 100 terms). Below x = 0.6 that series converges too
/// slowly, so the Jacobi-transformed form
/// sqrt(2 pi)/x sum_k exp(-(2k-1)^2 pi^2 / (8 x^2)) is used instead.
double kolmogorov_cdf(double x);

/// Inverse of kolmogorov_cdf by bisection on [0.2, 4].
double kolmogorov_quantile(double p);

/// Upper-tail probability 1 - kolmogorov_cdf(statistic).
double pvalue(double statistic);

enum class RuleSource { asymptotic, paper_boundary, user };

const char* to_string(RuleSource source) noexcept;

struct DecisionRule {
    double critical_value = 0.0;
    double level = 0.05;
    RuleSource source = RuleSource::asymptotic;

    /// Critical value kolmogorov_quantile(1 - level).
    static DecisionRule asymptotic(double level = 0.05);
    /// Fixed boundary 1.33 at the nominal 5% level.
    static DecisionRule paper_boundary();
    static DecisionRule user(double critical_value, double level = 0.05);

    bool rejects(double statistic) const noexcept { return statistic > critical_value; }
};

}  // namespace varbreak
