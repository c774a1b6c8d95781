#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "varbreak/armodel.hpp"
#include "varbreak/cusum.hpp"
#include "varbreak/nulldist.hpp"
#include "varbreak/series.hpp"

namespace varbreak::mc {

/// Smooth increasing-plus-cyclical variance path with an optional level
/// shift alpha from t = floor(n*kappa) on:
///   h^2(t) = -2.7 + 1.5 exp(1 + t/n) + 0.2 sin(5 pi t/n) + alpha 1{t >= floor(n kappa)}
struct VariancePathSpec {
    double alpha = 0.0;
    double kappa = 0.5;
    std::size_t n = 200;

    /// Throws DomainError for alpha < 0, kappa outside (0,1) or n < 2.
    void validate() const;
};

/// h^2(1..n). Throws DomainError if any value is nonpositive.
std::vector<double> variance_path(const VariancePathSpec& spec);

enum class Dgp { dgp1, dgp2 };

const char* to_string(Dgp dgp) noexcept;

enum class InnovationScale {
    /// Logistic draws multiplied by sqrt(3)/pi.
    unit_variance,
    /// Standard logistic, variance pi^2/3.
    standard,
};

/// Where Q_mod is evaluated. Q_std always uses the full sample.
struct WindowPolicy {
    bool full_sample = true;
    double gamma = 1.0;
    double start_fraction = 0.0;

    SubsampleWindow resolve(std::size_t n) const;
};

struct McExperimentSpec {
    Dgp dgp = Dgp::dgp1;
    VariancePathSpec path;
    std::size_t replications = 1000;
    std::uint64_t seed = 1;
    DecisionRule decision = DecisionRule::asymptotic();
    int poly_p_max = 3;
    WindowPolicy window;
    CorrectionOptions correction{PositivityPolicy::allow, kDefaultPositivityFloorFraction};
    InnovationScale innovations = InnovationScale::unit_variance;
    /// Mean treatment of the AR(1) fit for DGP2.
    ArMean dgp2_mean = ArMean::none;
    bool retain_statistics = false;

    void validate() const;
};

/// Engine for one replication, keyed by (seed, rep) through std::seed_seq so
/// every replication has its own reproducible stream.
std::mt19937_64 replication_engine(std::uint64_t seed, std::uint64_t rep);

/// Uniform draw in the open interval (0,1) from 53 random bits.
double uniform_open(std::mt19937_64& engine) noexcept;

/// i.i.d. logistic draws ln(u/(1-u)), optionally scaled to unit variance.
std::vector<double> sample_innovations(std::size_t count, std::mt19937_64& engine,
                                       InnovationScale scale = InnovationScale::unit_variance);

/// u_t = h(t) eps_t.
std::vector<double> dgp1_from_innovations(std::span<const double> variance,
                                          std::span<const double> innovations);

/// x_t = 0.4 x_{t-1} + u_t with x_0 = 0.
std::vector<double> dgp2_from_errors(std::span<const double> errors);

inline constexpr double kDgp2Coefficient = 0.4;

std::vector<double> simulate_dgp1(const McExperimentSpec& spec, std::uint64_t rep);
std::vector<double> simulate_dgp2(const McExperimentSpec& spec, std::uint64_t rep);

enum class Failure { none, zero_dispersion, degenerate, singular_design, nonpositive_variance };

const char* to_string(Failure failure) noexcept;

struct ReplicationOutcome {
    double q_std = 0.0;
    double q_mod = 0.0;
    Failure std_failure = Failure::none;
    Failure mod_failure = Failure::none;
    int chosen_p = 0;
    /// The chosen fit failed check_positivity (recorded under every policy).
    bool nonpositive_fit = false;
};

/// Simulates replication `rep` and computes both statistics. Errors are
/// captured in the outcome, never thrown.
ReplicationOutcome run_replication(const McExperimentSpec& spec, std::uint64_t rep);

struct McResult {
    McExperimentSpec spec;
    std::size_t valid_std = 0;
    std::size_t valid_mod = 0;
    std::size_t rejections_std = 0;
    std::size_t rejections_mod = 0;
    std::size_t failures_std = 0;
    std::size_t failures_mod = 0;
    std::size_t nonpositive_fits = 0;
    /// Percentages over valid replications.
    double rejection_rate_std = 0.0;
    double rejection_rate_mod = 0.0;
    /// Binomial standard errors, in percentage points.
    double se_std = 0.0;
    double se_mod = 0.0;
    /// chosen_p_counts[p] = replications that selected order p (index 0 unused).
    std::vector<std::size_t> chosen_p_counts;
    /// Per-replication statistics when spec.retain_statistics; NaN on failure.
    std::vector<double> statistics_std;
    std::vector<double> statistics_mod;
};

/// 100 sqrt(r(1-r)/N) for a rejection percentage rate and N trials.
double binomial_se(double rate_percent, std::size_t trials) noexcept;

/// Order-independent reduction of per-replication outcomes.
/// Throws IntegrityError when more than 1% of replications failed.
McResult aggregate(const McExperimentSpec& spec, std::span<const ReplicationOutcome> outcomes);

/// Replications run in parallel with OpenMP; threads <= 0 uses the runtime
/// default. Output is identical to run_experiment_serial.
McResult run_experiment(const McExperimentSpec& spec, int threads = 0);

/// Single-threaded reference implementation.
McResult run_experiment_serial(const McExperimentSpec& spec);

/// Specs behind one of the four simulation tables.
///
/// Tables 1 and 2 are size tables (alpha = 0, n in {50, 100, 200}) for DGP1
/// and DGP2; tables 3 and 4 are power tables (alpha = 1..5 by the same n).
struct TablePlan {
    int table = 1;
    Dgp dgp = Dgp::dgp1;
    bool power = false;
    std::vector<std::size_t> sample_sizes;
    std::vector<double> alphas;
    std::vector<McExperimentSpec> specs;
};

TablePlan table_plan(int table, std::uint64_t seed, std::size_t replications,
                     const DecisionRule& decision);

}  // namespace varbreak::mc
