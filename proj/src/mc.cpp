#include "varbreak/mc.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "varbreak/errors.hpp"
#include "varbreak/variance_poly.hpp"

namespace varbreak::mc {

namespace {

Failure classify(const std::exception_ptr& error) {
    try {
        std::rethrow_exception(error);
    } catch (const ZeroDispersionError&) {
        return Failure::zero_dispersion;
    } catch (const DegenerateSeriesError&) {
        return Failure::degenerate;
    } catch (const SingularDesignError&) {
        return Failure::singular_design;
    } catch (const NonpositiveVarianceError&) {
        return Failure::nonpositive_variance;
    }
    // Other errors propagate: they signal misuse, not a replication outcome.
    return Failure::none;
}

// Immutable per-experiment state shared by every replication.
class Replicator {
public:
    explicit Replicator(const McExperimentSpec& spec) : spec_(spec) {
        spec_.validate();
        const std::vector<double> variance = variance_path(spec_.path);
        sd_.reserve(variance.size());
        for (double v : variance) {
            sd_.push_back(std::sqrt(v));
        }
        // Fail on a bad window here rather than inside a parallel region.
        const std::size_t residual_length = sd_.size() - (spec_.dgp == Dgp::dgp2 ? 1 : 0);
        (void)spec_.window.resolve(residual_length);
    }

    std::vector<double> errors(std::uint64_t rep) const {
        auto engine = replication_engine(spec_.seed, rep);
        std::vector<double> u = sample_innovations(sd_.size(), engine, spec_.innovations);
        for (std::size_t t = 0; t < u.size(); ++t) {
            u[t] *= sd_[t];
        }
        return u;
    }

    std::vector<double> observed(std::uint64_t rep) const {
        std::vector<double> u = errors(rep);
        return spec_.dgp == Dgp::dgp1 ? u : dgp2_from_errors(u);
    }

    ReplicationOutcome run(std::uint64_t rep) const {
        ReplicationOutcome out;
        std::vector<double> residuals;
        if (spec_.dgp == Dgp::dgp1) {
            residuals = errors(rep);
        } else {
            try {
                residuals = fit_ar_ols(observed(rep), 1, spec_.dgp2_mean).residuals;
            } catch (const SingularDesignError&) {
                out.std_failure = out.mod_failure = Failure::singular_design;
                return out;
            }
        }
        const ResidualSeries series(std::move(residuals));

        try {
            out.q_std = statistic_sanso(series);
        } catch (const Error&) {
            out.std_failure = classify(std::current_exception());
        }

        try {
            const SubsampleWindow window = spec_.window.resolve(series.size());
            const OrderSelection selection =
                select_poly_order_aic(series, window, spec_.poly_p_max);
            out.chosen_p = selection.chosen_p;
            out.nonpositive_fit =
                !check_positivity(selection.fit, spec_.correction.floor_fraction).passed;
            out.q_mod = statistic_corrected(series, window, selection.fit, spec_.correction);
        } catch (const Error&) {
            out.mod_failure = classify(std::current_exception());
        }
        return out;
    }

private:
    McExperimentSpec spec_;
    std::vector<double> sd_;
};

}  // namespace

void VariancePathSpec::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw DomainError("break magnitude alpha must be finite and nonnegative");
    }
    if (!(kappa > 0.0 && kappa < 1.0)) {
        throw DomainError("break fraction kappa must lie in (0, 1)");
    }
    if (n < 2) {
        throw DomainError("sample size must be at least 2");
    }
}

std::vector<double> variance_path(const VariancePathSpec& spec) {
    spec.validate();
    const double nd = static_cast<double>(spec.n);
    const auto break_at = static_cast<std::size_t>(std::floor(nd * spec.kappa));
    std::vector<double> h2(spec.n);
    for (std::size_t t = 1; t <= spec.n; ++t) {
        const double r = static_cast<double>(t) / nd;
        double value = -2.7 + 1.5 * std::exp(1.0 + r) + 0.2 * std::sin(5.0 * std::numbers::pi * r);
        if (t >= break_at) {
            value += spec.alpha;
        }
        if (!(value > 0.0)) {
            throw DomainError("variance path is nonpositive at t = " + std::to_string(t));
        }
        h2[t - 1] = value;
    }
    return h2;
}

const char* to_string(Dgp dgp) noexcept { return dgp == Dgp::dgp1 ? "DGP1" : "DGP2"; }

const char* to_string(Failure failure) noexcept {
    switch (failure) {
        case Failure::none: return "none";
        case Failure::zero_dispersion: return "zero_dispersion";
        case Failure::degenerate: return "degenerate";
        case Failure::singular_design: return "singular_design";
        case Failure::nonpositive_variance: return "nonpositive_variance";
    }
    return "unknown";
}

SubsampleWindow WindowPolicy::resolve(std::size_t n) const {
    return full_sample ? SubsampleWindow::full(n)
                       : SubsampleWindow::from_gamma(gamma, start_fraction, n);
}

void McExperimentSpec::validate() const {
    path.validate();
    if (replications < 1) {
        throw DomainError("at least one replication is required");
    }
    if (poly_p_max < 1) {
        throw DomainError("poly_p_max must be at least 1");
    }
}

std::mt19937_64 replication_engine(std::uint64_t seed, std::uint64_t rep) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32)};
    return std::mt19937_64(seq);
}

double uniform_open(std::mt19937_64& engine) noexcept {
    // (k + 0.5) / 2^53 for k in [0, 2^53) never hits 0 or 1.
    return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

std::vector<double> sample_innovations(std::size_t count, std::mt19937_64& engine,
                                       InnovationScale scale) {
    const double factor =
        scale == InnovationScale::unit_variance ? std::sqrt(3.0) / std::numbers::pi : 1.0;
    std::vector<double> draws(count);
    for (double& d : draws) {
        const double u = uniform_open(engine);
        d = factor * std::log(u / (1.0 - u));
    }
    return draws;
}

std::vector<double> dgp1_from_innovations(std::span<const double> variance,
                                          std::span<const double> innovations) {
    if (variance.size() != innovations.size()) {
        throw LengthError("variance path and innovations differ in length");
    }
    std::vector<double> u(variance.size());
    for (std::size_t t = 0; t < u.size(); ++t) {
        u[t] = std::sqrt(variance[t]) * innovations[t];
    }
    return u;
}

std::vector<double> dgp2_from_errors(std::span<const double> errors) {
    std::vector<double> x(errors.size());
    double previous = 0.0;
    for (std::size_t t = 0; t < errors.size(); ++t) {
        previous = kDgp2Coefficient * previous + errors[t];
        x[t] = previous;
    }
    return x;
}

std::vector<double> simulate_dgp1(const McExperimentSpec& spec, std::uint64_t rep) {
    McExperimentSpec s = spec;
    s.dgp = Dgp::dgp1;
    return Replicator(s).observed(rep);
}

std::vector<double> simulate_dgp2(const McExperimentSpec& spec, std::uint64_t rep) {
    McExperimentSpec s = spec;
    s.dgp = Dgp::dgp2;
    return Replicator(s).observed(rep);
}

ReplicationOutcome run_replication(const McExperimentSpec& spec, std::uint64_t rep) {
    return Replicator(spec).run(rep);
}

double binomial_se(double rate_percent, std::size_t trials) noexcept {
    if (trials == 0) {
        return 0.0;
    }
    const double r = rate_percent / 100.0;
    return 100.0 * std::sqrt(r * (1.0 - r) / static_cast<double>(trials));
}

McResult aggregate(const McExperimentSpec& spec, std::span<const ReplicationOutcome> outcomes) {
    McResult result;
    result.spec = spec;
    result.chosen_p_counts.assign(static_cast<std::size_t>(spec.poly_p_max) + 1, 0);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (spec.retain_statistics) {
        result.statistics_std.reserve(outcomes.size());
        result.statistics_mod.reserve(outcomes.size());
    }

    for (const ReplicationOutcome& o : outcomes) {
        if (o.std_failure == Failure::none) {
            ++result.valid_std;
            result.rejections_std += spec.decision.rejects(o.q_std) ? 1 : 0;
        } else {
            ++result.failures_std;
        }
        if (o.mod_failure == Failure::none) {
            ++result.valid_mod;
            result.rejections_mod += spec.decision.rejects(o.q_mod) ? 1 : 0;
        } else {
            ++result.failures_mod;
        }
        if (o.nonpositive_fit) {
            ++result.nonpositive_fits;
        }
        if (o.chosen_p > 0 && o.chosen_p <= spec.poly_p_max) {
            ++result.chosen_p_counts[static_cast<std::size_t>(o.chosen_p)];
        }
        if (spec.retain_statistics) {
            result.statistics_std.push_back(o.std_failure == Failure::none ? o.q_std : nan);
            result.statistics_mod.push_back(o.mod_failure == Failure::none ? o.q_mod : nan);
        }
    }

    const std::size_t total = outcomes.size();
    const std::size_t worst = std::max(result.failures_std, result.failures_mod);
    if (worst * 100 > total) {
        throw IntegrityError(std::to_string(result.failures_std) + " Q_std and " +
                             std::to_string(result.failures_mod) + " Q_mod failures in " +
                             std::to_string(total) + " replications exceed 1%");
    }

    auto rate = [](std::size_t hits, std::size_t valid) {
        return valid == 0 ? 0.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(valid);
    };
    result.rejection_rate_std = rate(result.rejections_std, result.valid_std);
    result.rejection_rate_mod = rate(result.rejections_mod, result.valid_mod);
    result.se_std = binomial_se(result.rejection_rate_std, result.valid_std);
    result.se_mod = binomial_se(result.rejection_rate_mod, result.valid_mod);
    return result;
}

McResult run_experiment(const McExperimentSpec& spec, int threads) {
    const Replicator replicator(spec);
    const auto count = static_cast<std::int64_t>(spec.replications);
    std::vector<ReplicationOutcome> outcomes(spec.replications);

#ifdef _OPENMP
    const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 8) num_threads(team)
#endif
    for (std::int64_t rep = 0; rep < count; ++rep) {
        outcomes[static_cast<std::size_t>(rep)] = replicator.run(static_cast<std::uint64_t>(rep));
    }
    (void)threads;
    return aggregate(spec, outcomes);
}

McResult run_experiment_serial(const McExperimentSpec& spec) {
    const Replicator replicator(spec);
    std::vector<ReplicationOutcome> outcomes;
    outcomes.reserve(spec.replications);
    for (std::uint64_t rep = 0; rep < spec.replications; ++rep) {
        outcomes.push_back(replicator.run(rep));
    }
    return aggregate(spec, outcomes);
}

TablePlan table_plan(int table, std::uint64_t seed, std::size_t replications,
                     const DecisionRule& decision) {
    if (table < 1 || table > 4) {
        throw DomainError("table must be 1, 2, 3 or 4");
    }
    TablePlan plan;
    plan.table = table;
    plan.dgp = (table == 1 || table == 3) ? Dgp::dgp1 : Dgp::dgp2;
    plan.power = table >= 3;
    plan.sample_sizes = {50, 100, 200};
    plan.alphas = plan.power ? std::vector<double>{1, 2, 3, 4, 5} : std::vector<double>{0};

    for (double alpha : plan.alphas) {
        for (std::size_t n : plan.sample_sizes) {
            McExperimentSpec spec;
            spec.dgp = plan.dgp;
            spec.path = VariancePathSpec{alpha, 0.5, n};
            spec.replications = replications;
            spec.seed = seed;
            spec.decision = decision;
            plan.specs.push_back(spec);
        }
    }
    return plan;
}

}  // namespace varbreak::mc
