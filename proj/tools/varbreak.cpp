// varbreak: variance-break tests for series with smoothly changing variance.
//
//   varbreak test <file.csv> [--diff k] [--ar auto|m] [--pmax P]
//                            [--gamma G --offset F] [--rule asymptotic|paper] [--clamp]
//   varbreak simulate --table 1|2|3|4 [--seed S] [--reps N] [--threads T]
//   varbreak critval --level a

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "varbreak/csv_series.hpp"
#include "varbreak/errors.hpp"
#include "varbreak/mc.hpp"
#include "varbreak/nulldist.hpp"
#include "varbreak/pipeline.hpp"
#include "varbreak/report.hpp"

namespace {

using namespace varbreak;

constexpr std::uint64_t kDefaultSeed = 1;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("VARBREAK_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw DomainError(std::string("VARBREAK_SEED is not an unsigned integer: ") + env);
        }
    }
    return kDefaultSeed;
}

DecisionRule make_rule(const std::string& rule, double level) {
    if (rule == "paper") {
        return DecisionRule::paper_boundary();
    }
    return DecisionRule::asymptotic(level);
}

PositivityPolicy parse_positivity(const std::string& name) {
    if (name == "reject") return PositivityPolicy::reject;
    if (name == "clamp") return PositivityPolicy::clamp;
    return PositivityPolicy::allow;
}

ArMean parse_ar_mean(const std::string& name) {
    if (name == "none") return ArMean::none;
    if (name == "demean") return ArMean::demean;
    return ArMean::intercept;
}

struct TestArgs {
    std::string file;
    std::string date_column;
    std::string value_column;
    int diff = 1;
    std::string ar = "auto";
    std::optional<int> ar_max;
    std::string ar_mean = "intercept";
    int pmax = kDefaultPolyMaxOrder;
    std::optional<double> gamma;
    double offset = 0.0;
    std::string rule = "asymptotic";
    double level = 0.05;
    bool clamp = false;
    std::string positivity = "reject";
    double floor_fraction = kDefaultPositivityFloorFraction;
    std::string format = "human";
};

struct SimulateArgs {
    std::optional<int> table;
    int dgp = 1;
    std::size_t n = 200;
    double alpha = 0.0;
    double kappa = 0.5;
    std::optional<std::uint64_t> seed;
    std::size_t reps = 1000;
    int threads = 0;
    std::string rule;
    double level = 0.05;
    int pmax = 3;
    std::string positivity = "allow";
    std::string format = "csv";
};

int run_test(const TestArgs& args) {
    CsvOptions csv;
    csv.date_column = args.date_column;
    csv.value_column = args.value_column;
    const SeriesFile series = load_csv(args.file, csv);

    PipelineConfig config;
    config.diff_order = args.diff;
    if (args.ar != "auto") {
        try {
            config.ar_order = std::stoi(args.ar);
        } catch (const std::exception&) {
            throw DomainError("--ar expects 'auto' or a nonnegative integer, got '" + args.ar + "'");
        }
    }
    config.ar_max_order = args.ar_max;
    config.ar_mean = parse_ar_mean(args.ar_mean);
    config.p_max = args.pmax;
    config.gamma = args.gamma;
    config.start_fraction = args.offset;
    config.decision = make_rule(args.rule, args.level);
    config.correction.positivity =
        args.clamp ? PositivityPolicy::clamp : parse_positivity(args.positivity);
    config.correction.floor_fraction = args.floor_fraction;

    const PipelineResult result = run_test_pipeline(series, config);
    std::cout << emit_report(result, parse_format(args.format));
    return 0;
}

int run_simulate(const SimulateArgs& args) {
    const std::uint64_t seed = args.seed.value_or(default_seed());
    // Table reproduction defaults to the 1.33 boundary the application uses.
    const std::string rule_name = !args.rule.empty() ? args.rule : (args.table ? "paper" : "asymptotic");
    const DecisionRule rule = make_rule(rule_name, args.level);

    auto configure = [&](mc::McExperimentSpec& spec) {
        spec.poly_p_max = args.pmax;
        spec.correction.positivity = parse_positivity(args.positivity);
    };

    if (args.table) {
        mc::TablePlan plan = mc::table_plan(*args.table, seed, args.reps, rule);
        std::vector<mc::McResult> results;
        for (mc::McExperimentSpec& spec : plan.specs) {
            configure(spec);
            results.push_back(mc::run_experiment(spec, args.threads));
        }
        if (args.format == "records") {
            std::cout << emit_experiments(results, Format::csv);
        } else {
            std::cout << emit_table(plan, results, parse_format(args.format));
        }
        return 0;
    }

    mc::McExperimentSpec spec;
    spec.dgp = args.dgp == 2 ? mc::Dgp::dgp2 : mc::Dgp::dgp1;
    spec.path = mc::VariancePathSpec{args.alpha, args.kappa, args.n};
    spec.replications = args.reps;
    spec.seed = seed;
    spec.decision = rule;
    configure(spec);
    const mc::McResult result = mc::run_experiment(spec, args.threads);
    const std::string format = args.format == "records" ? "csv" : args.format;
    std::cout << emit_experiments(std::span(&result, 1), parse_format(format));
    return 0;
}

int run_critval(double level) {
    const DecisionRule rule = DecisionRule::asymptotic(level);
    std::cout << "level " << level << ": asymptotic critical value " << rule.critical_value
              << " (sup of a Brownian bridge)\n";
    std::cout << "fixed boundary (--rule paper): " << kPaperBoundary << " (5%)\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variance-break tests robust to smooth variance changes"};
    app.require_subcommand(1);

    TestArgs test_args;
    auto* test = app.add_subcommand("test", "Run Q_std and Q_mod on a CSV series");
    test->add_option("file", test_args.file, "CSV file (FRED export layout)")->required();
    test->add_option("--date-col", test_args.date_column, "Date column name (default: first)");
    test->add_option("--value-col", test_args.value_column, "Value column name (default: second)");
    test->add_option("--diff", test_args.diff, "Difference order (0 = none)")
        ->check(CLI::NonNegativeNumber);
    test->add_option("--ar", test_args.ar, "AR order, or 'auto' for AIC selection");
    test->add_option("--ar-max", test_args.ar_max, "Largest AR order considered by AIC");
    test->add_option("--ar-mean", test_args.ar_mean, "AR mean treatment")
        ->check(CLI::IsMember({"none", "demean", "intercept"}));
    test->add_option("--pmax", test_args.pmax, "Largest variance polynomial order")
        ->check(CLI::PositiveNumber);
    auto* gamma = test->add_option("--gamma", test_args.gamma,
                                   "Subsample length exponent: q = floor(n^gamma)");
    test->add_option("--offset", test_args.offset, "Subsample start as a fraction of n")
        ->needs(gamma);
    test->add_option("--rule", test_args.rule, "Decision rule")
        ->check(CLI::IsMember({"asymptotic", "paper"}));
    test->add_option("--level", test_args.level, "Test level for the asymptotic rule");
    test->add_flag("--clamp", test_args.clamp, "Clamp fitted variance at the positivity floor");
    test->add_option("--positivity", test_args.positivity, "Nonpositive fitted variance handling")
        ->check(CLI::IsMember({"reject", "clamp", "allow"}));
    test->add_option("--floor", test_args.floor_fraction,
                     "Positivity floor as a fraction of the mean squared residual");
    test->add_option("--format", test_args.format, "Output format")
        ->check(CLI::IsMember({"human", "json", "csv"}));

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo size/power experiments");
    auto* table = simulate->add_option("--table", sim_args.table, "Reproduce table 1, 2, 3 or 4")
                      ->check(CLI::Range(1, 4));
    simulate->add_option("--dgp", sim_args.dgp, "DGP for a single experiment")
        ->check(CLI::Range(1, 2))
        ->excludes(table);
    simulate->add_option("--n", sim_args.n, "Sample size for a single experiment")
        ->excludes(table);
    simulate->add_option("--alpha", sim_args.alpha, "Break magnitude for a single experiment")
        ->excludes(table);
    simulate->add_option("--kappa", sim_args.kappa, "Break fraction for a single experiment")
        ->excludes(table);
    simulate->add_option("--seed", sim_args.seed, "RNG seed (default: $VARBREAK_SEED or 1)");
    simulate->add_option("--reps", sim_args.reps, "Replications per experiment")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--threads", sim_args.threads, "OpenMP threads (0 = runtime default)");
    simulate->add_option("--rule", sim_args.rule,
                         "Decision rule (default: paper for tables, asymptotic otherwise)")
        ->check(CLI::IsMember({"asymptotic", "paper"}));
    simulate->add_option("--level", sim_args.level, "Test level for the asymptotic rule");
    simulate->add_option("--pmax", sim_args.pmax, "Largest variance polynomial order")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--positivity", sim_args.positivity,
                         "Nonpositive fitted variance handling")
        ->check(CLI::IsMember({"reject", "clamp", "allow"}));
    simulate->add_option("--format", sim_args.format, "Output format")
        ->check(CLI::IsMember({"csv", "human", "json", "records"}));

    double level = 0.05;
    auto* critval = app.add_subcommand("critval", "Asymptotic critical value of the tests");
    critval->add_option("--level", level, "Test level")->check(CLI::Range(0.0, 1.0));

    CLI11_PARSE(app, argc, argv);

    try {
        if (test->parsed()) {
            return run_test(test_args);
        }
        if (simulate->parsed()) {
            return run_simulate(sim_args);
        }
        return run_critval(level);
    } catch (const varbreak::Error& e) {
        std::cerr << "varbreak: " << e.what() << "\n";
        // Pipeline errors wrap the component error, so match on the message.
        if (std::string(e.what()).find("fitted variance") != std::string::npos) {
            std::cerr << "varbreak: rerun with --clamp or --positivity allow to proceed\n";
        }
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "varbreak: " << e.what() << "\n";
        return 1;
    }
}
