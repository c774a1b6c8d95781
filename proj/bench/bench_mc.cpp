// Serial reference vs OpenMP Monte Carlo engine on table-sized workloads.
//
//   bench_mc [--reps N] [--n SIZE] [--threads T] [--repeat K]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "varbreak/mc.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double best_seconds(int repeat, F&& run) {
    double best = 1e300;
    for (int i = 0; i < repeat; ++i) {
        const auto start = Clock::now();
        run();
        best = std::min(best, std::chrono::duration<double>(Clock::now() - start).count());
    }
    return best;
}

bool identical(const varbreak::mc::McResult& a, const varbreak::mc::McResult& b) {
    return a.rejections_std == b.rejections_std && a.rejections_mod == b.rejections_mod &&
           a.failures_std == b.failures_std && a.failures_mod == b.failures_mod &&
           a.chosen_p_counts == b.chosen_p_counts && a.statistics_std == b.statistics_std &&
           a.statistics_mod == b.statistics_mod;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benchmark the serial and OpenMP Monte Carlo engines"};
    std::size_t reps = 2000;
    std::vector<std::size_t> sizes{50, 200, 800};
    int threads = 0;
    int repeat = 3;
    app.add_option("--reps", reps, "Replications per experiment")->check(CLI::PositiveNumber);
    app.add_option("--n", sizes, "Sample sizes");
    app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");
    app.add_option("--repeat", repeat, "Timing repetitions (best is reported)")
        ->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    const int team = threads > 0 ? threads : omp_get_max_threads();
    std::printf("threads %d, %zu replications, best of %d\n", team, reps, repeat);
    std::printf("%-6s %-6s %12s %12s %9s %s\n", "dgp", "n", "serial_s", "openmp_s", "speedup",
                "identical");

    bool all_identical = true;
    for (varbreak::mc::Dgp dgp : {varbreak::mc::Dgp::dgp1, varbreak::mc::Dgp::dgp2}) {
        for (std::size_t n : sizes) {
            varbreak::mc::McExperimentSpec spec;
            spec.dgp = dgp;
            spec.path = varbreak::mc::VariancePathSpec{2.0, 0.5, n};
            spec.replications = reps;
            spec.retain_statistics = true;

            varbreak::mc::McResult serial, parallel;
            const double ts = best_seconds(repeat, [&] { serial = varbreak::mc::run_experiment_serial(spec); });
            const double tp = best_seconds(repeat, [&] { parallel = varbreak::mc::run_experiment(spec, threads); });
            const bool same = identical(serial, parallel);
            all_identical = all_identical && same;
            std::printf("%-6s %-6zu %12.4f %12.4f %9.2f %s\n", varbreak::mc::to_string(dgp), n, ts,
                        tp, ts / tp, same ? "yes" : "NO");
        }
    }
    return all_identical ? 0 : 1;
}
