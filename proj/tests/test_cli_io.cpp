#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "oracle.hpp"
#include "varbreak/csv_series.hpp"
#include "varbreak/errors.hpp"
#include "varbreak/mc.hpp"
#include "varbreak/pipeline.hpp"
#include "varbreak/report.hpp"

using namespace varbreak;

namespace {

std::string quarterly_csv(int first_year, int first_quarter, int count, std::mt19937_64& rng,
                          const std::string& id = "ROWFDIQ027S") {
    std::ostringstream out;
    out << "DATE," << id << "\n";
    std::normal_distribution<double> noise;
    double level = 100.0;
    int year = first_year;
    int quarter = first_quarter;
    for (int i = 0; i < count; ++i) {
        level += 0.5 + noise(rng);
        char date[32];
        std::snprintf(date, sizeof date, "%04d-%02d-01", year, 3 * quarter - 2);
        out << date << ',' << level << "\n";
        if (++quarter == 5) {
            quarter = 1;
            ++year;
        }
    }
    return out.str();
}

std::string series_csv(const std::vector<double>& values) {
    std::ostringstream out;
    out.precision(17);
    out << "DATE,VALUE\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        char date[32];
        std::snprintf(date, sizeof date, "%04zu-%02zu-01", 1900 + i / 12, 1 + i % 12);
        out << date << ',' << values[i] << "\n";
    }
    return out.str();
}

void check_same(const TestReport& a, const TestReport& b) {
    CHECK(a.statistic == b.statistic);
    CHECK(a.value == b.value);
    CHECK(a.p_value == b.p_value);
    CHECK(a.decision.critical_value == b.decision.critical_value);
    CHECK(a.decision.level == b.decision.level);
    CHECK(a.decision.source == b.decision.source);
    CHECK(a.reject == b.reject);
    CHECK(a.ar_order == b.ar_order);
    CHECK(a.ar_mean == b.ar_mean);
    CHECK(a.ar_intercept == b.ar_intercept);
    CHECK(a.ar_coefficients == b.ar_coefficients);
    CHECK(a.poly_order == b.poly_order);
    CHECK(a.poly_coefficients == b.poly_coefficients);
    CHECK(a.aic_scores == b.aic_scores);
    CHECK(a.poly_min_variance == b.poly_min_variance);
    CHECK(a.positivity_policy == b.positivity_policy);
    CHECK(a.window_offset == b.window_offset);
    CHECK(a.window_length == b.window_length);
    CHECK(a.sample_size == b.sample_size);
    CHECK(a.window_center == b.window_center);
    CHECK(a.warnings == b.warnings);
}

}  // namespace

TEST_CASE("parse_csv: well-formed input") {
    const SeriesFile s = parse_csv("DATE,VALUE\n2000-01-01,1.5\n2000-02-01,2.5\n2000-03-01,-3\n");
    CHECK(s.size() == 3);
    CHECK(s.values == std::vector<double>{1.5, 2.5, -3.0});
    CHECK(s.dates.front() == "2000-01-01");
    CHECK(s.source_id == "VALUE");
    CHECK(s.frequency == Frequency::monthly);
    CHECK(s.warnings.empty());
}

TEST_CASE("parse_csv: named columns, quotes and CRLF") {
    const SeriesFile s = parse_csv(
        "observation_date,\"M2REAL\",other\r\n\"1990-01-01\", 10 ,x\r\n1990-04-01,11,y\r\n"
        "1990-07-01,12,z\r\n",
        CsvOptions{"observation_date", "M2REAL", {".", ""}});
    CHECK(s.values == std::vector<double>{10, 11, 12});
    CHECK(s.source_id == "M2REAL");
    CHECK(s.frequency == Frequency::quarterly);
}

TEST_CASE("parse_csv: missing values") {
    const SeriesFile s = parse_csv("DATE,VALUE\n2000-01-01,1\n2000-02-01,.\n2000-03-01,3\n2000-04-01,\n");
    CHECK(s.size() == 2);
    CHECK(s.dropped_missing == 2);
    REQUIRE(s.warnings.size() == 1);
    CHECK(s.warnings[0].find("2 missing") != std::string::npos);
}

TEST_CASE("parse_csv: errors") {
    try {
        (void)parse_csv("DATE,VALUE\n2000-01-01,1\n2000-02-01,abc\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_csv("DATE,VALUE\n2000-01-01\n"), ParseError);
    CHECK_THROWS_AS(parse_csv(""), ParseError);
    CHECK_THROWS_AS(parse_csv("DATE,VALUE\n2000-01-01,1\n", CsvOptions{"DATE", "NOPE", {"."}}),
                    ParseError);
    CHECK_THROWS_AS(parse_csv("DATE,VALUE\n2000-02-01,1\n2000-01-01,2\n"), OrderingError);
    CHECK_THROWS_AS(parse_csv("DATE,VALUE\n2000-01-01,1\n2000-01-01,2\n"), OrderingError);
}

TEST_CASE("load_csv: quarterly file from 1946Q4 to 2014Q1") {
    std::mt19937_64 rng(1);
    const std::string text = quarterly_csv(1946, 4, 270, rng);
    const auto path = std::filesystem::temp_directory_path() / "varbreak_fdi_test.csv";
    {
        std::ofstream out(path, std::ios::binary);
        out << "\xEF\xBB\xBF" << text;
    }
    const SeriesFile s = load_csv(path);
    std::filesystem::remove(path);
    CHECK(s.size() == 270);
    CHECK(s.dates.front() == "1946-10-01");
    CHECK(s.dates.back() == "2014-01-01");
    CHECK(s.frequency == Frequency::quarterly);
    CHECK(s.source_id == "ROWFDIQ027S");
    CHECK(difference(s, 1).size() == 269);
    CHECK_THROWS(load_csv(std::filesystem::temp_directory_path() / "varbreak_missing_file.csv"));
}

TEST_CASE("difference") {
    SeriesFile s;
    s.values = {1, 3, 6, 10};
    s.dates = {"a", "b", "c", "d"};
    const SeriesFile d1 = difference(s, 1);
    CHECK(d1.values == std::vector<double>{2, 3, 4});
    CHECK(d1.dates == std::vector<std::string>{"b", "c", "d"});
    const SeriesFile d2 = difference(s, 2);
    CHECK(d2.values == difference(d1, 1).values);
    CHECK(d2.values == std::vector<double>{1, 1});
    CHECK_THROWS_AS(difference(s, 0), DomainError);

    SeriesFile flat;
    flat.values = {5, 5, 5};
    flat.dates = {"a", "b", "c"};
    CHECK(difference(flat, 1).values == std::vector<double>{0, 0});
    CHECK_THROWS_AS(difference(flat, 3), LengthError);
    CHECK_THROWS_AS(difference(flat, -1), DomainError);
}

TEST_CASE("run_test_pipeline: exposes every choice") {
    std::mt19937_64 rng(3);
    const SeriesFile s = parse_csv(quarterly_csv(1946, 4, 270, rng));
    PipelineConfig config;
    config.decision = DecisionRule::paper_boundary();
    config.correction.positivity = PositivityPolicy::clamp;
    const PipelineResult r = run_test_pipeline(s, config);
    CHECK(r.n_raw == 270);
    CHECK(r.diff_order == 1);
    CHECK(r.n_differenced == 269);
    CHECK(r.ar_order_selected);
    CHECK(r.ar_max_order == 8);
    CHECK(r.ar_aic_scores.size() == 9);
    CHECK(r.n_residuals == 269 - static_cast<std::size_t>(r.q_std.ar_order));
    CHECK(r.q_std.statistic == "Q_std");
    CHECK(r.q_mod.statistic == "Q_mod");
    CHECK(r.q_std.decision.critical_value == 1.33);
    CHECK(r.q_mod.poly_order.has_value());
    CHECK(r.q_mod.aic_scores.size() == 5);
    CHECK(r.q_mod.positivity_policy == "clamp");
    CHECK(r.q_std.reject == (r.q_std.value > 1.33));
    CHECK(r.q_std.p_value == doctest::Approx(1.0 - kolmogorov_cdf(r.q_std.value)));

    PipelineConfig fixed = config;
    fixed.ar_order = 2;
    fixed.gamma = 0.9;
    fixed.start_fraction = 0.1;
    const PipelineResult f = run_test_pipeline(s, fixed);
    CHECK_FALSE(f.ar_order_selected);
    CHECK(f.q_mod.ar_order == 2);
    CHECK(f.q_mod.ar_coefficients.size() == 2);
    CHECK(f.q_mod.window_length == static_cast<std::size_t>(std::floor(std::pow(267.0, 0.9) + 1e-9)));
    CHECK(f.q_mod.window_offset == 26);
    CHECK(f.q_std.window_length == 267);
}

TEST_CASE("run_test_pipeline: errors carry the stage") {
    SeriesFile tiny;
    tiny.values = {1, 2, 3};
    tiny.dates = {"a", "b", "c"};
    try {
        (void)run_test_pipeline(tiny);
        FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
        CHECK(e.stage() == "load");
    }

    SeriesFile flat;
    for (int i = 0; i < 40; ++i) {
        flat.values.push_back(1.0);
        flat.dates.push_back(std::to_string(1000 + i));
    }
    try {
        (void)run_test_pipeline(flat);
        FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
        CHECK(e.stage() == "ar");
    }
}

TEST_CASE("run_test_pipeline: size under constant-variance white noise") {
    std::mt19937_64 rng(5);
    const DecisionRule rule = DecisionRule::asymptotic(0.05);
    int accepted = 0;
    for (int run = 0; run < 100; ++run) {
        const SeriesFile s = parse_csv(series_csv(oracle::normal_draws(500, rng)));
        PipelineConfig config;
        config.diff_order = 0;
        config.decision = rule;
        const PipelineResult r = run_test_pipeline(s, config);
        accepted += !r.q_std.reject && !r.q_mod.reject;
    }
    CHECK(accepted >= 90);
}

TEST_CASE("emit_report: JSON round trip and determinism") {
    std::mt19937_64 rng(7);
    const std::string text = quarterly_csv(1960, 1, 200, rng, "SERIES");
    const SeriesFile s = parse_csv(text);
    PipelineConfig config;
    config.correction.positivity = PositivityPolicy::allow;
    const PipelineResult r = run_test_pipeline(s, config);
    const std::string json = emit_report(r, Format::json);
    CHECK(json.find("varbreak.report/1") != std::string::npos);
    CHECK(emit_report(run_test_pipeline(parse_csv(text), config), Format::json) == json);

    const PipelineResult back = parse_report_json(json);
    CHECK(back.source_id == r.source_id);
    CHECK(back.frequency == r.frequency);
    CHECK(back.n_raw == r.n_raw);
    CHECK(back.diff_order == r.diff_order);
    CHECK(back.n_differenced == r.n_differenced);
    CHECK(back.ar_order_selected == r.ar_order_selected);
    CHECK(back.ar_max_order == r.ar_max_order);
    CHECK(back.ar_aic_scores == r.ar_aic_scores);
    CHECK(back.n_residuals == r.n_residuals);
    check_same(back.q_std, r.q_std);
    check_same(back.q_mod, r.q_mod);

    const std::string csv = emit_report(r, Format::csv);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
    CHECK(emit_report(r, Format::human).find("Q_mod") != std::string::npos);
    CHECK_THROWS_AS(parse_format("xml"), DomainError);
}

TEST_CASE("emit_experiments") {
    const std::string header =
        "dgp,n,alpha,kappa,replications,seed,rule,critical_value,rate_std,se_std,rate_mod,se_mod,"
        "failures_std,failures_mod,nonpositive_fits\n";
    CHECK(emit_experiments({}, Format::csv) == header);

    mc::McExperimentSpec spec;
    spec.path.n = 50;
    spec.replications = 100;
    const mc::McResult r = mc::run_experiment(spec);
    const std::string csv = emit_experiments(std::span(&r, 1), Format::csv);
    CHECK(csv.rfind(header, 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    CHECK(csv.find("DGP1,50,0,0.5,100,1,asymptotic") != std::string::npos);
    CHECK(emit_experiments(std::span(&r, 1), Format::json).find("varbreak.experiments/1") !=
          std::string::npos);
}

TEST_CASE("emit_table: layouts") {
    mc::TablePlan size = mc::table_plan(1, 7, 20, DecisionRule::paper_boundary());
    std::vector<mc::McResult> results;
    for (const auto& spec : size.specs) results.push_back(mc::run_experiment(spec));
    const std::string csv = emit_table(size, results, Format::csv);
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "statistic,n=50,n=100,n=200");
    std::getline(lines, line);
    CHECK(line.rfind("Q_std,", 0) == 0);
    std::getline(lines, line);
    CHECK(line.rfind("Q_mod,", 0) == 0);
    CHECK_FALSE(std::getline(lines, line));

    mc::TablePlan power = mc::table_plan(3, 7, 20, DecisionRule::paper_boundary());
    results.clear();
    for (const auto& spec : power.specs) results.push_back(mc::run_experiment(spec));
    const std::string pcsv = emit_table(power, results, Format::csv);
    CHECK(pcsv.rfind("alpha,n=50,n=100,n=200\n1,", 0) == 0);
    CHECK(std::count(pcsv.begin(), pcsv.end(), '\n') == 6);
    CHECK(emit_table(power, results, Format::json).find("varbreak.table/1") != std::string::npos);
    CHECK_THROWS_AS(emit_table(power, std::span(results).first(3), Format::csv), LengthError);
}
