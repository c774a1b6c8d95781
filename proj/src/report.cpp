#include "varbreak/report.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "varbreak/errors.hpp"

namespace varbreak {

using nlohmann::json;

namespace {

std::string fixed(double value, int decimals) {
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*f", decimals, value);
    return buf.data();
}

// Shortest representation that reads back to the same double.
std::string exact(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return ec == std::errc() ? std::string(buf.data(), ptr) : std::string("nan");
}

std::string join(const std::vector<double>& values, const char* sep = " ") {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += exact(values[i]);
    }
    return out;
}

ArMean parse_ar_mean(const std::string& name) {
    if (name == "none") return ArMean::none;
    if (name == "demean") return ArMean::demean;
    if (name == "intercept") return ArMean::intercept;
    throw DomainError("unknown AR mean treatment '" + name + "'");
}

RuleSource parse_rule_source(const std::string& name) {
    if (name == "asymptotic") return RuleSource::asymptotic;
    if (name == "paper_boundary") return RuleSource::paper_boundary;
    if (name == "user") return RuleSource::user;
    throw DomainError("unknown decision rule source '" + name + "'");
}

json rule_json(const DecisionRule& rule) {
    return {{"critical_value", rule.critical_value},
            {"level", rule.level},
            {"source", to_string(rule.source)}};
}

json report_json(const TestReport& r) {
    json j{{"statistic", r.statistic},
           {"value", r.value},
           {"p_value", r.p_value},
           {"decision", rule_json(r.decision)},
           {"reject", r.reject},
           {"ar",
            {{"order", r.ar_order},
             {"mean", to_string(r.ar_mean)},
             {"intercept", r.ar_intercept},
             {"coefficients", r.ar_coefficients}}},
           {"window",
            {{"offset", r.window_offset},
             {"length", r.window_length},
             {"sample_size", r.sample_size},
             {"center", r.window_center}}},
           {"warnings", r.warnings}};
    if (r.poly_order) {
        j["poly"] = {{"order", *r.poly_order},
                     {"coefficients", r.poly_coefficients},
                     {"aic_scores", r.aic_scores},
                     {"min_variance", r.poly_min_variance},
                     {"positivity_policy", r.positivity_policy}};
    } else {
        j["poly"] = nullptr;
    }
    return j;
}

TestReport report_from_json(const json& j) {
    TestReport r;
    r.statistic = j.at("statistic").get<std::string>();
    r.value = j.at("value").get<double>();
    r.p_value = j.at("p_value").get<double>();
    const json& d = j.at("decision");
    r.decision.critical_value = d.at("critical_value").get<double>();
    r.decision.level = d.at("level").get<double>();
    r.decision.source = parse_rule_source(d.at("source").get<std::string>());
    r.reject = j.at("reject").get<bool>();
    const json& ar = j.at("ar");
    r.ar_order = ar.at("order").get<int>();
    r.ar_mean = parse_ar_mean(ar.at("mean").get<std::string>());
    r.ar_intercept = ar.at("intercept").get<double>();
    r.ar_coefficients = ar.at("coefficients").get<std::vector<double>>();
    const json& w = j.at("window");
    r.window_offset = w.at("offset").get<std::size_t>();
    r.window_length = w.at("length").get<std::size_t>();
    r.sample_size = w.at("sample_size").get<std::size_t>();
    r.window_center = w.at("center").get<double>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    const json& poly = j.at("poly");
    if (!poly.is_null()) {
        r.poly_order = poly.at("order").get<int>();
        r.poly_coefficients = poly.at("coefficients").get<std::vector<double>>();
        r.aic_scores = poly.at("aic_scores").get<std::vector<double>>();
        r.poly_min_variance = poly.at("min_variance").get<double>();
        r.positivity_policy = poly.at("positivity_policy").get<std::string>();
    }
    return r;
}

void human_report(std::ostringstream& out, const TestReport& r) {
    out << r.statistic << " = " << fixed(r.value, 4) << "  (p = " << fixed(r.p_value, 4)
        << ", critical value " << fixed(r.decision.critical_value, 4) << " ["
        << to_string(r.decision.source) << "], " << (r.reject ? "REJECT" : "do not reject")
        << " no variance break)\n";
    out << "  window: t = " << r.window_offset + 1 << ".." << r.window_offset + r.window_length
        << " of " << r.sample_size << ", center " << fixed(r.window_center, 4) << "\n";
    if (r.poly_order) {
        out << "  variance polynomial: p = " << *r.poly_order << " (AIC), coefficients "
            << join(r.poly_coefficients) << "\n";
        out << "  AIC scores p=1..: " << join(r.aic_scores) << "\n";
        out << "  min fitted variance " << exact(r.poly_min_variance) << ", positivity policy "
            << r.positivity_policy << "\n";
    }
    for (const std::string& w : r.warnings) {
        out << "  warning: " << w << "\n";
    }
}

const char* table_title(const mc::TablePlan& plan) {
    switch (plan.table) {
        case 1: return "Empirical size (%) under DGP1";
        case 2: return "Empirical size (%) under DGP2";
        case 3: return "Empirical power (%) of Q_mod under DGP1";
        default: return "Empirical power (%) of Q_mod under DGP2";
    }
}

const mc::McResult& cell(const mc::TablePlan& plan, std::span<const mc::McResult> results,
                         std::size_t alpha_index, std::size_t n_index) {
    return results[alpha_index * plan.sample_sizes.size() + n_index];
}

}  // namespace

Format parse_format(std::string_view name) {
    if (name == "human") return Format::human;
    if (name == "json") return Format::json;
    if (name == "csv") return Format::csv;
    throw DomainError("unknown output format '" + std::string(name) + "'");
}

std::string emit_report(const PipelineResult& result, Format format) {
    switch (format) {
        case Format::json: {
            json j{{"schema", kReportSchema},
                   {"source_id", result.source_id},
                   {"frequency", result.frequency},
                   {"n_raw", result.n_raw},
                   {"dropped_missing", result.dropped_missing},
                   {"diff_order", result.diff_order},
                   {"n_differenced", result.n_differenced},
                   {"ar_selection",
                    {{"selected", result.ar_order_selected},
                     {"max_order", result.ar_max_order},
                     {"aic_scores", result.ar_aic_scores}}},
                   {"n_residuals", result.n_residuals},
                   {"reports", json::array({report_json(result.q_std), report_json(result.q_mod)})}};
            return j.dump(2) + "\n";
        }
        case Format::csv: {
            std::ostringstream out;
            out << "source_id,statistic,value,p_value,critical_value,rule,reject,diff_order,"
                   "ar_order,poly_order,window_offset,window_length,sample_size\n";
            for (const TestReport* r : {&result.q_std, &result.q_mod}) {
                out << result.source_id << ',' << r->statistic << ',' << exact(r->value) << ','
                    << exact(r->p_value) << ',' << exact(r->decision.critical_value) << ','
                    << to_string(r->decision.source) << ',' << (r->reject ? 1 : 0) << ','
                    << result.diff_order << ',' << r->ar_order << ','
                    << (r->poly_order ? std::to_string(*r->poly_order) : std::string()) << ','
                    << r->window_offset << ',' << r->window_length << ',' << r->sample_size
                    << '\n';
            }
            return out.str();
        }
        case Format::human: {
            std::ostringstream out;
            out << "series " << (result.source_id.empty() ? "(unnamed)" : result.source_id)
                << ": " << result.n_raw << " observations (" << result.frequency << ")";
            if (result.dropped_missing > 0) {
                out << ", " << result.dropped_missing << " missing dropped";
            }
            out << "\n";
            out << "differenced " << result.diff_order << " time(s): " << result.n_differenced
                << " observations\n";
            out << "AR(" << result.q_std.ar_order << ") prewhitening, mean "
                << to_string(result.q_std.ar_mean);
            if (result.ar_order_selected) {
                out << ", order chosen by AIC over 0.." << result.ar_max_order;
            }
            out << "; coefficients " << join(result.q_std.ar_coefficients) << "\n";
            out << "residuals: " << result.n_residuals << "\n\n";
            human_report(out, result.q_std);
            human_report(out, result.q_mod);
            return out.str();
        }
    }
    return {};
}

PipelineResult parse_report_json(std::string_view text) {
    const json j = json::parse(text);
    if (j.at("schema").get<std::string>() != kReportSchema) {
        throw ParseError("unsupported report schema", 1);
    }
    PipelineResult r;
    r.source_id = j.at("source_id").get<std::string>();
    r.frequency = j.at("frequency").get<std::string>();
    r.n_raw = j.at("n_raw").get<std::size_t>();
    r.dropped_missing = j.at("dropped_missing").get<std::size_t>();
    r.diff_order = j.at("diff_order").get<int>();
    r.n_differenced = j.at("n_differenced").get<std::size_t>();
    const json& sel = j.at("ar_selection");
    r.ar_order_selected = sel.at("selected").get<bool>();
    r.ar_max_order = sel.at("max_order").get<int>();
    r.ar_aic_scores = sel.at("aic_scores").get<std::vector<double>>();
    r.n_residuals = j.at("n_residuals").get<std::size_t>();
    const json& reports = j.at("reports");
    r.q_std = report_from_json(reports.at(0));
    r.q_mod = report_from_json(reports.at(1));
    return r;
}

std::string emit_experiments(std::span<const mc::McResult> results, Format format) {
    switch (format) {
        case Format::json: {
            json records = json::array();
            for (const mc::McResult& r : results) {
                records.push_back({{"dgp", mc::to_string(r.spec.dgp)},
                                   {"n", r.spec.path.n},
                                   {"alpha", r.spec.path.alpha},
                                   {"kappa", r.spec.path.kappa},
                                   {"replications", r.spec.replications},
                                   {"seed", r.spec.seed},
                                   {"decision", rule_json(r.spec.decision)},
                                   {"poly_p_max", r.spec.poly_p_max},
                                   {"positivity_policy", to_string(r.spec.correction.positivity)},
                                   {"rate_std", r.rejection_rate_std},
                                   {"se_std", r.se_std},
                                   {"rate_mod", r.rejection_rate_mod},
                                   {"se_mod", r.se_mod},
                                   {"failures_std", r.failures_std},
                                   {"failures_mod", r.failures_mod},
                                   {"nonpositive_fits", r.nonpositive_fits},
                                   {"chosen_p_counts", r.chosen_p_counts}});
            }
            return json{{"schema", kExperimentSchema}, {"experiments", records}}.dump(2) + "\n";
        }
        case Format::csv: {
            std::ostringstream out;
            out << "dgp,n,alpha,kappa,replications,seed,rule,critical_value,rate_std,se_std,"
                   "rate_mod,se_mod,failures_std,failures_mod,nonpositive_fits\n";
            for (const mc::McResult& r : results) {
                out << mc::to_string(r.spec.dgp) << ',' << r.spec.path.n << ','
                    << exact(r.spec.path.alpha) << ',' << exact(r.spec.path.kappa) << ','
                    << r.spec.replications << ',' << r.spec.seed << ','
                    << to_string(r.spec.decision.source) << ','
                    << exact(r.spec.decision.critical_value) << ','
                    << fixed(r.rejection_rate_std, 2) << ',' << fixed(r.se_std, 2) << ','
                    << fixed(r.rejection_rate_mod, 2) << ',' << fixed(r.se_mod, 2) << ','
                    << r.failures_std << ',' << r.failures_mod << ',' << r.nonpositive_fits
                    << '\n';
            }
            return out.str();
        }
        case Format::human: {
            std::ostringstream out;
            for (const mc::McResult& r : results) {
                out << mc::to_string(r.spec.dgp) << " n=" << r.spec.path.n
                    << " alpha=" << exact(r.spec.path.alpha) << " N=" << r.spec.replications
                    << ": Q_std " << fixed(r.rejection_rate_std, 1) << "% (SE "
                    << fixed(r.se_std, 1) << "), Q_mod " << fixed(r.rejection_rate_mod, 1)
                    << "% (SE " << fixed(r.se_mod, 1) << ")";
                if (r.failures_std + r.failures_mod > 0) {
                    out << ", failures " << r.failures_std << '/' << r.failures_mod;
                }
                out << '\n';
            }
            return out.str();
        }
    }
    return {};
}

std::string emit_table(const mc::TablePlan& plan, std::span<const mc::McResult> results,
                       Format format) {
    if (results.size() != plan.specs.size()) {
        throw LengthError("table needs " + std::to_string(plan.specs.size()) + " results, got " +
                          std::to_string(results.size()));
    }
    const std::size_t columns = plan.sample_sizes.size();

    if (format == Format::json) {
        json cells = json::array();
        for (const mc::McResult& r : results) {
            cells.push_back({{"n", r.spec.path.n},
                             {"alpha", r.spec.path.alpha},
                             {"rate_std", r.rejection_rate_std},
                             {"se_std", r.se_std},
                             {"rate_mod", r.rejection_rate_mod},
                             {"se_mod", r.se_mod},
                             {"failures_std", r.failures_std},
                             {"failures_mod", r.failures_mod},
                             {"nonpositive_fits", r.nonpositive_fits}});
        }
        const mc::McExperimentSpec& first = plan.specs.front();
        return json{{"schema", kTableSchema},
                    {"table", plan.table},
                    {"title", table_title(plan)},
                    {"dgp", mc::to_string(plan.dgp)},
                    {"replications", first.replications},
                    {"seed", first.seed},
                    {"decision", rule_json(first.decision)},
                    {"poly_p_max", first.poly_p_max},
                    {"positivity_policy", to_string(first.correction.positivity)},
                    {"cells", cells}}
                   .dump(2) +
               "\n";
    }

    const char sep = format == Format::csv ? ',' : '\t';
    std::ostringstream out;
    if (format == Format::human) {
        const mc::McExperimentSpec& first = plan.specs.front();
        out << "Table " << plan.table << ": " << table_title(plan) << ", N = "
            << first.replications << ", seed " << first.seed << ", critical value "
            << fixed(first.decision.critical_value, 4) << " [" << to_string(first.decision.source)
            << "]\n";
    }
    out << (plan.power ? "alpha" : "statistic");
    for (std::size_t n : plan.sample_sizes) {
        out << sep << "n=" << n;
    }
    out << '\n';

    auto row = [&](const std::string& label, auto rate_of, auto se_of, std::size_t alpha_index) {
        out << label;
        for (std::size_t c = 0; c < columns; ++c) {
            const mc::McResult& r = cell(plan, results, alpha_index, c);
            out << sep << fixed(rate_of(r), 1);
            if (format == Format::human) {
                out << " (" << fixed(se_of(r), 1) << ")";
            }
        }
        out << '\n';
    };
    const auto std_rate = [](const mc::McResult& r) { return r.rejection_rate_std; };
    const auto std_se = [](const mc::McResult& r) { return r.se_std; };
    const auto mod_rate = [](const mc::McResult& r) { return r.rejection_rate_mod; };
    const auto mod_se = [](const mc::McResult& r) { return r.se_mod; };

    if (plan.power) {
        for (std::size_t a = 0; a < plan.alphas.size(); ++a) {
            row(exact(plan.alphas[a]), mod_rate, mod_se, a);
        }
    } else {
        row("Q_std", std_rate, std_se, 0);
        row("Q_mod", mod_rate, mod_se, 0);
    }
    return out.str();
}

}  // namespace varbreak
