#pragma once

#include <span>
#include <string>
#include <string_view>

#include "varbreak/mc.hpp"
#include "varbreak/pipeline.hpp"

namespace varbreak {

enum class Format { human, json, csv };

/// Parses "human", "json" or "csv"; throws DomainError otherwise.
Format parse_format(std::string_view name);

inline constexpr const char* kReportSchema = "varbreak.report/1";
inline constexpr const char* kExperimentSchema = "varbreak.experiments/1";
inline constexpr const char* kTableSchema = "varbreak.table/1";

std::string emit_report(const PipelineResult& result, Format format);

/// Reads back the JSON produced by emit_report(result, Format::json).
PipelineResult parse_report_json(std::string_view json);

/// One record per experiment; CSV has a single header row and one row per
/// result with rate and standard-error columns.
std::string emit_experiments(std::span<const mc::McResult> results, Format format);

/// Table layout: Q_std/Q_mod rows (size tables) or alpha rows (power tables)
/// by sample-size columns. `results` must follow plan.specs.
std::string emit_table(const mc::TablePlan& plan, std::span<const mc::McResult> results,
                       Format format);

}  // namespace varbreak
