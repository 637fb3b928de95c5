#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gnnplan/policy.hpp"

namespace gnnplan {

// Optimal plan length per instance id; nullopt when the oracle gave up.
using OracleLengths = std::map<std::string, std::optional<std::int64_t>>;

struct ReportRow {
  std::string domain;
  std::size_t instances = 0;
  std::size_t solved = 0;
  std::size_t length = 0;  // L: summed plan length over solved instances
  std::size_t policy_length = 0;   // PL over instances solved by both
  std::size_t optimal_length = 0;  // OL over the same instances
  std::size_t common = 0;          // instances solved by both

  int coverage_percent() const;
  std::optional<double> plan_quality() const;
};

struct ReportSection {
  ExecMode mode = ExecMode::plain;
  std::vector<ReportRow> rows;  // domains in order of first appearance
  ReportRow total;
};

struct EvalReport {
  std::vector<ReportSection> sections;  // cycle-avoid before plain when both exist
};

// Floor of 100 * solved / total; 0 for an empty set.
int coverage_percent(std::size_t solved, std::size_t total);

// PL / OL, undefined when nothing is solved by both.
std::optional<double> plan_quality(std::size_t policy_length, std::size_t optimal_length, std::size_t common);

// "1.0427 = 440 / 422 (13)", or "---" when undefined.
std::string format_plan_quality(std::size_t policy_length, std::size_t optimal_length, std::size_t common,
                                bool group_digits = false);

// "1,286"
std::string group_thousands(std::size_t value);

// Throws std::invalid_argument for a trace whose instance has no oracle entry.
EvalReport build_report(std::span<const PolicyTrace> traces, const OracleLengths& oracle);

std::string render_text(const EvalReport& report);
std::string render_tsv(const EvalReport& report);

}  // namespace gnnplan
