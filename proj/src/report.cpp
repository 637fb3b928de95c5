#include "gnnplan/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace gnnplan {

int coverage_percent(std::size_t solved, std::size_t total) {
  if (total == 0) return 0;
  return static_cast<int>((100 * solved) / total);
}

std::optional<double> plan_quality(std::size_t policy_length, std::size_t optimal_length, std::size_t common) {
  if (common == 0 || optimal_length == 0) return std::nullopt;
  return static_cast<double>(policy_length) / static_cast<double>(optimal_length);
}

int ReportRow::coverage_percent() const { return gnnplan::coverage_percent(solved, instances); }

std::optional<double> ReportRow::plan_quality() const {
  return gnnplan::plan_quality(policy_length, optimal_length, common);
}

std::string group_thousands(std::size_t value) {
  std::string digits = std::to_string(value);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

std::string format_plan_quality(std::size_t policy_length, std::size_t optimal_length, std::size_t common,
                                bool group_digits) {
  auto pq = plan_quality(policy_length, optimal_length, common);
  if (!pq) return "---";
  char ratio[32];
  std::snprintf(ratio, sizeof ratio, "%.4f", *pq);
  auto num = [&](std::size_t v) { return group_digits ? group_thousands(v) : std::to_string(v); };
  return std::string(ratio) + " = " + num(policy_length) + " / " + num(optimal_length) + " (" +
         std::to_string(common) + ")";
}

namespace {

void accumulate(ReportRow& row, const PolicyTrace& trace, const std::optional<std::int64_t>& optimal) {
  ++row.instances;
  if (trace.outcome != Outcome::solved) return;
  ++row.solved;
  row.length += trace.plan_length;
  if (optimal) {
    ++row.common;
    row.policy_length += trace.plan_length;
    row.optimal_length += static_cast<std::size_t>(*optimal);
  }
}

}  // namespace

EvalReport build_report(std::span<const PolicyTrace> traces, const OracleLengths& oracle) {
  EvalReport report;
  for (ExecMode mode : {ExecMode::cycle_avoid, ExecMode::plain}) {
    ReportSection section;
    section.mode = mode;
    section.total.domain = "Total";
    bool any = false;
    for (const auto& t : traces) {
      if (t.mode != mode) continue;
      any = true;
      auto it = oracle.find(t.instance_id);
      if (it == oracle.end()) throw std::invalid_argument("no oracle entry for instance '" + t.instance_id + "'");
      auto row = std::find_if(section.rows.begin(), section.rows.end(),
                              [&](const ReportRow& r) { return r.domain == t.domain; });
      if (row == section.rows.end()) {
        section.rows.push_back(ReportRow{t.domain});
        row = section.rows.end() - 1;
      }
      accumulate(*row, t, it->second);
      accumulate(section.total, t, it->second);
    }
    if (any) report.sections.push_back(std::move(section));
  }
  return report;
}

std::string render_text(const EvalReport& report) {
  std::ostringstream out;
  char line[256];
  for (const auto& section : report.sections) {
    out << "Deterministic greedy policy, "
        << (section.mode == ExecMode::cycle_avoid ? "with cycle avoidance" : "plain") << '\n';
    std::snprintf(line, sizeof line, "%-24s %-14s %8s  %s\n", "Domain (#)", "Coverage (%)", "L", "PQ = PL / OL (#)");
    out << line;
    auto emit = [&](const ReportRow& r) {
      const std::string name = r.domain + " (" + std::to_string(r.instances) + ")";
      const std::string coverage = std::to_string(r.solved) + " (" + std::to_string(r.coverage_percent()) + "%)";
      std::snprintf(line, sizeof line, "%-24s %-14s %8s  %s\n", name.c_str(), coverage.c_str(),
                    group_thousands(r.length).c_str(),
                    format_plan_quality(r.policy_length, r.optimal_length, r.common, true).c_str());
      out << line;
    };
    for (const auto& r : section.rows) emit(r);
    emit(section.total);
    out << '\n';
  }
  return out.str();
}

std::string render_tsv(const EvalReport& report) {
  std::ostringstream out;
  out << "mode\tdomain\tinstances\tsolved\tcoverage_pct\tlength\tpl\tol\tcommon\tpq\n";
  for (const auto& section : report.sections) {
    auto emit = [&](const ReportRow& r) {
      auto pq = r.plan_quality();
      char ratio[32] = "---";
      if (pq) std::snprintf(ratio, sizeof ratio, "%.4f", *pq);
      out << to_string(section.mode) << '\t' << r.domain << '\t' << r.instances << '\t' << r.solved << '\t'
          << r.coverage_percent() << '\t' << r.length << '\t' << r.policy_length << '\t' << r.optimal_length << '\t'
          << r.common << '\t' << ratio << '\n';
    };
    for (const auto& r : section.rows) emit(r);
    emit(section.total);
  }
  return out.str();
}

}  // namespace gnnplan
