#include "doctest.h"

#include <string>
#include <vector>

#include "gnnplan/report.hpp"

using namespace gnnplan;

namespace {

PolicyTrace trace(std::string domain, std::string id, ExecMode mode, Outcome outcome, std::size_t length) {
  PolicyTrace t;
  t.domain = std::move(domain);
  t.instance_id = std::move(id);
  t.mode = mode;
  t.outcome = outcome;
  t.plan_length = length;
  return t;
}

}  // namespace

TEST_CASE("plan quality ratios to four decimals") {
  CHECK(format_plan_quality(440, 422, 13) == "1.0427 = 440 / 422 (13)");
  CHECK(format_plan_quality(400, 400, 15) == "1.0000 = 400 / 400 (15)");
  CHECK(format_plan_quality(3665, 377, 15) == "9.7215 = 3665 / 377 (15)");
  CHECK(format_plan_quality(3665, 377, 15, true) == "9.7215 = 3,665 / 377 (15)");
  CHECK(format_plan_quality(134, 8, 1) == "16.7500 = 134 / 8 (1)");
  CHECK(format_plan_quality(9014, 5493, 132, true) == "1.6410 = 9,014 / 5,493 (132)");
}

TEST_CASE("undefined plan quality") {
  CHECK_FALSE(plan_quality(0, 0, 0));
  CHECK(format_plan_quality(0, 0, 0) == "---");
  CHECK(plan_quality(10, 5, 1).value() == 2.0);
}

TEST_CASE("coverage percentages are floored") {
  CHECK(coverage_percent(17, 28) == 60);
  CHECK(coverage_percent(24, 41) == 58);
  CHECK(coverage_percent(7, 15) == 46);
  CHECK(coverage_percent(12, 14) == 85);
  CHECK(coverage_percent(11, 14) == 78);
  CHECK(coverage_percent(243, 269) == 90);
  CHECK(coverage_percent(165, 269) == 61);
  CHECK(coverage_percent(16, 16) == 100);
  CHECK(coverage_percent(0, 20) == 0);
  CHECK(coverage_percent(0, 0) == 0);
}

TEST_CASE("thousands grouping") {
  CHECK(group_thousands(0) == "0");
  CHECK(group_thousands(999) == "999");
  CHECK(group_thousands(1286) == "1,286");
  CHECK(group_thousands(18134) == "18,134");
  CHECK(group_thousands(1234567) == "1,234,567");
}

TEST_CASE("report aggregates per domain and mode") {
  std::vector<PolicyTrace> traces{
      trace("gripper", "g4", ExecMode::plain, Outcome::solved, 11),
      trace("gripper", "g5", ExecMode::plain, Outcome::step_limit, 3),
      trace("blocks", "b5", ExecMode::plain, Outcome::solved, 10),
      trace("blocks", "b6", ExecMode::plain, Outcome::solved, 20),
      trace("gripper", "g4", ExecMode::cycle_avoid, Outcome::solved, 13),
      trace("gripper", "g5", ExecMode::cycle_avoid, Outcome::cycle, 40),
  };
  OracleLengths oracle{{"g4", 11}, {"g5", 15}, {"b5", 8}, {"b6", std::nullopt}};
  auto report = build_report(traces, oracle);
  REQUIRE(report.sections.size() == 2);
  CHECK(report.sections[0].mode == ExecMode::cycle_avoid);
  CHECK(report.sections[1].mode == ExecMode::plain);

  const auto& plain = report.sections[1];
  REQUIRE(plain.rows.size() == 2);
  CHECK(plain.rows[0].domain == "gripper");
  CHECK(plain.rows[0].solved == 1);
  CHECK(plain.rows[0].coverage_percent() == 50);
  CHECK(plain.rows[1].length == 30);
  CHECK(plain.rows[1].common == 1);  // b6 has no optimal length
  CHECK(plain.rows[1].plan_quality().value() == doctest::Approx(10.0 / 8.0));
  CHECK(plain.total.instances == 4);
  CHECK(plain.total.solved == 3);
  CHECK(plain.total.coverage_percent() == 75);
  CHECK(plain.total.policy_length == 21);
  CHECK(plain.total.optimal_length == 19);

  const std::string text = render_text(report);
  CHECK(text.find("Deterministic greedy policy, with cycle avoidance") < text.find("Deterministic greedy policy, plain"));
  CHECK(text.find("1 (50%)") != std::string::npos);
  CHECK(text.find("1.2500 = 10 / 8 (1)") != std::string::npos);

  const std::string tsv = render_tsv(report);
  CHECK(tsv.starts_with("mode\tdomain\tinstances"));
  CHECK(tsv.find("plain\tTotal\t4\t3\t75\t41\t21\t19\t2\t1.1053\n") != std::string::npos);
}

TEST_CASE("nothing solved prints dashes") {
  std::vector<PolicyTrace> traces{trace("logistics", "l1", ExecMode::plain, Outcome::cycle, 0)};
  auto report = build_report(traces, {{"l1", 20}});
  REQUIRE(report.sections.size() == 1);
  CHECK(render_text(report).find("0 (0%)") != std::string::npos);
  CHECK(render_text(report).find("---") != std::string::npos);
  CHECK(render_tsv(report).find("\t---\n") != std::string::npos);
}

TEST_CASE("missing oracle entry is an error") {
  std::vector<PolicyTrace> traces{trace("gripper", "g9", ExecMode::plain, Outcome::solved, 5)};
  CHECK_THROWS_AS(build_report(traces, {}), std::invalid_argument);
}
