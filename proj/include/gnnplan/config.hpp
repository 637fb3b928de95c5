#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gnnplan/derived.hpp"
#include "gnnplan/experiment.hpp"
#include "gnnplan/training.hpp"

namespace gnnplan {

// One run-configuration file: domain, instance partitions, augmentation,
// network and training settings, evaluation budgets. JSON, schema in the
// README. Relative paths resolve against the config file's directory.
struct RunConfig {
  std::filesystem::path domain;
  std::vector<std::filesystem::path> train;
  std::vector<std::filesystem::path> validation;
  std::vector<std::filesystem::path> test;

  std::string augmentation_preset = "goal-versions";  // "custom" when spelled out
  AugmentationSpec augmentation = gnnplan::augmentation_preset("goal-versions");

  TrainConfig training;

  std::size_t state_cap = 100000;
  std::size_t sample_cap = kDefaultSampleCap;
  std::uint64_t dataset_seed = 0;

  std::string mode = "both";  // plain, cycle-avoid, both
  std::size_t step_limit = 1000;
  OracleOptions oracle;
  std::optional<std::filesystem::path> checkpoint;

  std::size_t jobs = 1;
  std::filesystem::path out = "gnnplan-out";

  std::vector<ExecMode> modes() const;
  void validate() const;  // throws ConfigError; the domain may be empty
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> diagnostics);
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<std::string> diagnostics_;
};

// Unknown keys and wrongly typed values are errors.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Every field spelled out. Paths are absolute, or relative to `relative_to`
// when given. Parsing the result gives back an equal configuration.
std::string config_to_json(const RunConfig& config, const std::filesystem::path& relative_to = {});

}  // namespace gnnplan
