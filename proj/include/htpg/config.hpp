#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "htpg/env.hpp"
#include "htpg/policy.hpp"
#include "htpg/trainer.hpp"

namespace htpg {

struct FamilySpec {
  std::string name;
  PolicyParams policy;
};

struct ExperimentConfig {
  std::string name = "experiment";
  EnvSpec env = EnvSpec::trapped_car();
  bool start_at_false_goal = false;
  std::vector<FamilySpec> families;
  // policy_init and seed are filled per run from families/seeds.
  TrainConfig train;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path outputs = "out";

  // Throws ConfigError naming the offending field.
  void validate() const;
};

// Flat TOML-style config with sections [run], [env], [train] and
// [policy.<family>]. Unknown keys, duplicate keys and malformed lines are
// errors carrying the line number.
ExperimentConfig parse_config(std::string_view text);

// Throws NotFoundError if the file does not exist.
ExperimentConfig load_config(const std::filesystem::path& path);

// Default policy for a built-in environment: zero mode weights over the
// affine [position, velocity, 1] features and unit scale.
PolicyParams default_policy(int alpha, bool adaptive);

}  // namespace htpg
