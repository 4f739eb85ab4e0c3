#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtl/grid.hpp"

namespace dtl::harness {

/// One named property, scored per instance. A score above `limit` is a
/// violation; `worst` is the largest score seen.
struct SuiteCheck {
  std::string name;
  double limit = 0.0;
  double worst = 0.0;
  std::uint64_t instances = 0;
  std::uint64_t failures = 0;
  nlohmann::json notes = nlohmann::json::object();

  void record(double score);
  bool pass() const noexcept { return failures == 0; }
  nlohmann::json to_json() const;
};

struct SuiteReport {
  std::string suite;
  RootSpec root;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<SuiteCheck> checks;

  bool pass() const noexcept;
  const SuiteCheck& check(const std::string& name) const;
  nlohmann::json to_json() const;
};

/// exact | sparse | corona | constants.
const std::vector<std::string>& suite_names();

/// Throws BadKind for an unknown suite.
SuiteReport run_suite(const std::string& suite, RootSpec root, int trials, std::uint64_t seed);

}  // namespace dtl::harness
