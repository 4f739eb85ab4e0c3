#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtl/harness/registry.hpp"

namespace dtl::harness {

struct ExperimentSpec {
  std::string id;
  std::vector<int> dims{1};
  std::vector<int> depths{2, 3, 4, 5};
  ProblemParams params;
  TrialKinds kinds;
  int trials = 10;
  std::uint64_t seed = 1;

  nlohmann::json to_json() const;
};

struct TrialRecord {
  std::uint64_t trial = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct DepthResult {
  int dim = 1;
  int depth = 0;
  double max_ratio = 0.0;
  std::uint64_t witness_trial = 0;
  nlohmann::json witness_inputs;
  nlohmann::json witness_details;
  std::vector<TrialRecord> trials;
};

struct DimSummary {
  int dim = 1;
  double slope = 0.0;
  bool pass = true;
  std::string reason;
};

struct SweepResult {
  ExperimentSpec spec;
  Check check = Check::bounded;
  std::vector<DepthResult> rows;
  std::vector<DimSummary> dims;
  bool pass = true;

  nlohmann::json to_json() const;
  /// depth,max_ratio,slope for one dimension; a leading dim column otherwise.
  std::string to_csv() const;
};

inline constexpr double kMaxSlope = 0.05;
inline constexpr double kMaxGrowth = 1.5;

/// Least-squares slope of log(max ratio) against depth over the depths with
/// a positive ratio; +inf if any ratio is infinite, 0 with fewer than two points.
double growth_slope(const std::vector<int>& depths, const std::vector<double>& max_ratios);

/// Bounded-ratio rule: finite, slope <= kMaxSlope, last <= kMaxGrowth * first.
bool growth_passes(const std::vector<double>& max_ratios, double slope, std::string* reason = nullptr);

SweepResult sweep(const ExperimentSpec& spec);

/// "1,2,5" or "2..7".
std::vector<int> parse_int_list(const std::string& text);

}  // namespace dtl::harness
