#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtl/field.hpp"
#include "dtl/harness/generators.hpp"
#include "dtl/profile.hpp"

namespace dtl::harness {

/// Raw exponents for one experiment. Each inequality validates only what it
/// uses; theorem-level ids build a full ExponentProfile from them.
struct ProblemParams {
  int m = 1;
  double alpha = 0.5;
  double beta = 0.5;
  std::vector<double> p_vec{2.0};
  double p0 = 2.0;
  std::optional<double> r;
  std::optional<double> q_alt;  // second Lebesgue exponent where one is needed
  double gamma_scale = 0.9;     // power-spike exponent as a fraction of n / (m max(p0, p_i))

  double p() const;  // 1/p = sum 1/p_i
  ExponentProfile profile(int n) const;
  static ProblemParams from_json(const nlohmann::json& doc, const ProblemParams& defaults);
  nlohmann::json to_json() const;
};

/// Inputs of one trial.
struct Instance {
  RootSpec root;
  std::vector<LeafField> fields;
  LeafMeasure mu = LeafMeasure::lebesgue(RootSpec{});
  LeafField g = LeafField::constant(RootSpec{}, 1.0);
  std::vector<LeafMeasure> sigmas;
  nlohmann::json kinds;

  /// Witness inputs in the leaf-data JSON schema.
  nlohmann::json to_json() const;
};

struct RatioEntry {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  nlohmann::json details = nlohmann::json::object();
};

/// exact: ratio <= 1 expected; identity: both directions (ratio is
/// max(lhs/rhs, rhs/lhs)); bounded: ratio bounded uniformly in depth.
enum class Check { exact, identity, bounded };
std::string to_string(Check check);

struct Inequality {
  std::string id;
  Check check = Check::bounded;
  std::string summary;
  ProblemParams defaults;
  bool weight_only = false;  // mu must have a density
  std::function<RatioEntry(const Instance&, const ProblemParams&)> evaluate;
};

const std::vector<Inequality>& registry();
const Inequality& lookup(const std::string& id);  // throws RegistryMiss

/// 0/0 -> 0, x/0 -> +inf.
double score_ratio(double lhs, double rhs);
double identity_ratio(double lhs, double rhs);

inline constexpr double kExactSlack = 1e-12;
bool exact_pass(double ratio);

struct TrialKinds {
  std::vector<GeneratorKind> fields{GeneratorKind::uniform, GeneratorKind::power_spike, GeneratorKind::sparse_spikes,
                                    GeneratorKind::constant};
  std::vector<GeneratorKind> measures{GeneratorKind::density_measure, GeneratorKind::atom_measure};
};

/// Deterministic inputs for (seed, root, trial). Field i of trial t uses kind
/// fields[(t + i) % size]; mu uses measures[t % size], skipping atomic kinds
/// when the inequality needs a weight.
Instance make_instance(const Inequality& ineq, const ProblemParams& params, RootSpec root, std::uint64_t seed,
                       std::uint64_t trial, const TrialKinds& kinds);

RatioEntry inequality_ratio(const Inequality& ineq, const ProblemParams& params, const Instance& inst);

}  // namespace dtl::harness
