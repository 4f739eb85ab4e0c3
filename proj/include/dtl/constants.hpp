#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dtl/aggregate.hpp"
#include "dtl/decompositions.hpp"
#include "dtl/field.hpp"
#include "dtl/norms.hpp"
#include "dtl/operators.hpp"
#include "dtl/profile.hpp"

namespace dtl {

struct ConstantReport {
  std::string name;
  double value = 0.0;
  std::vector<CubeAddr> witnesses;
  std::string mode = "exact-scan";  // exact-scan | given | greedy | exhaustive | closed-form-bound
  nlohmann::json profile = nlohmann::json::object();
  /// Fixed multiplier that turns a closed-form bound into an upper bound.
  std::optional<double> bound_constant;

  nlohmann::json to_json() const;
};

/// sup_Q mu(Q) / l_Q^beta, 0 < beta <= n.
ConstantReport adams_constant(const TreeAggregate& mu, double beta);

/// sup_Q ( int_Q (M_beta[mu 1_Q])^{p'} dx / mu(Q) )^{1/p'}; mu(Q) = 0 scores 0.
ConstantReport ks_testing_constant(const TreeAggregate& mu, double beta, double p, Exec exec = Exec::parallel);

enum class A0Form { weight_a, bump_b, sparse_a, sparse_b };

A0Form parse_a0_form(const std::string& name);
std::string to_string(A0Form form);

/// weight-a: sup l^beta (mu(Q)/|Q|)^{1/p}; bump-b: sup l^beta (mu^r(Q)/|Q|)^{1/(r p)};
/// sparse-a/b: the same with l^beta replaced by K(Q)|Q|^m (K defaults to
/// the canonical kernel of order alpha).
ConstantReport a0_constant(const LeafMeasure& mu, const ExponentProfile& profile, A0Form form,
                           const std::optional<KernelWeight>& k = std::nullopt,
                           std::optional<double> r = std::nullopt);

/// sup over S in `family` of K(S)|S|^{m - sum 1/p_i} prod_i (sigma_i(S)/|S|)^{1/p_i'},
/// or with sigma_i^r and exponent 1/(r p_i') when r is given.
ConstantReport embedding_constant(std::span<const LeafMeasure> sigmas, const KernelWeight& k,
                                  std::span<const double> p_vec, const SparseFamily& family,
                                  std::optional<double> r = std::nullopt);

enum class CqMode { given, greedy, exhaustive, bound };

CqMode parse_cq_mode(const std::string& name);
std::string to_string(CqMode mode);

/// Largest subtree (in cubes) the exhaustive mode will enumerate.
inline constexpr std::uint64_t kExhaustiveCubeLimit = 15;

/// sup over certified sparse S inside Q of
///   ( sum_{S} ( |S|^{-1/p} sum_{Q' in D|_S} weight[Q'] )^{p'} )^{1/p'}
/// where weight is indexed by cube id. `given` evaluates `family` only.
ConstantReport sparse_sum_functional(const Grid& grid, std::span<const double> weight, double p, CubeId q,
                                     CqMode mode, const std::vector<CubeId>& family = {});

/// C_Q = mu(Q)^{-1/p'} times the functional above with weight K(Q')|Q'|^m mu(Q').
/// Mode `bound` needs a canonical K and reports (M_alpha[mu 1_Q]^{p'}(Q)/mu(Q))^{1/p'}
/// with the multiplier 2^{1/p'} / (1 - 2^{-alpha}) in bound_constant.
ConstantReport cq_constant(const TreeAggregate& mu, const KernelWeight& k, double p, const CubeAddr& q, CqMode mode,
                           const std::vector<CubeAddr>& family = {});

/// sup over cubes with mu(Q) > 0 of cq_constant (witness: the maximizing Q).
ConstantReport cq_supremum(const TreeAggregate& mu, const KernelWeight& k, double p, CqMode mode);

/// [w]_{A_p}; p = nullopt gives the A_infinity estimate [w]_{A_{p_star}}.
ConstantReport ap_characteristic(const LeafField& w, std::optional<double> p, double p_star = 64.0);

/// sum_{Q' strictly above Q} K(Q')|Q'|^{m - 1/p0} divided by K(Q)|Q|^{m - 1/p0}.
double condition_d_ratio(const Grid& grid, const KernelWeight& k, int m, double p0, CubeId q);
double condition_d_ratio(const KernelWeight& k, const ExponentProfile& profile, RootSpec root, const CubeAddr& q);

/// Geometric closed form of the ratio for the canonical kernel at a cube of
/// level `level`, and its depth-free bound.
double condition_d_series(int n, double alpha, double p0, int level);
double condition_d_bound(int n, double alpha, double p0);

}  // namespace dtl
