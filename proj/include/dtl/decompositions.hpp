#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dtl/aggregate.hpp"
#include "dtl/field.hpp"
#include "dtl/grid.hpp"

namespace dtl {

/// A family of tree cubes with its canonical exceptional sets
/// E(S) = S minus the maximal members strictly inside S.
struct SparseFamily {
  RootSpec root;
  std::vector<CubeId> cubes;                  // ascending id order
  std::vector<std::optional<std::size_t>> parent;  // nearest member strictly above
  std::vector<std::vector<std::uint64_t>> e_leaves;
  std::vector<double> e_volume;
  double carleson = 0.0;  // max_S sum_{S' in family, S' inside S} |S'| / |S|
  bool is_sparse = true;  // 2|E(S)| >= |S| for every member

  std::vector<CubeAddr> addresses() const;
  nlohmann::json to_json() const;
};

/// Canonical E sets, sparsity certificate and Carleson constant of `cubes`.
SparseFamily verify_sparse(RootSpec root, std::span<const CubeAddr> cubes);
SparseFamily verify_sparse(const Grid& grid, std::span<const CubeId> cubes);

/// Stopping family below q0: S' is a child of S when it is maximal inside S
/// with prod_i avg_{S'} f_i > 2^m prod_i avg_S f_i.
SparseFamily build_sparse_family(std::span<const TreeAggregate> fields, const CubeAddr& q0);

struct SparseDomination {
  SparseFamily family;
  double constant = 0.0;  // max over leaves of the dyadic operator / sparse form
  std::uint64_t witness_leaf = 0;
};

/// Dominates the canonical dyadic operator of order alpha by the sparse form
/// over the stopping family rooted at the root cube.
SparseDomination sparse_dominate(std::span<const TreeAggregate> fields, double alpha);

/// Principal cubes of the pair (h, nu), nu = dx or mu. F' is a child of F
/// when it is maximal inside F with avg_{F'} h > 2 avg_F h, averages taken
/// with respect to nu. Cubes of zero nu-mass never stop.
struct CoronaForest {
  RootSpec root;
  CubeId top = 0;
  bool uses_measure = false;
  std::vector<CubeId> cubes;  // discovery order: generation by generation, ascending ids within
  std::vector<int> generation;
  std::vector<std::optional<std::size_t>> parent;
  std::vector<std::vector<std::size_t>> children;
  std::vector<std::vector<std::uint64_t>> e_leaves;
  std::vector<double> mass;    // nu(F)
  std::vector<double> e_mass;  // nu(E(F))
  std::vector<double> average;
  std::vector<std::int64_t> index_of;  // cube id -> member index, -1 if absent

  bool contains_cube(CubeId q) const { return index_of[q] >= 0; }
  std::size_t member(CubeId q) const;  // throws NotAPrincipalCube
  nlohmann::json to_json() const;
};

CoronaForest build_principal_cubes(const LeafField& h, const std::optional<LeafMeasure>& mu, const CubeAddr& q0);

/// Smallest forest cube containing q (q itself when it is a member).
CubeId stopping_parent(const Grid& grid, const CoronaForest& forest, CubeId q);
CubeAddr stopping_parent(const CoronaForest& forest, const CubeAddr& q);

/// nu-average of h over q, as used by the forest (0 on cubes of zero mass).
double pair_average(const Grid& grid, const TreeAggregate& h_nu, const TreeAggregate& nu, CubeId q);

struct ChildClassification {
  CubeId g = 0;
  std::vector<CubeId> ch1;  // pi_G(pi_F(G')) = G'
  std::vector<CubeId> ch2;  // pi_G(pi_F(G')) = G
  std::vector<CubeId> ch3;  // pi_F(G') strictly contains G
  std::vector<CubeId> remainder;
  // (child, Q) with Q in X(G) strictly containing the child, for every
  // child that has such a Q.
  std::vector<std::pair<CubeId, CubeId>> witnesses;

  nlohmann::json to_json(const Grid& grid) const;
};

ChildClassification classify_children(const CoronaForest& g_forest, const CoronaForest& f_forest, const CubeAddr& g);

/// f^G = f on E(G) plus avg_{G'} f on every classified child G'; 0 elsewhere.
LeafField corona_projection(const LeafField& f, const CoronaForest& g_forest, const ChildClassification& cls);

/// sum of |F'| over F and all of its forest descendants.
double descendant_volume(const Grid& grid, const CoronaForest& forest, std::size_t member);

}  // namespace dtl
