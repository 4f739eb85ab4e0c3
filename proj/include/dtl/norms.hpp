#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dtl/aggregate.hpp"
#include "dtl/field.hpp"
#include "dtl/operators.hpp"
#include "dtl/profile.hpp"

namespace dtl {

/// A supremum over tree cubes and the cube attaining it.
struct Witnessed {
  double value = 0.0;
  CubeAddr witness;
};

/// Argmax of per-cube values with the library tie rule.
Witnessed scan_cubes(const Grid& grid, std::span<const double> per_cube);

/// (int f^p dnu)^{1/p} with nu = dx, or mu when given.
double lebesgue_norm(const LeafField& f, double p, const std::optional<LeafMeasure>& mu = std::nullopt);

/// max_Q |Q|^{1/p0} (avg_Q f^p)^{1/p}.
Witnessed morrey_norm(const LeafField& f, double p, double p0);

/// max_Q |Q|^{1/p0 - 1/p} prod_i (int_Q f_i^{p_i})^{1/p_i}, 1/p = sum 1/p_i.
Witnessed product_morrey_norm(std::span<const LeafField> fields, std::span<const double> p_vec, double p0);
Witnessed product_morrey_norm(std::span<const LeafField> fields, const ExponentProfile& profile);

/// max_Q |Q|^{1/q0 - 1/q} (int_Q g^q dmu)^{1/q}.
Witnessed radon_morrey_norm(const LeafField& g, double q, double q0, const LeafMeasure& mu);

/// max_Q ( int_Q (M_alpha[f^p 1_Q])^{p'} dx / int_Q f^p )^{1/p'}; cubes with
/// no p-mass contribute 0.
Witnessed modified_morrey_norm(const LeafField& f, double p, double alpha, Exec exec = Exec::parallel);

}  // namespace dtl
