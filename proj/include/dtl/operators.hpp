#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dtl/aggregate.hpp"
#include "dtl/field.hpp"
#include "dtl/grid.hpp"

namespace dtl {

/// Which implementation of the tree passes to run. Results are identical;
/// `serial` exists for testing and benchmarking.
enum class Exec { parallel, serial };

/// Cube weight K(Q), depending on the level only: either l_Q^{alpha - m n}
/// or an explicit per-level table.
class KernelWeight {
 public:
  static KernelWeight canonical(double alpha, int m, int n);
  static KernelWeight table(std::vector<double> per_level);

  bool is_canonical() const noexcept { return canonical_; }
  double alpha() const noexcept { return alpha_; }
  int m() const noexcept { return m_; }

  double at(int level) const;
  std::vector<double> per_level(const Grid& grid) const;

 private:
  KernelWeight() = default;

  bool canonical_ = false;
  double alpha_ = 0.0;
  int m_ = 1;
  int n_ = 1;
  std::vector<double> table_;
};

/// sup over dyadic R containing the leaf of l_R^{alpha-n} mu(R), or
/// mu(R cap Q) when localized to Q. alpha = 0 is the dyadic maximal function.
LeafField fractional_maximal(const TreeAggregate& mu, double alpha, const std::optional<CubeAddr>& localize = {},
                             Exec exec = Exec::parallel);

/// sup over containing Q of l_Q^{alpha - m n} prod_i int_Q f_i.
LeafField multilinear_maximal(std::span<const TreeAggregate> fields, double alpha, Exec exec = Exec::parallel);

/// sum over containing Q of K(Q) prod_i int_Q f_i.
LeafField dyadic_integral_operator(std::span<const TreeAggregate> fields, const KernelWeight& k,
                                   Exec exec = Exec::parallel);

/// The same sum over every dyadic cube inside the root, including those below
/// the leaf level. Leaf-constant inputs have leaf-valued averages there, so the
/// extra cubes add prod_i f_i(x) sum_{k > L} 2^{-k alpha}. Canonical K, alpha > 0.
LeafField complete_dyadic_integral(std::span<const TreeAggregate> fields, const KernelWeight& k,
                                   Exec exec = Exec::parallel);

/// Same sum restricted to the cubes of `family`.
LeafField sparse_integral_operator(std::span<const TreeAggregate> fields, const KernelWeight& k,
                                   std::span<const CubeAddr> family, Exec exec = Exec::parallel);

/// Midpoint quadrature of the m-linear kernel operator at leaf centers.
/// In one dimension the fully diagonal cell uses the exact cell integral of
/// the kernel; in higher dimensions that cell is dropped.
LeafField kernel_integral(std::span<const LeafField> fields, double alpha, Exec exec = Exec::parallel);

/// Exact integral over the m-cube [-h/2, h/2]^m of (|t_1| + ... + |t_m|)^{alpha - m}.
double diagonal_cell_integral(int m, double alpha, double h);

/// Dyadic maximal function with respect to mu; cubes of zero mass are skipped.
LeafField mu_maximal(const LeafField& g, const TreeAggregate& mu, Exec exec = Exec::parallel);

/// sum over containing Q of l_Q^alpha prod_i |Q|^{-1} int_{3Q cap root} f_i.
LeafField discretization_majorant(std::span<const LeafField> fields, double alpha, Exec exec = Exec::parallel);

}  // namespace dtl
