#include "dtl/norms.hpp"

#include <cmath>

#include "dtl/error.hpp"
#include "dtl/kernels.hpp"

namespace dtl {

namespace {

double root_power(double v, double p) { return v == 0.0 ? 0.0 : std::pow(v, 1.0 / p); }

void require_positive(double p, const char* what) {
  if (!(p > 0.0) || !std::isfinite(p)) throw Error(ErrorKind::BadExponent, std::string(what) + " must be positive");
}

// |Q|^{e} for each level.
std::vector<double> volume_powers(const Grid& grid, double e) { return kernels::level_powers(grid, grid.dim() * e); }

}  // namespace

Witnessed scan_cubes(const Grid& grid, std::span<const double> per_cube) {
  const auto best = kernels::scan_max(per_cube);
  return {best.value, grid.addr(best.witness)};
}

double lebesgue_norm(const LeafField& f, double p, const std::optional<LeafMeasure>& mu) {
  require_positive(p, "p");
  if (!mu) return root_power(TreeAggregate::of(f.power(p)).total(), p);
  require_same_root(f.root(), mu->root());
  const auto mass = mu->leaf_masses();
  const auto fp = f.power(p);
  std::vector<double> weighted(mass.size());
  for (std::size_t i = 0; i < mass.size(); ++i) weighted[i] = fp[i] * mass[i];
  return root_power(TreeAggregate::from_leaf_masses(f.root(), weighted, TreeAggregate::Source::measure).total(), p);
}

Witnessed morrey_norm(const LeafField& f, double p, double p0) {
  require_positive(p, "p");
  if (!(p0 >= p)) throw Error(ErrorKind::BadExponent, "need p <= p0");
  const auto agg = TreeAggregate::of(f.power(p));
  const Grid& grid = agg.grid();
  const auto scale = volume_powers(grid, 1.0 / p0 - 1.0 / p);
  const auto values = kernels::map_cubes(
      grid, [&](CubeId q) { return scale[static_cast<std::size_t>(grid.level_of(q))] * root_power(agg.sum(q), p); });
  return scan_cubes(grid, values);
}

Witnessed product_morrey_norm(std::span<const LeafField> fields, std::span<const double> p_vec, double p0) {
  if (fields.empty() || fields.size() != p_vec.size()) {
    throw Error(ErrorKind::ShapeMismatch, "need one exponent per field");
  }
  double inv = 0.0;
  std::vector<TreeAggregate> aggs;
  aggs.reserve(fields.size());
  for (std::size_t i = 0; i < fields.size(); ++i) {
    require_same_root(fields[0].root(), fields[i].root());
    require_positive(p_vec[i], "p_i");
    inv += 1.0 / p_vec[i];
    aggs.push_back(TreeAggregate::of(fields[i].power(p_vec[i])));
  }
  const Grid& grid = aggs[0].grid();
  const auto scale = volume_powers(grid, 1.0 / p0 - inv);
  const auto values = kernels::map_cubes(grid, [&](CubeId q) {
    double v = scale[static_cast<std::size_t>(grid.level_of(q))];
    for (std::size_t i = 0; i < aggs.size(); ++i) v *= root_power(aggs[i].sum(q), p_vec[i]);
    return v;
  });
  return scan_cubes(grid, values);
}

Witnessed product_morrey_norm(std::span<const LeafField> fields, const ExponentProfile& profile) {
  return product_morrey_norm(fields, profile.p_vec, profile.p0);
}

Witnessed radon_morrey_norm(const LeafField& g, double q, double q0, const LeafMeasure& mu) {
  require_positive(q, "q");
  if (!(q0 >= q)) throw Error(ErrorKind::BadExponent, "need q <= q0");
  require_same_root(g.root(), mu.root());
  const auto mass = mu.leaf_masses();
  const auto gq = g.power(q);
  std::vector<double> weighted(mass.size());
  for (std::size_t i = 0; i < mass.size(); ++i) weighted[i] = gq[i] * mass[i];
  const auto agg = TreeAggregate::from_leaf_masses(g.root(), weighted, TreeAggregate::Source::measure);
  const Grid& grid = agg.grid();
  const auto scale = volume_powers(grid, 1.0 / q0 - 1.0 / q);
  const auto values = kernels::map_cubes(
      grid, [&](CubeId c) { return scale[static_cast<std::size_t>(grid.level_of(c))] * root_power(agg.sum(c), q); });
  return scan_cubes(grid, values);
}

Witnessed modified_morrey_norm(const LeafField& f, double p, double alpha, Exec exec) {
  const double pc = conjugate(p);
  const auto agg = TreeAggregate::of(f.power(p));
  const Grid& grid = agg.grid();
  if (!(alpha > 0.0 && alpha < grid.dim())) throw Error(ErrorKind::BadExponent, "alpha must lie in (0, n)");
  const auto energy = exec == Exec::parallel ? kernels::localized_energy(grid, agg.sums(), alpha, pc)
                                             : kernels::reference::localized_energy(grid, agg.sums(), alpha, pc);
  const auto values = kernels::map_cubes(grid, [&](CubeId q) {
    const double mass = agg.sum(q);
    return mass > 0.0 ? root_power(energy[q] / mass, pc) : 0.0;
  });
  return scan_cubes(grid, values);
}

}  // namespace dtl
