#include "dtl/operators.hpp"

#include <cmath>
#include <string>

#include "dtl/error.hpp"
#include "dtl/kernels.hpp"

namespace dtl {

namespace {

const Grid& common_grid(std::span<const TreeAggregate> fields) {
  if (fields.empty()) throw Error(ErrorKind::ShapeMismatch, "at least one input is required");
  for (const auto& f : fields) require_same_root(fields[0].root(), f.root());
  return fields[0].grid();
}

std::vector<double> run_down(const Grid& grid, std::span<const double> terms, kernels::Combine combine, Exec exec) {
  return exec == Exec::parallel ? kernels::accumulate_down(grid, terms, combine)
                                : kernels::reference::accumulate_down(grid, terms, combine);
}

std::vector<double> run_up(const Grid& grid, std::span<const double> masses, Exec exec) {
  return exec == Exec::parallel ? kernels::reduce_up(grid, masses) : kernels::reference::reduce_up(grid, masses);
}

// terms[Q] = weight(level) * prod_i sums_i[Q]
std::vector<double> product_terms(const Grid& grid, std::span<const TreeAggregate> fields,
                                  const std::vector<double>& weight) {
  return kernels::map_cubes(grid, [&](CubeId q) {
    double t = weight[static_cast<std::size_t>(grid.level_of(q))];
    for (const auto& f : fields) t *= f.sum(q);
    return t;
  });
}

}  // namespace

KernelWeight KernelWeight::canonical(double alpha, int m, int n) {
  if (m < 1 || n < 1 || !std::isfinite(alpha)) throw Error(ErrorKind::BadExponent, "invalid canonical kernel");
  KernelWeight k;
  k.canonical_ = true;
  k.alpha_ = alpha;
  k.m_ = m;
  k.n_ = n;
  return k;
}

KernelWeight KernelWeight::table(std::vector<double> per_level) {
  for (const double v : per_level) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorKind::NegativeValue, "kernel weights must be finite and >= 0");
  }
  KernelWeight k;
  k.table_ = std::move(per_level);
  return k;
}

double KernelWeight::at(int level) const {
  if (canonical_) return std::exp2(-level * (alpha_ - static_cast<double>(m_) * n_));
  if (level < 0 || static_cast<std::size_t>(level) >= table_.size()) {
    throw Error(ErrorKind::OutOfRangeCube, "kernel table has no entry for level " + std::to_string(level));
  }
  return table_[static_cast<std::size_t>(level)];
}

std::vector<double> KernelWeight::per_level(const Grid& grid) const {
  std::vector<double> out(static_cast<std::size_t>(grid.depth()) + 1);
  for (int k = 0; k <= grid.depth(); ++k) out[static_cast<std::size_t>(k)] = at(k);
  return out;
}

LeafField fractional_maximal(const TreeAggregate& mu, double alpha, const std::optional<CubeAddr>& localize,
                             Exec exec) {
  const Grid& grid = mu.grid();
  if (!(alpha >= 0.0 && alpha < grid.dim())) throw Error(ErrorKind::BadExponent, "alpha must lie in [0, n)");
  const auto factor = kernels::level_powers(grid, alpha - grid.dim());

  std::optional<CubeId> local;
  if (localize) local = grid.id(*localize);
  const auto terms = kernels::map_cubes(grid, [&](CubeId r) {
    double mass = mu.sum(r);
    if (local) {
      if (grid.contains(*local, r)) {
        mass = mu.sum(r);
      } else if (grid.contains(r, *local)) {
        mass = mu.sum(*local);
      } else {
        mass = 0.0;
      }
    }
    return factor[static_cast<std::size_t>(grid.level_of(r))] * mass;
  });
  return LeafField::ingest(grid.root(), run_down(grid, terms, kernels::Combine::max, exec));
}

LeafField multilinear_maximal(std::span<const TreeAggregate> fields, double alpha, Exec exec) {
  const Grid& grid = common_grid(fields);
  const double mn = static_cast<double>(fields.size()) * grid.dim();
  if (!(alpha >= 0.0 && alpha < mn)) throw Error(ErrorKind::BadExponent, "alpha must lie in [0, m n)");
  const auto terms = product_terms(grid, fields, kernels::level_powers(grid, alpha - mn));
  return LeafField::ingest(grid.root(), run_down(grid, terms, kernels::Combine::max, exec));
}

LeafField dyadic_integral_operator(std::span<const TreeAggregate> fields, const KernelWeight& k, Exec exec) {
  const Grid& grid = common_grid(fields);
  const auto terms = product_terms(grid, fields, k.per_level(grid));
  return LeafField::ingest(grid.root(), run_down(grid, terms, kernels::Combine::sum, exec));
}

LeafField complete_dyadic_integral(std::span<const TreeAggregate> fields, const KernelWeight& k, Exec exec) {
  if (!k.is_canonical() || !(k.alpha() > 0.0)) {
    throw Error(ErrorKind::BadExponent, "the sub-leaf tail needs the canonical kernel with alpha > 0");
  }
  const Grid& grid = common_grid(fields);
  auto values = run_down(grid, product_terms(grid, fields, k.per_level(grid)), kernels::Combine::sum, exec);
  const double leaf_volume = grid.leaf_volume();
  const double tail = std::exp2(-(grid.depth() + 1) * k.alpha()) / (1.0 - std::exp2(-k.alpha()));
  for (std::uint64_t x = 0; x < grid.leaf_count(); ++x) {
    double prod = tail;
    for (const auto& f : fields) prod *= f.leaf_masses()[x] / leaf_volume;
    values[x] += prod;
  }
  return LeafField::ingest(grid.root(), std::move(values));
}

LeafField sparse_integral_operator(std::span<const TreeAggregate> fields, const KernelWeight& k,
                                   std::span<const CubeAddr> family, Exec exec) {
  const Grid& grid = common_grid(fields);
  std::vector<char> member(grid.cube_count(), 0);
  for (const auto& s : family) member[grid.id(s)] = 1;
  const auto weight = k.per_level(grid);
  const auto terms = kernels::map_cubes(grid, [&](CubeId q) {
    if (!member[q]) return 0.0;
    double t = weight[static_cast<std::size_t>(grid.level_of(q))];
    for (const auto& f : fields) t *= f.sum(q);
    return t;
  });
  return LeafField::ingest(grid.root(), run_down(grid, terms, kernels::Combine::sum, exec));
}

double diagonal_cell_integral(int m, double alpha, double h) {
  // 2^m times the integral over [0,a]^m of (sum t)^{alpha-m}, a = h/2, via the
  // m-th finite difference of the m-fold antiderivative x^alpha / prod(alpha-m+i).
  const double a = h / 2.0;
  double binom = 1.0;
  std::vector<double> coeff(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) {
    coeff[static_cast<std::size_t>(j)] = ((m - j) % 2 == 0 ? 1.0 : -1.0) * binom;
    binom = binom * (m - j) / (j + 1);
  }
  int vanishing = -1;
  double denom = 1.0;
  for (int i = 1; i <= m; ++i) {
    const double factor = alpha - m + i;
    if (std::abs(factor) < 1e-12) {
      vanishing = i;
    } else {
      denom *= factor;
    }
  }
  double numer = 0.0;
  for (int j = 1; j <= m; ++j) {
    const double x = j * a;
    const double term = std::pow(x, alpha);
    // At a vanishing denominator factor the numerator vanishes too; take the
    // derivative of both (l'Hopital) with respect to alpha.
    numer += coeff[static_cast<std::size_t>(j)] * (vanishing < 0 ? term : term * std::log(x));
  }
  return std::ldexp(numer / denom, m);
}

LeafField kernel_integral(std::span<const LeafField> fields, double alpha, Exec exec) {
  if (fields.empty()) throw Error(ErrorKind::ShapeMismatch, "at least one input is required");
  for (const auto& f : fields) require_same_root(fields[0].root(), f.root());
  const Grid grid(fields[0].root());
  const int m = static_cast<int>(fields.size());
  const int n = grid.dim();
  const double mn = static_cast<double>(m) * n;
  if (!(alpha > 0.0 && alpha < mn)) throw Error(ErrorKind::BadExponent, "alpha must lie in (0, m n)");

  const std::uint64_t leaves = grid.leaf_count();
  const double work = std::pow(static_cast<double>(leaves), m + 1);
  if (work > static_cast<double>(work_caps().kernel_evaluations)) {
    throw Error(ErrorKind::ComplexityRefusal, "kernel quadrature needs " + std::to_string(work) + " evaluations");
  }

  std::vector<std::vector<double>> centers(leaves);
  for (std::uint64_t i = 0; i < leaves; ++i) centers[i] = grid.center(grid.leaf_id(i));
  const double h = grid.side(grid.depth());
  const double cell = std::pow(h, mn);
  const double exponent = alpha - mn;
  const double self_cell = n == 1 ? diagonal_cell_integral(m, alpha, h) : 0.0;

  auto at_leaf = [&](std::uint64_t x) {
    std::vector<std::uint64_t> tuple(static_cast<std::size_t>(m), 0);
    double total = 0.0;
    while (true) {
      bool diagonal = true;
      double weight = 1.0;
      double dist = 0.0;
      for (int i = 0; i < m; ++i) {
        const std::uint64_t y = tuple[static_cast<std::size_t>(i)];
        diagonal = diagonal && y == x;
        weight *= fields[static_cast<std::size_t>(i)][y];
        double d2 = 0.0;
        for (int d = 0; d < n; ++d) {
          const double diff = centers[x][static_cast<std::size_t>(d)] - centers[y][static_cast<std::size_t>(d)];
          d2 += diff * diff;
        }
        dist += std::sqrt(d2);
      }
      if (diagonal) {
        total += weight * self_cell;
      } else if (weight != 0.0) {
        total += weight * std::pow(dist, exponent) * cell;
      }
      int i = m;
      while (i > 0) {
        --i;
        if (++tuple[static_cast<std::size_t>(i)] < leaves) break;
        tuple[static_cast<std::size_t>(i)] = 0;
        if (i == 0) return total;
      }
    }
  };

  std::vector<double> out;
  if (exec == Exec::parallel) {
    out = kernels::map_leaves(grid, at_leaf);
  } else {
    out.resize(leaves);
    for (std::uint64_t x = 0; x < leaves; ++x) out[x] = at_leaf(x);
  }
  return LeafField::ingest(grid.root(), std::move(out));
}

LeafField mu_maximal(const LeafField& g, const TreeAggregate& mu, Exec exec) {
  require_same_root(g.root(), mu.root());
  const Grid& grid = mu.grid();
  if (!(mu.total() > 0.0)) throw Error(ErrorKind::ZeroMeasure, "mu(root) = 0");
  const auto mass = mu.leaf_masses();
  std::vector<double> weighted(grid.leaf_count());
  for (std::uint64_t i = 0; i < weighted.size(); ++i) weighted[i] = g[i] * mass[i];
  const auto gmu = run_up(grid, weighted, exec);
  const auto terms = kernels::map_cubes(grid, [&](CubeId q) { return mu.sum(q) > 0.0 ? gmu[q] / mu.sum(q) : 0.0; });
  return LeafField::ingest(grid.root(), run_down(grid, terms, kernels::Combine::max, exec));
}

LeafField discretization_majorant(std::span<const LeafField> fields, double alpha, Exec exec) {
  if (fields.empty()) throw Error(ErrorKind::ShapeMismatch, "at least one input is required");
  for (const auto& f : fields) require_same_root(fields[0].root(), f.root());
  const Grid grid(fields[0].root());
  const auto scale = kernels::level_powers(grid, alpha);
  const auto terms = kernels::map_cubes(grid, [&](CubeId q) {
    const CubeAddr addr = grid.addr(q);
    const double vol = grid.volume(addr.level);
    double t = scale[static_cast<std::size_t>(addr.level)];
    for (const auto& f : fields) t *= enlarged_sum(f, addr) / vol;
    return t;
  });
  return LeafField::ingest(grid.root(), run_down(grid, terms, kernels::Combine::sum, exec));
}

}  // namespace dtl
