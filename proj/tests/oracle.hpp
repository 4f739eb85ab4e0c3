#pragma once

// Brute-force reference computations. Every quantity is recomputed from
// leaf coordinates by direct loops; nothing here touches TreeAggregate or
// the tree kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dtl/field.hpp"
#include "dtl/grid.hpp"

namespace oracle {

using dtl::CubeAddr;
using dtl::LeafField;
using dtl::LeafMeasure;
using dtl::RootSpec;

inline std::uint64_t leaf_index(const RootSpec& root, const std::vector<std::uint32_t>& comps) {
  std::uint64_t leaf = 0;
  for (const auto c : comps) leaf = leaf * (std::uint64_t{1} << root.depth) + c;
  return leaf;
}

inline std::vector<std::uint32_t> leaf_coords(const RootSpec& root, std::uint64_t leaf) {
  std::vector<std::uint32_t> comps(static_cast<std::size_t>(root.dim));
  const std::uint64_t side = std::uint64_t{1} << root.depth;
  for (int d = root.dim - 1; d >= 0; --d) {
    comps[static_cast<std::size_t>(d)] = static_cast<std::uint32_t>(leaf % side);
    leaf /= side;
  }
  return comps;
}

/// All cubes, level by level, row-major within a level.
inline std::vector<CubeAddr> all_cubes(const RootSpec& root) {
  std::vector<CubeAddr> out;
  for (int k = 0; k <= root.depth; ++k) {
    const std::uint32_t side = 1u << k;
    std::vector<std::uint32_t> idx(static_cast<std::size_t>(root.dim), 0);
    while (true) {
      out.push_back({k, idx});
      int d = root.dim - 1;
      while (d >= 0 && ++idx[static_cast<std::size_t>(d)] == side) idx[static_cast<std::size_t>(d--)] = 0;
      if (d < 0) break;
    }
  }
  return out;
}

inline bool leaf_in(const RootSpec& root, std::uint64_t leaf, const CubeAddr& q) {
  const auto c = leaf_coords(root, leaf);
  const int shift = root.depth - q.level;
  for (std::size_t d = 0; d < c.size(); ++d) {
    if ((c[d] >> shift) != q.index[d]) return false;
  }
  return true;
}

inline bool cube_in(const CubeAddr& inner, const CubeAddr& outer) {
  if (inner.level < outer.level) return false;
  for (std::size_t d = 0; d < inner.index.size(); ++d) {
    if ((inner.index[d] >> (inner.level - outer.level)) != outer.index[d]) return false;
  }
  return true;
}

inline std::vector<std::uint64_t> leaves(const RootSpec& root, const CubeAddr& q) {
  std::vector<std::uint64_t> out;
  const std::uint64_t count = std::uint64_t{1} << (root.dim * root.depth);
  for (std::uint64_t x = 0; x < count; ++x) {
    if (leaf_in(root, x, q)) out.push_back(x);
  }
  return out;
}

inline double side(int level) { return std::ldexp(1.0, -level); }
inline double volume(const RootSpec& root, int level) { return std::pow(side(level), root.dim); }

/// int_Q h(f(x)) dx.
inline double integral(const LeafField& f, const CubeAddr& q, const std::function<double(double)>& h = nullptr) {
  const auto& root = f.root();
  const double lv = volume(root, root.depth);
  double s = 0.0;
  for (const auto x : leaves(root, q)) s += (h ? h(f[x]) : f[x]) * lv;
  return s;
}

/// mu(Q) and int_Q g dmu.
inline double mass(const LeafMeasure& mu, const CubeAddr& q, const std::optional<LeafField>& g = std::nullopt) {
  const auto& root = mu.root();
  double s = 0.0;
  if (mu.kind() == dtl::MeasureKind::atomic) {
    for (const auto& a : mu.atoms()) {
      if (leaf_in(root, a.leaf, q)) s += a.mass * (g ? (*g)[a.leaf] : 1.0);
    }
    return s;
  }
  const auto& w = mu.density_field();
  const double lv = volume(root, root.depth);
  for (const auto x : leaves(root, q)) s += w[x] * lv * (g ? (*g)[x] : 1.0);
  return s;
}

inline double lebesgue(const LeafField& f, double p) {
  return std::pow(integral(f, {0, std::vector<std::uint32_t>(static_cast<std::size_t>(f.root().dim), 0)},
                           [p](double v) { return std::pow(v, p); }),
                  1.0 / p);
}

inline double morrey(const LeafField& f, double p, double p0) {
  double best = 0.0;
  for (const auto& q : all_cubes(f.root())) {
    const double v = volume(f.root(), q.level);
    const double avg = integral(f, q, [p](double t) { return std::pow(t, p); }) / v;
    best = std::max(best, std::pow(v, 1.0 / p0) * std::pow(avg, 1.0 / p));
  }
  return best;
}

inline double product_morrey(const std::vector<LeafField>& fs, const std::vector<double>& p_vec, double p0) {
  double inv = 0.0;
  for (const double pi : p_vec) inv += 1.0 / pi;
  double best = 0.0;
  for (const auto& q : all_cubes(fs[0].root())) {
    double t = std::pow(volume(fs[0].root(), q.level), 1.0 / p0 - inv);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const double pi = p_vec[i];
      t *= std::pow(integral(fs[i], q, [pi](double v) { return std::pow(v, pi); }), 1.0 / pi);
    }
    best = std::max(best, t);
  }
  return best;
}

inline double radon_morrey(const LeafField& g, double q, double q0, const LeafMeasure& mu) {
  const auto gq = g.power(q);
  double best = 0.0;
  for (const auto& c : all_cubes(g.root())) {
    const double t = std::pow(volume(g.root(), c.level), 1.0 / q0 - 1.0 / q) * std::pow(mass(mu, c, gq), 1.0 / q);
    best = std::max(best, t);
  }
  return best;
}

/// Cubes containing a leaf, from the root down.
inline std::vector<CubeAddr> chain(const RootSpec& root, std::uint64_t leaf) {
  std::vector<CubeAddr> out;
  for (const auto& q : all_cubes(root)) {
    if (leaf_in(root, leaf, q)) out.push_back(q);
  }
  return out;
}

/// sup over R containing x of l_R^{alpha-n} mu(R cap Q) for a leaf-mass vector.
inline double fractional_max_at(const RootSpec& root, const std::vector<double>& leaf_mass, double alpha,
                                std::uint64_t x, const std::optional<CubeAddr>& within = std::nullopt) {
  double best = 0.0;
  for (const auto& r : chain(root, x)) {
    double m = 0.0;
    for (const auto y : leaves(root, r)) {
      if (!within || leaf_in(root, y, *within)) m += leaf_mass[y];
    }
    best = std::max(best, std::pow(side(r.level), alpha - root.dim) * m);
  }
  return best;
}

inline double modified_morrey(const LeafField& f, double p, double alpha) {
  const auto& root = f.root();
  const double pc = p / (p - 1.0);
  const double lv = volume(root, root.depth);
  std::vector<double> fp(f.size());
  for (std::uint64_t x = 0; x < f.size(); ++x) fp[x] = std::pow(f[x], p) * lv;
  double best = 0.0;
  for (const auto& q : all_cubes(root)) {
    double mass_q = 0.0;
    for (const auto x : leaves(root, q)) mass_q += fp[x];
    if (!(mass_q > 0.0)) continue;
    double energy = 0.0;
    for (const auto x : leaves(root, q)) energy += std::pow(fractional_max_at(root, fp, alpha, x, q), pc) * lv;
    best = std::max(best, std::pow(energy / mass_q, 1.0 / pc));
  }
  return best;
}

inline std::vector<double> dyadic_integral(const std::vector<LeafField>& fs, double alpha) {
  const auto& root = fs[0].root();
  const int mn = static_cast<int>(fs.size()) * root.dim;
  std::vector<double> out(fs[0].size(), 0.0);
  for (std::uint64_t x = 0; x < out.size(); ++x) {
    for (const auto& q : chain(root, x)) {
      double t = std::pow(side(q.level), alpha - mn);
      for (const auto& f : fs) t *= integral(f, q);
      out[x] += t;
    }
  }
  return out;
}

inline std::vector<double> multilinear_max(const std::vector<LeafField>& fs, double alpha) {
  const auto& root = fs[0].root();
  const int mn = static_cast<int>(fs.size()) * root.dim;
  std::vector<double> out(fs[0].size(), 0.0);
  for (std::uint64_t x = 0; x < out.size(); ++x) {
    for (const auto& q : chain(root, x)) {
      double t = std::pow(side(q.level), alpha - mn);
      for (const auto& f : fs) t *= integral(f, q);
      out[x] = std::max(out[x], t);
    }
  }
  return out;
}

inline std::vector<double> mu_max(const LeafField& g, const LeafMeasure& mu) {
  std::vector<double> out(g.size(), 0.0);
  for (std::uint64_t x = 0; x < out.size(); ++x) {
    for (const auto& q : chain(g.root(), x)) {
      const double m = mass(mu, q);
      if (m > 0.0) out[x] = std::max(out[x], mass(mu, q, g) / m);
    }
  }
  return out;
}

/// int over 3Q clipped to the root, by coordinate test on every leaf.
inline double enlarged(const LeafField& f, const CubeAddr& q) {
  const auto& root = f.root();
  const int shift = root.depth - q.level;
  const double lv = volume(root, root.depth);
  double s = 0.0;
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    const auto c = leaf_coords(root, x);
    bool in = true;
    for (std::size_t d = 0; d < c.size(); ++d) {
      const std::int64_t cell = c[d] >> shift;
      if (cell < static_cast<std::int64_t>(q.index[d]) - 1 || cell > static_cast<std::int64_t>(q.index[d]) + 1) in = false;
    }
    if (in) s += f[x] * lv;
  }
  return s;
}

/// |x - y| with leaf centers, Euclidean.
inline double center_distance(const RootSpec& root, std::uint64_t x, std::uint64_t y) {
  const auto a = leaf_coords(root, x);
  const auto b = leaf_coords(root, y);
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double t = (static_cast<double>(a[d]) - static_cast<double>(b[d])) * side(root.depth);
    s += t * t;
  }
  return std::sqrt(s);
}

/// Linear (m = 1) midpoint quadrature; the self cell uses 2 (h/2)^alpha / alpha
/// in one dimension and is skipped otherwise.
inline std::vector<double> kernel_integral_linear(const LeafField& f, double alpha) {
  const auto& root = f.root();
  const double h = side(root.depth);
  const double lv = volume(root, root.depth);
  std::vector<double> out(f.size(), 0.0);
  for (std::uint64_t x = 0; x < f.size(); ++x) {
    for (std::uint64_t y = 0; y < f.size(); ++y) {
      if (x == y) {
        if (root.dim == 1) out[x] += f[y] * 2.0 * std::pow(h / 2.0, alpha) / alpha;
        continue;
      }
      out[x] += f[y] * std::pow(center_distance(root, x, y), alpha - root.dim) * lv;
    }
  }
  return out;
}

// Constants --------------------------------------------------------------

inline double adams(const LeafMeasure& mu, double beta) {
  double best = 0.0;
  for (const auto& q : all_cubes(mu.root())) best = std::max(best, mass(mu, q) / std::pow(side(q.level), beta));
  return best;
}

inline double weight_a(const LeafMeasure& mu, double beta, double p) {
  double best = 0.0;
  for (const auto& q : all_cubes(mu.root())) {
    best = std::max(best, std::pow(side(q.level), beta) * std::pow(mass(mu, q) / volume(mu.root(), q.level), 1.0 / p));
  }
  return best;
}

inline double ks_testing(const LeafMeasure& mu, double beta, double p) {
  const auto& root = mu.root();
  const double pc = p / (p - 1.0);
  const double lv = volume(root, root.depth);
  const auto leaf_mass = mu.leaf_masses();
  double best = 0.0;
  for (const auto& q : all_cubes(root)) {
    const double m = mass(mu, q);
    if (!(m > 0.0)) continue;
    double energy = 0.0;
    for (const auto x : leaves(root, q)) energy += std::pow(fractional_max_at(root, leaf_mass, beta, x, q), pc) * lv;
    best = std::max(best, std::pow(energy / m, 1.0 / pc));
  }
  return best;
}

inline double ap(const LeafField& w, double p) {
  double best = 0.0;
  for (const auto& q : all_cubes(w.root())) {
    const double v = volume(w.root(), q.level);
    const double a = integral(w, q) / v;
    double dual = 0.0;
    for (const auto x : leaves(w.root(), q)) {
      if (w[x] == 0.0) return INFINITY;
      dual += std::pow(w[x], -1.0 / (p - 1.0)) * volume(w.root(), w.root().depth);
    }
    best = std::max(best, a * std::pow(dual / v, p - 1.0));
  }
  return best;
}

/// Ancestor sum over own term for the canonical kernel.
inline double condition_d(int n, int m, double alpha, double p0, int level) {
  auto term = [&](int k) {
    return std::pow(side(k), alpha - m * n) * std::pow(std::pow(side(k), n), m - 1.0 / p0);
  };
  double s = 0.0;
  for (int k = 0; k < level; ++k) s += term(k);
  return s / term(level);
}

// Stopping families -------------------------------------------------------

/// Maximal strict subcubes R of s, inside the tree, with pred(R) true.
inline std::vector<CubeAddr> maximal_inside(const RootSpec& root, const CubeAddr& s,
                                            const std::function<bool(const CubeAddr&)>& pred) {
  std::vector<CubeAddr> hits;
  for (const auto& r : all_cubes(root)) {
    if (r.level > s.level && cube_in(r, s) && pred(r)) hits.push_back(r);
  }
  std::vector<CubeAddr> out;
  for (const auto& r : hits) {
    bool covered = false;
    for (const auto& o : hits) {
      if (o.level < r.level && cube_in(r, o)) covered = true;
    }
    if (!covered) out.push_back(r);
  }
  return out;
}

inline double product_average(const std::vector<LeafField>& fs, const CubeAddr& q) {
  double x = 1.0;
  for (const auto& f : fs) x *= integral(f, q) / volume(f.root(), q.level);
  return x;
}

/// Stopping family rooted at q0, sorted by (level, index).
inline std::vector<CubeAddr> sparse_family(const std::vector<LeafField>& fs, const CubeAddr& q0) {
  const auto& root = fs[0].root();
  const double fan = std::ldexp(1.0, static_cast<int>(fs.size()));
  std::vector<CubeAddr> out{q0};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto s = out[i];
    const double threshold = fan * product_average(fs, s);
    for (const auto& r : maximal_inside(root, s, [&](const CubeAddr& c) { return product_average(fs, c) > threshold; })) {
      out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Principal cubes of (h, nu); nu = dx when mu is empty.
inline std::vector<CubeAddr> principal_cubes(const LeafField& h, const std::optional<LeafMeasure>& mu,
                                             const CubeAddr& q0) {
  const auto& root = h.root();
  auto avg = [&](const CubeAddr& q) {
    const double m = mu ? mass(*mu, q) : volume(root, q.level);
    if (!(m > 0.0)) return 0.0;
    return (mu ? mass(*mu, q, h) : integral(h, q)) / m;
  };
  auto positive = [&](const CubeAddr& q) { return mu ? mass(*mu, q) > 0.0 : true; };
  std::vector<CubeAddr> out{q0};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto f = out[i];
    const double threshold = 2.0 * avg(f);
    for (const auto& r : maximal_inside(root, f, [&](const CubeAddr& c) { return positive(c) && avg(c) > threshold; })) {
      out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace oracle
