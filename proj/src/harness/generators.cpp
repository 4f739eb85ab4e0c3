#include "dtl/harness/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dtl/error.hpp"

namespace dtl::harness {

namespace {

struct Rng {
  explicit Rng(std::uint64_t seed) : engine(mix_seed(seed)) {}
  // 53 random bits mapped to [0, 1); identical on every platform.
  double uniform() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) { return engine() % n; }
  std::mt19937_64 engine;
};

std::vector<double> leaf_center(const Grid& grid, std::uint64_t leaf) { return grid.center(grid.leaf_id(leaf)); }

LeafField power_spike(RootSpec root, Rng& rng, const GeneratorOptions& opts) {
  const Grid grid(root);
  const std::uint64_t spike = rng.below(grid.leaf_count());
  const auto x0 = leaf_center(grid, spike);
  const double h = grid.side(grid.depth());
  auto kernel = [&](const std::vector<double>& y) {
    double d2 = 0.0;
    for (std::size_t d = 0; d < y.size(); ++d) d2 += (y[d] - x0[d]) * (y[d] - x0[d]);
    return std::pow(std::sqrt(d2), -opts.gamma);
  };
  std::vector<double> values(grid.leaf_count());
  for (std::uint64_t leaf = 0; leaf < values.size(); ++leaf) {
    if (leaf != spike) {
      values[leaf] = kernel(leaf_center(grid, leaf));
      continue;
    }
    // Singular cell: largest value over the centers of a subgrid of the cell.
    const int s = opts.subgrid;
    const int n = grid.dim();
    double best = 0.0;
    std::vector<int> digit(static_cast<std::size_t>(n), 0);
    std::vector<double> y(static_cast<std::size_t>(n));
    while (true) {
      for (int d = 0; d < n; ++d) {
        const auto i = static_cast<std::size_t>(d);
        y[i] = x0[i] - h / 2 + (digit[i] + 0.5) * h / s;
      }
      best = std::max(best, kernel(y));
      int d = 0;
      while (d < n && ++digit[static_cast<std::size_t>(d)] == s) digit[static_cast<std::size_t>(d++)] = 0;
      if (d == n) break;
    }
    values[leaf] = best;
  }
  return LeafField::ingest(root, std::move(values));
}

LeafField sparse_spikes(RootSpec root, Rng& rng) {
  const Grid grid(root);
  std::vector<double> values(grid.leaf_count(), 0.0);
  const std::uint64_t count = 1 + rng.below(4);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t leaf = rng.below(grid.leaf_count());
    values[leaf] += 1.0 + 7.0 * rng.uniform();
  }
  return LeafField::ingest(root, std::move(values));
}

LeafMeasure atoms(RootSpec root, Rng& rng) {
  const Grid grid(root);
  std::vector<Atom> list;
  const std::uint64_t count = 1 + rng.below(4);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t leaf = rng.below(grid.leaf_count());
    list.push_back({leaf, 0.1 + 0.9 * rng.uniform()});
  }
  return LeafMeasure::atomic(root, std::move(list));
}

LeafField density(RootSpec root, Rng& rng) {
  const Grid grid(root);
  std::vector<double> values(grid.leaf_count());
  for (auto& v : values) v = std::exp(1.5 * (2.0 * rng.uniform() - 1.0));
  return LeafField::ingest(root, std::move(values));
}

}  // namespace

GeneratorKind parse_generator(const std::string& name) {
  if (name == "constant") return GeneratorKind::constant;
  if (name == "uniform") return GeneratorKind::uniform;
  if (name == "power-spike") return GeneratorKind::power_spike;
  if (name == "sparse-spikes") return GeneratorKind::sparse_spikes;
  if (name == "atom-measure") return GeneratorKind::atom_measure;
  if (name == "density-measure") return GeneratorKind::density_measure;
  throw Error(ErrorKind::BadKind, "unknown generator kind '" + name + "'");
}

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::constant:
      return "constant";
    case GeneratorKind::uniform:
      return "uniform";
    case GeneratorKind::power_spike:
      return "power-spike";
    case GeneratorKind::sparse_spikes:
      return "sparse-spikes";
    case GeneratorKind::atom_measure:
      return "atom-measure";
    case GeneratorKind::density_measure:
      return "density-measure";
  }
  return "?";
}

std::vector<GeneratorKind> parse_generator_list(const std::string& csv) {
  std::vector<GeneratorKind> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_generator(item));
  }
  if (out.empty()) throw Error(ErrorKind::BadKind, "empty generator list");
  return out;
}

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return mix_seed(mix_seed(mix_seed(mix_seed(base) ^ a) ^ b) ^ c);
}

LeafData generate_input(GeneratorKind kind, RootSpec root, std::uint64_t seed, const GeneratorOptions& opts) {
  Rng rng(seed);
  switch (kind) {
    case GeneratorKind::constant:
      return LeafField::constant(root, 1.0);
    case GeneratorKind::uniform: {
      const Grid grid(root);
      std::vector<double> values(grid.leaf_count());
      for (auto& v : values) v = rng.uniform();
      return LeafField::ingest(root, std::move(values));
    }
    case GeneratorKind::power_spike:
      return power_spike(root, rng, opts);
    case GeneratorKind::sparse_spikes:
      return sparse_spikes(root, rng);
    case GeneratorKind::atom_measure:
      return atoms(root, rng);
    case GeneratorKind::density_measure:
      return LeafMeasure::density(density(root, rng));
  }
  throw Error(ErrorKind::BadKind, "unknown generator kind");
}

LeafField generate_field(GeneratorKind kind, RootSpec root, std::uint64_t seed, const GeneratorOptions& opts) {
  auto data = generate_input(kind, root, seed, opts);
  if (auto* f = std::get_if<LeafField>(&data)) return std::move(*f);
  const auto& mu = std::get<LeafMeasure>(data);
  if (mu.kind() != MeasureKind::density) throw Error(ErrorKind::BadKind, "atom-measure cannot be used as a field");
  return mu.density_field();
}

LeafMeasure generate_measure(GeneratorKind kind, RootSpec root, std::uint64_t seed, const GeneratorOptions& opts) {
  auto data = generate_input(kind, root, seed, opts);
  if (auto* mu = std::get_if<LeafMeasure>(&data)) return std::move(*mu);
  return LeafMeasure::density(std::get<LeafField>(std::move(data)));
}

}  // namespace dtl::harness
