#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dtl/grid.hpp"

namespace dtl {

/// Nonnegative function, constant on each leaf cell; values in canonical
/// (row-major) leaf order.
class LeafField {
 public:
  /// Validates shape, finiteness and sign.
  static LeafField ingest(RootSpec root, std::vector<double> values);
  static LeafField constant(RootSpec root, double value);

  const RootSpec& root() const noexcept { return root_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::uint64_t leaf) const noexcept { return values_[leaf]; }
  std::uint64_t size() const noexcept { return values_.size(); }

  /// value * |leaf| per leaf: the data the tree aggregation consumes.
  std::vector<double> leaf_masses() const;
  /// Pointwise f^p (0^p = 0 for p > 0).
  LeafField power(double p) const;
  LeafField scaled(double t) const;

 private:
  LeafField(RootSpec root, std::vector<double> values) : root_(root), values_(std::move(values)) {}

  RootSpec root_;
  std::vector<double> values_;
};

struct Atom {
  std::uint64_t leaf = 0;
  double mass = 0.0;
};

enum class MeasureKind { density, atomic };

/// A finite Radon measure on the root cube: either a leafwise density or a
/// finite sum of point masses placed on leaf cells.
class LeafMeasure {
 public:
  static LeafMeasure density(LeafField w);
  static LeafMeasure atomic(RootSpec root, std::vector<Atom> atoms);
  static LeafMeasure lebesgue(RootSpec root);

  MeasureKind kind() const noexcept { return kind_; }
  const RootSpec& root() const noexcept { return root_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  /// Throws AtomicPowerUndefined for atomic measures.
  const LeafField& density_field() const;

  /// Mass carried by each leaf cell; atoms on the same leaf add in list order.
  std::vector<double> leaf_masses() const;
  /// mu^r as a density; defined for density kind only.
  LeafMeasure power(double r) const;

 private:
  LeafMeasure(MeasureKind kind, RootSpec root, std::optional<LeafField> w, std::vector<Atom> atoms)
      : kind_(kind), root_(root), density_(std::move(w)), atoms_(std::move(atoms)) {}

  MeasureKind kind_;
  RootSpec root_;
  std::optional<LeafField> density_;
  std::vector<Atom> atoms_;
};

using LeafData = std::variant<LeafField, LeafMeasure>;

/// {"dim","depth","kind":"field"|"density"|"atomic","values":[...]} or
/// {"dim","depth","kind":"atomic","atoms":[[leaf,mass],...]}.
LeafData ingest_json(const nlohmann::json& doc);
nlohmann::json to_json(const LeafField& f);
nlohmann::json to_json(const LeafMeasure& mu);

void require_same_root(const RootSpec& a, const RootSpec& b);

}  // namespace dtl
