#include "dtl/field.hpp"

#include <cmath>
#include <string>

#include "dtl/error.hpp"

namespace dtl {

namespace {

void check_value(double v, std::uint64_t where) {
  if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "non-finite value at leaf " + std::to_string(where));
  if (v < 0.0) throw Error(ErrorKind::NegativeValue, "negative value at leaf " + std::to_string(where));
}

}  // namespace

void require_same_root(const RootSpec& a, const RootSpec& b) {
  if (!(a == b)) throw Error(ErrorKind::RootMismatch, "inputs live on different dyadic trees");
}

LeafField LeafField::ingest(RootSpec root, std::vector<double> values) {
  const Grid grid(root);
  if (values.size() != grid.leaf_count()) {
    throw Error(ErrorKind::ShapeMismatch, "expected " + std::to_string(grid.leaf_count()) + " leaf values, got " +
                                              std::to_string(values.size()));
  }
  for (std::uint64_t i = 0; i < values.size(); ++i) check_value(values[i], i);
  return LeafField(root, std::move(values));
}

LeafField LeafField::constant(RootSpec root, double value) {
  const Grid grid(root);
  return ingest(root, std::vector<double>(grid.leaf_count(), value));
}

std::vector<double> LeafField::leaf_masses() const {
  const double vol = Grid(root_).leaf_volume();
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] * vol;
  return out;
}

LeafField LeafField::power(double p) const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] == 0.0 ? 0.0 : std::pow(values_[i], p);
  return ingest(root_, std::move(out));
}

LeafField LeafField::scaled(double t) const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[i] * t;
  return ingest(root_, std::move(out));
}

LeafMeasure LeafMeasure::density(LeafField w) {
  const RootSpec root = w.root();
  return LeafMeasure(MeasureKind::density, root, std::move(w), {});
}

LeafMeasure LeafMeasure::atomic(RootSpec root, std::vector<Atom> atoms) {
  const Grid grid(root);
  for (const auto& a : atoms) {
    if (a.leaf >= grid.leaf_count()) {
      throw Error(ErrorKind::ShapeMismatch, "atom leaf " + std::to_string(a.leaf) + " outside the tree");
    }
    check_value(a.mass, a.leaf);
  }
  return LeafMeasure(MeasureKind::atomic, root, std::nullopt, std::move(atoms));
}

LeafMeasure LeafMeasure::lebesgue(RootSpec root) { return density(LeafField::constant(root, 1.0)); }

const LeafField& LeafMeasure::density_field() const {
  if (!density_) throw Error(ErrorKind::AtomicPowerUndefined, "atomic measure has no density");
  return *density_;
}

std::vector<double> LeafMeasure::leaf_masses() const {
  if (density_) return density_->leaf_masses();
  std::vector<double> out(Grid(root_).leaf_count(), 0.0);
  for (const auto& a : atoms_) out[a.leaf] += a.mass;
  return out;
}

LeafMeasure LeafMeasure::power(double r) const {
  if (kind_ != MeasureKind::density) {
    throw Error(ErrorKind::AtomicPowerUndefined, "mu^r is undefined for an atomic measure");
  }
  return density(density_->power(r));
}

LeafData ingest_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("dim") || !doc.contains("depth")) {
    throw Error(ErrorKind::ShapeMismatch, "leaf data needs 'dim' and 'depth'");
  }
  const RootSpec root{doc.at("dim").get<int>(), doc.at("depth").get<int>()};
  const std::string kind = doc.value("kind", doc.contains("atoms") ? "atomic" : "field");

  auto read_values = [&]() {
    if (!doc.contains("values") || !doc.at("values").is_array()) {
      throw Error(ErrorKind::ShapeMismatch, "'values' array missing");
    }
    std::vector<double> values;
    for (const auto& v : doc.at("values")) {
      if (!v.is_number()) throw Error(ErrorKind::NonFinite, "non-numeric leaf value");
      values.push_back(v.get<double>());
    }
    return values;
  };

  if (kind == "field") return LeafField::ingest(root, read_values());
  if (kind == "density") return LeafMeasure::density(LeafField::ingest(root, read_values()));
  if (kind == "atomic") {
    std::vector<Atom> atoms;
    for (const auto& entry : doc.at("atoms")) {
      if (!entry.is_array() || entry.size() != 2) throw Error(ErrorKind::ShapeMismatch, "atoms are [leaf, mass] pairs");
      const auto leaf = entry[0].get<std::int64_t>();
      if (leaf < 0) throw Error(ErrorKind::ShapeMismatch, "negative atom leaf index");
      atoms.push_back({static_cast<std::uint64_t>(leaf), entry[1].get<double>()});
    }
    return LeafMeasure::atomic(root, std::move(atoms));
  }
  throw Error(ErrorKind::BadKind, "unknown leaf data kind '" + kind + "'");
}

nlohmann::json to_json(const LeafField& f) {
  nlohmann::json doc;
  doc["dim"] = f.root().dim;
  doc["depth"] = f.root().depth;
  doc["kind"] = "field";
  doc["values"] = std::vector<double>(f.values().begin(), f.values().end());
  return doc;
}

nlohmann::json to_json(const LeafMeasure& mu) {
  nlohmann::json doc;
  doc["dim"] = mu.root().dim;
  doc["depth"] = mu.root().depth;
  if (mu.kind() == MeasureKind::density) {
    doc["kind"] = "density";
    const auto values = mu.density_field().values();
    doc["values"] = std::vector<double>(values.begin(), values.end());
  } else {
    doc["kind"] = "atomic";
    nlohmann::json atoms = nlohmann::json::array();
    for (const auto& a : mu.atoms()) atoms.push_back({a.leaf, a.mass});
    doc["atoms"] = atoms;
  }
  return doc;
}

}  // namespace dtl
