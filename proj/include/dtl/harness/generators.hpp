#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dtl/field.hpp"

namespace dtl::harness {

enum class GeneratorKind { constant, uniform, power_spike, sparse_spikes, atom_measure, density_measure };

GeneratorKind parse_generator(const std::string& name);  // throws BadKind
std::string to_string(GeneratorKind kind);
std::vector<GeneratorKind> parse_generator_list(const std::string& csv);

struct GeneratorOptions {
  double gamma = 0.5;  // power-spike exponent; callers keep gamma < n / p
  int subgrid = 4;     // subcells per axis used to clip the singular cell
};

/// splitmix64 finalizer; used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

/// Field kinds give a LeafField; measure kinds give a LeafMeasure.
LeafData generate_input(GeneratorKind kind, RootSpec root, std::uint64_t seed, const GeneratorOptions& opts = {});

/// Any kind read as a function: measure kinds give their density
/// (atom-measure is rejected with BadKind).
LeafField generate_field(GeneratorKind kind, RootSpec root, std::uint64_t seed, const GeneratorOptions& opts = {});

/// Any kind read as a measure: field kinds become densities.
LeafMeasure generate_measure(GeneratorKind kind, RootSpec root, std::uint64_t seed, const GeneratorOptions& opts = {});

}  // namespace dtl::harness
