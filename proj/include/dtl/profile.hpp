#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

namespace dtl {

/// Exponents of a multilinear trace problem together with the derived
/// Hedberg exponents theta, q, q0.
struct ExponentProfile {
  int m = 1;
  int n = 1;
  double alpha = 0.5;
  double beta = 0.5;
  std::vector<double> p_vec{2.0};
  double p = 2.0;  // 1/p = sum 1/p_i
  double p0 = 2.0;
  std::optional<double> r;
  double theta = 1.0;
  double q = 2.0;
  double q0 = 2.0;

  /// Validates 0 < beta <= alpha < m n, p_i > 1, p <= p0 < n / alpha and
  /// derives p, theta, q, q0.
  static ExponentProfile make(int m, int n, double alpha, double beta, std::vector<double> p_vec, double p0,
                              std::optional<double> r = std::nullopt);
  static ExponentProfile from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;

  /// Conjugate exponent of p (requires p > 1).
  double p_conjugate() const;
};

struct HedbergExponents {
  double theta;
  double q;
  double q0;
};

/// theta = (n - beta p0) / (n - alpha p0), q = theta p, q0 = theta p0.
HedbergExponents hedberg_exponents(int n, double alpha, double beta, double p, double p0);

double conjugate(double p);

}  // namespace dtl
