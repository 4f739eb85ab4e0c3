#include "dtl/profile.hpp"

#include <cmath>

#include "dtl/error.hpp"

namespace dtl {

double conjugate(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw Error(ErrorKind::BadExponent, "conjugate exponent needs 1 < p < inf");
  return p / (p - 1.0);
}

HedbergExponents hedberg_exponents(int n, double alpha, double beta, double p, double p0) {
  if (!(beta > 0.0 && beta <= alpha)) throw Error(ErrorKind::BadExponent, "need 0 < beta <= alpha");
  if (!(p > 0.0 && p <= p0)) throw Error(ErrorKind::BadExponent, "need 0 < p <= p0");
  const double gap = n - alpha * p0;
  if (gap <= 1e-12) throw Error(ErrorKind::BadExponent, "need p0 < n / alpha");
  HedbergExponents out{};
  out.theta = (n - beta * p0) / gap;
  out.q = out.theta * p;
  out.q0 = out.theta * p0;
  return out;
}

ExponentProfile ExponentProfile::make(int m, int n, double alpha, double beta, std::vector<double> p_vec, double p0,
                                      std::optional<double> r) {
  if (m < 1 || n < 1) throw Error(ErrorKind::BadExponent, "m and n must be positive");
  if (p_vec.size() != static_cast<std::size_t>(m)) throw Error(ErrorKind::BadExponent, "need one p_i per function");
  if (!(alpha < static_cast<double>(m) * n)) throw Error(ErrorKind::BadExponent, "need alpha < m n");
  double inv = 0.0;
  for (const double pi : p_vec) {
    if (!(pi > 1.0) || !std::isfinite(pi)) throw Error(ErrorKind::BadExponent, "each p_i must lie in (1, inf)");
    inv += 1.0 / pi;
  }
  if (r && !(*r > 1.0)) throw Error(ErrorKind::BadExponent, "bump exponent r must exceed 1");

  ExponentProfile prof;
  prof.m = m;
  prof.n = n;
  prof.alpha = alpha;
  prof.beta = beta;
  prof.p_vec = std::move(p_vec);
  prof.p = 1.0 / inv;
  prof.p0 = p0;
  prof.r = r;
  const auto h = hedberg_exponents(n, alpha, beta, prof.p, p0);
  prof.theta = h.theta;
  prof.q = h.q;
  prof.q0 = h.q0;
  return prof;
}

double ExponentProfile::p_conjugate() const { return conjugate(p); }

ExponentProfile ExponentProfile::from_json(const nlohmann::json& doc) {
  std::vector<double> p_vec;
  if (doc.contains("p_vec")) {
    p_vec = doc.at("p_vec").get<std::vector<double>>();
  } else if (doc.contains("p") && doc.at("p").is_array()) {
    p_vec = doc.at("p").get<std::vector<double>>();
  } else {
    throw Error(ErrorKind::BadExponent, "profile needs an exponent vector 'p_vec'");
  }
  std::optional<double> r;
  if (doc.contains("r") && !doc.at("r").is_null()) r = doc.at("r").get<double>();
  auto prof = make(doc.value("m", static_cast<int>(p_vec.size())), doc.at("n").get<int>(),
                   doc.at("alpha").get<double>(), doc.at("beta").get<double>(), std::move(p_vec),
                   doc.at("p0").get<double>(), r);
  if (doc.contains("p") && doc.at("p").is_number() && std::abs(doc.at("p").get<double>() - prof.p) > 1e-12) {
    throw Error(ErrorKind::BadExponent, "'p' disagrees with the harmonic combination of p_vec");
  }
  return prof;
}

nlohmann::json ExponentProfile::to_json() const {
  nlohmann::json doc;
  doc["m"] = m;
  doc["n"] = n;
  doc["alpha"] = alpha;
  doc["beta"] = beta;
  doc["p_vec"] = p_vec;
  doc["p"] = p;
  doc["p0"] = p0;
  doc["r"] = r ? nlohmann::json(*r) : nlohmann::json(nullptr);
  doc["theta"] = theta;
  doc["q"] = q;
  doc["q0"] = q0;
  return doc;
}

}  // namespace dtl
