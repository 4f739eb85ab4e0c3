#include "dtl/harness/registry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtl/aggregate.hpp"
#include "dtl/constants.hpp"
#include "dtl/decompositions.hpp"
#include "dtl/error.hpp"
#include "dtl/norms.hpp"
#include "dtl/operators.hpp"

namespace dtl::harness {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<TreeAggregate> aggregates(const std::vector<LeafField>& fields) {
  std::vector<TreeAggregate> out;
  out.reserve(fields.size());
  for (const auto& f : fields) out.push_back(TreeAggregate::of(f));
  return out;
}

CubeAddr root_addr(const RootSpec& root) {
  return {0, std::vector<std::uint32_t>(static_cast<std::size_t>(root.dim), 0)};
}

nlohmann::json addr_json(const CubeAddr& a) { return {{"level", a.level}, {"index", a.index}}; }

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::BadExponent, what);
}

// Largest leafwise ratio of two fields, with its leaf.
RatioEntry leafwise_max(std::span<const double> lhs, std::span<const double> rhs) {
  RatioEntry e;
  std::uint64_t at = 0;
  for (std::size_t x = 0; x < lhs.size(); ++x) {
    const double r = score_ratio(lhs[x], rhs[x]);
    if (r > e.ratio) {
      e.ratio = r;
      at = x;
    }
  }
  if (!lhs.empty()) {
    e.lhs = lhs[at];
    e.rhs = rhs[at];
  }
  e.details["leaf"] = at;
  return e;
}

RatioEntry make_entry(double lhs, double rhs, Check check) {
  RatioEntry e;
  e.lhs = lhs;
  e.rhs = rhs;
  e.ratio = check == Check::identity ? identity_ratio(lhs, rhs) : score_ratio(lhs, rhs);
  return e;
}

void note_a_inf(RatioEntry& e, const LeafMeasure& mu) {
  if (mu.kind() == MeasureKind::density) {
    e.details["mu_a_inf_estimate"] = ap_characteristic(mu.density_field(), std::nullopt).value;
  } else {
    e.details["mu_a_inf_estimate"] = nullptr;  // not a weight
  }
}

// ---- individual inequalities ------------------------------------------------

RatioEntry morrey_nesting(const Instance& in, const ProblemParams& pp) {
  const double p2 = pp.p();
  const double p1 = 0.5 * (p2 + pp.p0);
  const auto small = morrey_norm(in.fields[0], p2, pp.p0);
  const auto large = morrey_norm(in.fields[0], p1, pp.p0);
  auto e = make_entry(small.value, large.value, Check::exact);
  e.details = {{"p1", p1}, {"p2", p2}, {"p0", pp.p0}};
  return e;
}

RatioEntry morrey_identity(const Instance& in, const ProblemParams& pp) {
  const auto m = morrey_norm(in.fields[0], pp.p0, pp.p0);
  auto e = make_entry(m.value, lebesgue_norm(in.fields[0], pp.p0), Check::identity);
  e.details = {{"witness", addr_json(m.witness)}};
  return e;
}

RatioEntry eq14_left(const Instance& in, const ProblemParams& pp) {
  const int n = in.root.dim;
  const double p = pp.p();
  require(p > 1.0 && pp.alpha > 0.0 && pp.alpha < n, "needs p > 1 and 0 < alpha < n");
  const auto left = morrey_norm(in.fields[0], p, n / pp.alpha);
  const auto right = modified_morrey_norm(in.fields[0], p, pp.alpha);
  auto e = make_entry(left.value, right.value, Check::exact);
  e.details = {{"morrey_witness", addr_json(left.witness)}, {"modified_witness", addr_json(right.witness)}};
  return e;
}

RatioEntry eq14_right(const Instance& in, const ProblemParams& pp) {
  const int n = in.root.dim;
  const double p = pp.p();
  const double top = n / pp.alpha;
  const double q = pp.q_alt ? std::min(*pp.q_alt, top) : top;
  require(p > 1.0 && pp.alpha > 0.0 && pp.alpha < n && p < q, "needs 1 < p < q <= n / alpha");
  const auto left = modified_morrey_norm(in.fields[0], p, pp.alpha);
  const auto right = morrey_norm(in.fields[0], q, top);
  auto e = make_entry(left.value, right.value, Check::bounded);
  e.details = {{"q", q}};
  return e;
}

RatioEntry discretization(const Instance& in, const ProblemParams& pp) {
  const auto lhs = kernel_integral(in.fields, pp.alpha);
  const auto rhs = discretization_majorant(in.fields, pp.alpha);
  return leafwise_max(lhs.values(), rhs.values());
}

// ||I^S_K f||_{M_mu^{p,p0}} against A0 ||f||_{M^{P,p0}} for the stopping family.
RatioEntry sparse_operator_bound(const Instance& in, const ProblemParams& pp, A0Form form, bool small_p) {
  const auto prof = pp.profile(in.root.dim);
  require(small_p ? prof.p <= 1.0 : prof.p > 1.0, small_p ? "needs p <= 1" : "needs p > 1");
  const auto aggs = aggregates(in.fields);
  const auto k = KernelWeight::canonical(prof.alpha, prof.m, prof.n);
  const auto family = build_sparse_family(aggs, root_addr(in.root));
  const auto op = sparse_integral_operator(aggs, k, family.addresses());
  const auto lhs = radon_morrey_norm(op, prof.p, prof.p0, in.mu);
  const auto a0 = a0_constant(in.mu, prof, form, k);
  const auto norm = product_morrey_norm(in.fields, prof);
  auto e = make_entry(lhs.value, a0.value * norm.value, Check::bounded);
  e.details = {{"a0", a0.value}, {"norm", norm.value}, {"family_size", family.cubes.size()}};
  note_a_inf(e, in.mu);
  return e;
}

RatioEntry embedding(const Instance& in, const ProblemParams& pp, bool bump) {
  double inv = 0.0;
  for (const double pi : pp.p_vec) inv += 1.0 / pi;
  require(inv >= 1.0, "needs sum 1/p_i >= 1");
  const std::optional<double> r = bump ? std::optional<double>(pp.r.value_or(2.0)) : std::nullopt;
  const Grid grid(in.root);
  const auto aggs = aggregates(in.fields);
  const auto family = build_sparse_family(aggs, root_addr(in.root));
  const auto k = KernelWeight::canonical(pp.alpha, pp.m, in.root.dim);

  std::vector<TreeAggregate> weighted;
  double norms = 1.0;
  for (std::size_t i = 0; i < in.fields.size(); ++i) {
    const auto mass = in.sigmas[i].leaf_masses();
    std::vector<double> fm(mass.size());
    for (std::size_t x = 0; x < mass.size(); ++x) fm[x] = in.fields[i][x] * mass[x];
    weighted.push_back(TreeAggregate::from_leaf_masses(in.root, fm, TreeAggregate::Source::measure));
    norms *= lebesgue_norm(in.fields[i], pp.p_vec[i], in.sigmas[i]);
  }
  double lhs = 0.0;
  for (const CubeId s : family.cubes) {
    double t = k.at(grid.level_of(s));
    for (const auto& w : weighted) t *= w.sum(s);
    lhs += t;
  }
  const auto a0 = embedding_constant(in.sigmas, k, pp.p_vec, family, r);
  auto e = make_entry(lhs, a0.value * norms, Check::bounded);
  e.details = {{"a0", a0.value}, {"family_size", family.cubes.size()}};
  return e;
}

// sum_Q K(Q) prod_i int_Q f_i, optionally times int_Q g dmu.
double full_form(const Instance& in, const KernelWeight& k, const std::optional<TreeAggregate>& gmu) {
  const Grid grid(in.root);
  const auto aggs = aggregates(in.fields);
  double total = 0.0;
  for (CubeId q = 0; q < grid.cube_count(); ++q) {
    double t = k.at(grid.level_of(q));
    for (const auto& a : aggs) t *= a.sum(q);
    if (gmu) t *= gmu->sum(q);
    total += t;
  }
  return total;
}

RatioEntry corona_embedding(const Instance& in, const ProblemParams& pp) {
  const double p = pp.p();
  require(p > 1.0, "needs p > 1");
  const auto k = KernelWeight::canonical(pp.alpha, pp.m, in.root.dim);
  const auto mass = in.mu.leaf_masses();
  std::vector<double> gm(mass.size());
  for (std::size_t x = 0; x < mass.size(); ++x) gm[x] = in.g[x] * mass[x];
  const auto gmu = TreeAggregate::from_leaf_masses(in.root, gm, TreeAggregate::Source::measure);
  const double lhs = full_form(in, k, gmu);
  double norms = lebesgue_norm(in.g, conjugate(p), in.mu);
  for (std::size_t i = 0; i < in.fields.size(); ++i) norms *= lebesgue_norm(in.fields[i], pp.p_vec[i]);
  const auto mu_agg = TreeAggregate::of(in.mu);
  const auto a0 = mu_agg.total() > 0.0 ? cq_supremum(mu_agg, k, p, CqMode::greedy).value : 0.0;
  auto e = make_entry(lhs, a0 * norms, Check::bounded);
  e.details = {{"a0", a0}, {"a0_mode", "greedy"}};
  return e;
}

RatioEntry lemma25(const Instance& in, const ProblemParams& pp) {
  const double p = pp.p();
  require(p > 1.0, "needs p > 1");
  const Grid grid(in.root);
  const auto k = KernelWeight::canonical(pp.alpha, pp.m, in.root.dim);
  const double lhs = full_form(in, k, std::nullopt);
  std::vector<double> weight(grid.cube_count());
  for (CubeId q = 0; q < weight.size(); ++q) {
    const int level = grid.level_of(q);
    weight[q] = k.at(level) * std::pow(grid.volume(level), pp.m);
  }
  const auto a0 = sparse_sum_functional(grid, weight, p, grid.root_id(), CqMode::greedy);
  double norms = 1.0;
  for (std::size_t i = 0; i < in.fields.size(); ++i) norms *= lebesgue_norm(in.fields[i], pp.p_vec[i]);
  auto e = make_entry(lhs, a0.value * norms, Check::bounded);
  e.details = {{"a0", a0.value}, {"a0_mode", "greedy"}};
  return e;
}

RatioEntry thm26(const Instance& in, const ProblemParams& pp) {
  const auto prof = pp.profile(in.root.dim);
  require(prof.p > 1.0, "needs p > 1");
  const auto aggs = aggregates(in.fields);
  const auto k = KernelWeight::canonical(prof.alpha, prof.m, prof.n);
  const auto op = complete_dyadic_integral(aggs, k);
  const auto lhs = radon_morrey_norm(op, prof.p, prof.p0, in.mu);
  const auto mu_agg = TreeAggregate::of(in.mu);
  const double a0 = mu_agg.total() > 0.0 ? cq_supremum(mu_agg, k, prof.p, CqMode::greedy).value : 0.0;
  const auto norm = product_morrey_norm(in.fields, prof);
  auto e = make_entry(lhs.value, a0 * norm.value, Check::bounded);
  e.details = {{"a0", a0}, {"a0_mode", "greedy"}, {"norm", norm.value}};
  return e;
}

// ||I_alpha f||_{M_mu^{q,q0}} against (constant) ||f||_{M^{P,p0}}.
RatioEntry trace_bound(const Instance& in, const ProblemParams& pp, const std::string& form) {
  const auto prof = pp.profile(in.root.dim);
  const auto aggs = aggregates(in.fields);
  const auto op = complete_dyadic_integral(aggs, KernelWeight::canonical(prof.alpha, prof.m, prof.n));
  const auto lhs = radon_morrey_norm(op, prof.q, prof.q0, in.mu);
  const auto norm = product_morrey_norm(in.fields, prof);
  double constant = 0.0;
  if (form == "thm1.1a" || form == "thm1.2a") {
    require(form == "thm1.1a" ? prof.p > 1.0 : prof.p <= 1.0, form == "thm1.1a" ? "needs p > 1" : "needs p <= 1");
    constant = std::pow(a0_constant(in.mu, prof, A0Form::weight_a).value, 1.0 / prof.theta);
  } else if (form == "thm1.1b") {
    require(prof.p > 1.0, "needs p > 1");
    constant = std::pow(a0_constant(in.mu, prof, A0Form::bump_b, std::nullopt, pp.r.value_or(2.0)).value,
                        1.0 / prof.theta);
  } else if (form == "thm1.2b") {
    require(prof.p > 1.0, "needs p > 1");
    constant = std::pow(ks_testing_constant(TreeAggregate::of(in.mu), prof.beta, prof.p).value, 1.0 / prof.theta);
  } else {  // thm4.1
    require(prof.p > 1.0 && prof.beta < prof.alpha, "needs p > 1 and beta < alpha");
    const double adams = adams_constant(TreeAggregate::of(in.mu), prof.n - prof.beta * prof.p).value;
    constant = std::pow(adams, 1.0 / prof.q);
  }
  auto e = make_entry(lhs.value, constant * norm.value, Check::bounded);
  e.details = {{"constant", constant}, {"norm", norm.value}, {"theta", prof.theta}};
  if (form.rfind("thm1.1", 0) == 0) note_a_inf(e, in.mu);
  return e;
}

RatioEntry hedberg(const Instance& in, const ProblemParams& pp) {
  const auto prof = pp.profile(in.root.dim);
  const double norm = product_morrey_norm(in.fields, prof).value;
  RatioEntry e;
  if (!(norm > 0.0)) return e;
  // m-linear: scaling every field by norm^{-1/m} normalizes the product norm.
  const double scale = std::pow(norm, -1.0 / prof.m);
  std::vector<LeafField> scaled;
  for (const auto& f : in.fields) scaled.push_back(f.scaled(scale));
  const auto aggs = aggregates(scaled);
  const auto ia = complete_dyadic_integral(aggs, KernelWeight::canonical(prof.alpha, prof.m, prof.n));
  const auto ib = complete_dyadic_integral(aggs, KernelWeight::canonical(prof.beta, prof.m, prof.n));
  std::vector<double> rhs(ib.size());
  for (std::size_t x = 0; x < rhs.size(); ++x) rhs[x] = ib[x] == 0.0 ? 0.0 : std::pow(ib[x], 1.0 / prof.theta);
  e = leafwise_max(ia.values(), rhs);
  e.details["theta"] = prof.theta;
  return e;
}

RatioEntry eq41(const Instance& in, const ProblemParams& pp, bool identity) {
  const auto prof = pp.profile(in.root.dim);
  require(prof.p > 1.0, "needs p > 1");
  const auto mu = TreeAggregate::of(in.mu);
  const auto adams = adams_constant(mu, prof.n - prof.beta * prof.p);
  const double lhs = std::pow(adams.value, 1.0 / prof.q);
  double rhs = 0.0;
  if (identity) {
    rhs = std::pow(a0_constant(in.mu, prof, A0Form::weight_a).value, 1.0 / prof.theta);
  } else {
    rhs = std::pow(ks_testing_constant(mu, prof.beta, prof.p).value, 1.0 / prof.theta);
  }
  auto e = make_entry(lhs, rhs, identity ? Check::identity : Check::exact);
  if (!adams.witnesses.empty()) e.details = {{"adams_witness", addr_json(adams.witnesses.front())}};
  return e;
}

// Worst packing / stopping-parent ratio across every stopping construction.
RatioEntry packing(const Instance& in, const ProblemParams&) {
  const Grid grid(in.root);
  const auto aggs = aggregates(in.fields);
  const CubeAddr top = root_addr(in.root);
  RatioEntry e;
  auto worst = [&](const std::string& key, double r) {
    e.details[key] = std::max(e.details.value(key, 0.0), r);
    e.ratio = std::max(e.ratio, r);
  };

  const auto family = build_sparse_family(aggs, top);
  for (std::size_t i = 0; i < family.cubes.size(); ++i) {
    worst("sparse_e", score_ratio(grid.volume(grid.level_of(family.cubes[i])), 2.0 * family.e_volume[i]));
  }
  worst("sparse_carleson", family.carleson / 2.0);

  auto check_forest = [&](const CoronaForest& forest, const TreeAggregate& h_nu, const TreeAggregate& nu,
                          const std::string& tag) {
    for (std::size_t i = 0; i < forest.cubes.size(); ++i) {
      worst(tag + "_e", score_ratio(forest.mass[i], 2.0 * forest.e_mass[i]));
    }
    for (CubeId q = 0; q < grid.cube_count(); ++q) {
      if (!grid.contains(forest.top, q) || !(nu.sum(q) > 0.0)) continue;
      const CubeId parent = stopping_parent(grid, forest, q);
      worst(tag + "_stopping_parent",
            score_ratio(pair_average(grid, h_nu, nu, q), 2.0 * pair_average(grid, h_nu, nu, parent)));
    }
  };
  const auto lebesgue = TreeAggregate::of(LeafMeasure::lebesgue(in.root));
  for (std::size_t i = 0; i < in.fields.size(); ++i) {
    const auto forest = build_principal_cubes(in.fields[i], std::nullopt, top);
    check_forest(forest, aggs[i], lebesgue, "f" + std::to_string(i));
  }
  const auto mu_agg = TreeAggregate::of(in.mu);
  if (mu_agg.total() > 0.0) {
    const auto mass = in.mu.leaf_masses();
    std::vector<double> gm(mass.size());
    for (std::size_t x = 0; x < mass.size(); ++x) gm[x] = in.g[x] * mass[x];
    const auto gmu = TreeAggregate::from_leaf_masses(in.root, gm, TreeAggregate::Source::measure);
    check_forest(build_principal_cubes(in.g, in.mu, top), gmu, mu_agg, "g");
  }
  e.lhs = e.ratio;
  e.rhs = 1.0;
  return e;
}

RatioEntry sparse_domination(const Instance& in, const ProblemParams& pp) {
  const auto aggs = aggregates(in.fields);
  const auto dom = sparse_dominate(aggs, pp.alpha);
  RatioEntry e;
  e.ratio = dom.constant;
  e.lhs = dom.constant;
  e.rhs = 1.0;
  e.details = {{"leaf", dom.witness_leaf}, {"family_size", dom.family.cubes.size()}};
  return e;
}

ProblemParams params(int m, double alpha, double beta, std::vector<double> p_vec, double p0,
                     std::optional<double> r = std::nullopt) {
  ProblemParams pp;
  pp.m = m;
  pp.alpha = alpha;
  pp.beta = beta;
  pp.p_vec = std::move(p_vec);
  pp.p0 = p0;
  pp.r = r;
  return pp;
}

std::vector<Inequality> build_registry() {
  using namespace std::placeholders;
  const auto one = params(1, 0.5, 0.5, {2.0}, 4.0);
  const auto big_p = params(2, 0.3, 0.2, {4.0, 4.0}, 2.5, 2.0);
  const auto small_p = params(2, 0.5, 0.25, {1.5, 1.5}, 1.2);
  const auto comparison = params(1, 0.4, 0.3, {2.0}, 2.2);
  auto right = params(1, 0.5, 0.5, {1.5}, 2.0);
  std::vector<Inequality> reg;
  auto add = [&](std::string id, Check check, std::string summary, ProblemParams defaults, bool weight_only,
                 std::function<RatioEntry(const Instance&, const ProblemParams&)> fn) {
    reg.push_back({std::move(id), check, std::move(summary), std::move(defaults), weight_only, std::move(fn)});
  };
  add("morrey-nesting", Check::exact, "Morrey norms increase with the inner exponent", one, false, morrey_nesting);
  add("morrey-identity", Check::identity, "M^{p0,p0} norm equals the L^{p0} norm", params(1, 0.5, 0.5, {2.0}, 3.0),
      false, morrey_identity);
  add("eq1.4-left", Check::exact, "Morrey norm below the modified Morrey norm", params(1, 0.5, 0.5, {2.0}, 2.0), false,
      eq14_left);
  add("eq1.4-right", Check::bounded, "modified Morrey norm below a larger-exponent Morrey norm", right, false,
      eq14_right);
  add("discretization", Check::bounded, "kernel operator below the 3Q dyadic majorant", params(1, 0.5, 0.5, {2.0}, 2.0),
      false, discretization);
  add("thm2.1a", Check::bounded, "sparse operator trace bound, weight form", big_p, false,
      std::bind(sparse_operator_bound, _1, _2, A0Form::sparse_a, false));
  add("thm2.1b", Check::bounded, "sparse operator trace bound, bump form", big_p, true,
      std::bind(sparse_operator_bound, _1, _2, A0Form::sparse_b, false));
  add("thm2.3", Check::bounded, "sparse operator trace bound for p <= 1", small_p, false,
      std::bind(sparse_operator_bound, _1, _2, A0Form::sparse_a, true));
  add("lemma2.2a", Check::bounded, "weighted multilinear sparse embedding, weight form",
      params(2, 0.5, 0.5, {1.5, 1.5}, 1.5), false, std::bind(embedding, _1, _2, false));
  add("lemma2.2b", Check::bounded, "weighted multilinear sparse embedding, bump form",
      params(2, 0.5, 0.5, {1.5, 1.5}, 1.5, 2.0), true, std::bind(embedding, _1, _2, true));
  add("thm2.4", Check::bounded, "multilinear embedding with a measure-side function", params(2, 0.5, 0.5, {4.0, 4.0}, 2.0),
      false, corona_embedding);
  add("lemma2.5", Check::bounded, "multilinear embedding over a cube", params(2, 0.5, 0.5, {4.0, 4.0}, 2.0), false,
      lemma25);
  add("thm2.6", Check::bounded, "dyadic operator trace bound via C_Q", big_p, false, thm26);
  add("thm1.1a", Check::bounded, "trace bound with the weight testing constant", big_p, false,
      std::bind(trace_bound, _1, _2, "thm1.1a"));
  add("thm1.1b", Check::bounded, "trace bound with the bump testing constant", big_p, true,
      std::bind(trace_bound, _1, _2, "thm1.1b"));
  add("thm1.2a", Check::bounded, "trace bound for p <= 1", small_p, false, std::bind(trace_bound, _1, _2, "thm1.2a"));
  add("thm1.2b", Check::bounded, "trace bound with the Kerman-Sawyer testing constant", big_p, false,
      std::bind(trace_bound, _1, _2, "thm1.2b"));
  add("hedberg-pointwise", Check::bounded, "pointwise interpolation between two orders", big_p, false, hedberg);
  add("eq4.1", Check::exact, "Adams constant below the Kerman-Sawyer constant", comparison, false,
      std::bind(eq41, _1, _2, false));
  add("eq4.1-identity", Check::identity, "Adams constant equals the weight-form constant", comparison, false,
      std::bind(eq41, _1, _2, true));
  add("thm4.1", Check::bounded, "trace bound with the Adams constant", big_p, false,
      std::bind(trace_bound, _1, _2, "thm4.1"));
  add("packing", Check::exact, "packing of stopping families and the stopping-parent bound",
      params(2, 0.5, 0.5, {2.0, 2.0}, 2.0), false, packing);
  add("sparse-domination", Check::bounded, "dyadic operator dominated by its stopping-family sparse form",
      params(1, 0.9, 0.9, {2.0}, 2.0), false, sparse_domination);
  return reg;
}

}  // namespace

double ProblemParams::p() const {
  double inv = 0.0;
  for (const double pi : p_vec) inv += 1.0 / pi;
  return 1.0 / inv;
}

ExponentProfile ProblemParams::profile(int n) const { return ExponentProfile::make(m, n, alpha, beta, p_vec, p0, r); }

ProblemParams ProblemParams::from_json(const nlohmann::json& doc, const ProblemParams& defaults) {
  ProblemParams pp = defaults;
  if (doc.contains("p_vec")) {
    pp.p_vec = doc.at("p_vec").get<std::vector<double>>();
  } else if (doc.contains("p") && doc.at("p").is_array()) {
    pp.p_vec = doc.at("p").get<std::vector<double>>();
  }
  pp.m = doc.value("m", static_cast<int>(pp.p_vec.size()));
  if (pp.p_vec.size() != static_cast<std::size_t>(pp.m)) {
    throw Error(ErrorKind::BadExponent, "profile needs one p_i per function");
  }
  pp.alpha = doc.value("alpha", pp.alpha);
  pp.beta = doc.value("beta", pp.beta);
  pp.p0 = doc.value("p0", pp.p0);
  if (doc.contains("r")) pp.r = doc.at("r").is_null() ? std::nullopt : std::optional<double>(doc.at("r").get<double>());
  if (doc.contains("q")) pp.q_alt = doc.at("q").get<double>();
  pp.gamma_scale = doc.value("gamma_scale", pp.gamma_scale);
  return pp;
}

nlohmann::json ProblemParams::to_json() const {
  return {{"m", m},
          {"alpha", alpha},
          {"beta", beta},
          {"p_vec", p_vec},
          {"p0", p0},
          {"r", r ? nlohmann::json(*r) : nlohmann::json(nullptr)},
          {"q", q_alt ? nlohmann::json(*q_alt) : nlohmann::json(nullptr)},
          {"gamma_scale", gamma_scale}};
}

nlohmann::json Instance::to_json() const {
  auto fs = nlohmann::json::array();
  for (const auto& f : fields) fs.push_back(dtl::to_json(f));
  auto ss = nlohmann::json::array();
  for (const auto& s : sigmas) ss.push_back(dtl::to_json(s));
  return {{"fields", fs}, {"mu", dtl::to_json(mu)}, {"g", dtl::to_json(g)}, {"sigmas", ss}, {"kinds", kinds}};
}

std::string to_string(Check check) {
  switch (check) {
    case Check::exact:
      return "exact";
    case Check::identity:
      return "identity";
    case Check::bounded:
      return "bounded";
  }
  return "?";
}

const std::vector<Inequality>& registry() {
  static const std::vector<Inequality> reg = build_registry();
  return reg;
}

const Inequality& lookup(const std::string& id) {
  for (const auto& ineq : registry()) {
    if (ineq.id == id) return ineq;
  }
  throw Error(ErrorKind::RegistryMiss, "no inequality with id '" + id + "'");
}

double score_ratio(double lhs, double rhs) {
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : kInf;
  return lhs / rhs;
}

double identity_ratio(double lhs, double rhs) { return std::max(score_ratio(lhs, rhs), score_ratio(rhs, lhs)); }

bool exact_pass(double ratio) { return ratio <= 1.0 + kExactSlack; }

Instance make_instance(const Inequality& ineq, const ProblemParams& pp, RootSpec root, std::uint64_t seed,
                       std::uint64_t trial, const TrialKinds& kinds) {
  const auto place = static_cast<std::uint64_t>(root.dim) * 1000 + static_cast<std::uint64_t>(root.depth);
  GeneratorOptions opts;
  double top = pp.p0;
  for (const double pi : pp.p_vec) top = std::max(top, pi);
  opts.gamma = pp.gamma_scale * root.dim / (pp.m * top);

  Instance in;
  in.root = root;
  in.kinds = nlohmann::json::object();
  auto field_kinds = nlohmann::json::array();
  for (int i = 0; i < pp.m; ++i) {
    const auto kind = kinds.fields[(trial + static_cast<std::uint64_t>(i)) % kinds.fields.size()];
    in.fields.push_back(generate_field(kind, root, derive_seed(seed, place, trial, 1 + static_cast<std::uint64_t>(i)), opts));
    field_kinds.push_back(to_string(kind));
  }
  in.kinds["fields"] = field_kinds;

  auto mu_kind = kinds.measures[trial % kinds.measures.size()];
  if (ineq.weight_only && mu_kind == GeneratorKind::atom_measure) mu_kind = GeneratorKind::density_measure;
  in.mu = generate_measure(mu_kind, root, derive_seed(seed, place, trial, 100), opts);
  in.kinds["mu"] = to_string(mu_kind);

  const auto g_kind = kinds.fields[(trial + 1) % kinds.fields.size()];
  in.g = generate_field(g_kind, root, derive_seed(seed, place, trial, 200), opts);
  in.kinds["g"] = to_string(g_kind);

  for (int i = 0; i < pp.m; ++i) {
    in.sigmas.push_back(generate_measure(GeneratorKind::density_measure, root,
                                         derive_seed(seed, place, trial, 300 + static_cast<std::uint64_t>(i)), opts));
  }
  in.kinds["sigmas"] = "density-measure";
  return in;
}

RatioEntry inequality_ratio(const Inequality& ineq, const ProblemParams& pp, const Instance& inst) {
  if (inst.fields.size() != static_cast<std::size_t>(pp.m)) {
    throw Error(ErrorKind::ShapeMismatch, "instance has the wrong number of fields");
  }
  return ineq.evaluate(inst, pp);
}

}  // namespace dtl::harness
