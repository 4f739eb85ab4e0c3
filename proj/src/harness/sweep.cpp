#include "dtl/harness/sweep.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dtl/error.hpp"
#include "dtl/harness/report.hpp"

namespace dtl::harness {

nlohmann::json ExperimentSpec::to_json() const {
  auto fk = nlohmann::json::array();
  for (const auto k : kinds.fields) fk.push_back(to_string(k));
  auto mk = nlohmann::json::array();
  for (const auto k : kinds.measures) mk.push_back(to_string(k));
  return {{"id", id},     {"dims", dims},     {"depths", depths}, {"params", params.to_json()},
          {"trials", trials}, {"seed", seed}, {"field_kinds", fk}, {"measure_kinds", mk}};
}

double growth_slope(const std::vector<int>& depths, const std::vector<double>& max_ratios) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    const double r = max_ratios[i];
    if (std::isinf(r)) return std::numeric_limits<double>::infinity();
    if (r > 0.0) {
      xs.push_back(depths[i]);
      ys.push_back(std::log(r));
    }
  }
  if (xs.size() < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

bool growth_passes(const std::vector<double>& max_ratios, double slope, std::string* reason) {
  auto fail = [&](const std::string& why) {
    if (reason) *reason = why;
    return false;
  };
  for (const double r : max_ratios) {
    if (!std::isfinite(r)) return fail("infinite ratio");
  }
  if (!(slope <= kMaxSlope)) return fail("slope " + format_number(slope) + " exceeds " + format_number(kMaxSlope));
  if (!max_ratios.empty() && !(max_ratios.back() <= kMaxGrowth * max_ratios.front())) {
    return fail("last/first growth exceeds " + format_number(kMaxGrowth));
  }
  if (reason) reason->clear();
  return true;
}

SweepResult sweep(const ExperimentSpec& spec) {
  if (spec.depths.empty() || spec.dims.empty()) throw Error(ErrorKind::InvalidRoot, "empty depth or dimension list");
  if (spec.trials < 1) throw Error(ErrorKind::InvalidRoot, "need at least one trial");
  const Inequality& ineq = lookup(spec.id);
  SweepResult res;
  res.spec = spec;
  res.check = ineq.check;

  for (const int dim : spec.dims) {
    std::vector<double> maxima;
    bool exact_ok = true;
    for (const int depth : spec.depths) {
      const RootSpec root{dim, depth};
      DepthResult row;
      row.dim = dim;
      row.depth = depth;
      bool first = true;
      for (int t = 0; t < spec.trials; ++t) {
        const auto trial = static_cast<std::uint64_t>(t);
        const Instance inst = make_instance(ineq, spec.params, root, spec.seed, trial, spec.kinds);
        const RatioEntry e = inequality_ratio(ineq, spec.params, inst);
        row.trials.push_back({trial, e.lhs, e.rhs, e.ratio});
        if (ineq.check != Check::bounded && !exact_pass(e.ratio)) exact_ok = false;
        if (first || e.ratio > row.max_ratio) {
          first = false;
          row.max_ratio = e.ratio;
          row.witness_trial = trial;
          row.witness_inputs = inst.to_json();
          row.witness_details = e.details;
        }
      }
      maxima.push_back(row.max_ratio);
      res.rows.push_back(std::move(row));
    }
    DimSummary sum;
    sum.dim = dim;
    sum.slope = growth_slope(spec.depths, maxima);
    if (ineq.check == Check::bounded) {
      sum.pass = growth_passes(maxima, sum.slope, &sum.reason);
    } else {
      sum.pass = exact_ok;
      if (!exact_ok) sum.reason = "ratio above 1 + 1e-12";
    }
    res.pass = res.pass && sum.pass;
    res.dims.push_back(std::move(sum));
  }
  return res;
}

nlohmann::json SweepResult::to_json() const {
  auto rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    auto trials_json = nlohmann::json::array();
    for (const auto& t : r.trials) {
      trials_json.push_back({{"trial", t.trial}, {"lhs", t.lhs}, {"rhs", t.rhs}, {"ratio", t.ratio}});
    }
    rows_json.push_back({{"dim", r.dim},
                         {"depth", r.depth},
                         {"max_ratio", r.max_ratio},
                         {"witness_trial", r.witness_trial},
                         {"witness_inputs", r.witness_inputs},
                         {"witness_details", r.witness_details},
                         {"trials", trials_json}});
  }
  auto dims_json = nlohmann::json::array();
  for (const auto& d : dims) {
    dims_json.push_back({{"dim", d.dim}, {"slope", d.slope}, {"pass", d.pass}, {"reason", d.reason}});
  }
  return {{"spec", spec.to_json()},
          {"check", to_string(check)},
          {"rows", rows_json},
          {"summary", dims_json},
          {"pass", pass},
          {"generator_note", "generator kinds are modeling choices, not extremizers"},
          {"sup_scope", "tree-sup"}};
}

std::string SweepResult::to_csv() const {
  const bool single = spec.dims.size() == 1;
  std::ostringstream os;
  os << (single ? "depth,max_ratio,slope\n" : "dim,depth,max_ratio,slope\n");
  for (const auto& r : rows) {
    double slope = 0.0;
    for (const auto& d : dims) {
      if (d.dim == r.dim) slope = d.slope;
    }
    if (!single) os << r.dim << ',';
    os << r.depth << ',' << format_number(r.max_ratio) << ',' << format_number(slope) << '\n';
  }
  return os.str();
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  try {
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dots));
      const int hi = std::stoi(text.substr(dots + 2));
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
      }
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::InvalidRoot, "cannot parse integer list '" + text + "'");
  }
  if (out.empty()) throw Error(ErrorKind::InvalidRoot, "empty integer list '" + text + "'");
  return out;
}

}  // namespace dtl::harness
