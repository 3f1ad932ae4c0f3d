#include "crowdsense/scenario_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "crowdsense/random.hpp"

namespace crowdsense {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void reject_unknown(const Json& j, const std::string& path, std::initializer_list<const char*> known) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) fail(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
  }
}

const Json& require(const Json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) fail(path.empty() ? key : path + "." + key, "missing");
  return j.at(key);
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

double as_number(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

std::int64_t as_integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<std::int64_t>();
}

std::uint64_t as_seed(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
  fail(path, "expected a nonnegative integer");
}

bool as_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected true or false");
  return j.get<bool>();
}

int as_positive_int(const Json& j, const std::string& path) {
  const auto v = as_integer(j, path);
  if (v < 1 || v > 1000000) fail(path, "expected an integer in [1, 1000000]");
  return static_cast<int>(v);
}

std::vector<double> number_list(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], index(path, i)));
  return out;
}

// A number broadcast to n entries, or an array of exactly n numbers.
std::vector<double> per_location_numbers(const Json& j, std::size_t n, const std::string& path) {
  if (j.is_number()) return std::vector<double>(n, j.get<double>());
  auto v = number_list(j, path);
  if (v.size() != n) fail(path, "expected " + std::to_string(n) + " entries");
  return v;
}

std::vector<int> per_location_ints(const Json& j, std::size_t n, const std::string& path) {
  if (j.is_string()) {
    if (j.get<std::string>() != "location_squared") fail(path, "unknown rule '" + j.get<std::string>() + "'");
    std::vector<int> out;
    for (std::size_t l = 0; l < n; ++l) out.push_back(static_cast<int>((l + 1) * (l + 1)));
    return out;
  }
  if (j.is_number_integer()) return std::vector<int>(n, static_cast<int>(j.get<std::int64_t>()));
  if (!j.is_array() || j.size() != n) fail(path, "expected an integer or " + std::to_string(n) + " integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<int>(as_integer(j[i], index(path, i))));
  return out;
}

Matrix<int> parse_requirement(const Json& j, std::size_t T, std::size_t L, const std::string& path) {
  if (j.is_object()) {
    reject_unknown(j, path, {"generator"});
    const Json& g = require(j, "generator", path);
    const std::string gp = child(path, "generator");
    if (!g.is_object()) fail(gp, "expected an object");
    reject_unknown(g, gp, {"low", "high", "seed"});
    const auto low = per_location_ints(g.contains("low") ? g["low"] : Json(1), L, child(gp, "low"));
    const auto high = per_location_ints(require(g, "high", gp), L, child(gp, "high"));
    const std::uint64_t seed = g.contains("seed") ? as_seed(g["seed"], child(gp, "seed")) : 0;
    for (std::size_t l = 0; l < L; ++l) {
      if (low[l] < 1 || high[l] < low[l]) fail(gp, "need 1 <= low <= high at location " + std::to_string(l));
    }
    Xoshiro256 rng(seed);
    Matrix<int> r(T, L, 1);
    for (std::size_t t = 0; t < T; ++t) {
      for (std::size_t l = 0; l < L; ++l) r(t, l) = static_cast<int>(rng.uniform_int(low[l], high[l]));
    }
    return r;
  }
  if (!j.is_array()) fail(path, "expected a T x L array or a generator object");
  std::vector<int> flat;
  if (j.size() == T && !j.empty() && j[0].is_array()) {
    for (std::size_t t = 0; t < T; ++t) {
      const std::string rp = index(path, t);
      if (!j[t].is_array() || j[t].size() != L) fail(rp, "expected " + std::to_string(L) + " entries");
      for (std::size_t l = 0; l < L; ++l) {
        flat.push_back(static_cast<int>(as_integer(j[t][l], index(rp, l))));
      }
    }
  } else {
    if (j.size() != T * L) fail(path, "expected " + std::to_string(T) + " rows or " + std::to_string(T * L) + " entries");
    for (std::size_t i = 0; i < j.size(); ++i) flat.push_back(static_cast<int>(as_integer(j[i], index(path, i))));
  }
  for (std::size_t i = 0; i < flat.size(); ++i) {
    if (flat[i] < 1) fail(path, "requirements must be >= 1");
  }
  return Matrix<int>(T, L, std::move(flat));
}

BiddingCurve make_curve(double scale, double exponent, const Json* b_max, const std::string& path) {
  try {
    if (b_max != nullptr) return BiddingCurve::power(scale, exponent, as_number(*b_max, child(path, "b_max")));
    return BiddingCurve::power(scale, exponent);
  } catch (const DomainError& e) {
    fail(path, e.what());
  }
}

Matrix<BiddingCurve> parse_curves(const Json& j, std::size_t T, std::size_t L, const std::string& path) {
  std::vector<Json> per_location;
  if (j.is_object()) {
    per_location.assign(L, j);
  } else if (j.is_array() && j.size() == L) {
    per_location.assign(j.begin(), j.end());
  } else {
    fail(path, "expected one curve object or an array of " + std::to_string(L));
  }
  Matrix<BiddingCurve> curves(T, L, BiddingCurve{});
  for (std::size_t l = 0; l < L; ++l) {
    const Json& c = per_location[l];
    const std::string cp = j.is_object() ? path : index(path, l);
    if (!c.is_object()) fail(cp, "expected an object");
    reject_unknown(c, cp, {"scale", "exponent", "b_max", "overrides"});
    const double scale = as_number(require(c, "scale", cp), child(cp, "scale"));
    const double exponent = as_number(require(c, "exponent", cp), child(cp, "exponent"));
    const Json* b_max = c.contains("b_max") ? &c["b_max"] : nullptr;
    const BiddingCurve base = make_curve(scale, exponent, b_max, cp);
    for (std::size_t t = 0; t < T; ++t) curves(t, l) = base;
    if (!c.contains("overrides")) continue;
    const Json& ov = c["overrides"];
    const std::string op = child(cp, "overrides");
    if (!ov.is_array()) fail(op, "expected an array");
    for (std::size_t i = 0; i < ov.size(); ++i) {
      const std::string ip = index(op, i);
      if (!ov[i].is_object()) fail(ip, "expected an object");
      reject_unknown(ov[i], ip, {"t", "scale", "exponent", "b_max"});
      const auto t = as_integer(require(ov[i], "t", ip), child(ip, "t"));
      if (t < 0 || static_cast<std::size_t>(t) >= T) fail(child(ip, "t"), "slot out of range");
      const double s = ov[i].contains("scale") ? as_number(ov[i]["scale"], child(ip, "scale")) : scale;
      const double p = ov[i].contains("exponent") ? as_number(ov[i]["exponent"], child(ip, "exponent")) : exponent;
      const Json* bm = ov[i].contains("b_max") ? &ov[i]["b_max"] : nullptr;
      curves(static_cast<std::size_t>(t), l) = make_curve(s, p, bm, ip);
    }
  }
  return curves;
}

RobustnessSpec parse_spec(const Json& j, std::size_t L, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const Json& type = require(j, "type", path);
  if (!type.is_string()) fail(child(path, "type"), "expected \"hard\" or \"soft\"");
  try {
    if (type == "hard") {
      reject_unknown(j, path, {"type", "epsilon"});
      return RobustnessSpec::hard(as_number(require(j, "epsilon", path), child(path, "epsilon")));
    }
    if (type == "soft") {
      reject_unknown(j, path, {"type", "alpha", "beta"});
      auto alpha = per_location_numbers(require(j, "alpha", path), L, child(path, "alpha"));
      return RobustnessSpec::soft(std::move(alpha), as_number(require(j, "beta", path), child(path, "beta")));
    }
  } catch (const DomainError& e) {
    fail(path, e.what());
  }
  fail(child(path, "type"), "expected \"hard\" or \"soft\"");
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Scenario parse_scenario(const Json& j) {
  if (!j.is_object()) fail("<root>", "expected an object");
  reject_unknown(j, "", {"T", "L", "requirement", "curves", "spec", "search"});
  const auto T = static_cast<std::size_t>(as_positive_int(require(j, "T", ""), "T"));
  const auto L = static_cast<std::size_t>(as_positive_int(require(j, "L", ""), "L"));
  Matrix<int> r = parse_requirement(require(j, "requirement", ""), T, L, "requirement");
  Matrix<BiddingCurve> curves = parse_curves(require(j, "curves", ""), T, L, "curves");
  RobustnessSpec spec = parse_spec(require(j, "spec", ""), L, "spec");
  return Scenario(std::move(r), std::move(curves), std::move(spec));
}

BinarySearchParams parse_search_params(const Json& j, BinarySearchParams p) {
  if (!j.contains("search")) return p;
  const Json& s = j["search"];
  const std::string path = "search";
  if (!s.is_object()) fail(path, "expected an object");
  reject_unknown(s, path, {"sigma_hi", "sigma_lo", "mc_samples", "seed", "max_bisect",
                           "escalation_factor", "max_escalations", "min_width", "fresh_draws",
                           "fall_back_to_full", "split_at_zero"});
  if (s.contains("sigma_hi")) p.sigma_hi = as_number(s["sigma_hi"], child(path, "sigma_hi"));
  if (s.contains("sigma_lo")) p.sigma_lo = as_number(s["sigma_lo"], child(path, "sigma_lo"));
  if (s.contains("mc_samples")) p.mc_samples = as_integer(s["mc_samples"], child(path, "mc_samples"));
  if (s.contains("seed")) p.master_seed = as_seed(s["seed"], child(path, "seed"));
  if (s.contains("max_bisect")) p.max_bisect = static_cast<int>(as_integer(s["max_bisect"], child(path, "max_bisect")));
  if (s.contains("escalation_factor")) {
    p.escalation_factor = static_cast<int>(as_integer(s["escalation_factor"], child(path, "escalation_factor")));
  }
  if (s.contains("max_escalations")) {
    p.max_escalations = static_cast<int>(as_integer(s["max_escalations"], child(path, "max_escalations")));
  }
  if (s.contains("min_width")) p.min_width = as_number(s["min_width"], child(path, "min_width"));
  if (s.contains("fresh_draws")) p.fresh_draws = as_bool(s["fresh_draws"], child(path, "fresh_draws"));
  if (s.contains("fall_back_to_full")) {
    p.fall_back_to_full = as_bool(s["fall_back_to_full"], child(path, "fall_back_to_full"));
  }
  if (s.contains("split_at_zero")) p.split_at_zero = as_bool(s["split_at_zero"], child(path, "split_at_zero"));
  return p;
}

ExperimentConfig parse_experiment(const Json& j) {
  ExperimentConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) fail("<root>", "expected an object");
  reject_unknown(j, "", {"T", "L", "replications", "seed", "requirement", "curves", "epsilon_grid",
                         "beta_grid", "alpha_settings", "search"});
  if (j.contains("T")) c.periods = as_positive_int(j["T"], "T");
  if (j.contains("L")) c.locations = as_positive_int(j["L"], "L");
  if (j.contains("replications")) c.replications = as_positive_int(j["replications"], "replications");
  if (j.contains("seed")) c.master_seed = as_seed(j["seed"], "seed");
  const auto L = static_cast<std::size_t>(c.locations);
  if (j.contains("requirement")) {
    const Json& r = j["requirement"];
    if (!r.is_object()) fail("requirement", "expected {low, high}");
    reject_unknown(r, "requirement", {"low", "high"});
    if (r.contains("low")) c.r_low = per_location_ints(r["low"], L, "requirement.low");
    if (r.contains("high")) c.r_high = per_location_ints(r["high"], L, "requirement.high");
  }
  if (j.contains("curves")) {
    const Json& cv = j["curves"];
    if (!cv.is_object()) fail("curves", "expected {scale, exponent}");
    reject_unknown(cv, "curves", {"scale", "exponent"});
    if (cv.contains("scale")) {
      if (cv["scale"] == "location_index") {
        c.curve_scale.clear();
      } else {
        c.curve_scale = per_location_numbers(cv["scale"], L, "curves.scale");
      }
    }
    if (cv.contains("exponent")) c.curve_exponent = per_location_numbers(cv["exponent"], L, "curves.exponent");
  }
  if (j.contains("epsilon_grid")) c.epsilon_grid = number_list(j["epsilon_grid"], "epsilon_grid");
  if (j.contains("beta_grid")) c.beta_grid = number_list(j["beta_grid"], "beta_grid");
  if (j.contains("alpha_settings")) {
    const Json& a = j["alpha_settings"];
    if (!a.is_array()) fail("alpha_settings", "expected an array of [low, high] pairs");
    c.alpha_settings.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto pair = number_list(a[i], index("alpha_settings", i));
      if (pair.size() != 2) fail(index("alpha_settings", i), "expected [low, high]");
      c.alpha_settings.push_back({pair[0], pair[1]});
    }
  }
  c.search = parse_search_params(j, c.search);
  validate(c);
  return c;
}

Json to_json(const Matrix<double>& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const PolicyMatrix& policy) { return to_json(policy.values()); }

Json to_json(const GapCertificate& c) {
  Json j;
  j["bound"] = c.bound;
  j["formula"] = to_string(c.formula);
  j["lambda"] = c.dual;
  if (c.formula == GapFormula::Pairwise || c.formula == GapFormula::Relaxation ||
      c.formula == GapFormula::Tightest) {
    j["epsilon"] = c.epsilon;
    j["cells"] = c.cells;
    j["pairwise_bound"] = c.pairwise_bound;
    j["relaxation_bound"] = c.relaxation_bound;
  } else {
    j["location_lambda"] = c.location_dual;
    j["location_gamma"] = c.location_gamma;
    j["location_bound"] = c.location_bound;
    Json clamped = Json::array();
    for (bool b : c.location_clamped) clamped.push_back(b);
    j["location_clamped"] = clamped;
  }
  return j;
}

Json to_json(const LocationSearch& s, bool with_trajectory) {
  Json j;
  j["k"] = s.k;
  j["gamma_final"] = s.gamma_final;
  j["q_estimate"] = s.q_estimate;
  j["exact_tail_check"] = s.exact_tail_check;
  j["bisect_iters"] = s.bisect_iters;
  j["samples"] = s.samples;
  j["escalations"] = s.escalations;
  j["fell_back"] = s.fell_back;
  j["lambda"] = s.dual;
  if (with_trajectory) {
    Json steps = Json::array();
    for (const auto& st : s.trajectory) {
      steps.push_back({{"escalation", st.escalation}, {"iteration", st.iteration},
                       {"gamma", st.gamma}, {"q", st.q}, {"samples", st.samples}});
    }
    j["trajectory"] = steps;
  }
  return j;
}

}  // namespace crowdsense
