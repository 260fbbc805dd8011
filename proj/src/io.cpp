#include "asymflat/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace asymflat {

namespace {

Vector3d vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) fail(ErrorKind::InvalidSpec, std::string(what) + " must be a 3-vector");
  return Vector3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json arr(const Vector3d& v) { return json::array({v[0], v[1], v[2]}); }

// NaN and infinities have no JSON form
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void check_keys(const json& j, const std::set<std::string>& allowed, const char* what) {
  if (!j.is_object()) fail(ErrorKind::InvalidSpec, std::string(what) + " must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) fail(ErrorKind::InvalidSpec, std::string("unknown key '") + k + "' in " + what);
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidSpec, std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

json to_json(const MetricSpec& spec) {
  json j;
  j["family"] = to_string(spec.family);
  j["m"] = spec.m;
  j["c"] = arr(spec.c);
  j["gamma1"] = spec.gamma1;
  j["gamma2"] = spec.gamma2;
  j["epsilon"] = spec.epsilon ? json(*spec.epsilon) : json(nullptr);
  j["perturbation"] = json::array();
  for (const auto& t : spec.perturbation)
    j["perturbation"].push_back({{"i", t.i},
                                 {"j", t.j},
                                 {"coeff", t.coeff},
                                 {"powers", {t.powers[0], t.powers[1], t.powers[2]}},
                                 {"decay", t.decay}});
  j["tau"] = spec.tau;
  j["sigma"] = spec.sigma;
  j["r_min"] = spec.r_min ? json(*spec.r_min) : json(nullptr);
  return j;
}

MetricSpec spec_from_json(const json& j) {
  return guarded([&] {
    check_keys(j, {"family", "m", "c", "gamma1", "gamma2", "epsilon", "perturbation", "tau", "sigma", "r_min"},
               "metric spec");
    if (!j.contains("family")) fail(ErrorKind::InvalidSpec, "metric spec lacks a family");
    MetricSpec s;
    s.family = family_from_string(j.at("family").get<std::string>());
    s.m = j.value("m", 0.0);
    if (j.contains("c")) s.c = vec3(j["c"], "c");
    s.gamma1 = j.value("gamma1", 0.0);
    s.gamma2 = j.value("gamma2", 0.0);
    if (j.contains("epsilon") && !j["epsilon"].is_null()) s.epsilon = j["epsilon"].get<double>();
    if (j.contains("perturbation")) {
      for (const auto& t : j["perturbation"]) {
        check_keys(t, {"i", "j", "coeff", "powers", "decay"}, "perturbation term");
        PerturbationTerm p;
        p.i = t.at("i").get<int>();
        p.j = t.at("j").get<int>();
        p.coeff = t.at("coeff").get<double>();
        if (t.contains("powers")) {
          if (!t["powers"].is_array() || t["powers"].size() != 3)
            fail(ErrorKind::InvalidSpec, "perturbation powers must have three entries");
          for (int k = 0; k < 3; ++k) p.powers[k] = t["powers"][k].get<int>();
        }
        p.decay = t.value("decay", 3.0);
        s.perturbation.push_back(p);
      }
    }
    s.tau = j.value("tau", 1.0);
    s.sigma = j.value("sigma", 1.0);
    if (j.contains("r_min") && !j["r_min"].is_null()) s.r_min = j["r_min"].get<double>();
    validate(s);
    return s;
  });
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidInput, "cannot open '" + path + "'");
  return guarded([&] { return json::parse(in); });
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::InvalidInput, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorKind::InvalidInput, "write to '" + path + "' failed");
}

MetricSpec load_spec(const std::string& source) {
  std::size_t k = source.find_first_not_of(" \t\r\n");
  if (k != std::string::npos && source[k] == '{') return spec_from_json(guarded([&] { return json::parse(source); }));
  return spec_from_json(read_json_file(source));
}

json to_json(const GraphSurface& s) {
  json j;
  j["center"] = arr(s.center);
  j["rho"] = s.rho;
  j["theta_exp"] = s.theta_exp;
  j["domain"] = s.domain == Domain::Hemisphere ? "hemisphere" : "sphere";
  j["lmax"] = s.lmax;
  json c = json::array();
  for (int l = 0; l <= s.lmax; ++l)
    for (int m = -l; m <= l; ++m) {
      if (!sh_admissible(s.domain, l, m)) continue;
      c.push_back({{"l", l}, {"m", m}, {"value", s.coeffs[sh_index(l, m)]}});
    }
  j["coeffs"] = c;
  return j;
}

GraphSurface surface_from_json(const json& j) {
  return guarded([&] {
    check_keys(j, {"center", "rho", "theta_exp", "domain", "lmax", "coeffs", "metadata"}, "surface");
    GraphSurface s;
    s.center = vec3(j.at("center"), "center");
    s.rho = j.at("rho").get<double>();
    s.theta_exp = j.value("theta_exp", 0.5);
    const std::string d = j.value("domain", std::string("sphere"));
    if (d == "sphere") s.domain = Domain::Sphere;
    else if (d == "hemisphere") s.domain = Domain::Hemisphere;
    else fail(ErrorKind::InvalidInput, "unknown surface domain '" + d + "'");
    s.resize(j.value("lmax", 0));
    for (const auto& c : j.value("coeffs", json::array())) {
      const int l = c.at("l").get<int>(), m = c.at("m").get<int>();
      if (l < 0 || l > s.lmax || std::abs(m) > l) fail(ErrorKind::InvalidInput, "coefficient index out of range");
      s.coeffs[sh_index(l, m)] = c.at("value").get<double>();
    }
    validate(s);
    return s;
  });
}

json to_json(const LeafResult& leaf) {
  json j = to_json(leaf.surface);
  j["metadata"] = {{"condition", to_string(leaf.condition)},
                   {"constant", leaf.constant},
                   {"gamma", leaf.gamma},
                   {"residual", leaf.residual},
                   {"iterations", leaf.iterations},
                   {"fb_defect", leaf.fb_defect}};
  return j;
}

LeafResult leaf_from_json(const json& j) {
  return guarded([&] {
    LeafResult leaf;
    leaf.surface = surface_from_json(j);
    if (j.contains("metadata")) {
      const json& m = j["metadata"];
      leaf.condition = condition_from_string(m.at("condition").get<std::string>());
      leaf.constant = m.value("constant", 0.0);
      leaf.gamma = m.value("gamma", 0.0);
      leaf.residual = m.value("residual", 0.0);
      leaf.iterations = m.value("iterations", 0);
      leaf.fb_defect = m.value("fb_defect", 0.0);
    }
    return leaf;
  });
}

json to_json(const PowerFit& f) {
  return {{"limit", num(f.limit)},     {"coeff", num(f.coeff)},       {"coeff2", num(f.coeff2)},
          {"rate", num(f.rate)},       {"residual", num(f.residual)}, {"monotone_tail", f.monotone_tail},
          {"samples", f.samples}};
}

json to_json(const ExponentFit& f) {
  return {{"exponent", num(f.exponent)}, {"prefactor", num(f.prefactor)}, {"residual", num(f.residual)},
          {"exact", f.exact}};
}

json to_json(const IdentityReport& r) {
  json j;
  j["tag"] = r.tag;
  j["radii"] = r.radii;
  j["residuals"] = r.residuals;
  j["exponent"] = num(r.fit.exponent);
  j["fit"] = to_json(r.fit);
  j["claimed"] = r.claimed;
  j["alternate"] = num(r.alternate);
  j["bound"] = r.bound;
  j["pass"] = r.pass;
  if (!r.values.empty()) {
    j["values"] = json::array();
    for (const auto& v : r.values) j["values"].push_back(arr(v));
    j["limit"] = arr(r.limit);
    j["target"] = arr(r.target);
  }
  return j;
}

}  // namespace asymflat
