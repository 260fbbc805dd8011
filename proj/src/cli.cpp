#include "asymflat/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"

#include "asymflat/asymptotics.hpp"
#include "asymflat/foliation.hpp"
#include "asymflat/invariants.hpp"
#include "asymflat/io.hpp"
#include "asymflat/parallel.hpp"
#include "asymflat/stability.hpp"

#ifndef ASYMFLAT_VERSION
#define ASYMFLAT_VERSION "0.0.0"
#endif

namespace asymflat {

const char* version() { return ASYMFLAT_VERSION; }

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StageError : std::runtime_error {
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error(what), stage(stage) {}
  std::string stage;
};

template <class F>
auto stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw StageError(name, e.what());
  }
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) out.push_back(item);
  return out;
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

// CSV table with a comment header carrying version and resolved config
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  void add(std::vector<std::string> r) { rows.push_back(std::move(r)); }
};

struct Options {
  std::string metric;
  std::string radii;
  std::string format = "csv";
  std::string output;
  int lquad = 0;
  bool two_term = false;
  // deficit
  std::string kinds;
  double r0 = 0.0;
  // foliate / spectrum
  std::string condition;
  int lmax = 12;
  double tol = 1e-10;
  int max_iter = 200;
  double damping = 0.5;
  double theta = 0.5;
  std::string leaf_dir;
  int basis = 8;
  int nev = 4;
  // verify
  std::string set = "all";
  std::vector<double> a;
  // local
  std::string model = "s3,h3";
};

struct Context {
  std::string command;
  json config;
  json results;
  Table table;
};

MetricSpec resolve_spec(const Options& o) {
  if (o.metric.empty()) throw UsageError("--metric is required");
  try {
    return load_spec(o.metric);
  } catch (const Error& e) {
    throw UsageError(std::string("malformed spec: ") + e.what());
  }
}

std::vector<double> resolve_radii(const Options& o) {
  if (o.radii.empty()) throw UsageError("--radii is required");
  try {
    return parse_radii(o.radii);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

void base_config(Context& c, const Options& o, const MetricSpec& spec, const std::vector<double>& radii, int lquad) {
  c.config["metric"] = to_json(spec);
  c.config["radii"] = radii;
  c.config["format"] = o.format;
  c.config["lquad"] = lquad;
  c.config["two_term"] = o.two_term;
}

// limits of the fits on growing prefixes; null until enough samples
std::vector<double> running_limits(const std::vector<double>& r, const std::vector<double>& v, bool two_term) {
  std::vector<double> out(r.size(), NAN);
  for (std::size_t n = 4; n <= r.size(); ++n) {
    try {
      out[n - 1] = extrapolate({r.begin(), r.begin() + n}, {v.begin(), v.begin() + n}, two_term).limit;
    } catch (const Error&) {
    }
  }
  return out;
}

json scalar_summary(const std::vector<double>& r, const std::vector<double>& v, bool two_term) {
  json j;
  j["radii"] = r;
  j["values"] = v;
  if (r.size() >= 4) {
    PowerFit f = extrapolate(r, v, two_term);
    j["fit"] = to_json(f);
    j["limit"] = f.limit;
    j["rate"] = f.rate;
    j["residual"] = f.residual;
  }
  return j;
}

void cmd_mass(Context& c, const Options& o) {
  const MetricSpec spec = resolve_spec(o);
  const auto radii = resolve_radii(o);
  const int lq = o.lquad > 0 ? o.lquad : 32;
  base_config(c, o, spec, radii, lq);
  const auto v = stage("mass/flux", [&] {
    return parallel_map(radii.size(), [&](std::size_t i) { return flux_mass(spec, radii[i], lq); });
  });
  c.results = stage("mass/fit", [&] { return scalar_summary(radii, v, o.two_term); });
  const auto run = running_limits(radii, v, o.two_term);
  c.table.columns = {"radius", "mass", "limit"};
  for (std::size_t i = 0; i < radii.size(); ++i) c.table.add({fmt(radii[i]), fmt(v[i]), fmt(run[i])});
}

void cmd_center(Context& c, const Options& o) {
  const MetricSpec spec = resolve_spec(o);
  const auto radii = resolve_radii(o);
  const int lq = o.lquad > 0 ? o.lquad : 32;
  base_config(c, o, spec, radii, lq);
  const auto v = stage("center/flux", [&] {
    return parallel_map(radii.size(), [&](std::size_t i) { return flux_center(spec, radii[i], lq); });
  });
  std::array<std::vector<double>, 3> comp, run;
  for (int k = 0; k < 3; ++k) {
    for (const auto& x : v) comp[k].push_back(x[k]);
    run[k] = running_limits(radii, comp[k], o.two_term);
  }
  json res;
  res["radii"] = radii;
  res["values"] = json::array();
  for (const auto& x : v) res["values"].push_back({x[0], x[1], x[2]});
  if (radii.size() >= 4) {
    res["limit"] = json::array();
    res["fit"] = json::array();
    for (int k = 0; k < 3; ++k) {
      PowerFit f = stage("center/fit", [&] { return extrapolate(radii, comp[k], o.two_term); });
      res["limit"].push_back(f.limit);
      res["fit"].push_back(to_json(f));
    }
  }
  if (spec.half() && radii.size() >= 4) {
    const double mass = stage("center/mass", [&] {
      std::vector<double> mv = parallel_map(radii.size(), [&](std::size_t i) { return flux_mass(spec, radii[i], lq); });
      return extrapolate(radii, mv, o.two_term).limit;
    });
    const auto h = stage("center/mean-curvature", [&] { return center_from_H_series(spec, radii, lq, o.two_term); });
    res["center_from_H"] = {h.fit[0].limit, h.fit[1].limit};
    res["mass"] = mass;
  }
  c.results = res;
  c.table.columns = {"radius", "c1", "c2", "c3", "limit1", "limit2", "limit3"};
  for (std::size_t i = 0; i < radii.size(); ++i)
    c.table.add({fmt(radii[i]), fmt(v[i][0]), fmt(v[i][1]), fmt(v[i][2]), fmt(run[0][i]), fmt(run[1][i]),
                 fmt(run[2][i])});
}

void cmd_deficit(Context& c, const Options& o) {
  const MetricSpec spec = resolve_spec(o);
  const auto radii = resolve_radii(o);
  const int lq = o.lquad > 0 ? o.lquad : 24;
  base_config(c, o, spec, radii, lq);
  std::vector<DeficitKind> kinds;
  const std::string ks = o.kinds.empty() ? (spec.half() ? "RelJ32" : "J32,J31,J21") : o.kinds;
  for (const auto& k : split(ks, ',')) {
    try {
      kinds.push_back(deficit_from_string(k));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  std::optional<double> r0;
  if (o.r0 > 0.0) r0 = o.r0;
  c.config["kinds"] = ks;
  c.config["r0"] = r0.value_or(default_r0(spec));
  c.table.columns = {"kind", "radius", "value", "limit"};
  c.results = json::object();
  for (DeficitKind k : kinds) {
    const std::string name = to_string(k);
    const auto v = stage("deficit/" + name, [&] {
      return parallel_map(radii.size(), [&](std::size_t i) { return deficit(spec, k, radii[i], lq, r0); });
    });
    c.results[name] = stage("deficit/fit", [&] { return scalar_summary(radii, v, o.two_term); });
    const auto run = running_limits(radii, v, o.two_term);
    for (std::size_t i = 0; i < radii.size(); ++i) c.table.add({name, fmt(radii[i]), fmt(v[i]), fmt(run[i])});
  }
}

SolverConfig solver_config(Context& c, const Options& o, const MetricSpec& spec) {
  SolverConfig cfg;
  cfg.lmax = o.lmax;
  cfg.lquad = o.lquad;
  cfg.tol = o.tol;
  cfg.max_iter = o.max_iter;
  cfg.damping = o.damping;
  cfg.theta_exp = o.theta;
  try {
    cfg.condition = o.condition.empty() ? (spec.half() ? Condition::FreeBoundaryCMC : Condition::CMC)
                                        : condition_from_string(o.condition);
    validate(cfg);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  c.config["condition"] = to_string(cfg.condition);
  c.config["lmax"] = cfg.lmax;
  c.config["lquad"] = cfg.quadrature();
  c.config["tol"] = cfg.tol;
  c.config["max_iter"] = cfg.max_iter;
  c.config["damping"] = cfg.damping;
  c.config["theta_exp"] = cfg.theta_exp;
  c.config["floor"] = solver_floor(spec, cfg);
  return cfg;
}

void cmd_foliate(Context& c, const Options& o) {
  const MetricSpec spec = resolve_spec(o);
  const auto radii = resolve_radii(o);
  base_config(c, o, spec, radii, 0);
  const SolverConfig cfg = solver_config(c, o, spec);
  c.config["leaf_dir"] = o.leaf_dir;
  const SweepResult sw = stage("foliate/leaves", [&] { return sweep(spec, radii, cfg); });
  json res;
  res["leaves"] = json::array();
  for (std::size_t i = 0; i < sw.leaves.size(); ++i) {
    const auto& l = sw.leaves[i];
    res["leaves"].push_back({{"rho", radii[i]},
                             {"residual", l.residual},
                             {"iterations", l.iterations},
                             {"center", {l.surface.center[0], l.surface.center[1], l.surface.center[2]}},
                             {"centroid", {sw.centroids[i][0], sw.centroids[i][1], sw.centroids[i][2]}},
                             {"fb_defect", l.fb_defect},
                             {"radial_range", {sw.radial_range[i].first, sw.radial_range[i].second}}});
  }
  const Vector3d& g = sw.geometric_center;
  res["geometric_center"] = {g[0], g[1], g[2]};
  res["extrapolated"] = sw.extrapolated;
  res["nested"] = sw.nested();
  res["nesting_violations"] = json::array();
  for (const auto& v : sw.nesting)
    res["nesting_violations"].push_back({{"inner", v.inner}, {"inner_max", v.inner_max}, {"outer_min", v.outer_min}});
  if (!o.leaf_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(o.leaf_dir, ec);
    if (ec) throw StageError("foliate/write", "cannot create '" + o.leaf_dir + "'");
    res["leaf_files"] = json::array();
    for (std::size_t i = 0; i < sw.leaves.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "leaf_%03zu.json", i);
      const std::string path = (std::filesystem::path(o.leaf_dir) / name).string();
      json doc = to_json(sw.leaves[i]);
      doc["version"] = version();
      doc["config"] = c.config;
      stage("foliate/write", [&] {
        write_text_file(path, doc.dump(2) + "\n");
        return 0;
      });
      res["leaf_files"].push_back(path);
    }
  }
  c.results = res;
  c.table.columns = {"rho", "residual", "iterations", "cx", "cy", "cz", "fb_defect", "r_min", "r_max",
                     "CF1", "CF2", "CF3", "nested"};
  for (std::size_t i = 0; i < sw.leaves.size(); ++i) {
    const auto& l = sw.leaves[i];
    const Vector3d& x = sw.centroids[i];
    c.table.add({fmt(radii[i]), fmt(l.residual), std::to_string(l.iterations), fmt(x[0]), fmt(x[1]), fmt(x[2]),
                 fmt(l.fb_defect), fmt(sw.radial_range[i].first), fmt(sw.radial_range[i].second), fmt(g[0]),
                 fmt(g[1]), fmt(g[2]), sw.nested() ? "1" : "0"});
  }
}

void cmd_spectrum(Context& c, const Options& o) {
  const MetricSpec spec = resolve_spec(o);
  const auto radii = resolve_radii(o);
  base_config(c, o, spec, radii, 0);
  const SolverConfig cfg = solver_config(c, o, spec);
  c.config["basis"] = o.basis;
  c.config["nev"] = o.nev;
  const SweepResult sw = stage("spectrum/leaves", [&] { return sweep(spec, radii, cfg); });
  const SpectrumSweep sp = stage("spectrum/eigen", [&] { return leaf_spectra(spec, sw.leaves, o.basis, o.nev); });
  json res;
  res["operator"] = to_string(sp.kind);
  res["robin"] = sp.bc == BoundaryCondition::Robin;
  res["lowest_power"] = sp.lowest_power;
  res["constrained_power"] = sp.constrained_power;
  res["lowest_fit"] = sp.lowest_fit;
  res["constrained_fit"] = sp.constrained_fit;
  res["leaves"] = json::array();
  for (const auto& l : sp.leaves) {
    std::vector<double> v(l.values.data(), l.values.data() + l.values.size());
    res["leaves"].push_back({{"rho", l.rho},
                             {"values", v},
                             {"constrained", l.constrained},
                             {"min_pi", std::isfinite(l.min_pi) ? json(l.min_pi) : json(nullptr)},
                             {"symmetry_defect", l.symmetry_defect}});
  }
  c.results = res;
  auto coef = [](const std::vector<double>& f, std::size_t k) { return k < f.size() ? f[k] : NAN; };
  c.table.columns = {"rho", "lowest", "constrained", "lowest_a0", "lowest_a1", "constrained_a0", "constrained_a1"};
  for (const auto& l : sp.leaves)
    c.table.add({fmt(l.rho), fmt(l.values[0]), fmt(l.constrained), fmt(coef(sp.lowest_fit, 0)),
                 fmt(coef(sp.lowest_fit, 1)), fmt(coef(sp.constrained_fit, 0)), fmt(coef(sp.constrained_fit, 1))});
}

void cmd_verify(Context& c, const Options& o) {
  const MetricSpec spec = resolve_spec(o);
  const auto radii = resolve_radii(o);
  const int lq = o.lquad > 0 ? o.lquad : 32;
  base_config(c, o, spec, radii, lq);
  Vector3d a = Vector3d::Zero();
  if (!o.a.empty()) {
    if (o.a.size() != 3) throw UsageError("--center takes three numbers");
    a = Vector3d(o.a[0], o.a[1], o.a[2]);
  }
  c.config["set"] = o.set;
  c.config["center"] = {a[0], a[1], a[2]};
  const bool all = o.set == "all";
  static const std::vector<std::string> known = {"all", "h-expansion", "kh", "moment", "integration", "volume-area"};
  if (std::find(known.begin(), known.end(), o.set) == known.end()) throw UsageError("unknown identity set '" + o.set + "'");

  std::vector<IdentityReport> reps;
  auto take = [&](std::vector<IdentityReport> v) { reps.insert(reps.end(), v.begin(), v.end()); };
  if (all || o.set == "h-expansion")
    reps.push_back(stage("verify/h-expansion", [&] { return h_expansion_residual(spec, radii, a, {}, lq); }));
  if ((all && !spec.half() && (spec.family != Family::EpsAS || spec.epsilon)) || o.set == "kh")
    take(stage("verify/kh", [&] { return kh_relation_residual(spec, radii, a, lq); }));
  if ((all && spec.m != 0.0) || o.set == "moment") {
    MomentOptions mo;
    mo.a = a;
    mo.lquad = lq;
    reps.push_back(stage("verify/moment", [&] { return moment_identity(spec, radii, mo); }));
  }
  if ((all && spec.half()) || o.set == "integration")
    reps.push_back(
        stage("verify/integration", [&] { return integration_identity_report(spec, radii, a.head<2>()); }));
  if (all || o.set == "volume-area")
    take(stage("verify/volume-area", [&] { return appendixA_relations(spec, radii); }));

  c.results = json::array();
  c.table.columns = {"tag", "radius", "residual", "exponent", "claimed", "bound", "pass"};
  for (const auto& r : reps) {
    c.results.push_back(to_json(r));
    for (std::size_t i = 0; i < r.radii.size(); ++i)
      c.table.add({r.tag, fmt(r.radii[i]), fmt(r.residuals[i]), fmt(r.fit.exponent), fmt(r.claimed), fmt(r.bound),
                   r.pass ? "1" : "0"});
  }
}

void cmd_local(Context& c, const Options& o) {
  c.config["model"] = o.model;
  c.config["format"] = o.format;
  c.results = json::array();
  c.table.columns = {"model", "kind", "value", "expected", "relative_error"};
  for (const auto& name : split(o.model, ',')) {
    SpaceForm m;
    if (name == "s3" || name == "S3") m = SpaceForm::S3;
    else if (name == "h3" || name == "H3") m = SpaceForm::H3;
    else throw UsageError("unknown model '" + name + "'");
    const SmallSphere s = stage("local/" + name, [&] { return small_sphere(m); });
    const std::array<std::pair<const char*, std::pair<double, double>>, 3> rows = {
        {{"c32", {s.c32, 1.0 / 20.0}}, {"c31", {s.c31, 3.0 / 10.0}}, {"c21", {s.c21, 1.0 / 6.0}}}};
    for (const auto& [k, v] : rows) {
      const double rel = std::abs(v.first - v.second) / v.second;
      c.results.push_back({{"model", name}, {"kind", k}, {"value", v.first}, {"expected", v.second}, {"relative_error", rel}});
      c.table.add({name, k, fmt(v.first), fmt(v.second), fmt(rel)});
    }
  }
}

std::string render(const Context& c, const std::string& format) {
  if (format == "json") {
    json doc;
    doc["artifact"] = "asymflat";
    doc["version"] = version();
    doc["command"] = c.command;
    doc["config"] = c.config;
    doc["results"] = c.results;
    return doc.dump(2) + "\n";
  }
  std::ostringstream os;
  os << "# asymflat " << version() << " " << c.command << "\n";
  os << "# config " << c.config.dump() << "\n";
  for (std::size_t i = 0; i < c.table.columns.size(); ++i) os << (i ? "," : "") << c.table.columns[i];
  os << "\n";
  for (const auto& r : c.table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  }
  return os.str();
}

}  // namespace

std::vector<double> parse_radii(const std::string& text) {
  std::vector<double> r;
  if (text.find(':') != std::string::npos) {
    auto p = split(text, ':');
    if (p.size() != 3 || p[2].empty() || p[2][0] != 'x')
      fail(ErrorKind::InvalidInput, "radius ladder must look like start:stop:xF");
    try {
      r = geometric_ladder(std::stod(p[0]), std::stod(p[1]), std::stod(p[2].substr(1)));
    } catch (const std::logic_error&) {
      fail(ErrorKind::InvalidInput, "bad radius ladder '" + text + "'");
    }
  } else {
    for (const auto& s : split(text, ',')) {
      try {
        r.push_back(to_double(s));
      } catch (const UsageError&) {
        fail(ErrorKind::InvalidInput, "bad radius '" + s + "'");
      }
    }
  }
  if (r.empty()) fail(ErrorKind::InvalidInput, "empty radius list");
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0.0) || !std::isfinite(r[i])) fail(ErrorKind::InvalidInput, "radii must be positive");
    if (i && !(r[i] > r[i - 1])) fail(ErrorKind::InvalidInput, "radii must be strictly increasing");
  }
  return r;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Asymptotic invariants, foliations and stability of asymptotically flat 3-manifolds"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* s, bool with_radii = true) {
    s->add_option("--metric", o.metric, "metric spec: inline JSON or file path")->required();
    if (with_radii) s->add_option("--radii", o.radii, "radius list a,b,c or ladder start:stop:xF")->required();
    s->add_option("--out", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    s->add_option("-o,--output", o.output, "output file (default stdout)");
  };
  auto solver = [&](CLI::App* s) {
    s->add_option("--condition", o.condition, "cmc, const-tilde-k, tilde-k-ratio or fb-cmc");
    s->add_option("--lmax", o.lmax, "graph harmonic degree");
    s->add_option("--lquad", o.lquad, "quadrature degree (0: 2 lmax + 8)");
    s->add_option("--tol", o.tol, "sup-norm residual tolerance");
    s->add_option("--max-iter", o.max_iter);
    s->add_option("--damping", o.damping, "center update damping");
    s->add_option("--theta", o.theta, "graph scaling exponent");
  };

  auto* mass = app.add_subcommand("mass", "ADM mass flux series");
  auto* center = app.add_subcommand("center", "center of mass flux series");
  auto* def = app.add_subcommand("deficit", "isoperimetric deficit series");
  auto* fol = app.add_subcommand("foliate", "leaf sweep and geometric center");
  auto* spec = app.add_subcommand("spectrum", "Jacobi spectra of leaves");
  auto* ver = app.add_subcommand("verify", "asymptotic expansions and integral identities");
  auto* loc = app.add_subcommand("local", "small-sphere coefficients in space forms");
  for (auto* s : {mass, center, def, ver}) {
    common(s);
    s->add_option("--lquad", o.lquad, "quadrature degree");
  }
  for (auto* s : {mass, center, def}) s->add_flag("--two-term", o.two_term, "two-term extrapolation model");
  def->add_option("--kinds", o.kinds, "comma list of J32, J31, J21, RelJ32");
  def->add_option("--r0", o.r0, "inner volume radius");
  common(fol);
  solver(fol);
  fol->add_option("--leaf-dir", o.leaf_dir, "write one JSON file per leaf");
  common(spec);
  solver(spec);
  spec->add_option("--basis", o.basis, "eigenfunction harmonic degree");
  spec->add_option("--nev", o.nev, "eigenvalues per leaf");
  ver->add_option("--set", o.set, "all, h-expansion, kh, moment, integration, volume-area");
  ver->add_option("--center", o.a, "sphere center a (three numbers)")->expected(3);
  loc->add_option("--model", o.model, "s3, h3 or both");
  loc->add_option("--out", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
  loc->add_option("-o,--output", o.output, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  Context c;
  const std::map<CLI::App*, std::function<void(Context&, const Options&)>> table = {
      {mass, cmd_mass}, {center, cmd_center}, {def, cmd_deficit}, {fol, cmd_foliate},
      {spec, cmd_spectrum}, {ver, cmd_verify}, {loc, cmd_local}};
  try {
    CLI::App* sub = app.get_subcommands().front();
    c.command = sub->get_name();
    table.at(sub)(c, o);
    const std::string text = render(c, o.format);
    if (o.output.empty()) {
      out << text;
    } else {
      stage("write", [&] {
        write_text_file(o.output, text);
        return 0;
      });
    }
  } catch (const UsageError& e) {
    err << "asymflat: " << e.what() << "\n";
    return 1;
  } catch (const StageError& e) {
    err << "asymflat: stage " << e.stage << " failed: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "asymflat: stage " << c.command << " failed: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace asymflat
