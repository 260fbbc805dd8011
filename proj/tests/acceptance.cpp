// Acceptance suite: one PASS/FAIL line per criterion, indented detail lines below it.
// Exit status is 0 when every failing criterion is listed with --known-failure.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "asymflat/asymptotics.hpp"
#include "asymflat/foliation.hpp"
#include "asymflat/invariants.hpp"
#include "asymflat/stability.hpp"

using namespace asymflat;

namespace {

struct Criterion {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Criterion::check(bool ok, const char* fmt, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, ap);
  va_end(ap);
  lines.push_back(std::string(ok ? "ok   " : "FAIL ") + buf);
  pass = pass && ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool within(double v, double target, double rel) { return std::abs(v - target) <= rel * std::abs(target); }

const std::vector<double> kLadder = geometric_ladder(50.0, 800.0, 2.0);
const std::vector<double> kFluxLadder = geometric_ladder(100.0, 6400.0, 2.0);

void deficits(Criterion& c) {
  auto t0 = std::chrono::steady_clock::now();
  auto spec = schwarzschild_spec(1.0);
  for (auto k : {DeficitKind::J32, DeficitKind::J31, DeficitKind::J21}) {
    auto s = deficit_series(spec, k, kLadder, 24, std::nullopt, true);
    c.check(std::abs(s.fit.limit - 1.0) <= 1e-3 && s.fit.rate >= 0.8 && s.fit.rate <= 1.2,
            "%s limit %.6f (1 +- 1e-3), rate %.3f in [0.8, 1.2]", to_string(k).c_str(), s.fit.limit, s.fit.rate);
  }
  const double dt = seconds_since(t0);
  c.check(dt < 10.0, "runtime %.2f s < 10 s", dt);
}

void relative_deficit(Criterion& c) {
  auto t0 = std::chrono::steady_clock::now();
  auto s = deficit_series(half_schwarzschild_spec(1.0), DeficitKind::RelJ32, kLadder, 24, std::nullopt, true);
  c.check(std::abs(s.fit.limit - 0.5) <= 1e-3, "RelJ32 limit %.6f (0.5 +- 1e-3)", s.fit.limit);
  const double dt = seconds_since(t0);
  c.check(dt < 10.0, "runtime %.2f s < 10 s", dt);
}

void fluxes(Criterion& c) {
  auto m = mass_series(schwarzschild_spec(1.0), kFluxLadder, 32, true).fit.limit;
  c.check(std::abs(m - 1.0) <= 1e-6, "ADM mass %.9f (1 +- 1e-6)", m);

  auto C = center_series(schwarzschild_spec(2.0, Vector3d(3.0, 0.0, 0.0)), kFluxLadder, 32, true).limit();
  c.check((C - Vector3d(3.0, 0.0, 0.0)).cwiseAbs().maxCoeff() <= 1e-4, "center (%.7f, %.7f, %.7f) vs (3,0,0) +- 1e-4",
          C[0], C[1], C[2]);

  auto hs = half_schwarzschild_spec(1.0, Vector3d(3.0, 0.0, 0.0));
  auto hm = mass_series(hs, kFluxLadder, 32, true).fit.limit;
  c.check(std::abs(hm - 0.5) <= 1e-6, "half-space mass %.9f (0.5 +- 1e-6)", hm);
  auto hc = center_series(hs, kFluxLadder, 32, true).limit();
  c.check(std::abs(hc[0] - 3.0) <= 1e-4 && std::abs(hc[1]) <= 1e-4, "half-space center (%.7f, %.7f) vs (3,0) +- 1e-4",
          hc[0], hc[1]);
  auto fh = center_from_H_series(hs, kFluxLadder, 32, true).limit();
  const double gap = std::max(std::abs(fh[0] - hc[0]), std::abs(fh[1] - hc[1]));
  c.check(gap <= 1e-3, "center from H (%.7f, %.7f), gap %.2e <= 1e-3", fh[0], fh[1], gap);
}

void report(Criterion& c, const IdentityReport& r, const char* range, bool ok) {
  if (r.fit.exact)
    c.check(ok, "%-22s residual at roundoff on every radius", r.tag.c_str());
  else
    c.check(ok, "%-22s exponent %.3f (%s)", r.tag.c_str(), r.fit.exponent, range);
}

void expansions(Criterion& c) {
  auto sch = schwarzschild_spec(1.0);
  for (const auto& a : {Vector3d(0.0, 0.0, 0.0), Vector3d(2.0, 0.0, 0.0)}) {
    auto h = h_expansion_residual(sch, kLadder, a);
    report(c, h, "-4 +- 0.3", std::abs(h.fit.exponent + 4.0) <= 0.3);
  }

  auto eps = eps_as_spec(1.0, Vector3d(1.0, 2.0, 0.0), 2.0, 0.3, 1.0);
  eps.perturbation.push_back({0, 1, 0.7, {1, 0, 1}, 3.0});
  for (const auto* spec : {&sch, &eps}) {
    for (const auto& r : kh_relation_residual(*spec, kLadder)) {
      // the bracket remainder is the larger of two candidate orders
      bool ok = std::abs(r.fit.exponent - r.claimed) <= 0.3;
      if (!ok && !std::isnan(r.alternate)) ok = std::abs(r.fit.exponent - r.alternate) <= 0.3;
      char range[64];
      std::snprintf(range, sizeof range, "claimed %.2f +- 0.3", r.claimed);
      report(c, r, range, ok);
    }
  }

  auto mom = moment_identity(schwarzschild_spec(2.0, Vector3d(3.0, 0.0, 0.0)), kLadder);
  report(c, mom, "-1 +- 0.3", std::abs(mom.fit.exponent + 1.0) <= 0.3);
  const double mgap = (mom.limit - mom.target).norm() / mom.target.norm();
  c.check(mgap <= 1e-3, "moment limit %.4f vs -8 pi m C = %.4f, relative gap %.1e", mom.limit[0], mom.target[0], mgap);

  for (const auto& r : appendixA_relations(sch, kLadder)) report(c, r, "<= 1.2", r.fit.exact || r.fit.exponent <= 1.2);
  for (const auto& r : appendixA_relations(half_schwarzschild_spec(1.0), kLadder))
    report(c, r, "<= 1.2", r.fit.exact || r.fit.exponent <= 1.2);

  auto odd = half_schwarzschild_spec(1.0, Vector3d(3.0, 1.0, 0.0));
  odd.perturbation.push_back({0, 2, 0.8, {1, 0, 0}, 2.5});
  auto ibp = integration_identity_report(odd, kLadder, Vector2d(1.0, -2.0), 1e-9);
  double worst = 0.0;
  for (double v : ibp.residuals) worst = std::max(worst, v);
  c.check(ibp.pass, "integration by parts, worst relative gap %.1e <= 1e-9", worst);
}

void foliations(Criterion& c) {
  SolverConfig cfg;
  double worst = 0.0;
  auto track = [&](const SweepResult& sw) {
    for (const auto& l : sw.leaves) worst = std::max(worst, l.residual);
  };
  auto timed = [&](const char* name, const MetricSpec& spec, Condition cond, const std::vector<double>& rhos) {
    cfg.condition = cond;
    auto t0 = std::chrono::steady_clock::now();
    auto sw = sweep(spec, rhos, cfg);
    const double dt = seconds_since(t0);
    c.check(dt < 60.0, "%s sweep %.1f s < 60 s", name, dt);
    c.check(sw.nested(), "%s nesting clean", name);
    track(sw);
    return sw;
  };

  auto s = timed("Schwarzschild CMC", schwarzschild_spec(1.0), Condition::CMC, {50.0, 100.0, 200.0});
  double off = 0.0;
  for (const auto& l : s.leaves) off = std::max(off, l.center().norm());
  c.check(off <= 1e-9, "Schwarzschild leaf centers |a| <= %.1e (1e-9)", off);

  auto eps = eps_as_spec(1.0, Vector3d(1.0, 2.0, 0.0), 2.0, 1.5, 1.0);
  eps.perturbation.push_back({0, 1, 0.2, {1, 1, 0}, 3.0});
  auto e = timed("eps-aS const K~", eps, Condition::ConstTildeK, {50.0, 100.0, 200.0, 400.0});
  const double egap = (e.geometric_center - Vector3d(1.0, 2.0, 0.0)).cwiseAbs().maxCoeff();
  c.check(egap <= 1e-2, "eps-aS C_F (%.5f, %.5f, %.5f) vs (1,2,0), gap %.1e <= 1e-2", e.geometric_center[0],
          e.geometric_center[1], e.geometric_center[2], egap);

  auto hs = half_schwarzschild_spec(1.0, Vector3d(3.0, 0.0, 0.0));
  auto h = timed("half-Schwarzschild FB-CMC", hs, Condition::FreeBoundaryCMC, {50.0, 100.0, 200.0, 400.0});
  double fb = 0.0;
  for (const auto& l : h.leaves) fb = std::max(fb, l.fb_defect);
  c.check(fb <= 1e-8, "free boundary defect %.1e <= 1e-8", fb);
  auto flux = center_series(hs, kFluxLadder, 32, true).limit();
  const double hgap = std::max(std::abs(h.geometric_center[0] - flux[0]), std::abs(h.geometric_center[1] - flux[1]));
  c.check(hgap <= 1e-2, "half-space C_F (%.5f, %.5f) vs flux (%.5f, %.5f), gap %.1e <= 1e-2", h.geometric_center[0],
          h.geometric_center[1], flux[0], flux[1], hgap);

  c.check(worst <= 1e-8, "worst leaf residual %.1e <= 1e-8", worst);
}

void spectra(Criterion& c) {
  const double rho = 7.0;
  auto sphere = round_surface(Vector3d::Zero(), rho);
  auto grid = make_grid(Domain::Sphere, 24);
  auto cmc = spectrum(assemble(flat_spec(), sphere, grid, OperatorKind::CMCJacobi, 8), 81);
  auto tk = spectrum(assemble(flat_spec(), sphere, grid, OperatorKind::TildeKJacobi, 8), 81);
  double e1 = 0.0, e2 = 0.0;
  for (int i = 0; i < 81; ++i) {
    const int l = sh_degree(i);
    const double ll = l * (l + 1.0) - 2.0;
    e1 = std::max(e1, std::abs(cmc.values[i] - ll / (rho * rho)));
    e2 = std::max(e2, std::abs(tk.values[i] - ll / (rho * rho * rho)));
  }
  c.check(e1 <= 1e-10, "flat sphere CMC Jacobi, l <= 8, max error %.1e", e1);
  c.check(e2 <= 1e-10, "flat sphere K~ Jacobi, l <= 8, max error %.1e", e2);
  auto hemi = round_surface(Vector3d::Zero(), rho, Domain::Hemisphere);
  auto neu = spectrum(assemble(flat_spec(), hemi, make_grid(Domain::Hemisphere, 24), OperatorKind::Laplacian, 8,
                               BoundaryCondition::Robin),
                      4);
  const double ne = std::abs(neu.constrained - 2.0 / (rho * rho));
  c.check(ne <= 1e-10, "flat hemisphere Neumann mean-zero eigenvalue, error %.1e vs 2/rho^2", ne);

  SolverConfig cfg;
  auto sch = schwarzschild_spec(1.0);
  bool stable = true;
  auto sweep_spectra = [&](const MetricSpec& spec, Condition cond) {
    cfg.condition = cond;
    auto sp = leaf_spectra(spec, sweep(spec, kLadder, cfg).leaves);
    for (const auto& l : sp.leaves) stable = stable && l.constrained > 0.0;
    return sp;
  };

  auto z = sweep_spectra(sch, Condition::CMC);
  c.check(within(z.lowest_fit[0], -2.0, 0.05) && within(z.lowest_fit[1], 9.0, 0.05),
          "zeta0 on CMC leaves = %.5f/rho^3 + %.5f m/rho^4 (-2, 9 within 5%%)", z.lowest_fit[0], z.lowest_fit[1]);
  auto k = sweep_spectra(sch, Condition::ConstTildeK);
  c.check(within(k.constrained_fit[0], 3.0, 0.2), "constrained K~ eigenvalue = %.5f m/rho^4 (3 within 20%%)",
          k.constrained_fit[0]);
  auto x = sweep_spectra(half_schwarzschild_spec(1.0), Condition::FreeBoundaryCMC);
  c.check(within(x.lowest_fit[0], -2.0, 0.05) && within(x.lowest_fit[1], 10.0, 0.05),
          "chi0 on FB-CMC leaves = %.5f/rho^2 + %.5f m/rho^3 (-2, 10 within 5%%)", x.lowest_fit[0], x.lowest_fit[1]);
  c.check(within(x.constrained_fit[0], 6.0, 0.2), "constrained FB-CMC eigenvalue = %.5f m/rho^3 (6 within 20%%)",
          x.constrained_fit[0]);
  auto eps = eps_as_spec(1.0, Vector3d(1.0, 2.0, 0.0), 2.0, 1.5, 1.0);
  sweep_spectra(eps, Condition::ConstTildeK);
  c.check(stable, "every leaf strictly stable (constrained eigenvalue > 0)");
}

Eigen::VectorXd unit(int L, int l, int m) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(sh_count(L));
  u[sh_index(l, m)] = 1.0;
  return u;
}

void variations(Criterion& c) {
  const std::vector<double> steps = {0.4, 0.2, 0.1, 0.05};
  auto track = [&](const char* name, const VariationTrack& t) {
    if (!t.valid) return;
    const bool order = std::isinf(t.order) || t.order >= 1.8;
    c.check(order && t.residual <= 1e-6, "%-36s order %5.2f, residual %.1e", name, t.order, t.residual);
  };
  auto sg = make_grid(Domain::Sphere, 24), hg = make_grid(Domain::Hemisphere, 24);

  auto r1 = variation_check(flat_spec(), round_surface(Vector3d::Zero(), 7.0), sg, unit(2, 2, 0), steps);
  track("flat sphere Y20: area", r1.area);
  track("flat sphere Y20: second", r1.second);

  auto sch = schwarzschild_spec(1.0);
  auto r2 = variation_check(sch, round_surface(Vector3d(3.0, 0.0, 0.0), 30.0), sg, unit(2, 1, 1), steps);
  track("Schwarzschild shifted Y21: area", r2.area);
  track("Schwarzschild shifted Y21: mean", r2.mean);
  auto r3 = variation_check(sch, round_surface(Vector3d::Zero(), 30.0), sg, unit(2, 2, 1), steps);
  track("Schwarzschild sphere Y21: second", r3.second);

  auto r4 = variation_check(flat_spec(), round_surface(Vector3d::Zero(), 7.0, Domain::Hemisphere), hg, unit(2, 2, 0),
                            {0.1, 0.05, 0.025, 0.0125});
  track("flat hemisphere Y20: area", r4.area);
  track("flat hemisphere Y20: second", r4.second);
  auto hs = half_schwarzschild_spec(1.0);
  auto r5 = variation_check(hs, round_surface(Vector3d::Zero(), 40.0, Domain::Hemisphere), hg, unit(2, 2, 0), steps);
  track("half-Schwarzschild Y20: area", r5.area);
  track("half-Schwarzschild Y20: second", r5.second);

  auto h40 = round_surface(Vector3d::Zero(), 40.0, Domain::Hemisphere);
  auto q1 = reilly_check(hs, h40, hg, unit(2, 2, 2));
  c.check(q1.relative <= 1e-6, "Reilly, half-Schwarzschild rho 40, Y22: gap %.1e", q1.relative);
  auto tilt = round_surface(Vector3d::Zero(), 30.0, Domain::Hemisphere, 3);
  tilt.coeffs[sh_index(1, 0)] = 0.8;
  tilt.coeffs[sh_index(3, 1)] = 0.5;
  Eigen::VectorXd f = unit(3, 1, 0);
  f[sh_index(2, 1)] = 0.3;
  f[sh_index(3, -2)] = 0.2;
  auto q2 = reilly_check(hs, tilt, hg, f);
  c.check(q2.relative <= 1e-6, "Reilly, half-Schwarzschild tilted graph: gap %.1e", q2.relative);
}

void small_spheres(Criterion& c) {
  for (auto model : {SpaceForm::S3, SpaceForm::H3}) {
    auto s = small_sphere(model);
    const char* name = model == SpaceForm::S3 ? "S3" : "H3";
    c.check(within(s.c32, 1.0 / 20, 0.01) && within(s.c31, 3.0 / 10, 0.01) && within(s.c21, 1.0 / 6, 0.01),
            "%s: c32 %.6f (1/20), c31 %.6f (3/10), c21 %.6f (1/6)", name, s.c32, s.c31, s.c21);
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--known-failure") == 0 && i + 1 < argc) known.insert(std::atoi(argv[++i]));

  const std::vector<std::pair<const char*, std::function<void(Criterion&)>>> suite = {
      {"deficits extrapolate to the mass", deficits},
      {"relative deficit on the half-space", relative_deficit},
      {"flux mass and center", fluxes},
      {"expansion orders and integral identities", expansions},
      {"foliation solver", foliations},
      {"Jacobi spectra", spectra},
      {"variation formulas and Reilly identity", variations},
      {"small-sphere coefficients", small_spheres},
  };

  int unexpected = 0;
  for (std::size_t i = 0; i < suite.size(); ++i) {
    Criterion c;
    const int id = static_cast<int>(i) + 1;
    try {
      suite[i].second(c);
    } catch (const std::exception& e) {
      c.check(false, "exception: %s", e.what());
    }
    const bool expected = known.count(id) > 0;
    std::printf("criterion %d: %s  %s%s\n", id, c.pass ? "PASS" : "FAIL", suite[i].first,
                !c.pass && expected ? "  [known failure]" : "");
    for (const auto& l : c.lines) std::printf("    %s\n", l.c_str());
    std::fflush(stdout);
    if (!c.pass && !expected) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
