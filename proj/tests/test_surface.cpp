#include <cmath>
#include <numbers>

#include "asymflat/surface.hpp"
#include "doctest.h"

using namespace asymflat;
using std::numbers::pi;

namespace {

// antiderivative of s^2 (1 + a/s)^6
double schw_volume_primitive(double a, double s) {
  return s * s * s / 3 + 3 * a * s * s + 15 * a * a * s + 20 * std::pow(a, 3) * std::log(s) - 15 * std::pow(a, 4) / s -
         3 * std::pow(a, 5) / (s * s) - std::pow(a, 6) / (3 * s * s * s);
}

}  // namespace

TEST_CASE("grid weights and harmonic orthonormality") {
  auto g = make_grid(Domain::Sphere, 16);
  CHECK(std::abs(g.total_weight() - 4 * pi) < 1e-13);
  auto hg = make_grid(Domain::Hemisphere, 16);
  CHECK(std::abs(hg.total_weight() - 2 * pi) < 1e-13);

  auto t = make_table(g, 8);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(t.size(), t.size());
  for (int i = 0; i < g.size(); ++i) gram += g.weight[i] * t.y.row(i).transpose() * t.y.row(i);
  CHECK((gram - Eigen::MatrixXd::Identity(t.size(), t.size())).cwiseAbs().maxCoeff() < 1e-13);

  // (Y_2^1)^2 integrates to one
  int k = sh_index(2, 1);
  std::vector<double> v(g.size());
  ShPoint p;
  for (int i = 0; i < g.size(); ++i) {
    sh_eval(2, g.theta[g.ring(i)], g.phi[g.column(i)], p);
    v[i] = p.y[k] * p.y[k];
  }
  CHECK(integrate(g, v) == doctest::Approx(1.0).epsilon(1e-14));

  // even harmonics are orthogonal on the hemisphere with norm 1/2
  auto ht = make_table(hg, 8);
  Eigen::MatrixXd hgram = Eigen::MatrixXd::Zero(ht.size(), ht.size());
  for (int i = 0; i < hg.size(); ++i) hgram += hg.weight[i] * ht.y.row(i).transpose() * ht.y.row(i);
  CHECK((2.0 * hgram - Eigen::MatrixXd::Identity(ht.size(), ht.size())).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("harmonic derivatives match differences") {
  ShPoint p, a, b;
  const double th = 0.7, ph = 2.3, h = 1e-5;
  sh_eval(6, th, ph, p);
  sh_eval(6, th + h, ph, a);
  sh_eval(6, th - h, ph, b);
  CHECK(((a.y - b.y) / (2 * h) - p.yt).abs().maxCoeff() < 1e-8);
  CHECK(((a.yt - b.yt) / (2 * h) - p.ytt).abs().maxCoeff() < 1e-7);
  CHECK(((a.yp - b.yp) / (2 * h) - p.ytp).abs().maxCoeff() < 1e-7);
  sh_eval(6, th, ph + h, a);
  sh_eval(6, th, ph - h, b);
  CHECK(((a.y - b.y) / (2 * h) - p.yp).abs().maxCoeff() < 1e-8);
  CHECK(((a.yp - b.yp) / (2 * h) - p.ypp).abs().maxCoeff() < 1e-7);
}

TEST_CASE("poisson solve inverts Delta + 2 and rejects the kernel") {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(sh_count(4));
  f[sh_index(0, 0)] = 2.0;
  f[sh_index(3, -2)] = -10.0;
  auto u = poisson_solve(f, Domain::Sphere);
  CHECK(u[sh_index(0, 0)] == doctest::Approx(1.0));
  CHECK(u[sh_index(3, -2)] == doctest::Approx(1.0));
  f[sh_index(1, 1)] = 1e-3;
  CHECK_THROWS_AS(poisson_solve(f, Domain::Sphere), Error);
  f[sh_index(1, 1)] = 0.0;
  f[sh_index(1, 0)] = 1e-3;  // odd on the hemisphere, not part of the kernel there
  CHECK_NOTHROW(poisson_solve(f, Domain::Hemisphere));
}

TEST_CASE("flat round sphere") {
  auto g = make_grid(Domain::Sphere, 12);
  auto s = round_surface(Vector3d::Zero(), 3.0);
  auto d = extrinsic(flat_spec(), s, g, CurvatureLevel::Full);
  for (const auto& n : d.nodes) {
    CHECK(n.H == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(n.K == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
    CHECK(std::abs(n.H * n.H - n.W2 - 2.0 * n.K) < 1e-14);
  }
  CHECK(std::abs(gauss_bonnet(g, d) - 4 * pi) < 1e-12);
  auto m = measures(flat_spec(), s, g);
  CHECK(m.area == doctest::Approx(36 * pi).epsilon(1e-14));
  CHECK(m.volume == doctest::Approx(36 * pi).epsilon(1e-12));
}

TEST_CASE("Schwarzschild coordinate sphere") {
  const double m = 1.0, rho = 10.0;
  auto spec = schwarzschild_spec(m);
  auto g = make_grid(Domain::Sphere, 12);
  auto s = round_surface(Vector3d::Zero(), rho);
  auto d = extrinsic(spec, s, g, CurvatureLevel::Ricci);
  const double x = m / (2 * rho);
  const double H = (2 / rho) * (1 - x) / std::pow(1 + x, 3);
  CHECK(H == doctest::Approx(0.1641293).epsilon(1e-6));
  for (const auto& n : d.nodes) CHECK(n.H == doctest::Approx(H).epsilon(1e-13));
  auto ms = measures(spec, s, g);
  const double A = 4 * pi * rho * rho * std::pow(1 + x, 4);
  CHECK(A == doctest::Approx(1527.4502).epsilon(1e-7));
  CHECK(ms.area == doctest::Approx(A).epsilon(1e-13));
  CHECK(std::abs(gauss_bonnet(g, d) - 4 * pi) < 1e-10);
  const double r0 = default_r0(spec), a = m / 2;
  const double V = 4 * pi * r0 * r0 * r0 / 3 + 4 * pi * (schw_volume_primitive(a, rho) - schw_volume_primitive(a, r0));
  CHECK(ms.volume == doctest::Approx(V).epsilon(1e-13));
}

TEST_CASE("perturbed graph in a perturbed metric") {
  auto spec = eps_as_spec(1.0, Vector3d(1.0, 2.0, 0.0), 2.0, 1.5, 1.0);
  spec.perturbation.push_back({0, 1, 0.3, {1, 0, 1}, 3.0});
  auto g = make_grid(Domain::Sphere, 40);
  auto s = round_surface(Vector3d(1.0, -0.5, 0.3), 12.0, Domain::Sphere, 4);
  s.coeffs[sh_index(2, 1)] = 1.5;
  s.coeffs[sh_index(3, -3)] = -0.8;
  s.coeffs[sh_index(4, 0)] = 0.6;
  validate(s);
  auto d = extrinsic(spec, s, g, CurvatureLevel::Ricci);
  CHECK(std::abs(gauss_bonnet(g, d) - 4 * pi) < 1e-8);
  for (const auto& n : d.nodes) CHECK(std::abs(n.H * n.H - n.W2 - 2.0 * n.K) < 1e-13);

  // flat volume against an independent dense quadrature of R^3 / 3
  auto fine = make_grid(Domain::Sphere, 60);
  ShPoint p;
  std::vector<double> r3(fine.size());
  for (int i = 0; i < fine.size(); ++i) {
    sh_eval(4, fine.theta[fine.ring(i)], fine.phi[fine.column(i)], p);
    double R = s.rho + s.scale() * p.y.matrix().dot(s.coeffs);
    r3[i] = R * R * R / 3;
  }
  CHECK(measures(flat_spec(), s, g).volume == doctest::Approx(integrate(fine, r3)).epsilon(1e-12));
}

TEST_CASE("hemispheres: Gauss-Bonnet with boundary, free boundary defect") {
  auto g = make_grid(Domain::Hemisphere, 24);
  auto s = round_surface(Vector3d::Zero(), 5.0, Domain::Hemisphere, 4);
  auto d = extrinsic(flat_spec(), s, g, CurvatureLevel::Ricci);
  CHECK(std::abs(gauss_bonnet(g, d) - 2 * pi) < 1e-12);
  CHECK(free_boundary_defect(d) < 1e-14);
  CHECK(measures(flat_spec(), s, g, d).boundary_length == doctest::Approx(10 * pi).epsilon(1e-14));

  auto hs = half_schwarzschild_spec(1.0, Vector3d(3.0, 0.0, 0.0));
  auto t = round_surface(Vector3d(2.0, 1.0, 0.0), 30.0, Domain::Hemisphere, 4);
  t.coeffs[sh_index(2, 2)] = 2.0;
  t.coeffs[sh_index(4, 2)] = -1.0;
  auto e = extrinsic(hs, t, g, CurvatureLevel::Ricci);
  CHECK(std::abs(gauss_bonnet(g, e) - 2 * pi) < 1e-9);
  CHECK(free_boundary_defect(e) < 1e-13);

  t.coeffs[sh_index(3, 0)] = 1.0;
  CHECK_THROWS_AS(validate(t), Error);
  auto o = extrinsic(hs, t, g, CurvatureLevel::Ricci);
  CHECK(free_boundary_defect(o) > 1e-3);
}

TEST_CASE("surface errors") {
  auto s = round_surface(Vector3d::Zero(), 10.0, Domain::Sphere, 2);
  s.coeffs[sh_index(2, 0)] = 100.0;
  CHECK_THROWS_AS(validate(s), Error);
  auto g = make_grid(Domain::Sphere, 8);
  auto in = round_surface(Vector3d::Zero(), 3.0);
  CHECK_THROWS_AS(extrinsic(schwarzschild_spec(1.0), in, g), Error);
}
