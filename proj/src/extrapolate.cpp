#include "asymflat/extrapolate.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "asymflat/error.hpp"

namespace asymflat {

namespace {

struct Linear {
  Eigen::VectorXd coef;
  double ssr;
};

// linear least squares for fixed rate on the scaled abscissa x = r / rmax
Linear solve_fixed(const Eigen::VectorXd& x, const Eigen::VectorXd& v, double a, int terms) {
  const int n = x.size();
  Eigen::MatrixXd A(n, terms + 1);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    for (int k = 0; k < terms; ++k) A(i, k + 1) = std::pow(x[i], -(a + k));
  }
  Linear out;
  out.coef = A.colPivHouseholderQr().solve(v);
  out.ssr = (A * out.coef - v).squaredNorm();
  return out;
}

}  // namespace

PowerFit extrapolate(const std::vector<double>& r, const std::vector<double>& v, bool two_term) {
  if (r.size() != v.size()) fail(ErrorKind::InvalidInput, "radii and values differ in length");
  if (r.size() < 4) fail(ErrorKind::TooFewSamples, "extrapolation needs at least 4 samples");
  const int n = static_cast<int>(r.size());
  const int terms = two_term ? 2 : 1;
  double rmax = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!(r[i] > 0.0) || !std::isfinite(v[i])) fail(ErrorKind::InvalidInput, "non-finite sample in series");
    rmax = std::max(rmax, r[i]);
  }
  Eigen::VectorXd x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x[i] = r[i] / rmax;
    y[i] = v[i];
  }

  PowerFit fit;
  fit.samples = n;
  // constant series
  const double spread = y.maxCoeff() - y.minCoeff();
  if (spread <= 1e-15 * std::max(1.0, y.cwiseAbs().maxCoeff())) {
    fit.limit = y.mean();
    fit.rate = 0.0;
    return fit;
  }

  auto ssr = [&](double a) { return solve_fixed(x, y, a, terms).ssr; };
  // coarse scan in log rate
  // two-term fits become degenerate as the rate goes to zero; their scan starts at 1/2
  const int M = 240;
  const double amin = two_term ? 0.5 : 0.02;
  double best_a = 1.0, best = INFINITY;
  std::vector<double> grid(M);
  for (int k = 0; k < M; ++k) {
    grid[k] = amin * std::pow(10.0 / amin, double(k) / (M - 1));
    double s = ssr(grid[k]);
    if (s < best) best = s, best_a = grid[k];
  }
  int kb = int(std::find(grid.begin(), grid.end(), best_a) - grid.begin());
  double lo = grid[std::max(0, kb - 1)], hi = grid[std::min(M - 1, kb + 1)];
  // golden section
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
  double fc = ssr(c), fd = ssr(d);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    if (fc < fd) {
      hi = d, d = c, fd = fc;
      c = hi - gr * (hi - lo), fc = ssr(c);
    } else {
      lo = c, c = d, fc = fd;
      d = lo + gr * (hi - lo), fd = ssr(d);
    }
  }
  double a = 0.5 * (lo + hi);
  Linear lin = solve_fixed(x, y, a, terms);

  // Gauss-Newton polish on (limit, coeffs, rate)
  if (!two_term) {
    Eigen::Vector3d p(lin.coef[0], lin.coef[1], a);
    double cur = lin.ssr;
    for (int it = 0; it < 50; ++it) {
      Eigen::MatrixXd J(n, 3);
      Eigen::VectorXd res(n);
      for (int i = 0; i < n; ++i) {
        double xa = std::pow(x[i], -p[2]);
        res[i] = p[0] + p[1] * xa - y[i];
        J(i, 0) = 1.0;
        J(i, 1) = xa;
        J(i, 2) = -p[1] * xa * std::log(x[i]);
      }
      Eigen::Vector3d step = J.colPivHouseholderQr().solve(-res);
      Eigen::Vector3d q = p + step;
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        double e = q[0] + q[1] * std::pow(x[i], -q[2]) - y[i];
        s += e * e;
      }
      if (!(s <= cur) || !(q[2] > 0.0)) break;
      bool done = step.cwiseAbs().maxCoeff() <= 1e-15 * std::max(1.0, q.cwiseAbs().maxCoeff());
      p = q;
      cur = s;
      if (done) break;
    }
    lin.coef[0] = p[0];
    lin.coef[1] = p[1];
    lin.ssr = cur;
    a = p[2];
  }
  fit.limit = lin.coef[0];
  fit.rate = a;
  fit.coeff = lin.coef[1] * std::pow(rmax, a);
  if (two_term) fit.coeff2 = lin.coef[2] * std::pow(rmax, a + 1.0);
  fit.residual = std::sqrt(lin.ssr / n);

  // tail monotonicity in order of increasing radius
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int p, int q) { return r[p] < r[q]; });
  int start = std::max(0, n - 4);
  int sign = 0;
  for (int i = start + 1; i < n; ++i) {
    double dv = v[idx[i]] - v[idx[i - 1]];
    int s = (dv > 0) - (dv < 0);
    if (s == 0) continue;
    if (sign == 0) sign = s;
    else if (s != sign) fit.monotone_tail = false;
  }
  return fit;
}

ExponentFit fit_exponent(const std::vector<double>& r, const std::vector<double>& res, double floor) {
  if (r.size() != res.size() || r.size() < 2) fail(ErrorKind::TooFewSamples, "exponent fit needs two samples");
  ExponentFit f;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < r.size(); ++i) {
    double a = std::abs(res[i]);
    if (a <= floor) continue;
    lx.push_back(std::log(r[i]));
    ly.push_back(std::log(a));
  }
  if (lx.size() < 2) {
    f.exact = true;
    f.exponent = -INFINITY;
    return f;
  }
  const int n = static_cast<int>(lx.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = lx[i];
    b[i] = ly[i];
  }
  Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  f.prefactor = std::exp(c[0]);
  f.exponent = c[1];
  f.residual = std::sqrt((A * c - b).squaredNorm() / n);
  return f;
}

std::vector<double> fit_inverse_powers(const std::vector<double>& r, const std::vector<double>& v, int p0, int n) {
  const int m = static_cast<int>(r.size());
  if (m < n) fail(ErrorKind::TooFewSamples, "fewer samples than fit terms");
  double rmax = *std::max_element(r.begin(), r.end());
  Eigen::MatrixXd A(m, n);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    for (int k = 0; k < n; ++k) A(i, k) = std::pow(r[i] / rmax, -(p0 + k));
    b[i] = v[i];
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = c[k] * std::pow(rmax, p0 + k);
  return out;
}

std::vector<double> geometric_ladder(double a, double b, double factor) {
  if (!(a > 0.0) || !(b >= a) || !(factor > 1.0)) fail(ErrorKind::InvalidInput, "bad geometric ladder");
  std::vector<double> out;
  for (double x = a; x <= b * (1.0 + 1e-12); x *= factor) out.push_back(x);
  return out;
}

}  // namespace asymflat
