#pragma once

#include <vector>

namespace asymflat {

// v(r) = limit + coeff r^-rate (+ coeff2 r^-(rate+1) for two-term fits)
struct PowerFit {
  double limit = 0.0;
  double coeff = 0.0;
  double coeff2 = 0.0;
  double rate = 0.0;
  double residual = 0.0;  // rms misfit
  bool monotone_tail = true;
  int samples = 0;
};

PowerFit extrapolate(const std::vector<double>& r, const std::vector<double>& v, bool two_term = false);

// log |res| = log prefactor + exponent log r
struct ExponentFit {
  double exponent = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;
  bool exact = false;  // every sample below the noise floor
};

ExponentFit fit_exponent(const std::vector<double>& r, const std::vector<double>& res, double floor = 0.0);

// least squares fit of v = sum_k a_k r^-(p0 + k), k = 0..n-1
std::vector<double> fit_inverse_powers(const std::vector<double>& r, const std::vector<double>& v, int p0, int n);

// a, a*f, a*f^2, ... up to b
std::vector<double> geometric_ladder(double a, double b, double factor);

}  // namespace asymflat
