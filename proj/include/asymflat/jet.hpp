#pragma once

// Truncated multivariate Taylor arithmetic in three variables.
// A Jet<N> holds the Taylor coefficients of a function about a point up to
// total degree N, so derivatives come out exact to rounding.

#include <array>
#include <cmath>
#include <cstddef>

namespace asymflat {

namespace jet_detail {

constexpr int size_for(int n) { return (n + 1) * (n + 2) * (n + 3) / 6; }

template <int N>
struct Tables {
  static constexpr int S = size_for(N);
  std::array<std::array<int, 3>, S> exps{};
  std::array<int, S> degree{};
  std::array<double, S> factorial{};  // alpha!
  // index of alpha + e_i, or -1 beyond degree N
  std::array<std::array<int, 3>, S> up{};
  // product pairs (a, b, target) with exps[a] + exps[b] = exps[target]
  static constexpr int P = [] {
    int count = 0;
    for (int d = 0; d <= N; ++d)
      for (int i = d; i >= 0; --i)
        for (int j = d - i; j >= 0; --j) {
          int k = d - i - j;
          count += (i + 1) * (j + 1) * (k + 1);
        }
    return count;
  }();
  std::array<std::array<int, 3>, P> pairs{};

  constexpr int index_of(int a, int b, int c) const {
    for (int s = 0; s < S; ++s)
      if (exps[s][0] == a && exps[s][1] == b && exps[s][2] == c) return s;
    return -1;
  }

  constexpr Tables() {
    int s = 0;
    for (int d = 0; d <= N; ++d)
      for (int i = d; i >= 0; --i)
        for (int j = d - i; j >= 0; --j) {
          exps[s] = {i, j, d - i - j};
          degree[s] = d;
          ++s;
        }
    for (int t = 0; t < S; ++t) {
      double f = 1.0;
      for (int v = 0; v < 3; ++v)
        for (int q = 2; q <= exps[t][v]; ++q) f *= q;
      factorial[t] = f;
      for (int v = 0; v < 3; ++v) {
        auto e = exps[t];
        e[v] += 1;
        up[t][v] = (degree[t] + 1 <= N) ? index_of(e[0], e[1], e[2]) : -1;
      }
    }
    int p = 0;
    for (int t = 0; t < S; ++t)
      for (int a = 0; a < S; ++a) {
        int r0 = exps[t][0] - exps[a][0], r1 = exps[t][1] - exps[a][1], r2 = exps[t][2] - exps[a][2];
        if (r0 < 0 || r1 < 0 || r2 < 0) continue;
        pairs[p++] = {a, index_of(r0, r1, r2), t};
      }
  }
};

template <int N>
inline constexpr Tables<N> tables{};

}  // namespace jet_detail

template <int N, typename Scalar = double>
class Jet {
  static_assert(N >= 0, "jet order must be non-negative");

 public:
  static constexpr int order = N;
  static constexpr int size = jet_detail::size_for(N);
  std::array<Scalar, size> c{};

  Jet() = default;
  explicit Jet(Scalar value) { c[0] = value; }

  static Jet variable(int axis, Scalar value) {
    Jet j(value);
    if constexpr (N >= 1) j.c[1 + axis] = Scalar(1);
    return j;
  }

  Scalar value() const { return c[0]; }

  // partial derivative with multi-index (a, b, d)
  Scalar d(int a, int b = 0, int e = 0) const {
    const auto& T = jet_detail::tables<N>;
    int s = T.index_of(a, b, e);
    return s < 0 ? Scalar(0) : c[s] * T.factorial[s];
  }
  Scalar grad(int i) const {
    if constexpr (N >= 1) return c[1 + i];
    else return Scalar(0);
  }

  template <int M>
  Jet<M, Scalar> truncate() const {
    static_assert(M <= N);
    Jet<M, Scalar> r;
    for (int s = 0; s < Jet<M, Scalar>::size; ++s) r.c[s] = c[s];
    return r;
  }

  // derivative along axis i; the result is exact to order N-1
  Jet<(N > 0 ? N - 1 : 0), Scalar> diff(int i) const {
    static_assert(N >= 1);
    constexpr int M = N - 1;
    const auto& T = jet_detail::tables<N>;
    Jet<M, Scalar> r;
    for (int s = 0; s < Jet<M, Scalar>::size; ++s) {
      int u = T.up[s][i];
      r.c[s] = Scalar(T.exps[s][i] + 1) * c[u];
    }
    return r;
  }

  Jet& operator+=(const Jet& o) {
    for (int s = 0; s < size; ++s) c[s] += o.c[s];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int s = 0; s < size; ++s) c[s] -= o.c[s];
    return *this;
  }
  Jet& operator*=(Scalar k) {
    for (auto& v : c) v *= k;
    return *this;
  }
  Jet& operator+=(Scalar k) {
    c[0] += k;
    return *this;
  }
  Jet operator-() const {
    Jet r = *this;
    for (auto& v : r.c) v = -v;
    return r;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, Scalar k) { return a += k; }
  friend Jet operator+(Scalar k, Jet a) { return a += k; }
  friend Jet operator-(Jet a, Scalar k) { return a += -k; }
  friend Jet operator-(Scalar k, const Jet& a) { return -a + k; }
  friend Jet operator*(Jet a, Scalar k) { return a *= k; }
  friend Jet operator*(Scalar k, Jet a) { return a *= k; }
  friend Jet operator/(Jet a, Scalar k) { return a *= Scalar(1) / k; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    const auto& T = jet_detail::tables<N>;
    Jet r;
    for (const auto& p : T.pairs) r.c[p[2]] += a.c[p[0]] * b.c[p[1]];
    return r;
  }
  friend Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
};

// f(u) from the scaled derivatives t[k] = f^(k)(u0) / k!
template <int N, typename Scalar>
Jet<N, Scalar> compose(const Jet<N, Scalar>& u, const std::array<Scalar, N + 1>& t) {
  Jet<N, Scalar> du = u;
  du.c[0] = Scalar(0);
  Jet<N, Scalar> r(t[0]);
  Jet<N, Scalar> pw(Scalar(1));
  for (int k = 1; k <= N; ++k) {
    pw = pw * du;
    r += pw * t[k];
  }
  return r;
}

template <int N, typename Scalar>
Jet<N, Scalar> pow(const Jet<N, Scalar>& u, Scalar p) {
  std::array<Scalar, N + 1> t{};
  Scalar u0 = u.c[0];
  Scalar coef = Scalar(1);
  for (int k = 0; k <= N; ++k) {
    t[k] = coef * std::pow(u0, p - Scalar(k));
    coef *= (p - Scalar(k)) / Scalar(k + 1);
  }
  return compose(u, t);
}

template <int N, typename Scalar>
Jet<N, Scalar> reciprocal(const Jet<N, Scalar>& u) {
  std::array<Scalar, N + 1> t{};
  Scalar inv = Scalar(1) / u.c[0];
  Scalar v = inv;
  for (int k = 0; k <= N; ++k) {
    t[k] = (k % 2 ? -v : v);
    v *= inv;
  }
  return compose(u, t);
}

template <int N, typename Scalar>
Jet<N, Scalar> sqrt(const Jet<N, Scalar>& u) {
  return pow(u, Scalar(0.5));
}

template <int N, typename Scalar>
Jet<N, Scalar> ipow(const Jet<N, Scalar>& u, int k) {
  Jet<N, Scalar> r(Scalar(1));
  for (int i = 0; i < k; ++i) r = r * u;
  return r;
}

}  // namespace asymflat
