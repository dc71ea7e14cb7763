#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library: vectors and matrices are plain real arrays, and spectra
// come from a direct quadratic solve.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace oracle {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

inline Vec2 rot(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

inline Mat2 outer(const Vec2& a, double scale = 1.0) {
  return {{{scale * a[0] * a[0], scale * a[0] * a[1]}, {scale * a[1] * a[0], scale * a[1] * a[1]}}};
}

// Smallest root of det(M - x I) = 0 for a real symmetric M.
inline double min_eigenvalue(const Mat2& m) {
  const double tr = m[0][0] + m[1][1];
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double disc = std::max(0.0, tr * tr / 4.0 - det);
  return tr / 2.0 - std::sqrt(disc);
}

inline double max_eigenvalue(const Mat2& m) {
  const double tr = m[0][0] + m[1][1];
  const double det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  const double disc = std::max(0.0, tr * tr / 4.0 - det);
  return tr / 2.0 + std::sqrt(disc);
}

// The three elements of the a = 0 discrimination POVM with scale alpha:
//   D0 = alpha (sin t|0> - cos t|1>)(...)^T, D1 = alpha |1><1|, D2 = I - D0 - D1.
struct ScaledPovm {
  Mat2 d0, d1, d2;
};

inline ScaledPovm scaled_povm(double theta, double alpha) {
  ScaledPovm p;
  p.d0 = outer({std::sin(theta), -std::cos(theta)}, alpha);
  p.d1 = outer({0.0, 1.0}, alpha);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) p.d2[i][j] = (i == j ? 1.0 : 0.0) - p.d0[i][j] - p.d1[i][j];
  return p;
}

// Brute force: largest alpha on the grid [0, hi] with step `step` keeping all
// three elements PSD.
inline double largest_psd_alpha(double theta, double hi, double step) {
  double best = 0.0;
  for (double a = 0.0; a <= hi; a += step) {
    const ScaledPovm p = scaled_povm(theta, a);
    if (min_eigenvalue(p.d0) >= -1e-12 && min_eigenvalue(p.d1) >= -1e-12 &&
        min_eigenvalue(p.d2) >= -1e-12)
      best = a;
  }
  return best;
}

// Exact Pr(b, c | u, v) on |phi+> = (|00> + |11>)/sqrt(2) for the CHSH bases:
// 1/2 <beta_b|alpha_c>^2 for real vectors.
inline double chsh_joint(unsigned u, unsigned v, unsigned b, unsigned c) {
  const double pi8 = std::numbers::pi / 8;
  const double r = std::sqrt(0.5);
  const Vec2 bob[2][2] = {{{1.0, 0.0}, {0.0, 1.0}}, {{r, r}, {r, -r}}};
  const Vec2 alice[2][2] = {{{std::cos(pi8), std::sin(pi8)}, {-std::sin(pi8), std::cos(pi8)}},
                            {{std::cos(pi8), -std::sin(pi8)}, {std::sin(pi8), std::cos(pi8)}}};
  const double amp = dot(bob[v][b], alice[u][c]);
  return 0.5 * amp * amp;
}

// Win probability of a fixed (u, v) under a predicate over (u, v, b, c), by
// enumeration of the four output pairs.
template <typename Pred>
double chsh_win_probability(unsigned u, unsigned v, Pred win) {
  double p = 0.0;
  for (unsigned b = 0; b < 2; ++b)
    for (unsigned c = 0; c < 2; ++c)
      if (win(u, v, b, c)) p += chsh_joint(u, v, b, c);
  return p;
}

inline bool standard_chsh(unsigned u, unsigned v, unsigned b, unsigned c) {
  return (b ^ c) == (u & v);
}

inline double binomial_sigma(double p, double n) { return std::sqrt(p * (1.0 - p) / n); }

}  // namespace oracle
