#pragma once

// Closed-form security quantities. All logarithms are base 2, so entropies
// are in bits and 2^(-H) is a guessing probability.

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "diqpq/bases_povm.hpp"
#include "diqpq/errors.hpp"

namespace diqpq {

// Honest conclusive fraction: 1 - cos(theta).
inline double conclusive_fraction(const Theta& theta) { return theta.one_minus_cos(); }

// Best per-bit guessing probability of a dishonest Alice: 1/2 + 1/2 sin(theta).
inline double helstrom_bound(const Theta& theta) { return 0.5 + 0.5 * theta.sin(); }

// Per-bit data-privacy rate: k log2(2 / (1 + sin theta)).
inline double lambda_bound(const Theta& theta, std::size_t k) {
  if (k == 0) throw ContractViolation("lambda_bound: k must be positive");
  if (theta.sin() == 1.0) return 0.0;
  return static_cast<double>(k) * std::log2(2.0 / (1.0 + theta.sin()));
}

// N k log2(2 / (1 + sin theta)), defined as lambda_bound * N so the identity
// between the two is exact.
inline double data_privacy_entropy(const Theta& theta, std::size_t k, std::size_t N) {
  return lambda_bound(theta, k) * static_cast<double>(N);
}

// Per-index user-privacy rate: k log2(1 / (1 - cos theta)). Returns +infinity
// when the value overflows (theta so close to 0 that 1 - cos theta vanishes).
inline double delta_bound(const Theta& theta, std::size_t k) {
  if (k == 0) throw ContractViolation("delta_bound: k must be positive");
  const double omc = theta.one_minus_cos();
  if (omc == 1.0) return 0.0;
  const double v = static_cast<double>(k) * -std::log2(omc);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

// l k log2(1 / (1 - cos theta)) = delta_bound * l. Saturates to +infinity
// like delta_bound.
inline double user_privacy_entropy(const Theta& theta, std::size_t k, std::size_t l) {
  return delta_bound(theta, k) * static_cast<double>(l);
}

struct SecuritySummary {
  double theta = 0.0;
  std::size_t k = 0, N = 0, l = 0;
  double data_privacy_entropy = 0.0;  // bits
  double lambda_bound = 0.0;
  double user_privacy_entropy = 0.0;  // bits
  double delta_bound = 0.0;
  double conclusive_fraction = 0.0;
  double helstrom_bound = 0.0;
};

inline SecuritySummary security_summary(const Theta& theta, std::size_t k, std::size_t N,
                                        std::size_t l) {
  SecuritySummary s;
  s.theta = theta.radians();
  s.k = k;
  s.N = N;
  s.l = l;
  s.lambda_bound = lambda_bound(theta, k);
  s.data_privacy_entropy = data_privacy_entropy(theta, k, N);
  s.delta_bound = delta_bound(theta, k);
  s.user_privacy_entropy = user_privacy_entropy(theta, k, l);
  s.conclusive_fraction = conclusive_fraction(theta);
  s.helstrom_bound = helstrom_bound(theta);
  return s;
}

struct SweepRow {
  double theta = 0.0;
  double conclusive = 0.0;  // 1 - cos
  double helstrom = 0.0;    // 1/2 + 1/2 sin
  double lambda = 0.0;
  double delta = 0.0;
};

// n evenly spaced points (i + 1) * (pi/2) / n, i = 0..n-1, ending at pi/2.
inline std::vector<double> default_theta_grid(std::size_t n) {
  if (n == 0) throw ContractViolation("default_theta_grid: need at least one point");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = i + 1 == n ? std::numbers::pi / 2
                      : static_cast<double>(i + 1) * (std::numbers::pi / 2) / static_cast<double>(n);
  return g;
}

inline std::vector<SweepRow> sweep_theta(std::span<const double> grid, std::size_t k = 1) {
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (double t : grid) {
    const Theta theta(t);
    rows.push_back({theta.radians(), conclusive_fraction(theta), helstrom_bound(theta),
                    lambda_bound(theta, k), delta_bound(theta, k)});
  }
  return rows;
}

}  // namespace diqpq
