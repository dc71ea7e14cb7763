#pragma once

// Exact 2x2 complex linear algebra for single-qubit states and operators.
//
// Everything here is closed form: eigenvalues come from the characteristic
// quadratic, never from an iterative solver. Structural checks (Hermiticity,
// normalization, positivity) use an absolute tolerance of 1e-12.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include "diqpq/errors.hpp"

namespace diqpq {

using Complex = std::complex<double>;

inline constexpr double kStructTol = 1e-12;

// Normalized vector a0|0> + a1|1>.
class PureState {
 public:
  PureState(Complex amp0, Complex amp1) : amp_{amp0, amp1} {
    if (!std::isfinite(amp0.real()) || !std::isfinite(amp0.imag()) ||
        !std::isfinite(amp1.real()) || !std::isfinite(amp1.imag()))
      throw ContractViolation("PureState: non-finite amplitude");
    if (std::abs(norm_sq() - 1.0) > kStructTol)
      throw ContractViolation("PureState: amplitudes are not normalized");
  }

  // Rescales (amp0, amp1) to unit norm.
  static PureState normalized(Complex amp0, Complex amp1) {
    const double n = std::sqrt(std::norm(amp0) + std::norm(amp1));
    if (!(n > 0.0) || !std::isfinite(n))
      throw ContractViolation("PureState::normalized: zero or non-finite vector");
    return PureState(amp0 / n, amp1 / n);
  }

  // cos(angle)|0> + sin(angle)|1>
  static PureState real_rotation(double angle) {
    return PureState(std::cos(angle), std::sin(angle));
  }

  Complex amp0() const noexcept { return amp_[0]; }
  Complex amp1() const noexcept { return amp_[1]; }
  Complex operator[](std::size_t i) const noexcept { return amp_[i]; }

  bool is_real(double tol = kStructTol) const noexcept {
    return std::abs(amp_[0].imag()) <= tol && std::abs(amp_[1].imag()) <= tol;
  }

 private:
  double norm_sq() const noexcept { return std::norm(amp_[0]) + std::norm(amp_[1]); }

  std::array<Complex, 2> amp_;
};

inline const PureState& ket0() {
  static const PureState s(1.0, 0.0);
  return s;
}
inline const PureState& ket1() {
  static const PureState s(0.0, 1.0);
  return s;
}
inline const PureState& ket_plus() {
  static const PureState s(M_SQRT1_2, M_SQRT1_2);
  return s;
}
inline const PureState& ket_minus() {
  static const PureState s(M_SQRT1_2, -M_SQRT1_2);
  return s;
}

// <a|b>
inline Complex inner(const PureState& a, const PureState& b) noexcept {
  return std::conj(a.amp0()) * b.amp0() + std::conj(a.amp1()) * b.amp1();
}

struct Operator2 {
  Complex m00{}, m01{}, m10{}, m11{};

  static Operator2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Operator2 zero() { return {}; }

  // |psi><psi|
  static Operator2 projector(const PureState& psi) {
    const Complex a = psi.amp0(), b = psi.amp1();
    return {a * std::conj(a), a * std::conj(b), b * std::conj(a), b * std::conj(b)};
  }

  Complex trace() const noexcept { return m00 + m11; }

  Operator2& operator+=(const Operator2& o) noexcept {
    m00 += o.m00; m01 += o.m01; m10 += o.m10; m11 += o.m11;
    return *this;
  }
  Operator2& operator-=(const Operator2& o) noexcept {
    m00 -= o.m00; m01 -= o.m01; m10 -= o.m10; m11 -= o.m11;
    return *this;
  }
  Operator2& operator*=(Complex s) noexcept {
    m00 *= s; m01 *= s; m10 *= s; m11 *= s;
    return *this;
  }

  friend Operator2 operator+(Operator2 a, const Operator2& b) noexcept { return a += b; }
  friend Operator2 operator-(Operator2 a, const Operator2& b) noexcept { return a -= b; }
  friend Operator2 operator*(Operator2 a, Complex s) noexcept { return a *= s; }
  friend Operator2 operator*(Complex s, Operator2 a) noexcept { return a *= s; }

  friend Operator2 operator*(const Operator2& a, const Operator2& b) noexcept {
    return {a.m00 * b.m00 + a.m01 * b.m10, a.m00 * b.m01 + a.m01 * b.m11,
            a.m10 * b.m00 + a.m11 * b.m10, a.m10 * b.m01 + a.m11 * b.m11};
  }

  // Entrywise max-abs distance.
  double max_abs_diff(const Operator2& o) const noexcept {
    return std::max({std::abs(m00 - o.m00), std::abs(m01 - o.m01),
                     std::abs(m10 - o.m10), std::abs(m11 - o.m11)});
  }
};

inline bool is_hermitian(const Operator2& op, double tol = kStructTol) noexcept {
  return std::abs(op.m01 - std::conj(op.m10)) <= tol &&
         std::abs(op.m00.imag()) <= tol && std::abs(op.m11.imag()) <= tol;
}

namespace detail {
inline void require_hermitian(const Operator2& op, const char* where) {
  if (!is_hermitian(op)) throw ContractViolation(std::string(where) + ": operator is not Hermitian");
}
}  // namespace detail

// Ascending eigenvalues of a Hermitian operator:
//   tr/2 -+ sqrt(((m00 - m11)/2)^2 + |m01|^2)
inline std::pair<double, double> eigenvalues_hermitian(const Operator2& op) {
  detail::require_hermitian(op, "eigenvalues_hermitian");
  const double a = op.m00.real();
  const double d = op.m11.real();
  const double mean = 0.5 * (a + d);
  const double radius = std::hypot(0.5 * (a - d), std::abs(op.m01));
  return {mean - radius, mean + radius};
}

// Unit eigenvector of a Hermitian operator for the given eigenvalue.
inline PureState eigenvector_hermitian(const Operator2& op, double lambda) {
  detail::require_hermitian(op, "eigenvector_hermitian");
  const double a = op.m00.real();
  const double d = op.m11.real();
  const Complex b = op.m01;
  // Rows of (op - lambda I) are (a - l, b) and (conj b, d - l); a kernel vector
  // is orthogonal to either row. Pick the better conditioned candidate.
  const Complex c1a = b, c1b = lambda - a;
  const Complex c2a = lambda - d, c2b = std::conj(b);
  const double n1 = std::norm(c1a) + std::norm(c1b);
  const double n2 = std::norm(c2a) + std::norm(c2b);
  if (std::max(n1, n2) < 1e-300) return ket0();  // op = lambda I
  return n1 >= n2 ? PureState::normalized(c1a, c1b) : PureState::normalized(c2a, c2b);
}

inline bool is_psd(const Operator2& op, double tol = kStructTol) {
  return is_hermitian(op, tol) && eigenvalues_hermitian(op).first >= -tol;
}

inline bool is_density(const Operator2& op, double tol = kStructTol) {
  return is_psd(op, tol) && std::abs(op.trace() - Complex(1.0)) <= tol;
}

// ||M||_1 = sum of |eigenvalues|.
inline double trace_norm(const Operator2& op) {
  detail::require_hermitian(op, "trace_norm");
  const auto [lo, hi] = eigenvalues_hermitian(op);
  return std::abs(lo) + std::abs(hi);
}

// <psi|op|psi>, real part. Exact for Hermitian operators.
inline double expectation(const Operator2& op, const PureState& psi) noexcept {
  const Complex a = psi.amp0(), b = psi.amp1();
  const Complex v = std::conj(a) * (op.m00 * a + op.m01 * b) +
                    std::conj(b) * (op.m10 * a + op.m11 * b);
  return v.real();
}

// |<a|b>|^2
inline double fidelity_pure(const PureState& a, const PureState& b) {
  return std::clamp(std::norm(inner(a, b)), 0.0, 1.0);
}

// Optimal probability of identifying which of two equiprobable states was
// prepared: 1/2 (1 + 1/2 ||rho - sigma||_1).
inline double helstrom_guess_probability(const Operator2& rho, const Operator2& sigma) {
  if (!is_density(rho) || !is_density(sigma))
    throw ContractViolation("helstrom_guess_probability: input is not a density operator");
  return 0.5 * (1.0 + 0.5 * trace_norm(rho - sigma));
}

// Measurement achieving helstrom_guess_probability: the eigenbasis of
// rho - sigma. `first` is the positive-eigenvalue vector ("guess rho"),
// `second` the negative one ("guess sigma").
inline std::pair<PureState, PureState> helstrom_measurement(const Operator2& rho,
                                                            const Operator2& sigma) {
  if (!is_density(rho) || !is_density(sigma))
    throw ContractViolation("helstrom_measurement: input is not a density operator");
  const Operator2 diff = rho - sigma;
  if (trace_norm(diff) <= kStructTol)
    throw DegenerateInput("helstrom_measurement: rho and sigma are indistinguishable");
  const PureState pos = eigenvector_hermitian(diff, eigenvalues_hermitian(diff).second);
  // The second vector is the orthogonal complement, built directly so the pair
  // stays orthonormal even when lo == hi numerically.
  const PureState neg(-std::conj(pos.amp1()), std::conj(pos.amp0()));
  return {pos, neg};
}

}  // namespace diqpq
