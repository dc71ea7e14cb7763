#pragma once

// Measurement bases, the three-outcome unambiguous-discrimination POVMs used
// by Alice, and Born-rule sampling on a shared |phi+> pair.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "diqpq/errors.hpp"
#include "diqpq/qmath.hpp"
#include "diqpq/rng.hpp"

namespace diqpq {

// Key-basis angle, restricted to (0, pi/2]. cos, sin and 1 - cos are cached;
// at pi/2 they are snapped to exactly (0, 1, 1).
class Theta {
 public:
  explicit Theta(double radians) : radians_(radians) {
    if (!std::isfinite(radians) || !(radians > 0.0) ||
        radians > std::numbers::pi / 2 + kEndpointTol)
      throw DomainError("theta must lie in (0, pi/2], got " + std::to_string(radians));
    if (std::abs(radians - std::numbers::pi / 2) <= kEndpointTol) {
      radians_ = std::numbers::pi / 2;
      cos_ = 0.0;
      sin_ = 1.0;
      one_minus_cos_ = 1.0;
    } else {
      cos_ = std::cos(radians);
      sin_ = std::sin(radians);
      const double h = std::sin(0.5 * radians);
      one_minus_cos_ = 2.0 * h * h;
    }
  }

  double radians() const noexcept { return radians_; }
  double cos() const noexcept { return cos_; }
  double sin() const noexcept { return sin_; }
  double one_minus_cos() const noexcept { return one_minus_cos_; }

 private:
  static constexpr double kEndpointTol = 1e-15;

  double radians_;
  double cos_ = 0.0;
  double sin_ = 0.0;
  double one_minus_cos_ = 0.0;
};

// Two-outcome projective measurement; v0 is reported as outcome 0.
class MeasBasis {
 public:
  MeasBasis(PureState v0, PureState v1) : v_{v0, v1} {
    if (std::abs(inner(v0, v1)) > kStructTol)
      throw ContractViolation("MeasBasis: vectors are not orthogonal");
  }

  const PureState& v0() const noexcept { return v_[0]; }
  const PureState& v1() const noexcept { return v_[1]; }
  const PureState& operator[](unsigned outcome) const noexcept { return v_[outcome]; }

  bool is_real() const noexcept { return v_[0].is_real() && v_[1].is_real(); }

 private:
  std::array<PureState, 2> v_;
};

enum class PovmOutcome : unsigned { Conclusive0 = 0, Conclusive1 = 1, Inconclusive = 2 };

// Three PSD elements summing to the identity, labelled
// (conclusive-0, conclusive-1, inconclusive).
class Povm3 {
 public:
  explicit Povm3(const std::array<Operator2, 3>& elements) : e_(elements) {
    for (const auto& e : e_) {
      if (!is_hermitian(e)) throw ContractViolation("Povm3: element is not Hermitian");
      if (eigenvalues_hermitian(e).first < -kStructTol)
        throw ContractViolation("Povm3: element is not positive semidefinite");
    }
    if ((e_[0] + e_[1] + e_[2]).max_abs_diff(Operator2::identity()) > kStructTol)
      throw ContractViolation("Povm3: elements do not sum to the identity");
  }

  const Operator2& operator[](unsigned i) const noexcept { return e_[i]; }
  const std::array<Operator2, 3>& elements() const noexcept { return e_; }

  bool is_real() const noexcept {
    for (const auto& e : e_)
      if (std::abs(e.m01.imag()) > kStructTol) return false;
    return true;
  }

 private:
  std::array<Operator2, 3> e_;
};

// bit 0: {|0>, |1>}; bit 1: {|0'>, |1'>} with
//   |0'> = cos t|0> + sin t|1>,  |1'> = sin t|0> - cos t|1>.
inline MeasBasis key_basis(unsigned bit, const Theta& theta) {
  if (bit > 1) throw ContractViolation("key_basis: bit must be 0 or 1");
  if (bit == 0) return MeasBasis(ket0(), ket1());
  return MeasBasis(PureState(theta.cos(), theta.sin()), PureState(theta.sin(), -theta.cos()));
}

// {|0''>, |1''>}, halfway between the two key bases.
inline MeasBasis middle_basis(const Theta& theta) {
  const double c = std::cos(0.5 * theta.radians());
  const double s = std::sin(0.5 * theta.radians());
  return MeasBasis(PureState(c, s), PureState(s, -c));
}

// Largest alpha keeping the third element PSD.
inline double optimal_alpha(const Theta& theta) { return 1.0 / (1.0 + theta.cos()); }

// Unvalidated POVM elements for an arbitrary scale alpha.
//   a = 0: D0 = alpha |1'><1'|, D1 = alpha |1><1|, D2 = I - D0 - D1
//   a = 1: D'0 = alpha |0'><0'|, D'1 = alpha |0><0|, D'2 = I - D'0 - D'1
// D0 annihilates the a-labelled vector of the primed basis, D1 the
// a-labelled vector of the computational basis, so conclusive outcomes
// never err.
inline std::array<Operator2, 3> povm_elements(unsigned announced_bit, const Theta& theta,
                                              double alpha) {
  if (announced_bit > 1) throw ContractViolation("povm_elements: announced bit must be 0 or 1");
  const double c = theta.cos(), s = theta.sin();
  const PureState u0 = announced_bit == 0 ? PureState(s, -c) : PureState(c, s);
  const PureState u1 = announced_bit == 0 ? ket1() : ket0();
  const Operator2 d0 = Operator2::projector(u0) * alpha;
  const Operator2 d1 = Operator2::projector(u1) * alpha;
  return {d0, d1, Operator2::identity() - d0 - d1};
}

inline Povm3 build_povm(unsigned announced_bit, const Theta& theta) {
  return Povm3(povm_elements(announced_bit, theta, optimal_alpha(theta)));
}

// Pr(inconclusive) for the optimal POVM on either candidate state.
inline double inconclusive_probability(const Theta& theta) { return theta.cos(); }

struct OutcomeDistribution {
  std::array<double, 3> p{};
  double operator[](unsigned i) const noexcept { return p[i]; }
};

// Born probabilities <psi|E_j|psi>, with floating-point dust in
// [-1e-12, 0) clamped to zero.
inline OutcomeDistribution outcome_distribution(const Povm3& povm, const PureState& state) {
  OutcomeDistribution out;
  for (unsigned j = 0; j < 3; ++j) {
    const double v = expectation(povm[j], state);
    if (v < -kStructTol) throw ContractViolation("outcome_distribution: negative probability");
    out.p[j] = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

inline unsigned sample_index(const OutcomeDistribution& d, Rng& rng) {
  const double total = d.p[0] + d.p[1] + d.p[2];
  const double u = rng.uniform() * total;
  if (u < d.p[0]) return 0;
  if (u < d.p[0] + d.p[1]) return 1;
  return 2;
}

inline unsigned sample_basis(const MeasBasis& basis, const PureState& state, Rng& rng) {
  return rng.uniform() < fidelity_pure(basis.v0(), state) ? 0u : 1u;
}

struct EprOutcome {
  unsigned bob;
  unsigned alice;
};

// Bob measures his half of |phi+> first. For real-amplitude bases
// (<v| (x) I)|phi+> = |v>/sqrt(2), so each outcome has probability 1/2 and
// Alice's qubit collapses onto Bob's outcome vector.
inline PureState collapse_epr(const MeasBasis& bob_basis, Rng& rng, unsigned& bob_outcome) {
  if (!bob_basis.is_real()) throw UnsupportedInput("sample_epr: complex-amplitude basis");
  bob_outcome = rng.bit();
  return bob_basis[bob_outcome];
}

inline EprOutcome sample_epr(const MeasBasis& bob_basis, const MeasBasis& alice_basis, Rng& rng) {
  if (!alice_basis.is_real()) throw UnsupportedInput("sample_epr: complex-amplitude basis");
  unsigned b = 0;
  const PureState collapsed = collapse_epr(bob_basis, rng, b);
  return {b, sample_basis(alice_basis, collapsed, rng)};
}

inline EprOutcome sample_epr(const MeasBasis& bob_basis, const Povm3& alice_povm, Rng& rng) {
  if (!alice_povm.is_real()) throw UnsupportedInput("sample_epr: complex-amplitude POVM");
  unsigned b = 0;
  const PureState collapsed = collapse_epr(bob_basis, rng, b);
  return {b, sample_index(outcome_distribution(alice_povm, collapsed), rng)};
}

}  // namespace diqpq
