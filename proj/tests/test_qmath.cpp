#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "diqpq/bases_povm.hpp"
#include "diqpq/qmath.hpp"
#include "diqpq/rng.hpp"
#include "oracles.hpp"

using namespace diqpq;

namespace {

constexpr double kPi3 = std::numbers::pi / 3;

PureState random_state(Rng& rng) {
  // Real amplitudes cover every protocol path; add a phase on half the draws
  // so the complex code path is exercised too.
  const double angle = rng.uniform() * 2.0 * std::numbers::pi;
  const double phase = rng.bit() ? rng.uniform() * 2.0 * std::numbers::pi : 0.0;
  return PureState(std::cos(angle), std::polar(std::sin(angle), phase));
}

}  // namespace

TEST(Eigenvalues, Identity) {
  const auto [lo, hi] = eigenvalues_hermitian(Operator2::identity());
  EXPECT_DOUBLE_EQ(lo, 1.0);
  EXPECT_DOUBLE_EQ(hi, 1.0);
}

TEST(Eigenvalues, Projector) {
  const auto [lo, hi] = eigenvalues_hermitian(Operator2::projector(ket1()));
  EXPECT_NEAR(lo, 0.0, 1e-15);
  EXPECT_NEAR(hi, 1.0, 1e-15);
}

TEST(Eigenvalues, InconclusiveElementAtOptimalAlpha) {
  // (1 - alpha) -+ alpha cos(theta) with alpha = 1/(1 + cos) gives (0, 2/3).
  const Theta theta(kPi3);
  const Povm3 p = build_povm(0, theta);
  const auto [lo, hi] = eigenvalues_hermitian(p[2]);
  EXPECT_NEAR(lo, 0.0, 1e-10);
  EXPECT_NEAR(hi, 2.0 / 3.0, 1e-10);
  // Independent characteristic-polynomial solve.
  const auto d2 = oracle::scaled_povm(kPi3, 1.0 / (1.0 + std::cos(kPi3))).d2;
  EXPECT_NEAR(lo, oracle::min_eigenvalue(d2), 1e-12);
  EXPECT_NEAR(hi, oracle::max_eigenvalue(d2), 1e-12);
}

TEST(Eigenvalues, RejectsNonHermitian) {
  Operator2 op{1.0, 0.5, 0.0, 1.0};
  EXPECT_THROW(eigenvalues_hermitian(op), ContractViolation);
  EXPECT_THROW(trace_norm(op), ContractViolation);
}

TEST(Eigenvalues, SpectralReconstruction) {
  Rng rng(11);
  for (int t = 0; t < 500; ++t) {
    const double a = rng.uniform() * 4 - 2, d = rng.uniform() * 4 - 2;
    const Complex b(rng.uniform() * 2 - 1, rng.uniform() * 2 - 1);
    const Operator2 op{a, b, std::conj(b), d};
    const auto [lo, hi] = eigenvalues_hermitian(op);
    ASSERT_LE(lo, hi);
    const PureState vlo = eigenvector_hermitian(op, lo);
    const PureState vhi = eigenvector_hermitian(op, hi);
    const Operator2 rebuilt = Operator2::projector(vlo) * lo + Operator2::projector(vhi) * hi;
    ASSERT_LE(rebuilt.max_abs_diff(op), 1e-10) << "trial " << t;
  }
}

TEST(TraceNorm, Examples) {
  EXPECT_EQ(trace_norm(Operator2::zero()), 0.0);
  EXPECT_NEAR(trace_norm(Operator2::projector(ket0()) - Operator2::projector(ket1())), 2.0, 1e-15);
  const Theta theta(kPi3);
  const Operator2 diff =
      Operator2::projector(ket0()) - Operator2::projector(key_basis(1, theta).v0());
  EXPECT_NEAR(trace_norm(diff), 1.7320508075688772, 1e-10);
  // Pure-state identity: ||aa* - bb*||_1 = 2 sqrt(1 - |<a|b>|^2).
  const double ov = oracle::dot({1.0, 0.0}, oracle::rot(kPi3));
  EXPECT_NEAR(trace_norm(diff), 2.0 * std::sqrt(1.0 - ov * ov), 1e-10);
}

TEST(TraceNorm, ZeroIffZero) {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const PureState a = random_state(rng), b = random_state(rng);
    const Operator2 d = Operator2::projector(a) - Operator2::projector(b);
    const bool zero = d.max_abs_diff(Operator2::zero()) <= 1e-12;
    EXPECT_EQ(trace_norm(d) <= 1e-12, zero);
  }
  EXPECT_GT(trace_norm(Operator2{1e-6, 0.0, 0.0, 0.0}), 0.0);
}

TEST(Fidelity, Examples) {
  EXPECT_DOUBLE_EQ(fidelity_pure(ket0(), ket0()), 1.0);
  EXPECT_DOUBLE_EQ(fidelity_pure(ket0(), ket1()), 0.0);
  const Theta theta(kPi3);
  EXPECT_NEAR(fidelity_pure(ket0(), key_basis(1, theta).v0()), 0.25, 1e-12);
}

TEST(Fidelity, SymmetricAndBounded) {
  Rng rng(17);
  for (int t = 0; t < 1000; ++t) {
    const PureState a = random_state(rng), b = random_state(rng);
    const double f = fidelity_pure(a, b);
    ASSERT_GE(f, 0.0);
    ASSERT_LE(f, 1.0);
    ASSERT_NEAR(f, fidelity_pure(b, a), 1e-15);
  }
}

TEST(Fidelity, UnnormalizedInputRejected) {
  EXPECT_THROW(PureState(1.0, 1.0), ContractViolation);
}

// Fuchs-van de Graaf: 1 - sqrt(F) <= 1/2 ||a - b||_1 <= sqrt(1 - F).
TEST(Fidelity, TraceDistanceInequality) {
  Rng rng(23);
  for (int t = 0; t < 1000; ++t) {
    const PureState a = random_state(rng), b = random_state(rng);
    const double f = fidelity_pure(a, b);
    const double td = 0.5 * trace_norm(Operator2::projector(a) - Operator2::projector(b));
    ASSERT_LE(1.0 - std::sqrt(f), td + 1e-9);
    ASSERT_LE(td, std::sqrt(1.0 - f) + 1e-9);
  }
}

TEST(Density, EigenvaluesSumToOne) {
  Rng rng(29);
  for (int t = 0; t < 500; ++t) {
    const double w = rng.uniform();
    const Operator2 rho = Operator2::projector(random_state(rng)) * w +
                          Operator2::projector(random_state(rng)) * (1.0 - w);
    ASSERT_TRUE(is_density(rho));
    const auto [lo, hi] = eigenvalues_hermitian(rho);
    ASSERT_NEAR(lo + hi, 1.0, 1e-10);
    ASSERT_GE(lo, -1e-10);
  }
}

TEST(Helstrom, GuessProbability) {
  const Operator2 p0 = Operator2::projector(ket0());
  EXPECT_DOUBLE_EQ(helstrom_guess_probability(p0, p0), 0.5);
  EXPECT_NEAR(helstrom_guess_probability(p0, Operator2::projector(ket1())), 1.0, 1e-15);
  for (double t : {0.1, 0.5, kPi3, 1.3, std::numbers::pi / 2}) {
    const Theta theta(t);
    const Operator2 p1 = Operator2::projector(key_basis(1, theta).v0());
    EXPECT_NEAR(helstrom_guess_probability(p0, p1), 0.5 + 0.5 * std::sin(t), 1e-12) << t;
  }
  EXPECT_THROW(helstrom_guess_probability(Operator2::identity(), p0), ContractViolation);
}

TEST(Helstrom, MeasurementBases) {
  {
    const auto [pos, neg] =
        helstrom_measurement(Operator2::projector(ket0()), Operator2::projector(ket1()));
    EXPECT_NEAR(fidelity_pure(pos, ket0()), 1.0, 1e-12);
    EXPECT_NEAR(fidelity_pure(neg, ket1()), 1.0, 1e-12);
  }
  {
    const auto [pos, neg] =
        helstrom_measurement(Operator2::projector(ket_plus()), Operator2::projector(ket_minus()));
    EXPECT_NEAR(fidelity_pure(pos, ket_plus()), 1.0, 1e-12);
    EXPECT_NEAR(fidelity_pure(neg, ket_minus()), 1.0, 1e-12);
  }
}

TEST(Helstrom, DegenerateInputRejected) {
  const Operator2 p = Operator2::projector(ket_plus());
  EXPECT_THROW(helstrom_measurement(p, p), DegenerateInput);
}

TEST(Helstrom, MonteCarloAchievesBound) {
  const Theta theta(kPi3);
  const PureState s0 = ket0(), s1 = key_basis(1, theta).v0();
  const auto [pos, neg] = helstrom_measurement(Operator2::projector(s0), Operator2::projector(s1));
  const MeasBasis meas(pos, neg);
  Rng rng(31);
  const int n = 100000;
  int ok = 0;
  for (int i = 0; i < n; ++i) {
    const unsigned which = rng.bit();
    const unsigned guess = sample_basis(meas, which ? s1 : s0, rng);
    ok += guess == which;
  }
  EXPECT_NEAR(double(ok) / n, 0.9330127018922193, 0.01);
}
