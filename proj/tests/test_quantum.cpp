#include <array>
#include <cmath>
#include <complex>
#include <map>

#include "doctest.h"
#include "qsslab/quantum.hpp"

using namespace qsslab;
using namespace qsslab::quantum;

namespace {

using C = std::complex<double>;
using Vec = std::vector<C>;

// Floating-point statevector reference, written independently of the exact engine.
Vec oracle_equatorial(int q) {
  const double s = 1.0 / std::sqrt(2.0);
  return {C(s, 0), std::polar(s, q * M_PI / 2)};
}
Vec oracle_kron(const Vec& a, const Vec& b) {
  Vec out;
  for (auto x : a)
    for (auto y : b) out.push_back(x * y);
  return out;
}
Vec oracle_epr(int twist) {
  const double s = 1.0 / std::sqrt(2.0);
  return {C(s, 0), 0, 0, std::polar(s, twist * M_PI / 2)};
}
Vec oracle_bell(BellOutcome b) {
  const double s = 1.0 / std::sqrt(2.0);
  switch (b) {
    case BellOutcome::PhiPlus: return {s, 0, 0, s};
    case BellOutcome::PhiMinus: return {s, 0, 0, -s};
    case BellOutcome::PsiPlus: return {0, s, s, 0};
    case BellOutcome::PsiMinus: return {0, s, -s, 0};
  }
  return {};
}
// Project qubits (0,1) of a 3-qubit vector onto a Bell vector; returns the
// unnormalized state of qubit 2.
Vec oracle_bell_remainder(const Vec& psi, BellOutcome b) {
  const Vec bell = oracle_bell(b);
  Vec r(2);
  for (int ab = 0; ab < 4; ++ab)
    for (int c = 0; c < 2; ++c) r[c] += std::conj(bell[ab]) * psi[ab * 2 + c];
  return r;
}
// Quarter turn q with e^{i q pi/2} = r1/r0, or -1 if not on the grid.
int oracle_quarter(const Vec& r) {
  if (std::abs(r[0]) < 1e-12 || std::abs(std::abs(r[0]) - std::abs(r[1])) > 1e-12) return -1;
  const double ang = std::arg(r[1] / r[0]);
  const int q = static_cast<int>(std::lround(ang / (M_PI / 2)));
  return ((q % 4) + 4) % 4;
}

std::vector<C> to_complex(const JointState& s) {
  std::vector<C> out;
  for (const auto& a : s.amplitudes()) out.push_back(a.to_complex());
  return out;
}

}  // namespace

TEST_CASE("plus_x and phase application") {
  const auto plus = plus_x_state();
  CHECK(equatorial_phase(plus) == kPhase0);
  CHECK(equatorial_phase(apply_phase(plus, 0, kPhasePi)) == kPhasePi);
  CHECK(equatorial_phase(apply_phase(plus, 0, kPhaseHalfPi)) == kPhaseHalfPi);
  CHECK(apply_phase(apply_phase(plus, 0, kPhaseHalfPi), 0, kPhaseHalfPi) == apply_phase(plus, 0, kPhasePi));
  Rng rng(1);
  for (int i = 0; i < 20; ++i) CHECK(measure(plus, 0, Axis::X, rng).outcome.sign == Sign::Plus);
}

TEST_CASE("phase composition is exact for every pair") {
  for (int q = 0; q < 3; ++q) {
    const auto base = tensor(plus_x_state(), prepare_epr(kPhaseHalfPi));
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const auto lhs = apply_phase(apply_phase(base, q, PhaseAngle(a)), q, PhaseAngle(b));
        CHECK(lhs == apply_phase(base, q, PhaseAngle(a + b)));
        CHECK(lhs.norm_squared() == Exact::integer(1));
      }
  }
}

TEST_CASE("EPR pair and phase on second qubit") {
  const auto epr = prepare_epr(kPhase0);
  const auto amps = to_complex(epr);
  CHECK(std::abs(amps[0] - C(M_SQRT1_2, 0)) < 1e-12);
  CHECK(std::abs(amps[3] - C(M_SQRT1_2, 0)) < 1e-12);
  const auto flipped = to_complex(apply_phase(epr, 1, kPhasePi));
  CHECK(std::abs(flipped[3] + C(M_SQRT1_2, 0)) < 1e-12);
  const auto twisted = to_complex(prepare_epr(kPhaseHalfPi));
  CHECK(std::abs(twisted[3] - C(0, M_SQRT1_2)) < 1e-12);
}

TEST_CASE("EPR X measurement collapses the partner") {
  const auto epr = prepare_epr(kPhase0);
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    const auto post = project(epr, 0, Outcome{s, Axis::X});
    CHECK(equatorial_phase(factor_qubit(post, 1)) == (s == Sign::Plus ? kPhase0 : kPhasePi));
  }
}

TEST_CASE("equatorial_phase rejects poles") {
  CHECK(equatorial_phase(equatorial_state(kPhaseThreeHalfPi)) == kPhaseThreeHalfPi);
  CHECK_THROWS_AS(equatorial_phase(computational_state(0)), NotEquatorial);
  CHECK_THROWS_AS(factor_qubit(prepare_epr(kPhase0), 0), NotProductState);
}

TEST_CASE("tensor bounds and product structure") {
  const auto two = tensor(plus_x_state(), plus_x_state());
  for (const auto& a : two.amplitudes()) CHECK(std::abs(a.to_complex() - C(0.5, 0)) < 1e-12);
  const auto three = tensor(plus_x_state(), prepare_epr(kPhase0));
  CHECK(three.norm_squared() == Exact::integer(1));
  CHECK_THROWS_AS(tensor(three, plus_x_state()), QuantumError);
  const auto post = project(tensor(equatorial_state(kPhaseHalfPi), prepare_epr(kPhase0)), 0,
                            Outcome{Sign::Plus, Axis::Y});
  CHECK(equal_up_to_global_phase(factor_qubit(post, 0), equatorial_state(kPhaseHalfPi)));
}

TEST_CASE("Bell measurement table matches the floating-point oracle") {
  int cases = 0;
  for (int theta = 0; theta < 4; ++theta)
    for (int twist : {0, 1, 2, 3})
      for (BellOutcome b : kBellOutcomes) {
        const auto exact_in = tensor(equatorial_state(PhaseAngle(theta)), prepare_epr(PhaseAngle(twist)));
        const Vec ref_in = oracle_kron(oracle_equatorial(theta), oracle_epr(twist));
        const Vec rem = oracle_bell_remainder(ref_in, b);
        const double prob = std::norm(rem[0]) + std::norm(rem[1]);
        CHECK(std::abs(prob - 0.25) < 1e-12);
        CHECK(std::abs(bell_probability(exact_in, 0, 1, b).to_complex().real() - prob) < 1e-12);
        const int ref_phase = oracle_quarter(rem);
        REQUIRE(ref_phase >= 0);
        const PhaseAngle eff = effective_phase_after_bell(b, PhaseAngle(twist), PhaseAngle(theta));
        CHECK((PhaseAngle(theta) + eff).quarter_turns() == ref_phase);
        const auto post = bell_project(exact_in, 0, 1, b);
        CHECK(qubit_phase(post, 2) == PhaseAngle(ref_phase));
        ++cases;
      }
  CHECK(cases == 64);
}

TEST_CASE("Bell examples") {
  const auto in = tensor(plus_x_state(), prepare_epr(kPhase0));
  CHECK(qubit_phase(bell_project(in, 0, 1, BellOutcome::PhiPlus), 2) == kPhase0);
  const auto in2 = tensor(equatorial_state(kPhaseHalfPi), prepare_epr(kPhase0));
  CHECK(qubit_phase(bell_project(in2, 0, 1, BellOutcome::PhiMinus), 2) == kPhaseThreeHalfPi);
  CHECK(effective_phase_after_bell(BellOutcome::PsiPlus, kPhase0, kPhaseHalfPi) == kPhasePi);
  // twist 0 only ever gives X-class effective phases
  for (BellOutcome b : kBellOutcomes)
    for (int t = 0; t < 4; ++t) CHECK(effective_phase_after_bell(b, kPhase0, PhaseAngle(t)).is_x_class());
}

TEST_CASE("Bell outcomes are uniform when sampled") {
  Rng rng(5);
  std::map<BellOutcome, int> counts;
  const auto in = tensor(plus_x_state(), prepare_epr(kPhase0));
  for (int i = 0; i < 4000; ++i) ++counts[bell_measure(in, 0, 1, rng).outcome];
  for (BellOutcome b : kBellOutcomes) CHECK(std::abs(counts[b] - 1000) < 120);
}

TEST_CASE("determinism law with chi-square") {
  Rng rng(11);
  for (int theta = 0; theta < 4; ++theta)
    for (Axis axis : {Axis::X, Axis::Y}) {
      const auto s = equatorial_state(PhaseAngle(theta));
      int plus = 0;
      const int trials = 10000;
      for (int i = 0; i < trials; ++i) plus += measure(s, 0, axis, rng).outcome.sign == Sign::Plus;
      const bool deterministic = (axis == Axis::X) == PhaseAngle(theta).is_x_class();
      if (deterministic) {
        const int expected = (theta == 0 || theta == 1) ? trials : 0;
        CHECK(plus == expected);
      } else {
        const double chi2 = 2.0 * std::pow(plus - trials / 2.0, 2) / (trials / 2.0);
        CHECK(chi2 < 10.83);  // p > 0.001 at 1 dof
      }
    }
}

TEST_CASE("measurement order commutes on reachable three-qubit states") {
  std::vector<JointState> states;
  for (int t = 0; t < 4; ++t)
    for (int tw = 0; tw < 4; ++tw) {
      states.push_back(tensor(equatorial_state(PhaseAngle(t)), prepare_epr(PhaseAngle(tw))));
      states.push_back(tensor(prepare_epr(PhaseAngle(tw)), equatorial_state(PhaseAngle(t))));
    }
  const std::array<Outcome, 4> outcomes = {Outcome{Sign::Plus, Axis::X}, Outcome{Sign::Minus, Axis::X},
                                           Outcome{Sign::Plus, Axis::Y}, Outcome{Sign::Minus, Axis::Y}};
  for (const auto& s : states)
    for (int q1 = 0; q1 < 3; ++q1)
      for (int q2 = 0; q2 < 3; ++q2) {
        if (q1 == q2) continue;
        for (Outcome a : outcomes)
          for (Outcome b : outcomes) {
            auto joint = [&](int first, Outcome fa, int second, Outcome fb) {
              const Exact p1 = outcome_probability(s, first, fa);
              if (p1.is_zero()) return Exact{};
              return p1 * outcome_probability(project(s, first, fa), second, fb);
            };
            CHECK(joint(q1, a, q2, b) == joint(q2, b, q1, a));
          }
      }
}
