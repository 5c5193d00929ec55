#include "qsslab/quantum.hpp"

#include <algorithm>
#include <string>

namespace qsslab::quantum {

struct detail_access {
  static JointState make(int n, const std::array<Exact, 8>& amps) { return JointState(n, amps); }
  static std::array<Exact, 8>& raw(JointState& s) { return s.amps_; }
};

namespace {

using Amps = std::array<Exact, 8>;

int bit_of(std::size_t index, int n, int qubit) { return static_cast<int>((index >> (n - 1 - qubit)) & 1U); }

void check_qubit(const JointState& s, int qubit) {
  if (qubit < 0 || qubit >= s.num_qubits()) {
    throw QuantumError("qubit index " + std::to_string(qubit) + " out of range for " +
                       std::to_string(s.num_qubits()) + "-qubit register");
  }
}

Exact sum_norm(const Amps& amps, std::size_t dim) {
  Exact total;
  for (std::size_t i = 0; i < dim; ++i) total = total + amps[i].norm_squared();
  return total;
}

// Rescales an unnormalized vector whose squared norm is a power of 1/2.
JointState normalized(int n, Amps amps, const Exact& probability) {
  const Exact factor = probability.inverse_sqrt_of_dyadic();
  for (std::size_t i = 0; i < (std::size_t{1} << n); ++i) amps[i] = amps[i] * factor;
  return detail_access::make(n, amps);
}

// Index drawn from exact dyadic probabilities that sum to 1.
std::size_t sample(std::span<const Exact> probabilities, Rng& rng) {
  int exponent = 0;
  for (const auto& p : probabilities) exponent = std::max(exponent, p.scale());
  const auto total = std::uint64_t{1} << exponent;
  std::uint64_t draw = rng.below(total);
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const auto weight = static_cast<std::uint64_t>(probabilities[i].dyadic_numerator(exponent));
    if (draw < weight) return i;
    draw -= weight;
  }
  throw QuantumError("outcome probabilities do not sum to one");
}

// Unnormalized projection onto (|0> + s|1>)/sqrt2 on `qubit`, s = i^k.
Amps project_raw(const JointState& state, int qubit, Outcome outcome) {
  const int n = state.num_qubits();
  const int k = eigen_phase(outcome).quarter_turns();
  const std::size_t mask = std::size_t{1} << (n - 1 - qubit);
  Amps out{};
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    if (i & mask) continue;
    const Exact& a0 = state.amplitude(i);
    const Exact& a1 = state.amplitude(i | mask);
    // <e|a> * sqrt2 = a0 + conj(s) a1
    const Exact overlap = a0 + a1.times_i_power(-k);
    out[i] = overlap.halve();
    out[i | mask] = overlap.times_i_power(k).halve();
  }
  return out;
}

// Bell vectors as +-1 coefficient patterns over (b1 b2) = 00, 01, 10, 11.
std::array<int, 4> bell_pattern(BellOutcome b) {
  switch (b) {
    case BellOutcome::PhiPlus: return {1, 0, 0, 1};
    case BellOutcome::PhiMinus: return {1, 0, 0, -1};
    case BellOutcome::PsiPlus: return {0, 1, 1, 0};
    case BellOutcome::PsiMinus: return {0, 1, -1, 0};
  }
  return {};
}

Amps bell_project_raw(const JointState& state, int q1, int q2, BellOutcome outcome) {
  check_qubit(state, q1);
  check_qubit(state, q2);
  if (q1 == q2) throw QuantumError("Bell measurement needs two distinct qubits");
  const int n = state.num_qubits();
  const std::size_t m1 = std::size_t{1} << (n - 1 - q1);
  const std::size_t m2 = std::size_t{1} << (n - 1 - q2);
  const auto pattern = bell_pattern(outcome);
  auto index_of = [&](std::size_t rest, int b1, int b2) {
    return rest | (b1 ? m1 : 0) | (b2 ? m2 : 0);
  };
  Amps out{};
  for (std::size_t rest = 0; rest < state.dimension(); ++rest) {
    if (rest & (m1 | m2)) continue;
    Exact overlap;
    for (int p = 0; p < 4; ++p) {
      if (pattern[p] == 0) continue;
      const Exact& a = state.amplitude(index_of(rest, p >> 1, p & 1));
      overlap = pattern[p] > 0 ? overlap + a : overlap - a;
    }
    for (int p = 0; p < 4; ++p) {
      if (pattern[p] == 0) continue;
      const Exact v = overlap.halve();
      out[index_of(rest, p >> 1, p & 1)] = pattern[p] > 0 ? v : -v;
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(BellOutcome b) {
  switch (b) {
    case BellOutcome::PhiPlus: return "PhiPlus";
    case BellOutcome::PhiMinus: return "PhiMinus";
    case BellOutcome::PsiPlus: return "PsiPlus";
    case BellOutcome::PsiMinus: return "PsiMinus";
  }
  return "?";
}

JointState JointState::from_amplitudes(std::span<const Exact> amplitudes) {
  int n = 0;
  switch (amplitudes.size()) {
    case 2: n = 1; break;
    case 4: n = 2; break;
    case 8: n = 3; break;
    default: throw QuantumError("register must hold 1 to 3 qubits");
  }
  Amps amps{};
  std::copy(amplitudes.begin(), amplitudes.end(), amps.begin());
  if (!(sum_norm(amps, amplitudes.size()) == Exact::integer(1))) {
    throw QuantumError("state is not normalized");
  }
  return JointState(n, amps);
}

Exact JointState::norm_squared() const { return sum_norm(amps_, dimension()); }

bool operator==(const JointState& a, const JointState& b) {
  if (a.num_qubits_ != b.num_qubits_) return false;
  return std::equal(a.amps_.begin(), a.amps_.begin() + a.dimension(), b.amps_.begin());
}

JointState plus_x_state() { return equatorial_state(kPhase0); }

JointState equatorial_state(PhaseAngle theta) {
  Amps amps{};
  amps[0] = Exact::inv_sqrt2();
  amps[1] = Exact::inv_sqrt2().times_i_power(theta.quarter_turns());
  return detail_access::make(1, amps);
}

JointState computational_state(int bit) {
  Amps amps{};
  amps[bit ? 1 : 0] = Exact::integer(1);
  return detail_access::make(1, amps);
}

JointState apply_phase(const JointState& state, int qubit, PhaseAngle phase) {
  check_qubit(state, qubit);
  JointState out = state;
  auto& amps = detail_access::raw(out);
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    if (bit_of(i, state.num_qubits(), qubit)) amps[i] = amps[i].times_i_power(phase.quarter_turns());
  }
  return out;
}

JointState prepare_epr(PhaseAngle twist) {
  Amps amps{};
  amps[0b00] = Exact::inv_sqrt2();
  amps[0b11] = Exact::inv_sqrt2().times_i_power(twist.quarter_turns());
  return detail_access::make(2, amps);
}

JointState tensor(const JointState& a, const JointState& b) {
  const int n = a.num_qubits() + b.num_qubits();
  if (n > kMaxQubits) throw QuantumError("register overflow: " + std::to_string(n) + " qubits");
  Amps amps{};
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    for (std::size_t j = 0; j < b.dimension(); ++j) {
      amps[(i << b.num_qubits()) | j] = a.amplitude(i) * b.amplitude(j);
    }
  }
  return detail_access::make(n, amps);
}

Exact outcome_probability(const JointState& state, int qubit, Outcome outcome) {
  check_qubit(state, qubit);
  return sum_norm(project_raw(state, qubit, outcome), state.dimension());
}

JointState project(const JointState& state, int qubit, Outcome outcome) {
  check_qubit(state, qubit);
  const Amps raw = project_raw(state, qubit, outcome);
  const Exact p = sum_norm(raw, state.dimension());
  if (p.is_zero()) throw QuantumError("projection onto an outcome of probability zero");
  return normalized(state.num_qubits(), raw, p);
}

Measured measure(const JointState& state, int qubit, Axis basis, Rng& rng) {
  check_qubit(state, qubit);
  const Outcome plus{Sign::Plus, basis};
  const Outcome minus{Sign::Minus, basis};
  const std::array<Exact, 2> probs = {outcome_probability(state, qubit, plus),
                                      outcome_probability(state, qubit, minus)};
  const Outcome hit = sample(probs, rng) == 0 ? plus : minus;
  return {hit, project(state, qubit, hit)};
}

Exact bell_probability(const JointState& state, int q1, int q2, BellOutcome outcome) {
  return sum_norm(bell_project_raw(state, q1, q2, outcome), state.dimension());
}

JointState bell_project(const JointState& state, int q1, int q2, BellOutcome outcome) {
  const Amps raw = bell_project_raw(state, q1, q2, outcome);
  const Exact p = sum_norm(raw, state.dimension());
  if (p.is_zero()) throw QuantumError("Bell projection onto an outcome of probability zero");
  return normalized(state.num_qubits(), raw, p);
}

BellMeasured bell_measure(const JointState& state, int q1, int q2, Rng& rng) {
  if (state.num_qubits() < 2) throw QuantumError("Bell measurement needs at least two qubits");
  std::array<Exact, 4> probs;
  for (std::size_t i = 0; i < 4; ++i) probs[i] = bell_probability(state, q1, q2, kBellOutcomes[i]);
  const BellOutcome hit = kBellOutcomes[sample(probs, rng)];
  return {hit, bell_project(state, q1, q2, hit)};
}

JointState canonical(const JointState& state) {
  const auto amps = state.amplitudes();
  const auto first = std::find_if(amps.begin(), amps.end(), [](const Exact& a) { return !a.is_zero(); });
  const Exact lead = *first;
  // conj(lead)/|lead| rotates the leading amplitude onto the positive real axis.
  const Exact factor = lead.conj() * lead.norm_squared().inverse_sqrt_of_dyadic();
  JointState out = state;
  auto& raw = detail_access::raw(out);
  for (std::size_t i = 0; i < state.dimension(); ++i) raw[i] = raw[i] * factor;
  return out;
}

bool equal_up_to_global_phase(const JointState& a, const JointState& b) {
  return a.num_qubits() == b.num_qubits() && canonical(a) == canonical(b);
}

JointState factor_qubit(const JointState& state, int qubit) {
  check_qubit(state, qubit);
  const int n = state.num_qubits();
  if (n == 1) return state;
  const std::size_t mask = std::size_t{1} << (n - 1 - qubit);
  std::optional<std::pair<Exact, Exact>> ref;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    if (i & mask) continue;
    const Exact& a0 = state.amplitude(i);
    const Exact& a1 = state.amplitude(i | mask);
    if (a0.is_zero() && a1.is_zero()) continue;
    if (!ref) {
      ref = {a0, a1};
    } else if (!(ref->first * a1 - ref->second * a0).is_zero()) {
      throw NotProductState("qubit " + std::to_string(qubit) + " is entangled with the register");
    }
  }
  Amps amps{};
  amps[0] = ref->first;
  amps[1] = ref->second;
  const Exact p = amps[0].norm_squared() + amps[1].norm_squared();
  return canonical(normalized(1, amps, p));
}

PhaseAngle equatorial_phase(const JointState& state) {
  if (state.num_qubits() != 1) throw NotEquatorial("equatorial phase needs a single-qubit state");
  const JointState c = canonical(state);
  if (!(c.amplitude(0) == Exact::inv_sqrt2())) throw NotEquatorial("state is not on the equator");
  for (int k = 0; k < 4; ++k) {
    if (c.amplitude(1) == Exact::inv_sqrt2().times_i_power(k)) return PhaseAngle(k);
  }
  throw NotEquatorial("equatorial phase is not a multiple of pi/2");
}

std::optional<PhaseAngle> qubit_phase(const JointState& state, int qubit) {
  try {
    return equatorial_phase(factor_qubit(state, qubit));
  } catch (const QuantumError&) {
    return std::nullopt;
  }
}

PhaseAngle effective_phase_after_bell(BellOutcome outcome, PhaseAngle twist, PhaseAngle theta) {
  switch (outcome) {
    case BellOutcome::PhiPlus: return twist;
    case BellOutcome::PhiMinus: return twist + kPhasePi;
    // The X correction conjugates the carried phase: theta -> -theta.
    case BellOutcome::PsiPlus: return twist - theta - theta;
    case BellOutcome::PsiMinus: return twist + kPhasePi - theta - theta;
  }
  return twist;
}

}  // namespace qsslab::quantum
