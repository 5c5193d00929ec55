#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "qsslab/exact.hpp"
#include "qsslab/phase.hpp"
#include "qsslab/rng.hpp"

namespace qsslab::quantum {

inline constexpr int kMaxQubits = 3;

class QuantumError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class NotEquatorial : public QuantumError {
  using QuantumError::QuantumError;
};
class NotProductState : public QuantumError {
  using QuantumError::QuantumError;
};

enum class BellOutcome : std::uint8_t { PhiPlus, PhiMinus, PsiPlus, PsiMinus };
inline constexpr std::array<BellOutcome, 4> kBellOutcomes = {
    BellOutcome::PhiPlus, BellOutcome::PhiMinus, BellOutcome::PsiPlus, BellOutcome::PsiMinus};
std::string_view to_string(BellOutcome b);

/// Pure state of a 1-3 qubit register with exact amplitudes.
///
/// Qubit 0 is the most significant bit of the basis index, so tensor(a, b)
/// places a's qubits first. Measured qubits stay in the register, collapsed.
class JointState {
 public:
  /// Throws QuantumError unless the size is 2^n for n in [1,3] and the norm is exactly 1.
  static JointState from_amplitudes(std::span<const Exact> amplitudes);

  int num_qubits() const { return num_qubits_; }
  std::size_t dimension() const { return std::size_t{1} << num_qubits_; }
  std::span<const Exact> amplitudes() const { return {amps_.data(), dimension()}; }
  const Exact& amplitude(std::size_t index) const { return amps_.at(index); }
  Exact norm_squared() const;

  friend bool operator==(const JointState& a, const JointState& b);

 private:
  JointState(int n, const std::array<Exact, 8>& amps) : num_qubits_(n), amps_(amps) {}
  friend struct detail_access;

  int num_qubits_ = 1;
  std::array<Exact, 8> amps_{};
};

/// |+x> = (|0> + |1>)/sqrt2
JointState plus_x_state();
/// (|0> + e^{i theta}|1>)/sqrt2
JointState equatorial_state(PhaseAngle theta);
/// |0> or |1>
JointState computational_state(int bit);

/// Multiplies every amplitude with `qubit` = 1 by e^{i phase}.
JointState apply_phase(const JointState& state, int qubit, PhaseAngle phase);

/// (|00> + e^{i twist}|11>)/sqrt2
JointState prepare_epr(PhaseAngle twist);

/// Kronecker product; throws QuantumError if the result exceeds kMaxQubits.
JointState tensor(const JointState& a, const JointState& b);

// Single-qubit projective measurement ---------------------------------------

Exact outcome_probability(const JointState& state, int qubit, Outcome outcome);
/// Normalized post-measurement state for a given outcome. Throws QuantumError
/// if that outcome has probability zero.
JointState project(const JointState& state, int qubit, Outcome outcome);

struct Measured {
  Outcome outcome;
  JointState state;
};
Measured measure(const JointState& state, int qubit, Axis basis, Rng& rng);

// Bell-basis measurement ------------------------------------------------------

Exact bell_probability(const JointState& state, int q1, int q2, BellOutcome outcome);
JointState bell_project(const JointState& state, int q1, int q2, BellOutcome outcome);

struct BellMeasured {
  BellOutcome outcome;
  JointState state;
};
BellMeasured bell_measure(const JointState& state, int q1, int q2, Rng& rng);

// Inspection ------------------------------------------------------------------

/// Global phase removed: first nonzero amplitude made positive real.
JointState canonical(const JointState& state);
bool equal_up_to_global_phase(const JointState& a, const JointState& b);

/// Reduced state of `qubit` when the register is a product of that qubit and
/// the rest. Throws NotProductState when it is entangled.
JointState factor_qubit(const JointState& state, int qubit);

/// theta of a single-qubit state (|0> + e^{i theta}|1>)/sqrt2, up to global
/// phase. Throws NotEquatorial otherwise.
PhaseAngle equatorial_phase(const JointState& state);

/// equatorial_phase(factor_qubit(...)) or nullopt if either step fails.
std::optional<PhaseAngle> qubit_phase(const JointState& state, int qubit);

/// For a Bell measurement on (phase-theta qubit, first half of prepare_epr(twist)),
/// the phase the second EPR half ends up carrying, relative to theta.
PhaseAngle effective_phase_after_bell(BellOutcome outcome, PhaseAngle twist, PhaseAngle theta);

}  // namespace qsslab::quantum
