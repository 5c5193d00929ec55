#pragma once

#include <cstdint>
#include <numbers>
#include <string_view>

namespace qsslab {

/// A phase restricted to multiples of pi/2. Every phase the protocols use
/// lives on this grid, so arithmetic is integer arithmetic modulo 4.
class PhaseAngle {
 public:
  constexpr PhaseAngle() = default;
  constexpr explicit PhaseAngle(int quarter_turns) : quarter_turns_(((quarter_turns % 4) + 4) % 4) {}

  constexpr int quarter_turns() const { return quarter_turns_; }
  constexpr double radians() const { return quarter_turns_ * std::numbers::pi / 2.0; }

  /// True for {0, pi}; false for {pi/2, 3pi/2}.
  constexpr bool is_x_class() const { return quarter_turns_ % 2 == 0; }

  friend constexpr PhaseAngle operator+(PhaseAngle a, PhaseAngle b) {
    return PhaseAngle(a.quarter_turns_ + b.quarter_turns_);
  }
  friend constexpr PhaseAngle operator-(PhaseAngle a, PhaseAngle b) {
    return PhaseAngle(a.quarter_turns_ - b.quarter_turns_);
  }
  friend constexpr PhaseAngle operator-(PhaseAngle a) { return PhaseAngle(-a.quarter_turns_); }
  constexpr PhaseAngle& operator+=(PhaseAngle o) { return *this = *this + o; }
  friend constexpr bool operator==(PhaseAngle, PhaseAngle) = default;

 private:
  int quarter_turns_ = 0;
};

inline constexpr PhaseAngle kPhase0{0};
inline constexpr PhaseAngle kPhaseHalfPi{1};
inline constexpr PhaseAngle kPhasePi{2};
inline constexpr PhaseAngle kPhaseThreeHalfPi{3};

enum class Axis : std::uint8_t { X, Y };
enum class Sign : std::uint8_t { Plus, Minus };

/// Single-qubit measurement result: which eigenstate |+-x> or |+-y> was hit.
struct Outcome {
  Sign sign = Sign::Plus;
  Axis basis = Axis::X;
  friend constexpr bool operator==(Outcome, Outcome) = default;
};

/// Equatorial phase of the eigenstate an outcome collapses to.
constexpr PhaseAngle eigen_phase(Outcome o) {
  int q = (o.basis == Axis::X) ? 0 : 1;
  if (o.sign == Sign::Minus) q += 2;
  return PhaseAngle(q);
}

/// The basis in which a state of this phase is an eigenstate.
constexpr Axis axis_of(PhaseAngle p) { return p.is_x_class() ? Axis::X : Axis::Y; }

/// X-basis outcome sign of an X-class phase: 0 -> Plus, pi -> Minus.
constexpr Sign x_sign_of(PhaseAngle p) { return p.quarter_turns() == 0 ? Sign::Plus : Sign::Minus; }

constexpr std::string_view to_string(Sign s) { return s == Sign::Plus ? "+" : "-"; }
constexpr std::string_view to_string(Axis a) { return a == Axis::X ? "X" : "Y"; }

}  // namespace qsslab
