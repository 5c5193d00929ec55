#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qsslab/protocol.hpp"
#include "qsslab/quantum.hpp"

namespace qsslab::protocol {

/// The physical register of one run: the traveling qubit plus whatever a
/// deviating participant keeps. Every operation on it is logged so that
/// ground-truth phases can be recovered after deferred measurements.
class Register {
 public:
  Register();

  const quantum::JointState& state() const { return state_; }
  int traveling() const { return traveling_; }
  void set_traveling(int qubit);
  int num_qubits() const { return state_.num_qubits(); }

  /// Appends qubits; returns the index of the first one.
  int attach(const quantum::JointState& extra);
  void apply_phase(int qubit, PhaseAngle phase);
  Outcome measure(int qubit, Axis axis, Rng& rng);
  quantum::BellOutcome bell_measure(int q1, int q2, Rng& rng);

  /// Phase of the traveling qubit if it is in a product equatorial state.
  std::optional<PhaseAngle> traveling_phase() const;

  struct Mark {
    quantum::JointState state;
    int traveling = 0;
    std::size_t log_position = 0;
  };
  Mark mark() const { return {state_, traveling_, log_.size()}; }

  /// Phase the traveling qubit had at `mark`, once every later operation on
  /// the other qubits is applied. Those operations commute with whatever
  /// happened to the traveling qubit in between.
  std::optional<PhaseAngle> phase_at(const Mark& mark) const;

 private:
  struct Op {
    enum class Kind { Phase, Project, Bell } kind;
    int q1 = 0;
    int q2 = -1;
    PhaseAngle phase;
    Outcome outcome;
    quantum::BellOutcome bell = quantum::BellOutcome::PhiPlus;
  };
  quantum::JointState state_;
  int traveling_ = 0;
  std::vector<Op> log_;
};

/// Read access to everything announced so far, across all runs. Strategies
/// never see another participant's private actions through it.
class PublicView {
 public:
  explicit PublicView(const std::vector<RunRecord>& runs) : runs_(&runs) {}
  int runs() const { return static_cast<int>(runs_->size()); }
  std::span<const Announcement> bit_stage(int run) const { return (*runs_)[run].bit_stage; }
  std::span<const Announcement> class_stage(int run) const { return (*runs_)[run].class_stage; }
  std::span<const Announcement> value_stage(int run) const { return (*runs_)[run].value_stage; }
  std::optional<int> bit_of(int run, int participant) const { return (*runs_)[run].announced_bit(participant); }
  std::optional<ActionClass> class_of_participant(int run, int participant) const {
    return (*runs_)[run].announced_class(participant);
  }
  bool has_z(int run) const { return (*runs_)[run].has_z_announcement(); }
  bool valid(int run) const { return (*runs_)[run].valid; }
  bool checked(int run) const { return (*runs_)[run].checked; }

 private:
  const std::vector<RunRecord>* runs_;
};

struct SessionContext {
  const ProtocolConfig& config;
  int participant;
  Rng& rng;
};

struct RunContext {
  const ProtocolConfig& config;
  int run;
  int participant;
  Rng& rng;
};

struct AnnounceContext {
  const ProtocolConfig& config;
  int run;
  int participant;
  int round;
  const PublicView& view;
  Register& reg;
  Rng& rng;
  /// R_N's recorded outcome; only set for R_N itself.
  std::optional<Sign> own_outcome;
};

struct ValueMessage {
  std::vector<PhaseAngle> phases;
  std::optional<Sign> outcome;
};

/// What a participant tells its partner off the public channel.
struct PrivateMessage {
  int from = 0;
  int run = 0;
  Action action;
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;

  virtual void begin(const SessionContext&) {}
  /// Acts on the register and reports the ground truth of what was done.
  virtual Action on_receive_qubit(const RunContext& ctx, Register& reg) = 0;
  virtual int on_bit_turn(const AnnounceContext& ctx) = 0;
  virtual ActionClass on_class_turn(const AnnounceContext& ctx) = 0;
  virtual ValueMessage on_value_turn(const AnnounceContext& ctx) = 0;
  virtual void on_private_channel(const PrivateMessage&) {}
  /// Called once per run after the value stage.
  virtual std::vector<CheaterNote> finish_run(const AnnounceContext&) { return {}; }
};

class PrivateChannel {
 public:
  void subscribe(Strategy* listener) { listeners_.push_back(listener); }
  void send(const PrivateMessage& m) {
    for (auto* l : listeners_) l->on_private_channel(m);
  }

 private:
  std::vector<Strategy*> listeners_;
};

/// Role-dependent honest disclosure of one's own action in the value stage.
ValueMessage honest_value(const AnnounceContext& ctx, const Action& action);

}  // namespace qsslab::protocol
