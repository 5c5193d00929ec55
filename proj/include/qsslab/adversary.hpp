#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qsslab/codes.hpp"
#include "qsslab/strategy.hpp"

namespace qsslab::adversary {

using protocol::Action;
using protocol::ActionClass;
using protocol::AnnounceContext;
using protocol::CheaterNote;
using protocol::PrivateChannel;
using protocol::PrivateMessage;
using protocol::ProtocolConfig;
using protocol::Register;
using protocol::RunContext;
using protocol::SessionContext;
using protocol::Strategy;
using protocol::StrategyList;
using protocol::ValueMessage;
using protocol::Variant;

class StrategyError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Phase chooser for scripted honest participants: (run) -> phi.
using PhaseScript = std::function<PhaseAngle(int run)>;

/// Uniform phases (or scripted ones), codeword-driven Z actions in the
/// secure variant, truthful announcements.
class HonestStrategy : public Strategy {
 public:
  explicit HonestStrategy(PhaseScript script = {}) : script_(std::move(script)) {}
  std::string name() const override { return "honest"; }

  void begin(const SessionContext& ctx) override;
  Action on_receive_qubit(const RunContext& ctx, Register& reg) override;
  int on_bit_turn(const AnnounceContext& ctx) override;
  ActionClass on_class_turn(const AnnounceContext& ctx) override;
  ValueMessage on_value_turn(const AnnounceContext& ctx) override;

  const std::optional<codes::Codeword>& codeword() const { return codeword_; }
  const Action& action(int run) const { return actions_.at(static_cast<std::size_t>(run)); }

 protected:
  Action honest_action(const RunContext& ctx, Register& reg);

 private:
  PhaseScript script_;
  std::optional<codes::Codeword> codeword_;
  std::vector<Action> actions_;
};

/// Measures the incoming qubit in a random basis, then behaves honestly.
/// With `label` "eavesdrop" it models a tap on the link into this participant.
class InterceptStrategy : public HonestStrategy {
 public:
  explicit InterceptStrategy(std::string label = "intercept") : label_(std::move(label)) {}
  std::string name() const override { return label_; }
  Action on_receive_qubit(const RunContext& ctx, Register& reg) override;

 private:
  std::string label_;
};

/// Honest participant that tells the channel what it did in every run.
class ColludingHonestStrategy : public HonestStrategy {
 public:
  explicit ColludingHonestStrategy(std::shared_ptr<PrivateChannel> channel) : channel_(std::move(channel)) {}
  std::string name() const override { return "colluder"; }
  Action on_receive_qubit(const RunContext& ctx, Register& reg) override;

 private:
  std::shared_ptr<PrivateChannel> channel_;
};

/// Common bookkeeping for participants that keep the received qubit and
/// forward half of an EPR pair.
class EntanglingCheater : public Strategy {
 public:
  void begin(const SessionContext& ctx) override;
  int on_bit_turn(const AnnounceContext&) override;
  ValueMessage on_value_turn(const AnnounceContext& ctx) override;
  void on_private_channel(const PrivateMessage& m) override;
  std::vector<CheaterNote> finish_run(const AnnounceContext& ctx) override;

 protected:
  struct RunState {
    PhaseAngle twist;
    int chi = 0;
    int psi = 0;
    std::string route;
    std::optional<Outcome> chi_outcome;  // measured on receipt
    std::optional<quantum::BellOutcome> bell;
    std::optional<PhaseAngle> value;
    std::optional<PhaseAngle> claimed_prev;
    std::optional<PhaseAngle> claimed_next;
    std::optional<ActionClass> committed;
  };

  Action entangle(const RunContext& ctx, Register& reg, PhaseAngle twist, std::optional<Axis> chi_basis);
  RunState& state(int run) { return runs_.at(static_cast<std::size_t>(run)); }

  /// Parity class of the announced classes of participants in [lo, hi], plus
  /// whatever the channel supplied. nullopt if one of them is still unknown.
  std::optional<ActionClass> known_class_sum(const AnnounceContext& ctx, int lo, int hi) const;

  /// Measure chi in the basis matching the upstream class and psi in X.
  void route_case_ii(const AnnounceContext& ctx, RunState& s, ActionClass upstream);
  /// chi in `chi_basis` (or the receipt outcome), psi so that psi's phase class
  /// plus `downstream` is X.
  void route_b(const AnnounceContext& ctx, RunState& s, ActionClass downstream, std::optional<Axis> chi_basis);
  /// Bell measurement on (chi, psi); value fixed later by complete().
  void route_bell(const AnnounceContext& ctx, RunState& s);
  /// Resolves a Bell route once the upstream class is public.
  virtual void complete(const AnnounceContext& ctx, RunState& s);

  int position_ = 0;
  std::vector<RunState> runs_;
  std::map<std::pair<int, int>, Action> private_;  // (run, participant) -> action
};

/// Keeps chi, forwards an EPR half; uses case (ii) when every upstream class is
/// already public at its class turn, the Bell route otherwise.
class StrategyA : public EntanglingCheater {
 public:
  explicit StrategyA(int position) { position_ = position; }
  std::string name() const override { return "strategyA"; }
  Action on_receive_qubit(const RunContext& ctx, Register& reg) override;
  ActionClass on_class_turn(const AnnounceContext& ctx) override;
};

/// Measures chi on receipt in a random (or fixed X) basis and picks psi's basis
/// from the downstream class parity.
class StrategyB : public EntanglingCheater {
 public:
  explicit StrategyB(int position, bool fixed_x = false) : fixed_x_(fixed_x) { position_ = position; }
  std::string name() const override { return "strategyB"; }
  Action on_receive_qubit(const RunContext& ctx, Register& reg) override;
  ActionClass on_class_turn(const AnnounceContext& ctx) override;

 private:
  bool fixed_x_;
};

/// Cheater helped by R_1 or R_N over the private channel.
class CollusionCheater : public EntanglingCheater {
 public:
  CollusionCheater(int position, int partner) : partner_(partner) { position_ = position; }
  std::string name() const override { return "collude"; }
  Action on_receive_qubit(const RunContext& ctx, Register& reg) override;
  ActionClass on_class_turn(const AnnounceContext& ctx) override;

 private:
  int partner_;
};

enum class GuessMode { Uniform, Bell };

/// Coherent cheater against the secure variant, sitting between two honest
/// neighbours; every other participant colludes with it.
class SecureCheater : public EntanglingCheater {
 public:
  SecureCheater(int position, int honest_a, int honest_b, GuessMode mode)
      : a_(honest_a), b_(honest_b), mode_(mode) {
    position_ = position;
  }
  std::string name() const override { return mode_ == GuessMode::Bell ? "secureCheat:bell" : "secureCheat"; }

  void begin(const SessionContext& ctx) override;
  Action on_receive_qubit(const RunContext& ctx, Register& reg) override;
  int on_bit_turn(const AnnounceContext& ctx) override;
  ActionClass on_class_turn(const AnnounceContext& ctx) override;
  ValueMessage on_value_turn(const AnnounceContext& ctx) override;
  std::vector<CheaterNote> finish_run(const AnnounceContext& ctx) override;

 private:
  struct Extra {
    int bit = 0;
    bool safe = false;
    bool eligible = false;
    bool late = false;
    bool forced = false;
    std::optional<PhaseAngle> z_first;
    std::optional<PhaseAngle> z_second;
    std::optional<Sign> z_outcome;
  };
  /// True if participant h's bit for `run` is known to be 0 at this point.
  bool known_zero(const AnnounceContext& ctx, int h) const;
  void complete(const AnnounceContext& ctx, RunState& s) override;
  void complete_z(const AnnounceContext& ctx, RunState& s, Extra& e);
  /// Phase of the qubit R_a receives, from the colluders' reports.
  std::optional<PhaseAngle> phase_before_a(const AnnounceContext& ctx) const;
  /// Class of the qubit R_a sends, once R_a's class is public.
  std::optional<ActionClass> class_after_a(const AnnounceContext& ctx) const;
  /// Class of the phases applied between this position and the next
  /// measurement point, or nullopt if not yet known.
  std::optional<ActionClass> downstream_class(const AnnounceContext& ctx) const;

  int a_;
  int b_;
  GuessMode mode_;
  std::vector<codes::Codeword> weight_w_;
  std::vector<int> committed_;
  std::vector<Extra> extra_;
};

/// Probability, for a uniformly random announcement order and uniformly
/// chosen weight-w codewords of the two honest participants, that the
/// cheater knows at its bit turn in `run` that at least one of them applied
/// an X/Y action. Exact enumeration.
double safe_opportunity_probability(const std::vector<codes::Codeword>& weight_w, int run);

struct StrategySpec {
  std::string kind;  // honest | intercept | eavesdrop | strategyA | strategyB | collude | secureCheat
  std::optional<int> partner;  // 0 stands for R_N
  GuessMode guess = GuessMode::Uniform;
};
StrategySpec parse_strategy_spec(const std::string& text);

/// Strategies for every participant. Throws StrategyError on an incompatible
/// variant or position. `config.honest` is filled in for the secure cheater
/// when left empty.
StrategyList make_strategies(ProtocolConfig& config, const StrategySpec& spec, int cheater);

}  // namespace qsslab::adversary
