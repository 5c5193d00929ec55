#include "qsslab/adversary.hpp"

#include <algorithm>
#include <array>

namespace qsslab::adversary {

using protocol::class_of;

namespace {

PhaseAngle x_anchor(Sign s) { return eigen_phase(Outcome{s, Axis::X}); }

ActionClass add(ActionClass a, ActionClass b) { return a == b ? ActionClass::X : ActionClass::Y; }

Axis axis_for(ActionClass c) { return c == ActionClass::X ? Axis::X : Axis::Y; }

PhaseAngle class_rep(ActionClass c) { return c == ActionClass::X ? kPhase0 : kPhaseHalfPi; }

PhaseAngle random_twist(Rng& rng) { return rng.coin() ? kPhaseHalfPi : kPhase0; }

}  // namespace

// Honest ---------------------------------------------------------------------

void HonestStrategy::begin(const SessionContext& ctx) {
  actions_.assign(static_cast<std::size_t>(ctx.config.runs), Action{});
  codeword_.reset();
  if (ctx.config.variant == Variant::Secure && ctx.config.is_middle(ctx.participant)) {
    codeword_ = codes::sample_weight_w_codeword(ctx.config.code->code, ctx.config.code->w, ctx.rng);
  }
}

Action HonestStrategy::honest_action(const RunContext& ctx, Register& reg) {
  Action a;
  a.participant = ctx.participant;
  a.strategy = name();
  const int q = reg.traveling();
  if (codeword_) a.bit = codeword_->bit(ctx.run);
  if (a.bit == 1) {
    const PhaseAngle first = ctx.rng.coin() ? kPhaseHalfPi : kPhase0;
    reg.apply_phase(q, first);
    a.z_outcome = reg.measure(q, Axis::X, ctx.rng).sign;
    const PhaseAngle second = ctx.rng.phase();
    reg.apply_phase(q, second);
    a.cls = ActionClass::Z;
    a.phases = {first, second};
  } else {
    const PhaseAngle phi = script_ ? script_(ctx.run) : ctx.rng.phase();
    reg.apply_phase(q, phi);
    a.cls = class_of(phi);
    a.phases = {phi};
  }
  actions_[static_cast<std::size_t>(ctx.run)] = a;
  return a;
}

Action HonestStrategy::on_receive_qubit(const RunContext& ctx, Register& reg) { return honest_action(ctx, reg); }

int HonestStrategy::on_bit_turn(const AnnounceContext& ctx) { return action(ctx.run).bit.value_or(0); }

ActionClass HonestStrategy::on_class_turn(const AnnounceContext& ctx) {
  return class_of(action(ctx.run).phases.front());
}

ValueMessage HonestStrategy::on_value_turn(const AnnounceContext& ctx) {
  return protocol::honest_value(ctx, action(ctx.run));
}

Action InterceptStrategy::on_receive_qubit(const RunContext& ctx, Register& reg) {
  reg.measure(reg.traveling(), ctx.rng.axis(), ctx.rng);
  return honest_action(ctx, reg);
}

Action ColludingHonestStrategy::on_receive_qubit(const RunContext& ctx, Register& reg) {
  Action a = honest_action(ctx, reg);
  channel_->send(PrivateMessage{ctx.participant, ctx.run, a});
  return a;
}

// Entangling cheaters ------------------------------------------------------------

void EntanglingCheater::begin(const SessionContext& ctx) {
  runs_.assign(static_cast<std::size_t>(ctx.config.runs), RunState{});
  private_.clear();
}

Action EntanglingCheater::entangle(const RunContext& ctx, Register& reg, PhaseAngle twist,
                                   std::optional<Axis> chi_basis) {
  RunState& s = state(ctx.run);
  s.twist = twist;
  s.chi = reg.traveling();
  if (chi_basis) s.chi_outcome = reg.measure(s.chi, *chi_basis, ctx.rng);
  s.psi = reg.attach(quantum::prepare_epr(twist));
  reg.set_traveling(s.psi + 1);
  Action a;
  a.participant = ctx.participant;
  a.strategy = name();
  a.definite = false;
  return a;
}

int EntanglingCheater::on_bit_turn(const AnnounceContext&) { return 0; }

void EntanglingCheater::on_private_channel(const PrivateMessage& m) { private_[{m.run, m.from}] = m.action; }

std::optional<ActionClass> EntanglingCheater::known_class_sum(const AnnounceContext& ctx, int lo, int hi) const {
  ActionClass total = ActionClass::X;
  for (int j = lo; j <= hi; ++j) {
    if (j == position_) continue;
    std::optional<ActionClass> c;
    if (auto it = private_.find({ctx.run, j}); it != private_.end() && !it->second.phases.empty()) {
      c = class_of(it->second.phases.front());
    } else {
      c = ctx.view.class_of_participant(ctx.run, j);
    }
    if (!c) return std::nullopt;
    total = add(total, *c);
  }
  return total;
}

void EntanglingCheater::route_case_ii(const AnnounceContext& ctx, RunState& s, ActionClass upstream) {
  const PhaseAngle prev = eigen_phase(ctx.reg.measure(s.chi, axis_for(upstream), ctx.rng));
  const PhaseAngle next = s.twist - eigen_phase(ctx.reg.measure(s.psi, Axis::X, ctx.rng));
  s.route = "case_ii";
  s.value = next - prev;
  s.claimed_prev = prev;
  s.claimed_next = next;
}

void EntanglingCheater::route_b(const AnnounceContext& ctx, RunState& s, ActionClass downstream,
                                std::optional<Axis> chi_basis) {
  const PhaseAngle prev =
      s.chi_outcome ? eigen_phase(*s.chi_outcome) : eigen_phase(ctx.reg.measure(s.chi, *chi_basis, ctx.rng));
  // psi's outcome class flips the forwarded phase's class away from the twist's.
  const Axis psi_axis = class_of(s.twist) == downstream ? Axis::X : Axis::Y;
  const PhaseAngle next = s.twist - eigen_phase(ctx.reg.measure(s.psi, psi_axis, ctx.rng));
  if (s.route.empty()) s.route = "B";
  s.value = next - prev;
  s.claimed_prev = prev;
  s.claimed_next = next;
}

void EntanglingCheater::route_bell(const AnnounceContext& ctx, RunState& s) {
  s.bell = ctx.reg.bell_measure(s.chi, s.psi, ctx.rng);
  if (s.route.empty()) s.route = "bell";
}

void EntanglingCheater::complete(const AnnounceContext& ctx, RunState& s) {
  if (s.value || !s.bell) return;
  const ActionClass upstream = known_class_sum(ctx, 1, position_ - 1).value_or(ActionClass::X);
  s.value = quantum::effective_phase_after_bell(*s.bell, s.twist, class_rep(upstream));
  // Only the class of the incoming phase is known; the value is a coin flip.
  s.claimed_prev = class_rep(upstream) + (ctx.rng.coin() ? kPhasePi : kPhase0);
  s.claimed_next = *s.claimed_prev + *s.value;
}

ValueMessage EntanglingCheater::on_value_turn(const AnnounceContext& ctx) {
  RunState& s = state(ctx.run);
  complete(ctx, s);
  return ValueMessage{{s.value.value_or(kPhase0)}, std::nullopt};
}

std::vector<CheaterNote> EntanglingCheater::finish_run(const AnnounceContext& ctx) {
  RunState& s = state(ctx.run);
  complete(ctx, s);
  CheaterNote note;
  note.route = s.route;
  note.twist = s.twist;
  note.claimed_prev = s.claimed_prev;
  note.claimed_next = s.claimed_next;
  return {note};
}

Action StrategyA::on_receive_qubit(const RunContext& ctx, Register& reg) {
  return entangle(ctx, reg, random_twist(ctx.rng), std::nullopt);
}

ActionClass StrategyA::on_class_turn(const AnnounceContext& ctx) {
  RunState& s = state(ctx.run);
  if (const auto upstream = known_class_sum(ctx, 1, position_ - 1)) {
    route_case_ii(ctx, s, *upstream);
    return class_of(*s.value);
  }
  route_bell(ctx, s);
  return class_of(s.twist);
}

Action StrategyB::on_receive_qubit(const RunContext& ctx, Register& reg) {
  const Axis basis = fixed_x_ ? Axis::X : ctx.rng.axis();
  return entangle(ctx, reg, kPhase0, basis);
}

ActionClass StrategyB::on_class_turn(const AnnounceContext& ctx) {
  RunState& s = state(ctx.run);
  auto downstream = known_class_sum(ctx, position_ + 1, ctx.config.participants);
  if (!downstream) {
    s.route = "B_guess";
    downstream = ctx.rng.coin() ? ActionClass::Y : ActionClass::X;
  }
  route_b(ctx, s, *downstream, std::nullopt);
  return class_of(*s.value);
}

Action CollusionCheater::on_receive_qubit(const RunContext& ctx, Register& reg) {
  return entangle(ctx, reg, random_twist(ctx.rng), std::nullopt);
}

ActionClass CollusionCheater::on_class_turn(const AnnounceContext& ctx) {
  RunState& s = state(ctx.run);
  const int n = ctx.config.participants;
  // The partner's side is complete whenever everyone between it and us has spoken.
  const auto upstream = known_class_sum(ctx, 1, position_ - 1);
  const auto downstream = known_class_sum(ctx, position_ + 1, n);
  if (partner_ == 1 && upstream) {
    route_case_ii(ctx, s, *upstream);
  } else if (downstream) {
    route_b(ctx, s, *downstream, ctx.rng.axis());
  } else if (upstream) {
    route_case_ii(ctx, s, *upstream);
  } else {
    route_bell(ctx, s);
    return class_of(s.twist);
  }
  return class_of(*s.value);
}

// Secure-variant cheater -----------------------------------------------------------

void SecureCheater::begin(const SessionContext& ctx) {
  EntanglingCheater::begin(ctx);
  weight_w_ = codes::weight_w_codewords(ctx.config.code->code, ctx.config.code->w);
  committed_.assign(static_cast<std::size_t>(ctx.config.runs), -1);
  extra_.assign(static_cast<std::size_t>(ctx.config.runs), Extra{});
}

Action SecureCheater::on_receive_qubit(const RunContext& ctx, Register& reg) {
  return entangle(ctx, reg, random_twist(ctx.rng), std::nullopt);
}

bool SecureCheater::known_zero(const AnnounceContext& ctx, int h) const {
  if (const auto bit = ctx.view.bit_of(ctx.run, h)) return *bit == 0;
  bool any = false;
  for (const auto& c : weight_w_) {
    bool consistent = true;
    for (int i = 0; i < ctx.run && consistent; ++i) consistent = ctx.view.bit_of(i, h) == c.bit(i);
    if (!consistent) continue;
    if (c.bit(ctx.run) != 0) return false;
    any = true;
  }
  return any;
}

int SecureCheater::on_bit_turn(const AnnounceContext& ctx) {
  const int r = ctx.run;
  Extra& e = extra_[static_cast<std::size_t>(r)];
  const int n = ctx.config.runs;
  const int d = ctx.config.code->code.min_distance();
  e.late = r >= n - d;
  const auto said_zero = [&](int h) { return ctx.view.bit_of(r, h) == 0; };
  e.safe = known_zero(ctx, a_) || known_zero(ctx, b_);
  // X/Y is announced only after an honest neighbour said 0 this run, or once
  // completion of the last d coordinates reveals a 0.
  e.eligible = said_zero(a_) || said_zero(b_) || (e.late && e.safe);

  bool has0 = false, has1 = false;
  for (const auto& c : weight_w_) {
    bool consistent = true;
    for (int i = 0; i < r && consistent; ++i) consistent = committed_[static_cast<std::size_t>(i)] == c.bit(i);
    if (!consistent) continue;
    (c.bit(r) == 0 ? has0 : has1) = true;
  }
  int bit = e.eligible ? (has0 ? 0 : 1) : (has1 ? 1 : 0);
  committed_[static_cast<std::size_t>(r)] = bit;
  e.bit = bit;
  return bit;
}

std::optional<PhaseAngle> SecureCheater::phase_before_a(const AnnounceContext& ctx) const {
  PhaseAngle theta;
  for (int j = 1; j < a_; ++j) {
    auto it = private_.find({ctx.run, j});
    if (it == private_.end()) return std::nullopt;
    const Action& act = it->second;
    if (act.cls == ActionClass::Z) {
      theta = x_anchor(*act.z_outcome) + act.phases.at(1);
    } else {
      theta += act.phases.at(0);
    }
  }
  return theta;
}

std::optional<ActionClass> SecureCheater::class_after_a(const AnnounceContext& ctx) const {
  const auto before = phase_before_a(ctx);
  const auto cls = ctx.view.class_of_participant(ctx.run, a_);
  if (!before || !cls) return std::nullopt;
  return add(class_of(*before), *cls);
}

std::optional<ActionClass> SecureCheater::downstream_class(const AnnounceContext& ctx) const {
  const int n = ctx.config.participants;
  auto total = ctx.view.class_of_participant(ctx.run, b_);
  if (!total) return std::nullopt;
  for (int j = b_ + 1; j <= n; ++j) {
    auto it = private_.find({ctx.run, j});
    if (it == private_.end()) return std::nullopt;
    total = add(*total, class_of(it->second.phases.at(0)));
    if (it->second.cls == ActionClass::Z) break;  // next measurement point
  }
  return total;
}

ActionClass SecureCheater::on_class_turn(const AnnounceContext& ctx) {
  const int r = ctx.run;
  RunState& s = state(r);
  Extra& e = extra_[static_cast<std::size_t>(r)];
  const bool a_xy = ctx.view.bit_of(r, a_) == 0;
  const bool b_xy = ctx.view.bit_of(r, b_) == 0;
  if (a_xy) {
    if (const auto upstream = class_after_a(ctx)) {
      route_case_ii(ctx, s, *upstream);
      return class_of(*s.value);
    }
  }
  if (b_xy) {
    if (const auto downstream = downstream_class(ctx)) {
      route_b(ctx, s, *downstream, ctx.rng.axis());
      return class_of(*s.value);
    }
  }
  if (a_xy) {
    route_bell(ctx, s);
    return class_of(s.twist);
  }
  if (b_xy) {
    s.route = "deferred_B";
    s.committed = ctx.rng.coin() ? ActionClass::Y : ActionClass::X;
    return *s.committed;
  }
  e.forced = true;
  if (mode_ == GuessMode::Bell) {
    s.route = "forced_bell";
    route_bell(ctx, s);
    return class_of(s.twist);
  }
  s.route = "forced_guess";
  s.committed = ctx.rng.coin() ? ActionClass::Y : ActionClass::X;
  return *s.committed;
}

void SecureCheater::complete_z(const AnnounceContext& ctx, RunState& s, Extra& e) {
  if (e.z_first) return;
  s.route = "z";
  e.z_first = ctx.rng.coin() ? kPhaseHalfPi : kPhase0;
  ctx.reg.apply_phase(s.chi, *e.z_first);
  e.z_outcome = ctx.reg.measure(s.chi, Axis::X, ctx.rng).sign;
  const PhaseAngle next = s.twist - eigen_phase(ctx.reg.measure(s.psi, Axis::X, ctx.rng));
  e.z_second = next - x_anchor(*e.z_outcome);
  s.claimed_next = next;
}

void SecureCheater::complete(const AnnounceContext& ctx, RunState& s) {
  Extra& e = extra_[static_cast<std::size_t>(ctx.run)];
  if (e.bit == 1) {
    complete_z(ctx, s, e);
    return;
  }
  if (s.value) return;
  if (s.route == "bell" || s.route == "forced_bell") {
    auto upstream = class_after_a(ctx);
    if (!upstream) upstream = ctx.rng.coin() ? ActionClass::Y : ActionClass::X;  // guessed
    s.value = quantum::effective_phase_after_bell(*s.bell, s.twist, class_rep(*upstream));
    s.claimed_prev = class_rep(*upstream) + (ctx.rng.coin() ? kPhasePi : kPhase0);
    s.claimed_next = *s.claimed_prev + *s.value;
  } else if (s.route == "deferred_B") {
    const ActionClass downstream = downstream_class(ctx).value_or(ActionClass::X);
    const Axis psi_axis = class_of(s.twist) == downstream ? Axis::X : Axis::Y;
    const PhaseAngle next = s.twist - eigen_phase(ctx.reg.measure(s.psi, psi_axis, ctx.rng));
    // chi's basis is whatever makes the committed class come out right.
    const Axis chi_axis = axis_for(add(class_of(next), *s.committed));
    const PhaseAngle prev = eigen_phase(ctx.reg.measure(s.chi, chi_axis, ctx.rng));
    s.value = next - prev;
    s.claimed_prev = prev;
    s.claimed_next = next;
  } else if (s.route == "forced_guess") {
    s.value = class_rep(*s.committed) + (ctx.rng.coin() ? kPhasePi : kPhase0);
  }
}

ValueMessage SecureCheater::on_value_turn(const AnnounceContext& ctx) {
  RunState& s = state(ctx.run);
  Extra& e = extra_[static_cast<std::size_t>(ctx.run)];
  complete(ctx, s);
  if (e.bit == 1) {
    if (ctx.round == 1) return ValueMessage{{*e.z_first}, e.z_outcome};
    return ValueMessage{{*e.z_second}, std::nullopt};
  }
  return ValueMessage{{*s.value}, std::nullopt};
}

std::vector<CheaterNote> SecureCheater::finish_run(const AnnounceContext& ctx) {
  auto notes = EntanglingCheater::finish_run(ctx);
  const Extra& e = extra_[static_cast<std::size_t>(ctx.run)];
  auto& note = notes.front();
  note.route = state(ctx.run).route;
  note.forced_guess = e.forced;
  note.safe_opportunity = e.safe;
  note.eligible_opportunity = e.eligible;
  note.late_run = e.late;
  return notes;
}

double safe_opportunity_probability(const std::vector<codes::Codeword>& weight_w, int run) {
  if (weight_w.empty()) return 0.0;
  // Bit at `run` is inferable as 0 from the codeword's earlier bits alone.
  auto inferred_zero = [&](const codes::Codeword& c) {
    for (const auto& other : weight_w) {
      bool consistent = true;
      for (int i = 0; i < run && consistent; ++i) consistent = other.bit(i) == c.bit(i);
      if (consistent && other.bit(run) != 0) return false;
    }
    return true;
  };
  std::vector<bool> inferable(weight_w.size());
  for (std::size_t i = 0; i < weight_w.size(); ++i) inferable[i] = inferred_zero(weight_w[i]);
  // Relative orders of (a, b, k): a before k and b before k in {both, one, one, none}.
  constexpr std::array<std::pair<bool, bool>, 6> orders = {{{true, true}, {true, true}, {true, false},
                                                            {false, true}, {false, false}, {false, false}}};
  double hits = 0.0;
  for (std::size_t ia = 0; ia < weight_w.size(); ++ia) {
    for (std::size_t ib = 0; ib < weight_w.size(); ++ib) {
      for (auto [a_first, b_first] : orders) {
        const bool ka = inferable[ia] || (a_first && weight_w[ia].bit(run) == 0);
        const bool kb = inferable[ib] || (b_first && weight_w[ib].bit(run) == 0);
        hits += (ka || kb) ? 1.0 : 0.0;
      }
    }
  }
  const double total = 6.0 * static_cast<double>(weight_w.size() * weight_w.size());
  return hits / total;
}

// Factory ---------------------------------------------------------------------------

StrategySpec parse_strategy_spec(const std::string& text) {
  StrategySpec spec;
  const auto colon = text.find(':');
  spec.kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  static const std::array<std::string, 7> kinds = {"honest",    "intercept", "eavesdrop",  "strategyA",
                                                    "strategyB", "collude",   "secureCheat"};
  if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end()) {
    throw StrategyError("unknown strategy '" + text + "'");
  }
  if (spec.kind == "collude") {
    if (arg == "N" || arg == "n") {
      spec.partner = 0;
    } else {
      try {
        spec.partner = std::stoi(arg);
      } catch (const std::exception&) {
        throw StrategyError("collude needs a partner: collude:1 or collude:N");
      }
    }
  } else if (spec.kind == "secureCheat") {
    if (arg == "bell") {
      spec.guess = GuessMode::Bell;
    } else if (!arg.empty() && arg != "guess") {
      throw StrategyError("unknown secureCheat mode '" + arg + "'");
    }
  } else if (!arg.empty()) {
    throw StrategyError("strategy '" + spec.kind + "' takes no argument");
  }
  return spec;
}

StrategyList make_strategies(ProtocolConfig& config, const StrategySpec& spec, int cheater) {
  const int n = config.participants;
  StrategyList list;
  auto fill_honest = [&] {
    list.clear();
    for (int j = 1; j <= n; ++j) list.push_back(std::make_unique<HonestStrategy>());
  };
  auto need_middle = [&] {
    if (cheater < 2 || cheater > n - 1) {
      throw StrategyError("cheater position must lie in 2.." + std::to_string(n - 1));
    }
  };
  if (spec.kind == "honest") {
    fill_honest();
  } else if (spec.kind == "intercept" || spec.kind == "eavesdrop") {
    if (cheater < 2 || cheater > n) throw StrategyError("intercept position must lie in 2.." + std::to_string(n));
    fill_honest();
    list[cheater - 1] = std::make_unique<InterceptStrategy>(spec.kind);
  } else if (spec.kind == "strategyA" || spec.kind == "strategyB") {
    if (config.variant == Variant::Secure) throw StrategyError(spec.kind + " does not apply to the secure variant");
    need_middle();
    fill_honest();
    if (spec.kind == "strategyA") {
      list[cheater - 1] = std::make_unique<StrategyA>(cheater);
    } else {
      list[cheater - 1] = std::make_unique<StrategyB>(cheater);
    }
  } else if (spec.kind == "collude") {
    if (config.variant != Variant::Modified2) throw StrategyError("collusion is defined against mod2");
    need_middle();
    const int partner = spec.partner.value_or(0) == 0 ? n : *spec.partner;
    if (partner != 1 && partner != n) throw StrategyError("collusion partner must be R_1 or R_N");
    auto channel = std::make_shared<PrivateChannel>();
    fill_honest();
    auto cheat = std::make_unique<CollusionCheater>(cheater, partner);
    channel->subscribe(cheat.get());
    list[cheater - 1] = std::move(cheat);
    list[partner - 1] = std::make_unique<ColludingHonestStrategy>(channel);
  } else if (spec.kind == "secureCheat") {
    if (config.variant != Variant::Secure) throw StrategyError("secureCheat applies to the secure variant only");
    need_middle();
    if (config.honest.empty()) config.honest = {cheater - 1, cheater + 1};
    std::vector<int> honest = config.honest;
    std::sort(honest.begin(), honest.end());
    if (honest.size() != 2 || honest[0] != cheater - 1 || honest[1] != cheater + 1 || honest[0] < 2 ||
        honest[1] > n - 1) {
      throw StrategyError("secureCheat needs honest middle neighbours at k-1 and k+1");
    }
    auto channel = std::make_shared<PrivateChannel>();
    auto cheat = std::make_unique<SecureCheater>(cheater, honest[0], honest[1], spec.guess);
    channel->subscribe(cheat.get());
    for (int j = 1; j <= n; ++j) {
      if (j == cheater) {
        list.push_back(std::move(cheat));
      } else if (j == honest[0] || j == honest[1]) {
        list.push_back(std::make_unique<HonestStrategy>());
      } else {
        list.push_back(std::make_unique<ColludingHonestStrategy>(channel));
      }
    }
  }
  return list;
}

}  // namespace qsslab::adversary
