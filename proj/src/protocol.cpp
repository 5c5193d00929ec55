#include "qsslab/protocol.hpp"

#include <algorithm>
#include <numeric>

#include "qsslab/strategy.hpp"

namespace qsslab::protocol {

// Names ----------------------------------------------------------------------

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Original: return "original";
    case Variant::Modified1: return "mod1";
    case Variant::Modified2: return "mod2";
    case Variant::Secure: return "secure";
  }
  return "?";
}

std::string_view to_string(ActionClass c) {
  switch (c) {
    case ActionClass::X: return "X";
    case ActionClass::Y: return "Y";
    case ActionClass::Z: return "Z";
  }
  return "?";
}

std::string_view to_string(ValueOrder o) {
  switch (o) {
    case ValueOrder::Random: return "random";
    case ValueOrder::FocusFirst: return "focus-first";
    case ValueOrder::FocusLast: return "focus-last";
  }
  return "?";
}

Variant parse_variant(std::string_view s) {
  if (s == "original") return Variant::Original;
  if (s == "mod1" || s == "modified1") return Variant::Modified1;
  if (s == "mod2" || s == "modified2") return Variant::Modified2;
  if (s == "secure") return Variant::Secure;
  throw ConfigError("unknown variant '" + std::string(s) + "'");
}

ActionClass parse_class(std::string_view s) {
  if (s == "X") return ActionClass::X;
  if (s == "Y") return ActionClass::Y;
  if (s == "Z") return ActionClass::Z;
  throw ConfigError("unknown action class '" + std::string(s) + "'");
}

ValueOrder parse_value_order(std::string_view s) {
  if (s == "random") return ValueOrder::Random;
  if (s == "focus-first") return ValueOrder::FocusFirst;
  if (s == "focus-last") return ValueOrder::FocusLast;
  throw ConfigError("unknown value order '" + std::string(s) + "'");
}

ActionClass class_of(PhaseAngle phase) { return phase.is_x_class() ? ActionClass::X : ActionClass::Y; }

std::optional<Sign> predict_outcome(std::span<const PhaseAngle> phases) {
  PhaseAngle total;
  for (auto p : phases) total += p;
  if (!total.is_x_class()) return std::nullopt;
  return x_sign_of(total);
}

void ProtocolConfig::validate() const {
  if (participants < 3) throw ConfigError("at least 3 participants are required");
  if (runs < 1) throw ConfigError("run count must be positive");
  if (!(check_fraction > 0.0 && check_fraction <= 1.0)) throw ConfigError("check fraction must lie in (0, 1]");
  if (variant == Variant::Secure) {
    if (!code) throw ConfigError("secure variant requires a code file");
    if (code->code.length() != runs) {
      throw ConfigError("code length " + std::to_string(code->code.length()) + " does not match run count " +
                        std::to_string(runs));
    }
    if (!codes::validate_params(runs, code->w, code->code.min_distance())) {
      throw ConfigError("code distance violates the required bounds");
    }
  }
  if (value_order != ValueOrder::Random && (focus < 1 || focus > participants)) {
    throw ConfigError("value order override needs a focus participant");
  }
  for (int h : honest) {
    if (h < 1 || h > participants) throw ConfigError("honest position out of range");
  }
}

// Records ----------------------------------------------------------------------

std::optional<int> RunRecord::announced_bit(int participant) const {
  for (const auto& a : bit_stage) {
    if (a.participant == participant) return a.bit;
  }
  return std::nullopt;
}

std::optional<ActionClass> RunRecord::announced_class(int participant) const {
  for (const auto& a : class_stage) {
    if (a.participant == participant) return a.cls;
  }
  return std::nullopt;
}

bool RunRecord::has_z_announcement() const {
  return std::any_of(bit_stage.begin(), bit_stage.end(), [](const Announcement& a) { return a.bit == 1; });
}

const CheckVerdict* Transcript::verdict(int check) const {
  for (const auto& v : verdicts) {
    if (v.check == check) return &v;
  }
  return nullptr;
}

bool Transcript::all_checks_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const CheckVerdict& v) { return v.pass; });
}

// Register -----------------------------------------------------------------------

Register::Register() : state_(quantum::plus_x_state()) {}

void Register::set_traveling(int qubit) {
  if (qubit < 0 || qubit >= state_.num_qubits()) throw quantum::QuantumError("traveling qubit out of range");
  traveling_ = qubit;
}

int Register::attach(const quantum::JointState& extra) {
  const int first = state_.num_qubits();
  state_ = quantum::tensor(state_, extra);
  return first;
}

void Register::apply_phase(int qubit, PhaseAngle phase) {
  state_ = quantum::apply_phase(state_, qubit, phase);
  log_.push_back({Op::Kind::Phase, qubit, -1, phase, {}, {}});
}

Outcome Register::measure(int qubit, Axis axis, Rng& rng) {
  auto m = quantum::measure(state_, qubit, axis, rng);
  state_ = std::move(m.state);
  log_.push_back({Op::Kind::Project, qubit, -1, {}, m.outcome, {}});
  return m.outcome;
}

quantum::BellOutcome Register::bell_measure(int q1, int q2, Rng& rng) {
  auto m = quantum::bell_measure(state_, q1, q2, rng);
  state_ = std::move(m.state);
  log_.push_back({Op::Kind::Bell, q1, q2, {}, {}, m.outcome});
  return m.outcome;
}

std::optional<PhaseAngle> Register::traveling_phase() const { return quantum::qubit_phase(state_, traveling_); }

std::optional<PhaseAngle> Register::phase_at(const Mark& mark) const {
  quantum::JointState s = mark.state;
  for (std::size_t i = mark.log_position; i < log_.size(); ++i) {
    const Op& op = log_[i];
    if (op.q1 == mark.traveling || op.q2 == mark.traveling) continue;
    if (op.q1 >= s.num_qubits() || op.q2 >= s.num_qubits()) continue;  // qubits attached later
    switch (op.kind) {
      case Op::Kind::Phase: s = quantum::apply_phase(s, op.q1, op.phase); break;
      case Op::Kind::Project: s = quantum::project(s, op.q1, op.outcome); break;
      case Op::Kind::Bell: s = quantum::bell_project(s, op.q1, op.q2, op.bell); break;
    }
  }
  return quantum::qubit_phase(s, mark.traveling);
}

// Honest disclosure ---------------------------------------------------------------

ValueMessage honest_value(const AnnounceContext& ctx, const Action& action) {
  const int n = ctx.config.participants;
  const bool z_run = ctx.view.has_z(ctx.run);
  ValueMessage m;
  if (!z_run) {
    m.phases = {action.phases.front()};
    if (ctx.participant == n) m.outcome = ctx.own_outcome;
    return m;
  }
  if (ctx.participant == n) {
    if (ctx.round == 1) m.phases = {action.phases.front()}, m.outcome = ctx.own_outcome;
  } else if (ctx.participant == 1) {
    if (ctx.round == 2) m.phases = {action.phases.front()};
  } else if (action.cls == ActionClass::Z) {
    if (ctx.round == 1) m.phases = {action.phases.at(0)}, m.outcome = action.z_outcome;
    if (ctx.round == 2) m.phases = {action.phases.at(1)};
  } else {
    m.phases = {action.phases.front()};
  }
  return m;
}

// Engine ---------------------------------------------------------------------------

namespace {

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

void shuffle(std::vector<int>& v, Rng& rng) { rng.shuffle(std::span<int>(v)); }

std::vector<int> class_order(const ProtocolConfig& cfg, const RunRecord& run, Rng& rng) {
  const int n = cfg.participants;
  std::vector<int> order;
  switch (cfg.variant) {
    case Variant::Original:
      order = range(1, n);
      shuffle(order, rng);
      break;
    case Variant::Modified1:
      order = range(1, n);
      std::reverse(order.begin(), order.end());
      break;
    case Variant::Modified2: {
      order = range(2, n - 1);
      shuffle(order, rng);
      std::vector<int> ends{1, n};
      shuffle(ends, rng);
      order.insert(order.end(), ends.begin(), ends.end());
      break;
    }
    case Variant::Secure:
      order.push_back(1);
      for (int j = 2; j < n; ++j) {
        if (run.announced_bit(j) == 0) order.push_back(j);
      }
      order.push_back(n);
      shuffle(order, rng);
      break;
  }
  return order;
}

void apply_focus(const ProtocolConfig& cfg, std::vector<int>& order) {
  auto it = std::find(order.begin(), order.end(), cfg.focus);
  if (it == order.end() || cfg.value_order == ValueOrder::Random) return;
  order.erase(it);
  if (cfg.value_order == ValueOrder::FocusFirst) {
    order.insert(order.begin(), cfg.focus);
  } else {
    order.push_back(cfg.focus);
  }
}

// Speakers of each value-stage round for one checked run.
std::vector<std::vector<int>> value_rounds(const ProtocolConfig& cfg, const RunRecord& run, Rng& rng) {
  const int n = cfg.participants;
  std::vector<std::vector<int>> rounds;
  if (!run.has_z_announcement()) {
    rounds.push_back(range(1, n));
  } else {
    std::vector<int> xy, z;
    for (int j = 2; j < n; ++j) (run.announced_bit(j) == 1 ? z : xy).push_back(j);
    rounds.push_back(xy);
    std::vector<int> r1 = z, r2 = z;
    r1.push_back(n);
    r2.push_back(1);
    rounds.push_back(r1);
    rounds.push_back(r2);
  }
  for (auto& r : rounds) {
    shuffle(r, rng);
    apply_focus(cfg, r);
  }
  return rounds;
}

}  // namespace

Transcript run_protocol(const ProtocolConfig& config, StrategyList& strategies, Rng& rng) {
  config.validate();
  const int n = config.participants;
  if (static_cast<int>(strategies.size()) != n) {
    throw ConfigError("expected " + std::to_string(n) + " strategies, got " + std::to_string(strategies.size()));
  }
  Transcript t;
  t.config = config;
  t.runs.resize(static_cast<std::size_t>(config.runs));
  const PublicView view(t.runs);

  for (int j = 1; j <= n; ++j) strategies[j - 1]->begin(SessionContext{config, j, rng});

  // Qubit transmission. R_N's measurement is done here, before any
  // announcement; held qubits are measured later on the same joint state.
  std::vector<Register> regs(t.runs.size());
  std::vector<std::vector<Register::Mark>> marks(t.runs.size());
  for (int r = 0; r < config.runs; ++r) {
    auto& run = t.runs[r];
    auto& reg = regs[r];
    run.index = r;
    run.trace.resize(static_cast<std::size_t>(n + 1));
    for (int j = 1; j <= n; ++j) {
      if (j > 1) {
        run.trace[j - 1] = reg.traveling_phase();
        marks[r].push_back(reg.mark());
      }
      run.actions.push_back(strategies[j - 1]->on_receive_qubit(RunContext{config, r, j, rng}, reg));
      run.actions.back().participant = j;
    }
    run.trace[0] = kPhase0;
    run.trace[n] = reg.traveling_phase();
    marks[r].push_back(reg.mark());
    run.rn_outcome = reg.measure(reg.traveling(), Axis::X, rng).sign;
  }

  auto announce_ctx = [&](int r, int j, int round) {
    std::optional<Sign> own;
    if (j == n) own = t.runs[r].rn_outcome;
    return AnnounceContext{config, r, j, round, view, regs[r], rng, own};
  };

  if (config.variant == Variant::Secure) {
    for (int r = 0; r < config.runs; ++r) {
      auto order = range(2, n - 1);
      shuffle(order, rng);
      int pos = 0;
      for (int j : order) {
        const int bit = strategies[j - 1]->on_bit_turn(announce_ctx(r, j, 0));
        if (bit != 0 && bit != 1) throw ConfigError("strategy announced a non-binary bit");
        Announcement a;
        a.stage = Stage::Bit;
        a.position = pos++;
        a.participant = j;
        a.bit = bit;
        t.runs[r].bit_stage.push_back(a);
      }
    }
  }

  for (int r = 0; r < config.runs; ++r) {
    int pos = 0;
    for (int j : class_order(config, t.runs[r], rng)) {
      const ActionClass c = strategies[j - 1]->on_class_turn(announce_ctx(r, j, 0));
      if (c == ActionClass::Z) throw ConfigError("class Z cannot be announced in the class stage");
      Announcement a;
      a.stage = Stage::Class;
      a.position = pos++;
      a.participant = j;
      a.cls = c;
      t.runs[r].class_stage.push_back(a);
    }
  }

  for (int r : valid_runs(t)) t.runs[r].valid = true;
  select_checked_runs(t, rng);

  for (int r = 0; r < config.runs; ++r) {
    auto& run = t.runs[r];
    if (!run.checked) continue;
    int pos = 0;
    const auto rounds = value_rounds(config, run, rng);
    for (std::size_t round = 0; round < rounds.size(); ++round) {
      for (int j : rounds[round]) {
        const auto m = strategies[j - 1]->on_value_turn(announce_ctx(r, j, static_cast<int>(round)));
        Announcement a;
        a.stage = Stage::Value;
        a.position = pos++;
        a.participant = j;
        a.round = static_cast<int>(round);
        a.phases = m.phases;
        a.outcome = m.outcome;
        run.value_stage.push_back(a);
      }
    }
  }

  for (int r = 0; r < config.runs; ++r) {
    auto& run = t.runs[r];
    for (int j = 1; j <= n; ++j) {
      auto notes = strategies[j - 1]->finish_run(announce_ctx(r, j, 0));
      for (auto& note : notes) {
        note.participant = j;
        run.notes.push_back(std::move(note));
      }
    }
    // Ground truth wherever the traveling qubit was entangled at the time.
    for (int j = 1; j <= n; ++j) {
      if (!run.trace[j]) run.trace[j] = regs[r].phase_at(marks[r][j - 1]);
    }
    for (int j = 2; j <= n; ++j) {
      auto& act = run.actions[j - 1];
      if (act.definite || !act.phases.empty()) continue;
      if (run.trace[j - 1] && run.trace[j]) {
        act.phases = {*run.trace[j] - *run.trace[j - 1]};
        act.cls = class_of(act.phases.front());
      }
    }
  }

  if (config.variant == Variant::Secure) {
    t.verdicts.push_back(security_check_1(t, config.code->code, config.code->w));
  }
  t.verdicts.push_back(security_check_2(static_cast<const Transcript&>(t)));
  return t;
}

}  // namespace qsslab::protocol
