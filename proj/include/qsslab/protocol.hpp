#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qsslab/codes.hpp"
#include "qsslab/phase.hpp"
#include "qsslab/rng.hpp"

namespace qsslab::protocol {

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class RunNotValid : public std::runtime_error {
  using std::runtime_error::runtime_error;
};
class CoalitionWrongSize : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Variant { Original, Modified1, Modified2, Secure };
enum class ActionClass { X, Y, Z };
enum class Stage { Bit, Class, Value };

/// Who announces values first in the value stage. The override applies to
/// ProtocolConfig::focus; everyone else stays in random order.
enum class ValueOrder { Random, FocusFirst, FocusLast };

std::string_view to_string(Variant v);
std::string_view to_string(ActionClass c);
std::string_view to_string(ValueOrder o);
Variant parse_variant(std::string_view s);
ActionClass parse_class(std::string_view s);
ValueOrder parse_value_order(std::string_view s);

/// X for {0, pi}, Y for {pi/2, 3pi/2}.
ActionClass class_of(PhaseAngle phase);

/// Plus if the phases sum to 0 mod 2pi, Minus for pi, nullopt when the X
/// measurement is random.
std::optional<Sign> predict_outcome(std::span<const PhaseAngle> phases);

struct ProtocolConfig {
  Variant variant = Variant::Original;
  int participants = 5;
  int runs = 100;
  double check_fraction = 0.5;
  std::optional<codes::CodeFile> code;  // Secure only
  std::uint64_t seed = 1;
  ValueOrder value_order = ValueOrder::Random;
  int focus = 0;
  /// Positions known to be honest; only used to bracket localization intervals.
  std::vector<int> honest;

  /// Throws ConfigError.
  void validate() const;
  bool is_middle(int participant) const { return participant > 1 && participant < participants; }
};

/// Ground truth of what one participant did to the qubit in one run.
struct Action {
  int participant = 0;
  /// nullopt when the participant's effect on the qubit was not a phase.
  std::optional<ActionClass> cls;
  std::optional<int> bit;
  std::vector<PhaseAngle> phases;  // {phi} for X/Y, {phi1, phi2} for Z
  std::optional<Sign> z_outcome;
  /// Strategy label; "honest" for the honest baseline.
  std::string strategy = "honest";
  /// False when the participant did not apply a definite phase (e.g. forwarded
  /// half of an EPR pair); `phases` then holds the effective phase when it
  /// could be recovered afterwards.
  bool definite = true;
};

struct Announcement {
  Stage stage = Stage::Class;
  int position = 0;
  int participant = 0;
  int round = 0;
  std::optional<int> bit;
  std::optional<ActionClass> cls;
  std::vector<PhaseAngle> phases;
  std::optional<Sign> outcome;
};

/// Per-run bookkeeping a deviating strategy reports about itself. Claims are
/// audited against the run's ground-truth trace, never trusted.
struct CheaterNote {
  int participant = 0;
  std::string route;
  std::optional<PhaseAngle> twist;
  std::optional<PhaseAngle> claimed_prev;  // theta_{k-1}
  std::optional<PhaseAngle> claimed_next;  // theta_k
  bool forced_guess = false;
  bool inexact = false;
  std::optional<bool> safe_opportunity;
  std::optional<bool> eligible_opportunity;
  bool late_run = false;
};

struct RunRecord {
  int index = 0;
  std::vector<Action> actions;  // actions[j-1] belongs to R_j
  Sign rn_outcome = Sign::Plus;
  /// theta_0..theta_N: phase of the traveling qubit after each participant,
  /// nullopt where it was entangled or otherwise undefined.
  std::vector<std::optional<PhaseAngle>> trace;
  std::vector<Announcement> bit_stage;
  std::vector<Announcement> class_stage;
  std::vector<Announcement> value_stage;
  bool valid = false;
  bool checked = false;
  std::vector<CheaterNote> notes;

  std::optional<int> announced_bit(int participant) const;
  std::optional<ActionClass> announced_class(int participant) const;
  /// Any announced bit equal to 1.
  bool has_z_announcement() const;
};

struct CheckVerdict {
  int check = 0;
  bool pass = true;
  std::vector<int> failing_runs;
  std::vector<int> failing_participants;
  std::optional<std::pair<int, int>> interval;
};

struct Transcript {
  ProtocolConfig config;
  std::vector<RunRecord> runs;
  std::vector<CheckVerdict> verdicts;

  const CheckVerdict* verdict(int check) const;
  bool all_checks_pass() const;
};

class Strategy;
using StrategyList = std::vector<std::unique_ptr<Strategy>>;

/// Executes every physical run, then the variant's announcement stages, the
/// checks and the bookkeeping. Strategies are indexed by participant - 1.
Transcript run_protocol(const ProtocolConfig& config, StrategyList& strategies, Rng& rng);

/// Runs where no bit 1 was announced and the announced classes have even Y parity.
std::vector<int> valid_runs(const Transcript& transcript);

/// Every middle participant's announced bit string is a weight-w codeword.
CheckVerdict security_check_1(const Transcript& transcript, const codes::LinearCode& code, int w);

/// Marks a check_fraction sample of valid runs (and every run with a bit 1
/// announcement) as checked.
void select_checked_runs(Transcript& transcript, Rng& rng);

/// Consistency of value-stage announcements on checked runs; deterministic
/// given the transcript.
CheckVerdict security_check_2(const Transcript& transcript);
/// Selects the checked runs with `rng`, then checks them.
CheckVerdict security_check_2(Transcript& transcript, Rng& rng);

/// Recomputes every verdict from announcements alone.
std::vector<CheckVerdict> recompute_verdicts(const Transcript& transcript);

/// Phase of `target` recovered by the other N-1 participants pooling their
/// phases. For target R_N the coalition lacks R_N's outcome, and what it
/// recovers is R_N's outcome-adjusted phase phi_N - T (see secret_of).
PhaseAngle reconstruct_secret(const Transcript& transcript, int run, const std::vector<int>& coalition,
                              int target);

/// Ground-truth value reconstruct_secret should produce.
PhaseAngle secret_of(const RunRecord& run, int target, int participants);

}  // namespace qsslab::protocol
