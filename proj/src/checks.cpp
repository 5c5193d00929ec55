#include <algorithm>
#include <cmath>
#include <map>

#include "qsslab/protocol.hpp"

namespace qsslab::protocol {

namespace {

struct RunFinding {
  bool pass = true;
  std::vector<int> culprits;
  std::optional<std::pair<int, int>> segment;
};

// Announcements of one participant in one run's value stage, by round.
const Announcement* value_of(const RunRecord& run, int participant, int round) {
  for (const auto& a : run.value_stage) {
    if (a.participant == participant && a.round == round) return &a;
  }
  return nullptr;
}

void fail_segment(RunFinding& f, int lo, int hi) {
  f.pass = false;
  if (!f.segment) f.segment = {lo, hi};
}

void fail_participant(RunFinding& f, int j) {
  f.pass = false;
  if (std::find(f.culprits.begin(), f.culprits.end(), j) == f.culprits.end()) f.culprits.push_back(j);
  if (!f.segment) f.segment = {j, j};
}

// Single phase from an announcement, or nullopt if malformed.
std::optional<PhaseAngle> single_phase(const Announcement* a) {
  if (a == nullptr || a->phases.size() != 1) return std::nullopt;
  return a->phases.front();
}

void cross_check_class(const RunRecord& run, int j, PhaseAngle phase, RunFinding& f) {
  const auto cls = run.announced_class(j);
  if (cls && *cls != class_of(phase)) fail_participant(f, j);
}

bool outcome_consistent(PhaseAngle cumulative, Sign outcome) {
  return !cumulative.is_x_class() || x_sign_of(cumulative) == outcome;
}

RunFinding check_plain_run(const RunRecord& run, int n) {
  RunFinding f;
  std::vector<PhaseAngle> phases;
  for (int j = 1; j <= n; ++j) {
    const auto p = single_phase(value_of(run, j, 0));
    if (!p) {
      fail_participant(f, j);
      continue;
    }
    cross_check_class(run, j, *p, f);
    phases.push_back(*p);
  }
  const Announcement* last = value_of(run, n, 0);
  if (!f.pass || last == nullptr || !last->outcome) {
    if (last == nullptr || !last->outcome) fail_participant(f, n);
    return f;
  }
  const auto predicted = predict_outcome(phases);
  if (!predicted || *predicted != *last->outcome) fail_segment(f, 1, n);
  return f;
}

// Walks the announced chain in transmission order, re-anchoring at every
// announced measurement.
RunFinding check_z_run(const RunRecord& run, int n) {
  RunFinding f;
  PhaseAngle cumulative;
  int anchor = 1;
  for (int j = 1; j <= n; ++j) {
    if (j == 1) {
      const auto p = single_phase(value_of(run, 1, 2));
      if (!p) return fail_participant(f, 1), f;
      cross_check_class(run, 1, *p, f);
      cumulative += *p;
    } else if (j == n) {
      const Announcement* a = value_of(run, n, 1);
      const auto p = single_phase(a);
      if (!p || !a->outcome) return fail_participant(f, n), f;
      cross_check_class(run, n, *p, f);
      cumulative += *p;
      if (!outcome_consistent(cumulative, *a->outcome)) fail_segment(f, anchor, n);
    } else if (run.announced_bit(j) == 1) {
      const Announcement* first = value_of(run, j, 1);
      const auto p1 = single_phase(first);
      const auto p2 = single_phase(value_of(run, j, 2));
      if (!p1 || !p2 || !first->outcome || p1->quarter_turns() > 1) return fail_participant(f, j), f;
      cumulative += *p1;
      if (!outcome_consistent(cumulative, *first->outcome)) fail_segment(f, anchor, j);
      cumulative = eigen_phase(Outcome{*first->outcome, Axis::X}) + *p2;
      anchor = j;
    } else {
      const auto p = single_phase(value_of(run, j, 0));
      if (!p) return fail_participant(f, j), f;
      cross_check_class(run, j, *p, f);
      cumulative += *p;
    }
  }
  return f;
}

std::pair<int, int> widen(std::pair<int, int> seg, const std::vector<int>& honest) {
  int lo = seg.first, hi = seg.second;
  std::optional<int> best_lo, best_hi;
  for (int h : honest) {
    if (h <= seg.first && (!best_lo || h > *best_lo)) best_lo = h;
    if (h >= seg.second && (!best_hi || h < *best_hi)) best_hi = h;
  }
  if (best_lo) lo = *best_lo;
  if (best_hi) hi = *best_hi;
  return {lo, hi};
}

// Intersection of all intervals if nonempty, otherwise their hull.
std::optional<std::pair<int, int>> combine(const std::vector<std::pair<int, int>>& intervals) {
  if (intervals.empty()) return std::nullopt;
  int lo = intervals[0].first, hi = intervals[0].second;
  int hull_lo = lo, hull_hi = hi;
  for (const auto& [a, b] : intervals) {
    lo = std::max(lo, a);
    hi = std::min(hi, b);
    hull_lo = std::min(hull_lo, a);
    hull_hi = std::max(hull_hi, b);
  }
  if (lo <= hi) return std::pair{lo, hi};
  return std::pair{hull_lo, hull_hi};
}

}  // namespace

std::vector<int> valid_runs(const Transcript& transcript) {
  std::vector<int> out;
  for (const auto& run : transcript.runs) {
    if (run.has_z_announcement()) continue;
    int y = 0;
    for (const auto& a : run.class_stage) y += a.cls == ActionClass::Y;
    if (y % 2 == 0) out.push_back(run.index);
  }
  return out;
}

CheckVerdict security_check_1(const Transcript& transcript, const codes::LinearCode& code, int w) {
  CheckVerdict v;
  v.check = 1;
  const int n = transcript.config.participants;
  const int len = static_cast<int>(transcript.runs.size());
  for (int j = 2; j < n; ++j) {
    bool ok = len == code.length();
    std::uint64_t bits = 0;
    for (const auto& run : transcript.runs) {
      const auto b = run.announced_bit(j);
      if (!b) {
        ok = false;
        break;
      }
      bits = (bits << 1) | static_cast<std::uint64_t>(*b);
    }
    if (ok) {
      const codes::Codeword word(len, bits);
      ok = word.weight() == w && codes::is_codeword(code, word);
    }
    if (!ok) v.failing_participants.push_back(j);
  }
  v.pass = v.failing_participants.empty();
  return v;
}

void select_checked_runs(Transcript& transcript, Rng& rng) {
  std::vector<int> valid;
  for (auto& run : transcript.runs) {
    run.checked = run.has_z_announcement();
    if (run.valid) valid.push_back(run.index);
  }
  const auto take = static_cast<std::size_t>(std::llround(transcript.config.check_fraction * valid.size()));
  rng.shuffle(std::span<int>(valid));
  for (std::size_t i = 0; i < take && i < valid.size(); ++i) transcript.runs[valid[i]].checked = true;
}

CheckVerdict security_check_2(const Transcript& transcript) {
  CheckVerdict v;
  v.check = 2;
  const int n = transcript.config.participants;
  std::vector<std::pair<int, int>> intervals;
  for (const auto& run : transcript.runs) {
    if (!run.checked) continue;
    const RunFinding f = run.has_z_announcement() ? check_z_run(run, n) : check_plain_run(run, n);
    if (f.pass) continue;
    v.failing_runs.push_back(run.index);
    for (int j : f.culprits) {
      if (std::find(v.failing_participants.begin(), v.failing_participants.end(), j) ==
          v.failing_participants.end()) {
        v.failing_participants.push_back(j);
      }
    }
    if (f.segment) intervals.push_back(widen(*f.segment, transcript.config.honest));
  }
  std::sort(v.failing_participants.begin(), v.failing_participants.end());
  v.pass = v.failing_runs.empty();
  v.interval = combine(intervals);
  return v;
}

CheckVerdict security_check_2(Transcript& transcript, Rng& rng) {
  select_checked_runs(transcript, rng);
  return security_check_2(static_cast<const Transcript&>(transcript));
}

std::vector<CheckVerdict> recompute_verdicts(const Transcript& transcript) {
  std::vector<CheckVerdict> out;
  if (transcript.config.variant == Variant::Secure && transcript.config.code) {
    out.push_back(security_check_1(transcript, transcript.config.code->code, transcript.config.code->w));
  }
  out.push_back(security_check_2(transcript));
  return out;
}

PhaseAngle reconstruct_secret(const Transcript& transcript, int run, const std::vector<int>& coalition,
                              int target) {
  const int n = transcript.config.participants;
  if (run < 0 || run >= static_cast<int>(transcript.runs.size()) || !transcript.runs[run].valid) {
    throw RunNotValid("run " + std::to_string(run) + " is not a valid run");
  }
  std::vector<int> members = coalition;
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  if (static_cast<int>(members.size()) != n - 1 || members.size() != coalition.size() ||
      std::find(members.begin(), members.end(), target) != members.end() || members.front() < 1 ||
      members.back() > n) {
    throw CoalitionWrongSize("coalition must be the other N-1 participants");
  }
  const auto& rec = transcript.runs[run];
  PhaseAngle total = members.back() == n ? eigen_phase(Outcome{rec.rn_outcome, Axis::X}) : kPhase0;
  for (int j : members) {
    const auto& phases = rec.actions[j - 1].phases;
    if (phases.empty()) throw RunNotValid("participant " + std::to_string(j) + " has no definite phase");
    total = total - phases.front();
  }
  return total;
}

PhaseAngle secret_of(const RunRecord& run, int target, int participants) {
  const PhaseAngle phi = run.actions.at(target - 1).phases.at(0);
  if (target != participants) return phi;
  return phi - eigen_phase(Outcome{run.rn_outcome, Axis::X});
}

}  // namespace qsslab::protocol
