// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "qsslab/adversary.hpp"
#include "qsslab/codes.hpp"
#include "qsslab/harness.hpp"
#include "qsslab/transcript_json.hpp"

using namespace qsslab;
using protocol::ProtocolConfig;
using protocol::Transcript;
using protocol::Variant;

namespace {

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("[%s] %2d. %s: %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Digit j (1-based) of `run` written in base 4: the phase of R_j in that run.
adversary::PhaseScript digit_script(int j) {
  return [j](int run) { return PhaseAngle((run >> (2 * (j - 1))) & 3); };
}

Transcript exhaustive_n4(std::uint64_t seed) {
  ProtocolConfig pc;
  pc.variant = Variant::Original;
  pc.participants = 4;
  pc.runs = 256;
  pc.check_fraction = 1.0;
  pc.seed = seed;
  protocol::StrategyList s;
  for (int j = 1; j <= 4; ++j) s.push_back(std::make_unique<adversary::HonestStrategy>(digit_script(j)));
  Rng rng(seed);
  return protocol::run_protocol(pc, s, rng);
}

harness::AttackReport attack(Variant v, int participants, int runs, const std::string& strategy, int cheater,
                             int trials, std::uint64_t seed = 11) {
  harness::AttackConfig a;
  a.protocol.variant = v;
  a.protocol.participants = participants;
  a.protocol.runs = runs;
  a.protocol.seed = seed;
  a.strategy = strategy;
  a.cheater = cheater;
  a.trials = trials;
  return harness::run_attack(a);
}

bool within_3sigma(const harness::Rate& r, double p) {
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(r.total));
  return std::abs(r.value() - p) <= 3 * sigma;
}

// Per-checked-valid-run detection of a random-basis measurement on the qubit
// in flight, from single-qubit amplitudes.
double intercept_oracle() {
  using C = std::complex<double>;
  const double pi = std::acos(-1.0);
  auto ket = [&](double phase) { return std::array<C, 2>{C(1 / std::sqrt(2.0)), std::polar(1 / std::sqrt(2.0), phase)}; };
  auto overlap2 = [&](const std::array<C, 2>& a, const std::array<C, 2>& b) {
    return std::norm(std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1]);
  };
  double detected = 0.0, valid = 0.0;
  for (int theta = 0; theta < 4; ++theta) {     // phase arriving at the interceptor
    for (int rest = 0; rest < 4; ++rest) {      // sum of every later phase
      if ((theta + rest) % 2 != 0) continue;    // invalid runs are never checked
      valid += 1.0;
      for (int basis = 0; basis < 2; ++basis) {
        for (int sign = 0; sign < 2; ++sign) {
          const double collapsed = basis * pi / 2 + sign * pi;
          const double p_collapse = overlap2(ket(collapsed), ket(theta * pi / 2));
          const double final_phase = collapsed + rest * pi / 2;
          const double expected = (theta + rest) % 4 == 0 ? 0.0 : pi;
          const double p_mismatch = 1.0 - overlap2(ket(expected), ket(final_phase));
          detected += 0.5 * p_collapse * p_mismatch;
        }
      }
    }
  }
  return detected / valid;
}

// Fraction of announcement orders of {1..n} with all of 1..k-1 before k.
double case_ii_oracle(int n, int k) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 1);
  int hits = 0, total = 0;
  do {
    const auto pos_k = std::find(order.begin(), order.end(), k) - order.begin();
    bool all = true;
    for (int j = 1; j < k; ++j) all = all && (std::find(order.begin(), order.end(), j) - order.begin()) < pos_k;
    hits += all;
    ++total;
  } while (std::next_permutation(order.begin(), order.end()));
  return static_cast<double>(hits) / total;
}

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const Transcript t = exhaustive_n4(1);
  int deterministic = 0, wrong = 0;
  for (const auto& run : t.runs) {
    std::vector<PhaseAngle> phases;
    for (const auto& a : run.actions) phases.push_back(a.phases.at(0));
    if (const auto p = protocol::predict_outcome(phases)) {
      ++deterministic;
      wrong += *p != run.rn_outcome;
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(1, "determinism law, N=4, all 256 phase tuples", wrong == 0 && deterministic == 128 && secs < 1.0,
         fmt("%.0f deterministic tuples, %.0f mismatches, %.3f s", deterministic, wrong, secs));
}

void criterion_2() {
  ProtocolConfig pc;
  pc.participants = 5;
  pc.runs = 10000;
  pc.seed = 2;
  auto s = adversary::make_strategies(pc, adversary::parse_strategy_spec("honest"), 0);
  Rng rng(pc.seed);
  const auto t = protocol::run_protocol(pc, s, rng);
  const double rate = static_cast<double>(protocol::valid_runs(t).size()) / pc.runs;
  report(2, "honest valid-run rate, Original N=5 n=10^4", std::abs(rate - 0.5) <= 0.02 && t.all_checks_pass(),
         fmt("rate %.4f (target 0.5 +- 0.02)", rate));
}

void criterion_3() {
  const Transcript t = exhaustive_n4(3);
  int attempts = 0, correct = 0;
  for (int r : protocol::valid_runs(t)) {
    for (int target = 1; target <= 4; ++target) {
      std::vector<int> coalition;
      for (int j = 1; j <= 4; ++j) {
        if (j != target) coalition.push_back(j);
      }
      ++attempts;
      correct += protocol::reconstruct_secret(t, r, coalition, target) == protocol::secret_of(t.runs[r], target, 4);
    }
  }
  report(3, "reconstruction soundness, exhaustive N=4", attempts == 128 * 4 && correct == attempts,
         fmt("%.0f / %.0f coalition reconstructions exact", correct, attempts));
}

void criterion_4() {
  const double oracle = intercept_oracle();
  const auto r = attack(Variant::Original, 5, 100, "intercept", 3, 400);
  const double rate = r.totals.checked_detection.value();
  report(4, "intercept-resend vs Original",
         std::abs(rate - 0.25) <= 0.02 && std::abs(oracle - 0.25) < 1e-12,
         fmt("per checked valid run %.4f over %.0f runs, oracle %.4f", rate,
             static_cast<double>(r.totals.checked_detection.total), oracle));
}

void criterion_5() {
  const double oracle = case_ii_oracle(4, 3);
  const auto r = attack(Variant::Original, 4, 100, "strategyA", 3, 100);
  const bool ok = r.detection.hits == 0 && r.totals.checked_detection.hits == 0 &&
                  r.totals.case_ii_accuracy.total > 0 &&
                  r.totals.case_ii_accuracy.hits == r.totals.case_ii_accuracy.total &&
                  within_3sigma(r.totals.case_ii, oracle);
  report(5, "strategy A vs Original, N=4 k=3", ok,
         fmt("detected %.0f of %.0f runs; case (ii) freq %.4f (oracle %.4f)", r.totals.checked_detection.hits,
             static_cast<double>(r.totals.valid.total), r.totals.case_ii.value(), oracle) +
             fmt(", case (ii) accuracy %.4f", r.totals.case_ii_accuracy.value()));
}

void criterion_6() {
  const auto r = attack(Variant::Modified1, 5, 100, "strategyB", 3, 100);
  // k = 2: phi_1 itself, read straight off the notes.
  harness::AttackConfig a;
  a.protocol.variant = Variant::Modified1;
  a.protocol.participants = 5;
  a.protocol.runs = 100;
  a.protocol.seed = 6;
  a.strategy = "strategyB";
  a.cheater = 2;
  int phi1_valid = 0, phi1_right = 0, detected = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Transcript t = harness::run_trial(a, derive_seed(a.protocol.seed, trial));
    detected += !t.all_checks_pass();
    for (const auto& run : t.runs) {
      if (!run.valid) continue;
      ++phi1_valid;
      const auto& note = run.notes.at(0);
      phi1_right += note.claimed_prev && *note.claimed_prev == run.actions[0].phases.at(0);
    }
  }
  const bool ok = r.detection.hits == 0 && std::abs(r.totals.valid.value() - 0.5) <= 0.02 &&
                  r.totals.recovery.hits == r.totals.recovery.total && detected == 0 && phi1_right == phi1_valid;
  report(6, "strategy B vs Modified1", ok,
         fmt("k=3: detection %.4f, valid %.4f, recovery %.4f", r.detection.value(), r.totals.valid.value(),
             r.totals.recovery.value()) +
             fmt("; k=2: phi_1 recovered %.0f / %.0f valid runs", phi1_right, phi1_valid));
}

void criterion_7() {
  bool ok = true;
  std::string detail;
  for (const char* s : {"strategyA", "strategyB"}) {
    for (int k : {2, 3}) {
      const auto r = attack(Variant::Modified2, 5, 100, s, k, 100);
      ok = ok && r.totals.recovery.value() <= 0.55;
      detail += std::string(s) + fmt(" k=%.0f recovery %.4f; ", k, r.totals.recovery.value());
    }
  }
  const auto c = attack(Variant::Modified2, 5, 100, "collude:N", 4, 100);
  ok = ok && c.totals.recovery.hits == c.totals.recovery.total && c.detection.hits == 0;
  detail += fmt("colluding (4, R_5): recovery %.4f, detection %.4f", c.totals.recovery.value(), c.detection.value());
  report(7, "Modified2 blocks single cheaters", ok, detail);
}

void criterion_8() {
  Rng code_rng(8);
  const auto found = codes::find_code(16, 12, code_rng, 2000);
  int passed = 0;
  for (int seed = 1; seed <= 100; ++seed) {
    ProtocolConfig pc;
    pc.variant = Variant::Secure;
    pc.participants = 4;
    pc.runs = 16;
    pc.seed = static_cast<std::uint64_t>(seed);
    pc.code = codes::CodeFile{found.code, 12};
    auto s = adversary::make_strategies(pc, adversary::parse_strategy_spec("honest"), 0);
    Rng rng(pc.seed);
    const auto t = protocol::run_protocol(pc, s, rng);
    const auto* c1 = t.verdict(1);
    const auto* c2 = t.verdict(2);
    passed += c1 && c2 && c1->pass && c2->pass;
  }
  report(8, "Secure honest completeness, N=4 n=16", passed == 100,
         fmt("%.0f / 100 executions pass checks 1 and 2 (code k=%.0f d=%.0f)", passed, found.code.dimension(),
             found.code.min_distance()));
}

void criterion_9() {
  using codes::Rational;
  const bool formulas = codes::p1(100, 70) == Rational(2775, 10000) && codes::p2(100, 70) == Rational(51, 100) &&
                        codes::n_prime(100, 70, 50) == Rational(39375, 1000);
  int points = 0, exceptions = 0;
  for (int n = 1; n <= 64; ++n) {
    for (int w = 0; w <= n; ++w) {
      if (10 * w <= 6 * n) continue;
      for (int d = 0; d <= n; ++d) {
        if (!codes::validate_params(n, w, d)) continue;
        ++points;
        exceptions += !(Rational(d) > codes::n_prime(n, w, d));
      }
    }
  }
  report(9, "formula verification and d > n' grid", formulas && points > 0 && exceptions == 0,
         std::string(formulas ? "p1, p2, n' exact" : "p1, p2, n' MISMATCH") +
             fmt("; %.0f grid points, %.0f exceptions", points, exceptions));
}

void criterion_10() {
  harness::SweepConfig s;
  s.base.protocol.variant = Variant::Secure;
  s.base.protocol.participants = 5;
  s.base.protocol.seed = 10;
  s.base.protocol.honest = {2, 4};
  s.base.strategy = "secureCheat";
  s.base.cheater = 3;
  s.base.trials = 10000;
  s.values = {12, 16, 20, 24};
  const auto rows = harness::run_sweep(s);
  bool ok = true;
  std::vector<double> x, y;
  std::string detail;
  harness::Rate forced;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].report) {
      ok = false;
      detail += "n=" + std::to_string(rows[i].n) + " error: " + rows[i].error + "; ";
      continue;
    }
    const double p = rows[i].report->pass_probability();
    if (i > 0 && rows[i - 1].report && !(p < rows[i - 1].report->pass_probability())) ok = false;
    x.push_back(rows[i].n);
    y.push_back(std::log(p));
    forced += rows[i].report->totals.forced_detection;
    detail += fmt("n=%.0f pass %.4f; ", rows[i].n, p);
  }
  const auto fit = harness::fit_line(x, y);
  ok = ok && fit.slope < 0 && fit.r_squared >= 0.8 && forced.value() >= 0.2;
  report(10, "secure-cheater decay over n", ok,
         detail + fmt("slope %.5f, R^2 %.3f, epsilon %.4f over %.0f forced guesses", fit.slope, fit.r_squared,
                      forced.value(), static_cast<double>(forced.total)));
}

void criterion_11() {
  Rng code_rng(11);
  harness::AttackConfig a;
  a.protocol.variant = Variant::Secure;
  a.protocol.participants = 4;
  a.protocol.runs = 16;
  a.protocol.seed = 11;
  a.protocol.code = codes::CodeFile{codes::find_code(16, 12, code_rng, 2000).code, 12};
  a.strategy = "eavesdrop";
  a.cheater = 3;  // tap on the R_2 -> R_3 link
  a.trials = 10000;
  const auto r = harness::run_attack(a);
  const auto ci = r.totals.both_z_detection.ci();
  report(11, "link eavesdropper in Secure, per both-Z run", r.totals.both_z_detection.value() >= 0.2,
         fmt("%.4f [%.4f, %.4f] over %.0f both-Z runs", r.totals.both_z_detection.value(), ci.lo, ci.hi,
             static_cast<double>(r.totals.both_z_detection.total)));
}

void criterion_12() {
  ProtocolConfig pc;
  pc.participants = 5;
  pc.runs = 500;
  pc.seed = 12;
  auto once = [&] {
    auto s = adversary::make_strategies(pc, adversary::parse_strategy_spec("intercept"), 3);
    Rng rng(pc.seed);
    return protocol::transcript_text(protocol::run_protocol(pc, s, rng));
  };
  const bool transcripts = once() == once();
  harness::AttackConfig a;
  a.protocol.variant = Variant::Modified2;
  a.protocol.participants = 5;
  a.protocol.runs = 50;
  a.protocol.seed = 12;
  a.strategy = "strategyA";
  a.cheater = 2;
  a.trials = 200;
  a.threads = 1;
  const auto r1 = harness::report_json(harness::run_attack(a)).dump(2);
  a.threads = 4;
  const auto r2 = harness::report_json(harness::run_attack(a)).dump(2);
  report(12, "reproducibility", transcripts && r1 == r2,
         std::string("transcripts ") + (transcripts ? "identical" : "DIFFER") + ", reports " +
             (r1 == r2 ? "identical" : "DIFFER") + " (1 vs 4 threads)");
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {criterion_1, criterion_2, criterion_3,  criterion_4,
                                                       criterion_5, criterion_6, criterion_7,  criterion_8,
                                                       criterion_9, criterion_10, criterion_11, criterion_12};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "exception", false, e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
