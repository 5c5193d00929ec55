#include <algorithm>
#include <set>

#include "doctest.h"
#include "qsslab/adversary.hpp"
#include "qsslab/protocol.hpp"

using namespace qsslab;
using namespace qsslab::protocol;

namespace {

Transcript honest_run(Variant v, int n, int runs, std::uint64_t seed, std::optional<codes::CodeFile> code = {}) {
  ProtocolConfig pc;
  pc.variant = v;
  pc.participants = n;
  pc.runs = runs;
  pc.seed = seed;
  pc.code = std::move(code);
  auto s = adversary::make_strategies(pc, adversary::parse_strategy_spec("honest"), 0);
  Rng rng(seed);
  return run_protocol(pc, s, rng);
}

codes::CodeFile code16() {
  Rng rng(4);
  return {codes::find_code(16, 12, rng, 2000).code, 12};
}

std::vector<int> order_of(const std::vector<Announcement>& stage) {
  std::vector<const Announcement*> sorted;
  for (const auto& a : stage) sorted.push_back(&a);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->position < b->position; });
  std::vector<int> out;
  for (auto* a : sorted) out.push_back(a->participant);
  return out;
}

}  // namespace

TEST_CASE("names round trip") {
  for (auto v : {Variant::Original, Variant::Modified1, Variant::Modified2, Variant::Secure}) {
    CHECK(parse_variant(to_string(v)) == v);
  }
  CHECK(parse_variant("modified2") == Variant::Modified2);
  CHECK_THROWS_AS(parse_variant("bb84"), ConfigError);
  CHECK(parse_value_order("focus-last") == ValueOrder::FocusLast);
}

TEST_CASE("class and outcome prediction") {
  CHECK(class_of(kPhase0) == ActionClass::X);
  CHECK(class_of(kPhaseThreeHalfPi) == ActionClass::Y);
  const std::vector<PhaseAngle> plus = {kPhaseHalfPi, kPhaseThreeHalfPi};
  const std::vector<PhaseAngle> minus = {kPhaseHalfPi, kPhaseHalfPi};
  const std::vector<PhaseAngle> random = {kPhaseHalfPi, kPhase0};
  CHECK(predict_outcome(plus) == Sign::Plus);
  CHECK(predict_outcome(minus) == Sign::Minus);
  CHECK_FALSE(predict_outcome(random).has_value());
}

TEST_CASE("config validation") {
  ProtocolConfig pc;
  pc.variant = Variant::Secure;
  CHECK_THROWS_WITH_AS(pc.validate(), "secure variant requires a code file", ConfigError);
  pc.code = code16();
  pc.runs = 10;
  CHECK_THROWS_AS(pc.validate(), ConfigError);
  pc.runs = 16;
  CHECK_NOTHROW(pc.validate());
  ProtocolConfig small;
  small.participants = 2;
  CHECK_THROWS_AS(small.validate(), ConfigError);
}

TEST_CASE("honest Original: valid fraction near one half and checks pass") {
  const auto t = honest_run(Variant::Original, 3, 200, 7);
  const double frac = static_cast<double>(valid_runs(t).size()) / 200.0;
  CHECK(frac >= 0.4);
  CHECK(frac <= 0.6);
  CHECK(t.all_checks_pass());
  // Validity is the announced Y parity.
  for (const auto& run : t.runs) {
    int y = 0;
    for (const auto& a : run.actions) y += class_of(a.phases.at(0)) == ActionClass::Y;
    CHECK(run.valid == (y % 2 == 0));
  }
}

TEST_CASE("announcement orders per variant") {
  const int n = 6;
  for (const auto& run : honest_run(Variant::Modified1, n, 20, 1).runs) {
    CHECK(order_of(run.class_stage) == std::vector<int>{6, 5, 4, 3, 2, 1});
  }
  std::set<std::vector<int>> seen;
  for (const auto& run : honest_run(Variant::Modified2, n, 200, 2).runs) {
    const auto order = order_of(run.class_stage);
    REQUIRE(order.size() == static_cast<std::size_t>(n));
    CHECK(std::set<int>{order[4], order[5]} == std::set<int>{1, 6});
    seen.insert(order);
  }
  CHECK(seen.size() > 20);
  for (const auto& run : honest_run(Variant::Original, n, 50, 3).runs) {
    auto order = order_of(run.class_stage);
    std::sort(order.begin(), order.end());
    CHECK(order == std::vector<int>{1, 2, 3, 4, 5, 6});
  }
}

TEST_CASE("Modified2 leaves an unannounced participant on both sides of every middle") {
  const int n = 6;
  for (const auto& run : honest_run(Variant::Modified2, n, 300, 5).runs) {
    const auto order = order_of(run.class_stage);
    for (int k = 2; k <= n - 2; ++k) {
      const auto pos = std::find(order.begin(), order.end(), k) - order.begin();
      bool left_open = false, right_open = false;
      for (auto it = order.begin() + pos + 1; it != order.end(); ++it) {
        left_open = left_open || *it < k;
        right_open = right_open || *it > k;
      }
      CHECK(left_open);
      CHECK(right_open);
    }
  }
}

TEST_CASE("trace matches the applied phases") {
  const auto t = honest_run(Variant::Original, 5, 50, 9);
  for (const auto& run : t.runs) {
    REQUIRE(run.trace.size() == 6);
    PhaseAngle sum;
    CHECK(run.trace[0] == kPhase0);
    for (int j = 1; j <= 5; ++j) {
      sum += run.actions[j - 1].phases[0];
      CHECK(run.trace[j] == sum);
    }
  }
}

TEST_CASE("reconstruction and its errors") {
  const auto t = honest_run(Variant::Original, 5, 200, 11);
  const auto valid = valid_runs(t);
  REQUIRE(!valid.empty());
  for (int r : valid) {
    CHECK(reconstruct_secret(t, r, {2, 3, 4, 5}, 1) == secret_of(t.runs[r], 1, 5));
    CHECK(reconstruct_secret(t, r, {1, 2, 3, 4}, 5) == secret_of(t.runs[r], 5, 5));
  }
  int invalid = 0;
  while (t.runs[invalid].valid) ++invalid;
  CHECK_THROWS_AS(reconstruct_secret(t, invalid, {2, 3, 4, 5}, 1), RunNotValid);
  CHECK_THROWS_AS(reconstruct_secret(t, valid[0], {2, 3, 4}, 1), CoalitionWrongSize);
  CHECK_THROWS_AS(reconstruct_secret(t, valid[0], {1, 2, 3, 4}, 1), CoalitionWrongSize);
}

TEST_CASE("check 2 catches a falsified value and localizes it") {
  auto t = honest_run(Variant::Original, 5, 200, 13);
  REQUIRE(t.all_checks_pass());
  auto it = std::find_if(t.runs.begin(), t.runs.end(), [](const RunRecord& r) { return r.checked; });
  REQUIRE(it != t.runs.end());
  for (auto& a : it->value_stage) {
    if (a.participant == 3) a.phases[0] += kPhasePi;  // same class, wrong value
  }
  const auto v = security_check_2(t);
  CHECK_FALSE(v.pass);
  CHECK(v.failing_runs == std::vector<int>{it->index});
  REQUIRE(v.interval.has_value());
  CHECK(v.interval->first <= 3);
  CHECK(v.interval->second >= 3);
}

TEST_CASE("a value contradicting the announced class is a failure of that participant") {
  auto t = honest_run(Variant::Original, 4, 200, 17);
  auto it = std::find_if(t.runs.begin(), t.runs.end(), [](const RunRecord& r) { return r.checked; });
  REQUIRE(it != t.runs.end());
  for (auto& a : it->value_stage) {
    if (a.participant == 2) a.phases[0] += kPhaseHalfPi;
  }
  const auto v = security_check_2(t);
  CHECK_FALSE(v.pass);
  CHECK(std::find(v.failing_participants.begin(), v.failing_participants.end(), 2) != v.failing_participants.end());
}

TEST_CASE("secure variant: honest executions pass both checks") {
  const auto code = code16();
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto t = honest_run(Variant::Secure, 5, 16, seed, code);
    REQUIRE(t.verdict(1) != nullptr);
    CHECK(t.verdict(1)->pass);
    CHECK(t.verdict(2)->pass);
    // Every run with a bit 1 is invalid and checked.
    for (const auto& run : t.runs) {
      if (run.has_z_announcement()) {
        CHECK_FALSE(run.valid);
        CHECK(run.checked);
      }
    }
  }
}

TEST_CASE("secure variant: a tampered bit string fails check 1") {
  auto t = honest_run(Variant::Secure, 4, 16, 3, code16());
  for (auto& a : t.runs[0].bit_stage) {
    if (a.participant == 2) a.bit = 1 - *a.bit;
  }
  const auto v = security_check_1(t, t.config.code->code, t.config.code->w);
  CHECK_FALSE(v.pass);
  CHECK(v.failing_participants == std::vector<int>{2});
}

TEST_CASE("checked subset size") {
  const auto t = honest_run(Variant::Original, 5, 400, 21);
  const auto valid = valid_runs(t);
  int checked = 0;
  for (const auto& run : t.runs) checked += run.checked;
  CHECK(checked == static_cast<int>(std::llround(0.5 * valid.size())));
}

TEST_CASE("execution is deterministic in the seed") {
  const auto a = honest_run(Variant::Modified2, 5, 100, 99);
  const auto b = honest_run(Variant::Modified2, 5, 100, 99);
  REQUIRE(a.runs.size() == b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    CHECK(a.runs[i].rn_outcome == b.runs[i].rn_outcome);
    CHECK(order_of(a.runs[i].class_stage) == order_of(b.runs[i].class_stage));
  }
}
