#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qsslab/adversary.hpp"
#include "qsslab/protocol.hpp"

namespace qsslab::harness {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval at 95%.
Interval wilson(std::int64_t successes, std::int64_t total, double z = 1.959963984540054);

struct Rate {
  std::int64_t hits = 0;
  std::int64_t total = 0;
  double value() const { return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total); }
  Interval ci() const { return wilson(hits, total); }
  void add(bool hit) {
    ++total;
    hits += hit ? 1 : 0;
  }
  Rate& operator+=(const Rate& o) {
    hits += o.hits;
    total += o.total;
    return *this;
  }
};

/// Counts extracted from one transcript.
struct TrialSummary {
  bool detected = false;
  Rate valid;               // valid runs / runs
  Rate checked_detection;   // failing / checked valid runs
  Rate recovery;            // both neighbouring phases right / valid runs with a cheater note
  Rate case_ii;             // case (ii) route / runs with a cheater note
  Rate case_ii_accuracy;    // correct claims / case (ii) runs
  Rate forced_detection;    // failing / forced-guess runs
  Rate both_z_detection;    // failing / runs where the watched pair both announced bit 1
  Rate opportunity_early;   // safe opportunity / early cheater bit turns
  Rate opportunity_late;
  Rate eligible_opportunity_early;
  Rate eligible_opportunity_late;
};

struct AnalysisOptions {
  int cheater = 0;  // 0: no cheater
  /// Pair watched for both-Z runs, e.g. the two ends of a tapped link.
  std::optional<std::pair<int, int>> z_pair;
};

TrialSummary summarize(const protocol::Transcript& transcript, const AnalysisOptions& options);

struct AttackConfig {
  protocol::ProtocolConfig protocol;
  std::string strategy = "honest";
  int cheater = 0;
  int trials = 10000;
  int threads = 0;  // 0: hardware concurrency
  bool timing = false;
  /// When set, every trial agrees on its own code of length protocol.runs
  /// and this weight, searched with a trial-derived seed.
  std::optional<int> fresh_code_weight;
  int code_tries = 2000;
};

struct AttackReport {
  AttackConfig config;
  std::int64_t trials = 0;
  Rate detection;  // per trial
  TrialSummary totals;
  /// Exact safe-opportunity probabilities averaged over early / late runs,
  /// and the closed forms for comparison (secure cheater only).
  std::optional<double> oracle_early;
  std::optional<double> oracle_late;
  std::optional<double> p1;
  std::optional<double> p2;
  /// Mean dimension and distance of the codes used, fresh-code mode only.
  std::optional<double> mean_k;
  std::optional<double> mean_d;
  std::optional<double> simulate_seconds;
  std::optional<double> analyze_seconds;

  double pass_probability() const { return 1.0 - detection.value(); }
  Interval pass_ci() const { return wilson(detection.total - detection.hits, detection.total); }
  double epsilon_estimate() const { return totals.forced_detection.value(); }
};

/// Builds the strategies, runs one execution with the given seed.
protocol::Transcript run_trial(const AttackConfig& config, std::uint64_t seed);

/// Runs `trials` executions with derived seeds, in parallel; the reduction is
/// in trial order so the result does not depend on the thread count.
AttackReport run_attack(const AttackConfig& config);

nlohmann::ordered_json report_json(const AttackReport& report);
std::string report_csv_header();
std::string report_csv_row(const AttackReport& report);

struct SweepRow {
  int n = 0;
  int w = 0;
  std::optional<AttackReport> report;
  std::string error;
};

struct SweepConfig {
  AttackConfig base;  // protocol.runs and code are replaced per row
  std::vector<int> values;
};

/// One row per n with w = ceil(0.7 n); each trial agrees on its own code.
/// Rows that fail keep their error message and the sweep carries on.
std::vector<SweepRow> run_sweep(const SweepConfig& config);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
/// Least squares y = slope x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qsslab::harness
