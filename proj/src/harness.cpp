#include "qsslab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace qsslab::harness {

using protocol::Transcript;

Interval wilson(std::int64_t successes, std::int64_t total, double z) {
  if (total <= 0) return {0.0, 1.0};
  const double n = static_cast<double>(total);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
  const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

TrialSummary summarize(const Transcript& t, const AnalysisOptions& options) {
  TrialSummary s;
  s.detected = !t.all_checks_pass();
  std::set<int> failing;
  if (const auto* v = t.verdict(2)) failing.insert(v->failing_runs.begin(), v->failing_runs.end());
  const int k = options.cheater;
  const int d = t.config.code ? t.config.code->code.min_distance() : 0;
  const int n = static_cast<int>(t.runs.size());
  for (const auto& run : t.runs) {
    const bool failed = failing.count(run.index) > 0;
    s.valid.add(run.valid);
    if (run.valid && run.checked) s.checked_detection.add(failed);
    if (options.z_pair && run.announced_bit(options.z_pair->first) == 1 &&
        run.announced_bit(options.z_pair->second) == 1) {
      s.both_z_detection.add(failed);
    }
    if (k == 0) continue;
    for (const auto& note : run.notes) {
      if (note.participant != k) continue;
      const auto& prev = run.trace.at(k - 1);
      const auto& next = run.trace.at(k);
      const bool correct = note.claimed_prev && note.claimed_next && prev && next && *note.claimed_prev == *prev &&
                           *note.claimed_next == *next;
      if (run.valid) s.recovery.add(correct);
      s.case_ii.add(note.route == "case_ii");
      if (note.route == "case_ii") s.case_ii_accuracy.add(correct);
      if (note.forced_guess) s.forced_detection.add(failed);
      const bool late = run.index >= n - d;
      if (note.safe_opportunity) (late ? s.opportunity_late : s.opportunity_early).add(*note.safe_opportunity);
      if (note.eligible_opportunity) {
        (late ? s.eligible_opportunity_late : s.eligible_opportunity_early).add(*note.eligible_opportunity);
      }
    }
  }
  return s;
}

namespace {

void accumulate(TrialSummary& into, const TrialSummary& s) {
  into.valid += s.valid;
  into.checked_detection += s.checked_detection;
  into.recovery += s.recovery;
  into.case_ii += s.case_ii;
  into.case_ii_accuracy += s.case_ii_accuracy;
  into.forced_detection += s.forced_detection;
  into.both_z_detection += s.both_z_detection;
  into.opportunity_early += s.opportunity_early;
  into.opportunity_late += s.opportunity_late;
  into.eligible_opportunity_early += s.eligible_opportunity_early;
  into.eligible_opportunity_late += s.eligible_opportunity_late;
}

AnalysisOptions options_for(const AttackConfig& config) {
  AnalysisOptions o;
  const auto spec = adversary::parse_strategy_spec(config.strategy);
  if (spec.kind != "honest") o.cheater = config.cheater;
  if (spec.kind == "eavesdrop") o.z_pair = std::pair{config.cheater - 1, config.cheater};
  if (spec.kind == "secureCheat" && config.protocol.honest.size() == 2) {
    o.z_pair = std::pair{config.protocol.honest[0], config.protocol.honest[1]};
  }
  return o;
}

void add_oracle(AttackReport& report) {
  const auto& pc = report.config.protocol;
  if (!pc.code || adversary::parse_strategy_spec(report.config.strategy).kind != "secureCheat") return;
  const auto words = codes::weight_w_codewords(pc.code->code, pc.code->w);
  const int n = pc.code->code.length();
  const int d = pc.code->code.min_distance();
  double early = 0.0, late = 0.0;
  for (int r = 0; r < n; ++r) (r < n - d ? early : late) += adversary::safe_opportunity_probability(words, r);
  if (n - d > 0) report.oracle_early = early / (n - d);
  if (d > 0) report.oracle_late = late / d;
  report.p1 = codes::to_double(codes::p1(n, pc.code->w));
  report.p2 = codes::to_double(codes::p2(n, pc.code->w));
}

nlohmann::ordered_json rate_json(const Rate& r) {
  nlohmann::ordered_json j;
  j["rate"] = r.value();
  const auto ci = r.ci();
  j["ci"] = {ci.lo, ci.hi};
  j["hits"] = r.hits;
  j["total"] = r.total;
  return j;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

}  // namespace

Transcript run_trial(const AttackConfig& config, std::uint64_t seed) {
  protocol::ProtocolConfig pc = config.protocol;
  pc.seed = seed;
  if (config.fresh_code_weight) {
    Rng code_rng(derive_seed(seed, 0xc0de));
    const auto found = codes::find_code(pc.runs, *config.fresh_code_weight, code_rng, config.code_tries);
    pc.code = codes::CodeFile{found.code, *config.fresh_code_weight};
  }
  auto strategies = adversary::make_strategies(pc, adversary::parse_strategy_spec(config.strategy), config.cheater);
  Rng rng(seed);
  return protocol::run_protocol(pc, strategies, rng);
}

AttackReport run_attack(const AttackConfig& config) {
  AttackReport report;
  report.config = config;
  {
    // Validates the pairing once, up front, and fills in defaults.
    auto& pc = report.config.protocol;
    if (config.fresh_code_weight) {
      Rng code_rng(derive_seed(pc.seed, 0xc0de));
      pc.code = codes::CodeFile{codes::find_code(pc.runs, *config.fresh_code_weight, code_rng, config.code_tries).code,
                                *config.fresh_code_weight};
    }
    auto strategies = adversary::make_strategies(pc, adversary::parse_strategy_spec(config.strategy), config.cheater);
    pc.validate();
    if (config.fresh_code_weight) pc.code.reset();
  }
  const AttackConfig& cfg = report.config;
  const AnalysisOptions options = options_for(cfg);
  const int trials = std::max(0, cfg.trials);
  std::vector<TrialSummary> summaries(static_cast<std::size_t>(trials));
  std::vector<double> sim_time(summaries.size(), 0.0), analyze_time(summaries.size(), 0.0);
  std::vector<int> code_k(summaries.size(), 0), code_d(summaries.size(), 0);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < trials; i = next++) {
      try {
        const auto t0 = std::chrono::steady_clock::now();
        const Transcript t = run_trial(cfg, derive_seed(cfg.protocol.seed, static_cast<std::uint64_t>(i)));
        const auto t1 = std::chrono::steady_clock::now();
        summaries[i] = summarize(t, options);
        code_k[i] = t.config.code ? t.config.code->code.dimension() : 0;
        code_d[i] = t.config.code ? t.config.code->code.min_distance() : 0;
        const auto t2 = std::chrono::steady_clock::now();
        sim_time[i] = std::chrono::duration<double>(t1 - t0).count();
        analyze_time[i] = std::chrono::duration<double>(t2 - t1).count();
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, std::max(1, trials));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  report.trials = trials;
  for (const auto& s : summaries) {
    report.detection.add(s.detected);
    accumulate(report.totals, s);
  }
  if (cfg.timing) {
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < summaries.size(); ++i) a += sim_time[i], b += analyze_time[i];
    report.simulate_seconds = a;
    report.analyze_seconds = b;
  }
  if (cfg.fresh_code_weight && trials > 0) {
    double k = 0, d = 0;
    for (int i = 0; i < trials; ++i) k += code_k[i], d += code_d[i];
    report.mean_k = k / trials;
    report.mean_d = d / trials;
  }
  add_oracle(report);
  return report;
}

nlohmann::ordered_json report_json(const AttackReport& r) {
  nlohmann::ordered_json j;
  const auto& pc = r.config.protocol;
  nlohmann::ordered_json config;
  config["variant"] = protocol::to_string(pc.variant);
  config["participants"] = pc.participants;
  config["runs"] = pc.runs;
  config["check_fraction"] = pc.check_fraction;
  config["seed"] = pc.seed;
  config["strategy"] = r.config.strategy;
  config["cheater"] = r.config.cheater;
  config["honest"] = pc.honest;
  if (r.config.fresh_code_weight) {
    config["code"] = {{"per_trial", true}, {"n", pc.runs}, {"w", *r.config.fresh_code_weight},
                      {"mean_k", r.mean_k.value_or(0.0)}, {"mean_d", r.mean_d.value_or(0.0)}};
  } else if (pc.code) {
    config["code"] = {{"n", pc.code->code.length()}, {"k", pc.code->code.dimension()},
                      {"d", pc.code->code.min_distance()}, {"w", pc.code->w}};
  }
  j["config"] = config;
  j["trials"] = r.trials;
  j["detection_rate"] = rate_json(r.detection);
  j["pass_probability"] = r.pass_probability();
  const auto pass = r.pass_ci();
  j["pass_ci"] = {pass.lo, pass.hi};
  j["checked_run_detection_rate"] = rate_json(r.totals.checked_detection);
  j["valid_run_rate"] = rate_json(r.totals.valid);
  j["secret_recovery_rate"] = rate_json(r.totals.recovery);
  j["case_ii_frequency"] = rate_json(r.totals.case_ii);
  j["case_ii_accuracy"] = rate_json(r.totals.case_ii_accuracy);
  j["case_i_inference_failure_rate"] = 0.0;
  j["epsilon_estimate"] = rate_json(r.totals.forced_detection);
  j["both_z_detection_rate"] = rate_json(r.totals.both_z_detection);
  if (r.oracle_early) {
    nlohmann::ordered_json o;
    o["early_empirical"] = rate_json(r.totals.opportunity_early);
    o["late_empirical"] = rate_json(r.totals.opportunity_late);
    o["early_exact"] = *r.oracle_early;
    o["late_exact"] = r.oracle_late.value_or(0.0);
    o["early_eligible"] = rate_json(r.totals.eligible_opportunity_early);
    o["late_eligible"] = rate_json(r.totals.eligible_opportunity_late);
    o["p1"] = *r.p1;
    o["p2"] = *r.p2;
    j["opportunity"] = o;
  }
  if (r.simulate_seconds) {
    j["timing"] = {{"simulate_seconds", *r.simulate_seconds}, {"analyze_seconds", *r.analyze_seconds}};
  }
  return j;
}

std::string report_csv_header() {
  return "variant,participants,runs,strategy,cheater,trials,detection_rate,detection_lo,detection_hi,"
         "pass_probability,pass_lo,pass_hi,checked_run_detection_rate,valid_run_rate,secret_recovery_rate,"
         "case_ii_frequency,epsilon_estimate,epsilon_lo,epsilon_hi,forced_runs,both_z_detection_rate,both_z_runs";
}

std::string report_csv_row(const AttackReport& r) {
  const auto& pc = r.config.protocol;
  const auto det = r.detection.ci();
  const auto pass = r.pass_ci();
  const auto eps = r.totals.forced_detection.ci();
  std::ostringstream os;
  os << protocol::to_string(pc.variant) << ',' << pc.participants << ',' << pc.runs << ',' << r.config.strategy
     << ',' << r.config.cheater << ',' << r.trials << ',' << fmt(r.detection.value()) << ',' << fmt(det.lo) << ','
     << fmt(det.hi) << ',' << fmt(r.pass_probability()) << ',' << fmt(pass.lo) << ',' << fmt(pass.hi) << ','
     << fmt(r.totals.checked_detection.value()) << ',' << fmt(r.totals.valid.value()) << ','
     << fmt(r.totals.recovery.value()) << ',' << fmt(r.totals.case_ii.value()) << ','
     << fmt(r.totals.forced_detection.value()) << ',' << fmt(eps.lo) << ',' << fmt(eps.hi) << ','
     << r.totals.forced_detection.total << ',' << fmt(r.totals.both_z_detection.value()) << ','
     << r.totals.both_z_detection.total;
  return os.str();
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  std::vector<SweepRow> rows;
  for (int n : config.values) {
    SweepRow row;
    row.n = n;
    row.w = (7 * n + 9) / 10;
    try {
      AttackConfig cell = config.base;
      cell.protocol.runs = n;
      cell.protocol.code.reset();
      cell.fresh_code_weight = row.w;
      row.report = run_attack(cell);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.n < b.n; });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "n,w,mean_k,mean_d," << report_csv_header() << ",error\n";
  for (const auto& row : rows) {
    os << row.n << ',' << row.w << ',';
    if (row.report) {
      os << fmt(row.report->mean_k.value_or(0.0)) << ',' << fmt(row.report->mean_d.value_or(0.0)) << ','
         << report_csv_row(*row.report);
    } else {
      const std::string header = report_csv_header();
      os << ",," << std::string(static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')), ',');
    }
    std::string err = row.error;
    std::replace(err.begin(), err.end(), ',', ';');
    os << ',' << err << '\n';
  }
  return os.str();
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace qsslab::harness
