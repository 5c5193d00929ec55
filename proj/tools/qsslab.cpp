#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qsslab/adversary.hpp"
#include "qsslab/codes.hpp"
#include "qsslab/harness.hpp"
#include "qsslab/transcript_json.hpp"

using namespace qsslab;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitExhausted = 2;

struct Common {
  std::string variant = "original";
  int participants = 5;
  int runs = 100;
  std::uint64_t seed = 1;
  std::string code_path;
  std::string strategy = "honest";
  int cheater = 0;
  std::string honest;
  int trials = 10000;
  double check_fraction = 0.5;
  std::string out;
  std::string format = "json";
  int threads = 0;
  bool timing = false;
};

std::uint64_t effective_seed(std::uint64_t seed) {
  if (const char* env = std::getenv("QSSLAB_SEED"); env != nullptr && *env != '\0') {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw protocol::ConfigError(std::string("QSSLAB_SEED is not an integer: ") + env);
    }
  }
  return seed;
}

std::vector<int> parse_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw protocol::ConfigError("not a comma-separated integer list: " + text);
    }
  }
  return out;
}

protocol::ProtocolConfig protocol_config(const Common& c) {
  protocol::ProtocolConfig pc;
  pc.variant = protocol::parse_variant(c.variant);
  pc.participants = c.participants;
  pc.runs = c.runs;
  pc.seed = effective_seed(c.seed);
  pc.check_fraction = c.check_fraction;
  if (!c.honest.empty()) pc.honest = parse_list(c.honest);
  if (!c.code_path.empty()) {
    pc.code = codes::load_code_file(c.code_path);
    pc.runs = pc.code->code.length();  // one run per coordinate
  }
  return pc;
}

harness::AttackConfig attack_config(const Common& c) {
  harness::AttackConfig a;
  a.protocol = protocol_config(c);
  a.strategy = c.strategy;
  a.cheater = c.cheater;
  a.trials = c.trials;
  a.threads = c.threads;
  a.timing = c.timing;
  return a;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw protocol::ConfigError("cannot write " + out);
  f << text;
}

int cmd_simulate(const Common& c) {
  auto pc = protocol_config(c);
  pc.validate();
  auto spec = adversary::parse_strategy_spec(c.strategy);
  auto strategies = adversary::make_strategies(pc, spec, c.cheater);
  Rng rng(pc.seed);
  const auto t = protocol::run_protocol(pc, strategies, rng);
  const std::string path = c.out.empty() ? "transcript.json" : c.out;
  const auto written = protocol::write_transcript(t, path);

  const auto valid = protocol::valid_runs(t);
  std::cout << "transcript: " << written.string() << "\n";
  std::cout << "valid runs: " << valid.size() << " / " << t.runs.size() << "\n";
  for (const auto& v : t.verdicts) {
    std::cout << "check " << v.check << ": " << (v.pass ? "pass" : "FAIL");
    if (!v.failing_runs.empty()) std::cout << " (" << v.failing_runs.size() << " failing runs)";
    if (!v.failing_participants.empty()) {
      std::cout << " participants";
      for (int j : v.failing_participants) std::cout << ' ' << j;
    }
    if (v.interval) std::cout << " cheater within R" << v.interval->first << "..R" << v.interval->second;
    std::cout << "\n";
  }
  if (!valid.empty()) {
    const int run = valid.front();
    const int n = pc.participants;
    std::vector<int> coalition;
    for (int j = 2; j <= n; ++j) coalition.push_back(j);
    try {
      const auto got = protocol::reconstruct_secret(t, run, coalition, 1);
      const auto truth = protocol::secret_of(t.runs[run], 1, n);
      std::cout << "reconstruction demo: run " << run << ", R2..R" << n << " recover phi_1 = "
                << got.quarter_turns() << " quarter turns (actual " << truth.quarter_turns() << ")\n";
    } catch (const std::exception& e) {
      std::cout << "reconstruction demo: " << e.what() << "\n";
    }
  }
  return 0;
}

int cmd_attack(const Common& c) {
  if (c.trials <= 0) throw protocol::ConfigError("--trials must be positive");
  const auto report = harness::run_attack(attack_config(c));
  if (c.format == "csv") {
    emit(harness::report_csv_header() + "\n" + harness::report_csv_row(report) + "\n", c.out);
  } else {
    emit(harness::report_json(report).dump(2) + "\n", c.out);
  }
  return 0;
}

int cmd_sweep(const Common& c, const std::string& param, const std::string& values, int tries) {
  if (param != "n") throw protocol::ConfigError("only --param n is supported");
  harness::SweepConfig s;
  s.base = attack_config(c);
  s.values = parse_list(values);
  if (!std::is_sorted(s.values.begin(), s.values.end())) throw protocol::ConfigError("--values must be ascending");
  s.base.code_tries = tries;
  const auto rows = harness::run_sweep(s);
  emit(harness::sweep_csv(rows), c.out);
  std::vector<double> x, y;
  for (const auto& row : rows) {
    if (row.report && row.report->pass_probability() > 0) {
      x.push_back(row.n);
      y.push_back(std::log(row.report->pass_probability()));
    }
  }
  if (x.size() >= 2) {
    const auto fit = harness::fit_line(x, y);
    std::cerr << "log pass_probability vs n: slope " << fit.slope << ", R^2 " << fit.r_squared << "\n";
  }
  return 0;
}

int cmd_codes(int n, int w, std::uint64_t seed, int tries, const std::string& out) {
  if (w <= 0) w = (7 * n + 9) / 10;
  Rng rng(effective_seed(seed));
  const auto found = codes::find_code(n, w, rng, tries);
  const codes::CodeFile file{found.code, w};
  const std::string path = out.empty() ? "code.json" : out;
  codes::save_code_file(path, file);
  const auto& p = found.params;
  std::cout << "code: " << path << "\n"
            << "n = " << p.n << ", k = " << found.code.dimension() << ", d = " << p.d << ", w = " << p.w << "\n"
            << "d bounds: (" << codes::to_double(p.lower) << ", " << codes::to_double(p.upper) << ")\n"
            << "p1 = " << p.p1 << " = " << codes::to_double(p.p1) << "\n"
            << "p2 = " << p.p2 << " = " << codes::to_double(p.p2) << "\n"
            << "n' = " << p.n_prime << " = " << codes::to_double(p.n_prime) << "\n"
            << "d > n': " << (codes::Rational(p.d) > p.n_prime ? "yes" : "no") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qsslab: simulator and attack harness for single-qubit quantum secret sharing"};
  app.require_subcommand(1);
  Common c;

  auto add_protocol = [&](CLI::App* sub) {
    sub->add_option("--variant", c.variant, "original | mod1 | mod2 | secure")->capture_default_str();
    sub->add_option("--participants", c.participants, "N")->capture_default_str();
    sub->add_option("--runs", c.runs, "physical runs n")->capture_default_str();
    sub->add_option("--seed", c.seed, "seed (QSSLAB_SEED overrides)")->capture_default_str();
    sub->add_option("--code", c.code_path, "code file (secure variant)");
    sub->add_option("--check-fraction", c.check_fraction, "fraction of valid runs checked")->capture_default_str();
    sub->add_option("--strategy", c.strategy,
                    "honest | intercept | eavesdrop | strategyA | strategyB | collude:<1|N> | secureCheat[:bell]")
        ->capture_default_str();
    sub->add_option("--cheater", c.cheater, "position k of the deviating participant");
    sub->add_option("--honest", c.honest, "a,b honest positions (secure)");
    sub->add_option("--out", c.out, "output path");
  };

  auto* simulate = app.add_subcommand("simulate", "run one protocol execution and write its transcript");
  add_protocol(simulate);

  auto* attack = app.add_subcommand("attack", "Monte Carlo estimate for one strategy");
  add_protocol(attack);
  attack->add_option("--trials", c.trials)->capture_default_str();
  attack->add_option("--format", c.format)->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  attack->add_option("--threads", c.threads, "0: all cores");
  attack->add_flag("--timing", c.timing, "include wall-clock timing");

  std::string param = "n", values = "12,16,20,24";
  int sweep_tries = 2000;
  auto* sweep = app.add_subcommand("sweep", "attack report per code length, as CSV");
  add_protocol(sweep);
  sweep->add_option("--trials", c.trials)->capture_default_str();
  sweep->add_option("--param", param)->capture_default_str();
  sweep->add_option("--values", values)->capture_default_str();
  sweep->add_option("--tries", sweep_tries, "code search attempts per value")->capture_default_str();
  sweep->add_option("--threads", c.threads);
  sweep->add_option("--format", c.format)->check(CLI::IsMember({"csv"}));

  int code_n = 16, code_w = 0, code_tries = 2000;
  std::uint64_t code_seed = 1;
  std::string code_out;
  auto* codes_cmd = app.add_subcommand("codes", "search for a code and write the code file");
  codes_cmd->add_option("--n", code_n)->capture_default_str();
  codes_cmd->add_option("--w", code_w, "default ceil(0.7 n)");
  codes_cmd->add_option("--seed", code_seed)->capture_default_str();
  codes_cmd->add_option("--tries", code_tries)->capture_default_str();
  codes_cmd->add_option("--out", code_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(c);
    if (*attack) return cmd_attack(c);
    if (*sweep) {
      if (sweep->count("--variant") == 0) c.variant = "secure";
      if (sweep->count("--strategy") == 0) c.strategy = "secureCheat";
      if (sweep->count("--cheater") == 0) c.cheater = 3;
      if (sweep->count("--honest") == 0) c.honest = "2,4";
      return cmd_sweep(c, param, values, sweep_tries);
    }
    if (*codes_cmd) return cmd_codes(code_n, code_w, code_seed, code_tries, code_out);
  } catch (const codes::SearchExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitExhausted;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
