#include "qsslab/transcript_json.hpp"

#include <zlib.h>

#include <fstream>
#include <sstream>

namespace qsslab::protocol {

using nlohmann::ordered_json;

namespace {

ordered_json phases_json(const std::vector<PhaseAngle>& phases) {
  auto out = ordered_json::array();
  for (auto p : phases) out.push_back(p.quarter_turns());
  return out;
}

std::vector<PhaseAngle> phases_from(const nlohmann::json& j) {
  std::vector<PhaseAngle> out;
  for (const auto& p : j) out.emplace_back(p.get<int>());
  return out;
}

std::string sign_text(Sign s) { return std::string(to_string(s)); }

Sign sign_from(const nlohmann::json& j) {
  const auto s = j.get<std::string>();
  if (s == "+") return Sign::Plus;
  if (s == "-" || s == "−") return Sign::Minus;
  throw ConfigError("bad outcome '" + s + "'");
}

std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::Bit: return "bit";
    case Stage::Class: return "class";
    case Stage::Value: return "value";
  }
  return "class";
}

Stage stage_from(const std::string& s) {
  if (s == "bit") return Stage::Bit;
  if (s == "value") return Stage::Value;
  return Stage::Class;
}

ordered_json config_json(const ProtocolConfig& c) {
  ordered_json j;
  j["variant"] = to_string(c.variant);
  j["participants"] = c.participants;
  j["runs"] = c.runs;
  j["check_fraction"] = c.check_fraction;
  j["seed"] = c.seed;
  j["value_order"] = to_string(c.value_order);
  j["focus"] = c.focus;
  j["honest"] = c.honest;
  if (c.code) j["code"] = ordered_json::parse(codes::code_file_json(*c.code));
  return j;
}

ProtocolConfig config_from(const nlohmann::json& j) {
  ProtocolConfig c;
  c.variant = parse_variant(j.at("variant").get<std::string>());
  c.participants = j.at("participants").get<int>();
  c.runs = j.at("runs").get<int>();
  c.check_fraction = j.value("check_fraction", 0.5);
  c.seed = j.value("seed", std::uint64_t{1});
  c.value_order = parse_value_order(j.value("value_order", std::string("random")));
  c.focus = j.value("focus", 0);
  c.honest = j.value("honest", std::vector<int>{});
  if (j.contains("code")) c.code = codes::parse_code_file(j["code"].dump());
  return c;
}

ordered_json action_json(const Action& a) {
  ordered_json j;
  j["participant"] = a.participant;
  j["class"] = a.cls ? ordered_json(to_string(*a.cls)) : ordered_json(nullptr);
  if (a.bit) j["bit"] = *a.bit;
  j["phases"] = phases_json(a.phases);
  if (a.z_outcome) j["z_outcome"] = sign_text(*a.z_outcome);
  j["strategy"] = a.strategy;
  if (!a.definite) j["definite"] = false;
  return j;
}

Action action_from(const nlohmann::json& j) {
  Action a;
  a.participant = j.at("participant").get<int>();
  if (!j.at("class").is_null()) a.cls = parse_class(j["class"].get<std::string>());
  if (j.contains("bit")) a.bit = j["bit"].get<int>();
  a.phases = phases_from(j.at("phases"));
  if (j.contains("z_outcome")) a.z_outcome = sign_from(j["z_outcome"]);
  a.strategy = j.value("strategy", std::string("honest"));
  a.definite = j.value("definite", true);
  return a;
}

ordered_json announcement_json(const Announcement& a) {
  ordered_json j;
  j["stage"] = stage_name(a.stage);
  j["position"] = a.position;
  j["participant"] = a.participant;
  if (a.stage == Stage::Value) j["round"] = a.round;
  if (a.bit) j["bit"] = *a.bit;
  if (a.cls) j["class"] = to_string(*a.cls);
  if (a.stage == Stage::Value) j["phases"] = phases_json(a.phases);
  if (a.outcome) j["outcome"] = sign_text(*a.outcome);
  return j;
}

Announcement announcement_from(const nlohmann::json& j) {
  Announcement a;
  a.stage = stage_from(j.at("stage").get<std::string>());
  a.position = j.at("position").get<int>();
  a.participant = j.at("participant").get<int>();
  a.round = j.value("round", 0);
  if (j.contains("bit")) a.bit = j["bit"].get<int>();
  if (j.contains("class")) a.cls = parse_class(j["class"].get<std::string>());
  if (j.contains("phases")) a.phases = phases_from(j["phases"]);
  if (j.contains("outcome")) a.outcome = sign_from(j["outcome"]);
  return a;
}

template <class T>
void put_optional(ordered_json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

ordered_json note_json(const CheaterNote& n) {
  ordered_json j;
  j["participant"] = n.participant;
  j["route"] = n.route;
  if (n.twist) j["twist"] = n.twist->quarter_turns();
  if (n.claimed_prev) j["claimed_prev"] = n.claimed_prev->quarter_turns();
  if (n.claimed_next) j["claimed_next"] = n.claimed_next->quarter_turns();
  j["forced_guess"] = n.forced_guess;
  j["inexact"] = n.inexact;
  put_optional(j, "safe_opportunity", n.safe_opportunity);
  put_optional(j, "eligible_opportunity", n.eligible_opportunity);
  j["late_run"] = n.late_run;
  return j;
}

CheaterNote note_from(const nlohmann::json& j) {
  CheaterNote n;
  n.participant = j.at("participant").get<int>();
  n.route = j.at("route").get<std::string>();
  if (j.contains("twist")) n.twist = PhaseAngle(j["twist"].get<int>());
  if (j.contains("claimed_prev")) n.claimed_prev = PhaseAngle(j["claimed_prev"].get<int>());
  if (j.contains("claimed_next")) n.claimed_next = PhaseAngle(j["claimed_next"].get<int>());
  n.forced_guess = j.value("forced_guess", false);
  n.inexact = j.value("inexact", false);
  if (j.contains("safe_opportunity")) n.safe_opportunity = j["safe_opportunity"].get<bool>();
  if (j.contains("eligible_opportunity")) n.eligible_opportunity = j["eligible_opportunity"].get<bool>();
  n.late_run = j.value("late_run", false);
  return n;
}

ordered_json announcements_json(const std::vector<Announcement>& list) {
  auto out = ordered_json::array();
  for (const auto& a : list) out.push_back(announcement_json(a));
  return out;
}

std::vector<Announcement> announcements_from(const nlohmann::json& j) {
  std::vector<Announcement> out;
  for (const auto& a : j) out.push_back(announcement_from(a));
  return out;
}

std::string gunzip(const std::string& data) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw std::runtime_error("inflateInit failed");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::string out;
  char buf[1 << 16];
  int ret = Z_OK;
  while (ret != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof buf;
    ret = inflate(&zs, Z_NO_FLUSH);
    if (ret != Z_OK && ret != Z_STREAM_END) {
      inflateEnd(&zs);
      throw std::runtime_error("corrupt gzip transcript");
    }
    out.append(buf, sizeof buf - zs.avail_out);
  }
  inflateEnd(&zs);
  return out;
}

std::string gzip(const std::string& data) {
  z_stream zs{};
  // Fixed header fields (no mtime) keep the output byte-identical.
  if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, 16 + MAX_WBITS, 9, Z_DEFAULT_STRATEGY) != Z_OK) {
    throw std::runtime_error("deflateInit failed");
  }
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  std::string out;
  char buf[1 << 16];
  int ret = Z_OK;
  while (ret != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buf);
    zs.avail_out = sizeof buf;
    ret = deflate(&zs, Z_FINISH);
    out.append(buf, sizeof buf - zs.avail_out);
  }
  deflateEnd(&zs);
  return out;
}

}  // namespace

ordered_json to_json(const Transcript& t) {
  ordered_json j;
  j["config"] = config_json(t.config);
  auto runs = ordered_json::array();
  for (const auto& r : t.runs) {
    ordered_json jr;
    jr["idx"] = r.index;
    auto actions = ordered_json::array();
    for (const auto& a : r.actions) actions.push_back(action_json(a));
    jr["actions"] = actions;
    jr["rn_outcome"] = sign_text(r.rn_outcome);
    ordered_json ann;
    if (!r.bit_stage.empty()) ann["bit_stage"] = announcements_json(r.bit_stage);
    ann["class_stage"] = announcements_json(r.class_stage);
    if (!r.value_stage.empty()) ann["value_stage"] = announcements_json(r.value_stage);
    jr["announcements"] = ann;
    jr["valid"] = r.valid;
    jr["checked"] = r.checked;
    auto trace = ordered_json::array();
    for (const auto& p : r.trace) trace.push_back(p ? ordered_json(p->quarter_turns()) : ordered_json(nullptr));
    jr["trace"] = trace;
    if (!r.notes.empty()) {
      auto notes = ordered_json::array();
      for (const auto& n : r.notes) notes.push_back(note_json(n));
      jr["notes"] = notes;
    }
    runs.push_back(jr);
  }
  j["runs"] = runs;
  auto verdicts = ordered_json::array();
  for (const auto& v : t.verdicts) {
    ordered_json jv;
    jv["check"] = v.check;
    jv["pass"] = v.pass;
    jv["failing_runs"] = v.failing_runs;
    jv["failing_participants"] = v.failing_participants;
    if (v.interval) jv["interval"] = {v.interval->first, v.interval->second};
    verdicts.push_back(jv);
  }
  j["verdicts"] = verdicts;
  return j;
}

Transcript transcript_from_json(const nlohmann::json& j) {
  Transcript t;
  try {
    t.config = config_from(j.at("config"));
    for (const auto& jr : j.at("runs")) {
      RunRecord r;
      r.index = jr.at("idx").get<int>();
      for (const auto& a : jr.at("actions")) r.actions.push_back(action_from(a));
      r.rn_outcome = sign_from(jr.at("rn_outcome"));
      const auto& ann = jr.at("announcements");
      if (ann.contains("bit_stage")) r.bit_stage = announcements_from(ann["bit_stage"]);
      r.class_stage = announcements_from(ann.at("class_stage"));
      if (ann.contains("value_stage")) r.value_stage = announcements_from(ann["value_stage"]);
      r.valid = jr.at("valid").get<bool>();
      r.checked = jr.value("checked", false);
      if (jr.contains("trace")) {
        for (const auto& p : jr["trace"]) {
          r.trace.push_back(p.is_null() ? std::nullopt : std::optional<PhaseAngle>(PhaseAngle(p.get<int>())));
        }
      }
      if (jr.contains("notes")) {
        for (const auto& n : jr["notes"]) r.notes.push_back(note_from(n));
      }
      t.runs.push_back(std::move(r));
    }
    for (const auto& jv : j.at("verdicts")) {
      CheckVerdict v;
      v.check = jv.at("check").get<int>();
      v.pass = jv.at("pass").get<bool>();
      v.failing_runs = jv.at("failing_runs").get<std::vector<int>>();
      v.failing_participants = jv.value("failing_participants", std::vector<int>{});
      if (jv.contains("interval")) v.interval = std::pair{jv["interval"][0].get<int>(), jv["interval"][1].get<int>()};
      t.verdicts.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed transcript: ") + e.what());
  }
  return t;
}

std::string transcript_text(const Transcript& transcript) { return to_json(transcript).dump(1) + "\n"; }

Transcript parse_transcript(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("transcript is not valid JSON: ") + e.what());
  }
  return transcript_from_json(j);
}

std::filesystem::path write_transcript(const Transcript& transcript, std::filesystem::path path,
                                       std::size_t gzip_threshold) {
  std::string text = transcript_text(transcript);
  if (text.size() > gzip_threshold) {
    text = gzip(text);
    if (path.extension() != ".gz") path += ".gz";
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  return path;
}

Transcript read_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  std::string data = ss.str();
  if (data.size() >= 2 && static_cast<unsigned char>(data[0]) == 0x1f && static_cast<unsigned char>(data[1]) == 0x8b) {
    data = gunzip(data);
  }
  return parse_transcript(data);
}

}  // namespace qsslab::protocol
