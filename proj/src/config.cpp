#include "tvrls/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include "tvrls/error.hpp"

namespace tvrls {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::config, msg); }

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!known.count(key)) fail("unknown config key '" + where + key + "'");
  }
}

std::size_t get_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    fail("'" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double get_real(const json& v, const std::string& key) {
  if (!v.is_number()) fail("'" + key + "' must be a number");
  return v.get<double>();
}

std::optional<std::size_t> get_cut(const json& v, const std::string& key) {
  if (v.is_null()) return std::nullopt;
  return get_count(v, key);
}

json cut_json(const std::optional<std::size_t>& c) { return c ? json(*c) : json(nullptr); }

}  // namespace

const char* to_string(DataMode mode) { return mode == DataMode::pe ? "pe" : "non_pe"; }

std::optional<DataMode> data_mode_from_string(std::string_view name) {
  if (name == "pe") return DataMode::pe;
  if (name == "non_pe" || name == "non-pe") return DataMode::non_pe;
  return std::nullopt;
}

void ExperimentConfig::validate() const {
  if (n < 1) fail("n must be at least 1");
  if (p < 1) fail("p must be at least 1");
  if (data.steps < 1) fail("data.steps must be at least 1");
  if (trials < 1) fail("trials must be at least 1");
  if (!(schedule.mu > 0.0 && schedule.mu < 1.0)) fail("schedule.mu must lie in (0, 1)");
  if (!(schedule.r0_scale > 0.0) || !std::isfinite(schedule.r0_scale)) {
    fail("schedule.r0_scale must be positive");
  }
  if (!(data.noise_std >= 0.0) || !std::isfinite(data.noise_std)) {
    fail("data.noise_std must be non-negative");
  }
  if (estimators.empty()) fail("estimators must not be empty");
}

json to_json(const ExperimentConfig& cfg) {
  json est = json::array();
  for (auto k : cfg.estimators) est.push_back(to_string(k));
  return json{
      {"n", cfg.n},
      {"p", cfg.p},
      {"seed", cfg.seed},
      {"schedule",
       {{"kind", to_string(cfg.schedule.kind)},
        {"mu", cfg.schedule.mu},
        {"k_cut", cut_json(cfg.schedule.k_cut)},
        {"j_cut", cut_json(cfg.schedule.j_cut)},
        {"r0_scale", cfg.schedule.r0_scale}}},
      {"data",
       {{"mode", to_string(cfg.data.mode)},
        {"noise_std", cfg.data.noise_std},
        {"steps", cfg.data.steps},
        {"non_pe_stop", cfg.data.non_pe_stop}}},
      {"trials", cfg.trials},
      {"estimators", est},
      {"monitor_cadence", cfg.monitor_cadence},
  };
}

ExperimentConfig config_from_json(const json& doc) {
  if (doc.is_object() && doc.contains("config") && doc.contains("version")) {
    return config_from_json(doc.at("config"));
  }
  reject_unknown(doc, {"n", "p", "seed", "schedule", "data", "trials", "estimators",
                       "monitor_cadence"},
                 "");
  ExperimentConfig cfg;
  if (doc.contains("n")) cfg.n = get_count(doc["n"], "n");
  if (doc.contains("p")) cfg.p = get_count(doc["p"], "p");
  if (doc.contains("seed")) {
    const json& s = doc["seed"];
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() &&
                                   s.get<long long>() < 0)) {
      fail("'seed' must be a non-negative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (doc.contains("schedule")) {
    const json& s = doc["schedule"];
    reject_unknown(s, {"kind", "mu", "k_cut", "j_cut", "r0_scale"}, "schedule.");
    if (s.contains("kind")) {
      if (!s["kind"].is_string()) fail("'schedule.kind' must be a string");
      auto k = schedule_kind_from_string(s["kind"].get<std::string>());
      if (!k) fail("unknown schedule.kind '" + s["kind"].get<std::string>() + "'");
      cfg.schedule.kind = *k;
    }
    if (s.contains("mu")) cfg.schedule.mu = get_real(s["mu"], "schedule.mu");
    if (s.contains("k_cut")) cfg.schedule.k_cut = get_cut(s["k_cut"], "schedule.k_cut");
    if (s.contains("j_cut")) cfg.schedule.j_cut = get_cut(s["j_cut"], "schedule.j_cut");
    if (s.contains("r0_scale")) cfg.schedule.r0_scale = get_real(s["r0_scale"], "schedule.r0_scale");
  }
  if (doc.contains("data")) {
    const json& d = doc["data"];
    reject_unknown(d, {"mode", "noise_std", "steps", "non_pe_stop"}, "data.");
    if (d.contains("mode")) {
      if (!d["mode"].is_string()) fail("'data.mode' must be a string");
      auto m = data_mode_from_string(d["mode"].get<std::string>());
      if (!m) fail("unknown data.mode '" + d["mode"].get<std::string>() + "'");
      cfg.data.mode = *m;
    }
    if (d.contains("noise_std")) cfg.data.noise_std = get_real(d["noise_std"], "data.noise_std");
    if (d.contains("steps")) cfg.data.steps = get_count(d["steps"], "data.steps");
    if (d.contains("non_pe_stop")) {
      cfg.data.non_pe_stop = get_count(d["non_pe_stop"], "data.non_pe_stop");
    }
  }
  if (doc.contains("trials")) cfg.trials = get_count(doc["trials"], "trials");
  if (doc.contains("estimators")) {
    const json& e = doc["estimators"];
    if (!e.is_array()) fail("'estimators' must be an array");
    cfg.estimators.clear();
    for (const auto& item : e) {
      if (!item.is_string()) fail("'estimators' entries must be strings");
      auto k = estimator_kind_from_string(item.get<std::string>());
      if (!k) fail("unknown estimator '" + item.get<std::string>() + "'");
      cfg.estimators.push_back(*k);
    }
  }
  if (doc.contains("monitor_cadence")) {
    cfg.monitor_cadence = get_count(doc["monitor_cadence"], "monitor_cadence");
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail("invalid JSON in " + path.string() + ": " + e.what());
  }
  return config_from_json(doc);
}

void apply_override(json& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    fail("override '" + std::string(assignment) + "' must look like key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (part.empty()) fail("override key '" + key + "' is malformed");
    if (!node->is_object()) fail("override key '" + key + "' does not name a config field");
    if (dot == std::string::npos) {
      (*node)[part] = std::move(value);
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace tvrls
