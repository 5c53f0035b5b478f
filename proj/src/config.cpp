#include "ratetip/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string_view>

#include "ratetip/error.hpp"

namespace ratetip {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::InvalidArgument, msg); }

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> known) {
  if (!obj.is_object()) config_error("'" + path + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool found = false;
    for (auto k : known) found = found || k == key;
    if (!found) config_error("unknown config key '" + (path.empty() ? key : path + "." + key) + "'");
  }
}

std::string join(const std::string& path, const char* key) {
  return path.empty() ? std::string(key) : path + "." + key;
}

void read(const json& obj, const std::string& path, const char* key, double& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number()) config_error("'" + join(path, key) + "' must be a number");
  out = v.get<double>();
}

template <class Int>
void read_count(const json& obj, const std::string& path, const char* key, Int& out) {
  if (!obj.contains(key)) return;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    config_error("'" + join(path, key) + "' must be a non-negative integer");
  out = static_cast<Int>(v.get<long long>());
}

void read_state(const json& v, const std::string& key, State& out) {
  if (!v.is_array() || v.size() != 3) config_error("'" + key + "' must be \"auto\" or [x, y, z]");
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) config_error("'" + key + "' must be \"auto\" or [x, y, z]");
    out[i] = v[i].get<double>();
  }
}

}  // namespace

NonautonomousSpec RunConfig::nonautonomous(double rate) const { return {b, c, shift, rate}; }

PullbackRunConfig RunConfig::pullback() const {
  PullbackRunConfig run;
  run.t_start = t_start;
  run.T = T;
  run.integ = integ;
  run.z_init = z_init_mode == ZInitMode::Auto ? auto_z_init(nonautonomous(1.0)) : z_init;
  return run;
}

RunConfig parse_config(const json& doc, RunConfig cfg) {
  reject_unknown(doc, "",
                 {"system", "shift", "rate", "run", "integrate", "refine", "confirm", "gap_mode"});

  if (doc.contains("system")) {
    const auto& s = doc["system"];
    reject_unknown(s, "system", {"a", "b", "c"});
    if (s.contains("a")) {
      double a = 0.0;
      read(s, "system", "a", a);
      cfg.a = a;
    }
    read(s, "system", "b", cfg.b);
    read(s, "system", "c", cfg.c);
  }

  if (doc.contains("shift")) {
    const auto& s = doc["shift"];
    reject_unknown(s, "shift", {"kind", "lambda_minus", "lambda_plus", "delta"});
    if (s.contains("kind")) {
      if (!s["kind"].is_string()) config_error("'shift.kind' must be a string");
      cfg.shift.kind = shift_kind_from_string(s["kind"].get<std::string>());
    }
    read(s, "shift", "lambda_minus", cfg.shift.lambda_minus);
    read(s, "shift", "lambda_plus", cfg.shift.lambda_plus);
    read(s, "shift", "delta", cfg.shift.delta);
  }

  if (doc.contains("rate")) {
    const auto& r = doc["rate"];
    reject_unknown(r, "rate", {"r", "scan"});
    if (r.contains("r")) {
      double v = 0.0;
      read(r, "rate", "r", v);
      cfg.r = v;
    }
    if (r.contains("scan")) {
      const auto& sc = r["scan"];
      reject_unknown(sc, "rate.scan", {"r_min", "r_max", "samples"});
      read(sc, "rate.scan", "r_min", cfg.r_min);
      read(sc, "rate.scan", "r_max", cfg.r_max);
      read_count(sc, "rate.scan", "samples", cfg.samples);
    }
  }

  if (doc.contains("run")) {
    const auto& r = doc["run"];
    reject_unknown(r, "run", {"z_init", "t_start", "T"});
    if (r.contains("z_init")) {
      const auto& z = r["z_init"];
      if (z.is_string()) {
        if (z.get<std::string>() != "auto") config_error("'run.z_init' must be \"auto\" or [x, y, z]");
        cfg.z_init_mode = ZInitMode::Auto;
      } else {
        read_state(z, "run.z_init", cfg.z_init);
        cfg.z_init_mode = ZInitMode::Custom;
      }
    }
    read(r, "run", "t_start", cfg.t_start);
    read(r, "run", "T", cfg.T);
  }

  if (doc.contains("integrate")) {
    const auto& s = doc["integrate"];
    reject_unknown(s, "integrate", {"rtol", "atol", "h_max", "max_steps"});
    read(s, "integrate", "rtol", cfg.integ.rtol);
    read(s, "integrate", "atol", cfg.integ.atol);
    read(s, "integrate", "h_max", cfg.integ.h_max);
    read_count(s, "integrate", "max_steps", cfg.integ.max_steps);
  }

  if (doc.contains("refine")) {
    const auto& s = doc["refine"];
    reject_unknown(s, "refine", {"tol_r", "tol_eta", "max_iter"});
    read(s, "refine", "tol_r", cfg.refine.tol_r);
    read(s, "refine", "tol_eta", cfg.refine.tol_eta);
    read_count(s, "refine", "max_iter", cfg.refine.max_iter);
  }

  if (doc.contains("confirm")) {
    const auto& s = doc["confirm"];
    reject_unknown(s, "confirm", {"shadow_periods", "tube_eps"});
    read_count(s, "confirm", "shadow_periods", cfg.confirm.shadow_periods);
    read(s, "confirm", "tube_eps", cfg.confirm.tube_eps);
  }

  if (doc.contains("gap_mode")) {
    if (!doc["gap_mode"].is_string()) config_error("'gap_mode' must be a string");
    cfg.gap_mode = doc["gap_mode"].get<std::string>();
  }

  validate(cfg);
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    config_error("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

void validate(const RunConfig& cfg) {
  if (cfg.gap_mode != "both") gap_mode_from_string(cfg.gap_mode);
  validate(cfg.shift);
  validate(cfg.integ);
  if (!std::isfinite(cfg.b) || !std::isfinite(cfg.c)) config_error("b and c must be finite");
  if (cfg.r && !(*cfg.r > 0.0)) config_error("rate.r must be positive");
  if (!(cfg.r_min > 0.0) || !(cfg.r_max > 0.0)) config_error("scan rates must be positive");
  if (cfg.r_min > cfg.r_max) config_error("rate.scan.r_min must not exceed rate.scan.r_max");
  if (cfg.samples < 2) config_error("rate.scan.samples must be at least 2");
  if (!(cfg.T > cfg.t_start)) config_error("run.T must exceed run.t_start");
  if (!(cfg.refine.tol_r > 0.0) || !(cfg.refine.tol_eta > 0.0))
    config_error("refine tolerances must be positive");
  if (!(cfg.confirm.tube_eps > 0.0)) config_error("confirm.tube_eps must be positive");
}

json to_json(const RunConfig& cfg) {
  json j;
  j["system"] = {{"b", cfg.b}, {"c", cfg.c}};
  if (cfg.a) j["system"]["a"] = *cfg.a;
  j["shift"] = {{"kind", std::string(to_string(cfg.shift.kind))},
                {"lambda_minus", cfg.shift.lambda_minus},
                {"lambda_plus", cfg.shift.lambda_plus},
                {"delta", cfg.shift.delta}};
  j["rate"] = {{"scan", {{"r_min", cfg.r_min}, {"r_max", cfg.r_max}, {"samples", cfg.samples}}}};
  if (cfg.r) j["rate"]["r"] = *cfg.r;
  j["run"] = {{"t_start", cfg.t_start}, {"T", cfg.T}};
  if (cfg.z_init_mode == ZInitMode::Auto)
    j["run"]["z_init"] = "auto";
  else
    j["run"]["z_init"] = cfg.z_init;
  j["integrate"] = {{"rtol", cfg.integ.rtol},
                    {"atol", cfg.integ.atol},
                    {"h_max", cfg.integ.h_max},
                    {"max_steps", cfg.integ.max_steps}};
  j["refine"] = {{"tol_r", cfg.refine.tol_r},
                 {"tol_eta", cfg.refine.tol_eta},
                 {"max_iter", cfg.refine.max_iter}};
  j["confirm"] = {{"shadow_periods", cfg.confirm.shadow_periods},
                  {"tube_eps", cfg.confirm.tube_eps}};
  j["gap_mode"] = cfg.gap_mode;
  return j;
}

}  // namespace ratetip
