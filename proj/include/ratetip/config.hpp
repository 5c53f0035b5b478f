#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <json.hpp>

#include "ratetip/integrate.hpp"
#include "ratetip/shift.hpp"
#include "ratetip/system.hpp"
#include "ratetip/tracking.hpp"

namespace ratetip {

enum class ZInitMode { Default, Auto, Custom };

/// Complete run configuration. Every field carries its module default; a
/// JSON document overrides any subset of keys and unknown keys are errors.
struct RunConfig {
  std::optional<double> a;  ///< frozen-only commands; defaults to 0.2 there
  double b = 0.2;
  double c = 5.7;
  ShiftProfile shift{};

  std::optional<double> r;
  double r_min = 0.9;
  double r_max = 1.0;
  std::size_t samples = 201;

  ZInitMode z_init_mode = ZInitMode::Default;
  State z_init{-0.007, 0.035, -0.035};
  double t_start = -30.0;
  double T = 150.0;

  IntegratorConfig integ{};
  RefineConfig refine{};
  ConfirmConfig confirm{};
  std::string gap_mode = "unstable_coefficient";  ///< or stable_projection, both

  RosslerParams frozen_params() const { return {a.value_or(0.2), b, c}; }
  NonautonomousSpec nonautonomous(double rate) const;
  /// Pullback run with z_init resolved ("auto" becomes the past-limit equilibrium).
  PullbackRunConfig pullback() const;
};

/// Parses a JSON config document. Throws Error(InvalidArgument) naming the
/// offending key (dotted path) for unknown keys and type or range errors.
RunConfig parse_config(const nlohmann::json& doc, RunConfig base = {});
RunConfig load_config_file(const std::string& path);

/// Cross-field checks (ranges, ordering, positivity).
void validate(const RunConfig& cfg);

nlohmann::json to_json(const RunConfig& cfg);

}  // namespace ratetip
