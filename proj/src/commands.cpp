#include "ratetip/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ratetip/config.hpp"
#include "ratetip/error.hpp"
#include "ratetip/frozen.hpp"
#include "ratetip/tracking.hpp"
#include "ratetip/upo.hpp"

namespace ratetip {

using nlohmann::json;

namespace {

// Doubles are rounded to 15 significant digits before they reach the JSON
// writer, which then prints the shortest representation of the rounded value.
json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return std::strtod(buf, nullptr);
}

json num(const Vec2& v) { return json::array({num(v[0]), num(v[1])}); }
json num(const Vec3& v) { return json::array({num(v[0]), num(v[1]), num(v[2])}); }

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

struct Overrides {
  std::string config_path;
  std::optional<double> a, b, c, r, r_min, r_max, t_start, T, rtol, atol, h_max, tube_eps;
  std::optional<double> lambda_minus, lambda_plus, delta, tol_r, tol_eta;
  std::optional<std::size_t> samples, shadow_periods;
  std::optional<std::string> z_init, gap_mode, shift_kind;
  std::optional<int> jobs;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--b", o.b);
  cmd->add_option("--c", o.c);
  cmd->add_option("--shift", o.shift_kind, "tanh, piecewise_linear or constant");
  cmd->add_option("--lambda-minus", o.lambda_minus);
  cmd->add_option("--lambda-plus", o.lambda_plus);
  cmd->add_option("--delta", o.delta);
  cmd->add_option("--rtol", o.rtol);
  cmd->add_option("--atol", o.atol);
  cmd->add_option("--h-max", o.h_max);
  cmd->add_option("--jobs", o.jobs, "worker threads (default: RATETIP_JOBS or all cores)");
}

void add_run(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--z-init", o.z_init, "\"auto\", \"default\" or x,y,z");
  cmd->add_option("--t-start", o.t_start);
  cmd->add_option("--T", o.T, "integration horizon");
}

void add_scan(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--r-min", o.r_min);
  cmd->add_option("--r-max", o.r_max);
  cmd->add_option("--samples", o.samples);
  cmd->add_option("--gap-mode", o.gap_mode, "unstable_coefficient, stable_projection or both");
}

State parse_state(const std::string& text) {
  State s{};
  std::stringstream ss(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= 3) break;
    try {
      std::size_t used = 0;
      s[i] = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "--z-init expects auto, default or x,y,z");
    }
    ++i;
  }
  if (i != 3 || ss.rdbuf()->in_avail() > 0)
    throw Error(ErrorKind::InvalidArgument, "--z-init expects auto, default or x,y,z");
  return s;
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config_file(o.config_path);
  auto set = [](auto& dst, const auto& src) {
    if (src) dst = *src;
  };
  if (o.a) cfg.a = o.a;
  set(cfg.b, o.b);
  set(cfg.c, o.c);
  if (o.shift_kind) cfg.shift.kind = shift_kind_from_string(*o.shift_kind);
  set(cfg.shift.lambda_minus, o.lambda_minus);
  set(cfg.shift.lambda_plus, o.lambda_plus);
  set(cfg.shift.delta, o.delta);
  if (o.r) cfg.r = o.r;
  set(cfg.r_min, o.r_min);
  set(cfg.r_max, o.r_max);
  set(cfg.samples, o.samples);
  set(cfg.t_start, o.t_start);
  set(cfg.T, o.T);
  set(cfg.integ.rtol, o.rtol);
  set(cfg.integ.atol, o.atol);
  set(cfg.integ.h_max, o.h_max);
  set(cfg.refine.tol_r, o.tol_r);
  set(cfg.refine.tol_eta, o.tol_eta);
  set(cfg.confirm.shadow_periods, o.shadow_periods);
  set(cfg.confirm.tube_eps, o.tube_eps);
  set(cfg.gap_mode, o.gap_mode);
  if (o.z_init) {
    if (*o.z_init == "auto") {
      cfg.z_init_mode = ZInitMode::Auto;
    } else if (*o.z_init == "default") {
      cfg.z_init_mode = ZInitMode::Default;
      cfg.z_init = RunConfig{}.z_init;
    } else {
      cfg.z_init_mode = ZInitMode::Custom;
      cfg.z_init = parse_state(*o.z_init);
    }
  }
  validate(cfg);
  return cfg;
}

int jobs_of(const Overrides& o) {
  if (o.jobs) return *o.jobs;
  if (const char* env = std::getenv("RATETIP_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0)
      throw Error(ErrorKind::InvalidArgument, "RATETIP_JOBS must be a non-negative integer");
    return static_cast<int>(v);
  }
  return 0;
}

json params_json(const RosslerParams& p) { return {{"a", num(p.a)}, {"b", num(p.b)}, {"c", num(p.c)}}; }

json orbit_json(const PeriodicOrbit& o) {
  return {{"params", params_json(o.params)},
          {"gamma", num(o.gamma.vec())},
          {"period", num(o.period)},
          {"lambda_s", num(o.lambda_s)},
          {"lambda_u", num(o.lambda_u)},
          {"v_s", num(o.v_s)},
          {"v_u", num(o.v_u)},
          {"det", num(o.flux_det)},
          {"jacobian", json::array({num(Vec2{o.jacobian[0][0], o.jacobian[0][1]}),
                                    num(Vec2{o.jacobian[1][0], o.jacobian[1][1]})})},
          {"residual", num(o.residual)},
          {"iterations", o.iterations},
          {"saddle", o.is_saddle()}};
}

PeriodicOrbit find_orbit(const RosslerParams& p, const IntegratorConfig& integ) {
  const auto seed = seed_guess_from_recurrence(p, integ);
  return find_fixed_point(p, seed, integ);
}

void warn_confirmation(const RunConfig& cfg, std::ostream& err) {
  if (!std::isfinite(cfg.confirm.tube_eps))
    err << "warning: confirm.tube_eps is infinite, every root will be confirmed\n";
  if (cfg.confirm.shadow_periods == 0)
    err << "warning: confirm.shadow_periods is 0, every root will be confirmed\n";
}

json metadata(const RunConfig& cfg, const PullbackRunConfig& run, const PeriodicOrbit& orbit) {
  const char* z_mode = cfg.z_init_mode == ZInitMode::Auto     ? "auto"
                       : cfg.z_init_mode == ZInitMode::Default ? "default"
                                                              : "custom";
  return {{"params", {{"b", num(cfg.b)}, {"c", num(cfg.c)}}},
          {"shift",
           {{"kind", std::string(to_string(cfg.shift.kind))},
            {"lambda_minus", num(cfg.shift.lambda_minus)},
            {"lambda_plus", num(cfg.shift.lambda_plus)},
            {"delta", num(cfg.shift.delta)}}},
          {"T", num(run.T)},
          {"t_start", num(run.t_start)},
          {"z_init", num(run.z_init)},
          {"z_init_mode", z_mode},
          {"mode", cfg.gap_mode},
          {"scan", {{"r_min", num(cfg.r_min)}, {"r_max", num(cfg.r_max)}, {"samples", cfg.samples}}},
          {"tolerances",
           {{"rtol", num(cfg.integ.rtol)},
            {"atol", num(cfg.integ.atol)},
            {"tol_r", num(cfg.refine.tol_r)},
            {"tol_eta", num(cfg.refine.tol_eta)}}},
          {"confirm",
           {{"shadow_periods", cfg.confirm.shadow_periods}, {"tube_eps", num(cfg.confirm.tube_eps)}}},
          {"orbit", orbit_json(orbit)}};
}

json roots_json(const std::vector<CriticalRate>& roots) {
  json arr = json::array();
  for (const auto& r : roots)
    arr.push_back({{"r_c", num(r.r_c)},
                   {"eta_at_root", num(r.eta_at_root)},
                   {"n_crossings", r.n_crossings},
                   {"confirmed", r.confirmed},
                   {"shadow_periods", r.shadow_periods},
                   {"bracket", num(Vec2{r.bracket_lo, r.bracket_hi})}});
  return arr;
}

void write_scan_csv(std::ostream& os, const std::vector<GapResult>& rows) {
  os << "r,eta,n_crossings,t_last,status\n";
  for (const auto& g : rows)
    os << fmt(g.r) << ',' << (g.ok() ? fmt(g.eta) : "nan") << ',' << g.n_crossings << ','
       << (g.ok() ? fmt(g.t_last) : "nan") << ',' << to_string(g.status) << '\n';
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path.string() + "'");
  return f;
}

int cmd_frozen(const Overrides& o, bool hopf, std::vector<double> hopf_range, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  const RosslerParams p = cfg.frozen_params();
  const Equilibria eq = equilibria(p);
  json j;
  j["params"] = params_json(p);
  j["equilibria"]["inner"] = num(eq.inner);
  j["equilibria"]["inner_residual"] = num(max_norm(vector_field_frozen(p, eq.inner)));
  if (!eq.degenerate) {
    j["equilibria"]["outer"] = num(eq.outer);
    j["equilibria"]["outer_residual"] = num(max_norm(vector_field_frozen(p, eq.outer)));
  }
  j["equilibria"]["degenerate"] = eq.degenerate;
  json ev = json::array();
  for (const auto& z : equilibrium_eigenvalues(p))
    ev.push_back({{"re", num(z.real())}, {"im", num(z.imag())}});
  j["eigenvalues"] = ev;
  if (hopf) {
    if (hopf_range.size() != 2 || !(hopf_range[0] < hopf_range[1]))
      throw Error(ErrorKind::InvalidArgument, "--hopf-range expects lo < hi");
    j["a_HB"] = num(locate_hopf(p.b, p.c, hopf_range[0], hopf_range[1]));
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_upo_find(const Overrides& o, std::optional<std::vector<double>> seed, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  const RosslerParams p = cfg.frozen_params();
  PeriodicOrbit orbit;
  if (seed) {
    if (seed->size() != 2) throw Error(ErrorKind::InvalidArgument, "--seed expects u,v");
    orbit = find_fixed_point(p, {(*seed)[0], (*seed)[1]}, cfg.integ);
  } else {
    orbit = find_orbit(p, cfg.integ);
  }
  out << orbit_json(orbit).dump(2) << '\n';
  return kExitOk;
}

int cmd_simulate(const Overrides& o, const std::string& out_dir, double dt,
                 std::optional<double> t_end, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  if (!cfg.r) throw Error(ErrorKind::InvalidArgument, "simulate needs a rate (--r or rate.r)");
  if (!(dt > 0.0)) throw Error(ErrorKind::InvalidArgument, "--dt must be positive");
  const NonautonomousSpec spec = cfg.nonautonomous(*cfg.r);
  const PullbackRunConfig run = cfg.pullback();
  const double end = t_end.value_or(run.T);
  if (!(end > run.t_start)) throw Error(ErrorKind::InvalidArgument, "--t-end must exceed t_start");

  const Field3 field = make_nonautonomous_field(spec);
  const Section section;
  const auto es = section.event_spec();
  const auto res = integrate<3>(field, run.t_start, end, run.z_init, run.integ, &es,
                                OutputOptions{dt, false});

  std::filesystem::create_directories(out_dir);
  auto traj = open_out(std::filesystem::path(out_dir) / "trajectory.csv");
  traj << "t,x,y,z\n";
  for (const auto& s : res.samples)
    traj << fmt(s.t) << ',' << fmt(s.state[0]) << ',' << fmt(s.state[1]) << ',' << fmt(s.state[2])
         << '\n';
  auto cross = open_out(std::filesystem::path(out_dir) / "crossings.csv");
  cross << "n,t,x,z\n";
  std::size_t n = 0, before_T = 0;
  for (const auto& e : res.events) {
    cross << ++n << ',' << fmt(e.t) << ',' << fmt(e.state[0]) << ',' << fmt(e.state[2]) << '\n';
    if (e.t <= run.T) ++before_T;
  }

  json j = {{"status", res.ok() ? "ok" : "blowup"},
            {"integrator_status", std::string(to_string(res.status))},
            {"r", num(*cfg.r)},
            {"t_start", num(run.t_start)},
            {"T", num(run.T)},
            {"t_end", num(res.t)},
            {"z_init", num(run.z_init)},
            {"n_crossings", n},
            {"n_crossings_before_T", before_T},
            {"trajectory", (std::filesystem::path(out_dir) / "trajectory.csv").string()},
            {"crossings", (std::filesystem::path(out_dir) / "crossings.csv").string()}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_eta_scan(const Overrides& o, const std::string& output, std::ostream& out) {
  const RunConfig cfg = resolve(o);
  if (cfg.gap_mode == "both")
    throw Error(ErrorKind::InvalidArgument, "eta-scan needs a single gap mode");
  const int jobs = jobs_of(o);
  const NonautonomousSpec spec = cfg.nonautonomous(1.0);
  const PullbackRunConfig run = cfg.pullback();
  const PeriodicOrbit orbit = find_orbit(spec.future_limit(), cfg.integ);
  const auto rows = scan_eta(spec, run, orbit, cfg.r_min, cfg.r_max, cfg.samples,
                             gap_mode_from_string(cfg.gap_mode), jobs);
  if (output.empty() || output == "-") {
    write_scan_csv(out, rows);
  } else {
    auto f = open_out(output);
    write_scan_csv(f, rows);
    auto meta = open_out(output + ".meta.json");
    json m = metadata(cfg, run, orbit);
    m["sign_changes"] = count_sign_changes(rows);
    meta << m.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_critical_rates(const Overrides& o, const std::string& output, std::ostream& out,
                       std::ostream& err) {
  const RunConfig cfg = resolve(o);
  warn_confirmation(cfg, err);
  const int jobs = jobs_of(o);
  const NonautonomousSpec spec = cfg.nonautonomous(1.0);
  const PullbackRunConfig run = cfg.pullback();
  const PeriodicOrbit orbit = find_orbit(spec.future_limit(), cfg.integ);

  // One set of shots serves every requested gap mode.
  const auto rates = rate_grid(cfg.r_min, cfg.r_max, cfg.samples);
  const auto shots = shoot_rates(spec, run, rates, jobs);
  auto roots_for = [&](GapMode mode) {
    std::vector<GapResult> rows;
    rows.reserve(shots.size());
    for (const auto& s : shots) rows.push_back(to_gap(s, orbit, mode));
    return find_critical_rates(spec, run, orbit, rows, cfg.refine, cfg.confirm, jobs);
  };

  json report;
  report["metadata"] = metadata(cfg, run, orbit);
  if (cfg.gap_mode == "both") {
    report["roots"] = json::object();
    for (GapMode m : {GapMode::UnstableCoefficient, GapMode::StableProjection})
      report["roots"][std::string(to_string(m))] = roots_json(roots_for(m));
  } else {
    report["roots"] = roots_json(roots_for(gap_mode_from_string(cfg.gap_mode)));
  }
  if (output.empty() || output == "-") {
    out << report.dump(2) << '\n';
  } else {
    auto f = open_out(output);
    f << report.dump(2) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Weak tracking and rate-induced tipping in the nonautonomous Roessler system",
               "ratetip"};
  app.require_subcommand(1);

  Overrides o;
  bool hopf = false;
  std::vector<double> hopf_range{-0.05, 0.05};
  std::optional<std::vector<double>> seed;
  std::string out_dir = ".", output;
  double dt = 0.01;
  std::optional<double> t_end;

  auto* frozen = app.add_subcommand("frozen", "equilibria and eigenvalues of the frozen system");
  add_common(frozen, o);
  frozen->add_option("--a", o.a);
  frozen->add_flag("--hopf", hopf, "also locate the Hopf point of the inner equilibrium");
  frozen->add_option("--hopf-range", hopf_range, "bracket for a_HB")->delimiter(',')->expected(2);

  auto* upo = app.add_subcommand("upo", "period-one orbit of the frozen system");
  upo->require_subcommand(1);
  auto* upo_find = upo->add_subcommand("find", "fixed point of the return map with multipliers");
  add_common(upo_find, o);
  upo_find->add_option("--a", o.a);
  upo_find->add_option("--seed", seed, "initial guess u,v on the section")
      ->delimiter(',')
      ->expected(2);

  auto* simulate = app.add_subcommand("simulate", "one nonautonomous run at a fixed rate");
  add_common(simulate, o);
  add_run(simulate, o);
  simulate->add_option("--r", o.r, "rate");
  simulate->add_option("--out-dir", out_dir);
  simulate->add_option("--dt", dt, "trajectory sampling interval");
  simulate->add_option("--t-end", t_end, "integrate past T up to this time");

  auto* eta_scan = app.add_subcommand("eta-scan", "gap function over a grid of rates (CSV)");
  add_common(eta_scan, o);
  add_run(eta_scan, o);
  add_scan(eta_scan, o);
  eta_scan->add_option("-o,--output", output, "CSV path (default stdout)");

  auto* critical = app.add_subcommand("critical-rates", "scan, refine and confirm critical rates");
  add_common(critical, o);
  add_run(critical, o);
  add_scan(critical, o);
  critical->add_option("--tol-r", o.tol_r);
  critical->add_option("--tol-eta", o.tol_eta);
  critical->add_option("--shadow-periods", o.shadow_periods);
  critical->add_option("--tube-eps", o.tube_eps);
  critical->add_option("-o,--output", output, "JSON path (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*frozen) return cmd_frozen(o, hopf, hopf_range, out);
    if (*upo_find) return cmd_upo_find(o, seed, out);
    if (*simulate) return cmd_simulate(o, out_dir, dt, t_end, out);
    if (*eta_scan) return cmd_eta_scan(o, output, out);
    if (*critical) return cmd_critical_rates(o, output, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::InvalidArgument ? kExitConfig : kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace ratetip
