// quatsync: simulation and analysis driver for the quaternionic Kuramoto
// model. Subcommands: simulate | orbit | equilibria | sweep | regime.
// All numeric output is written with 17 significant digits so identical
// configurations produce byte-identical files.

#include <cmath>
#include <complex>
#include <cstdio>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "quatsync/io.hpp"
#include "quatsync/lion_dance.hpp"
#include "quatsync/math_utils.hpp"
#include "quatsync/model.hpp"
#include "quatsync/parallel.hpp"
#include "quatsync/sync.hpp"
#include "quatsync/two_oscillator.hpp"
#include "quatsync/version.hpp"

namespace {

using nlohmann::json;
using namespace quatsync;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kBlowUp = 2;
constexpr int kAnalysisFailure = 3;

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  return j;
}

double require_number(const json& j, const std::string& field) {
  if (!j.contains(field))
    throw ConfigError("missing required field '" + field + "'");
  if (!j[field].is_number())
    throw ConfigError("field '" + field + "' must be a number");
  return j[field].get<double>();
}

std::vector<double> require_array(const json& j, const std::string& field) {
  if (!j.contains(field))
    throw ConfigError("missing required field '" + field + "'");
  if (!j[field].is_array())
    throw ConfigError("field '" + field + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j[field]) {
    if (!v.is_number())
      throw ConfigError("field '" + field + "' must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void expect_mode(const json& cfg, const std::string& wanted) {
  if (cfg.contains("mode") && cfg["mode"] != wanted)
    throw ConfigError("field 'mode' must be '" + wanted + "' for this subcommand");
}

IntegratorConfig integrator_from(const json& cfg) {
  IntegratorConfig ic;
  if (!cfg.contains("integrator")) return ic;
  const json& j = cfg["integrator"];
  if (j.contains("method")) {
    const std::string m = j["method"].get<std::string>();
    if (m == "rk4_fixed")
      ic.method = Method::rk4_fixed;
    else if (m == "rk45_adaptive")
      ic.method = Method::rk45_adaptive;
    else
      throw ConfigError("field 'integrator.method' must be rk4_fixed or rk45_adaptive");
  }
  if (j.contains("dt")) ic.dt = j["dt"].get<double>();
  if (j.contains("rtol")) ic.rtol = j["rtol"].get<double>();
  if (j.contains("atol")) ic.atol = j["atol"].get<double>();
  if (j.contains("t_end")) ic.t_end = j["t_end"].get<double>();
  if (j.contains("sample_dt")) ic.sample_dt = j["sample_dt"].get<double>();
  if (j.contains("max_steps")) ic.max_steps = j["max_steps"].get<long>();
  try {
    ic.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("field 'integrator': ") + e.what());
  }
  return ic;
}

json integrator_meta(const IntegratorConfig& ic, const Trajectory& traj) {
  return json{{"method", ic.method == Method::rk4_fixed ? "rk4_fixed" : "rk45_adaptive"},
              {"dt", ic.dt},
              {"rtol", ic.rtol},
              {"atol", ic.atol},
              {"sample_dt", ic.sample_dt},
              {"t_end", ic.t_end},
              {"steps_taken", traj.meta.steps_taken},
              {"steps_rejected", traj.meta.steps_rejected},
              {"rhs_evals", traj.meta.rhs_evals},
              {"stop", traj.stop == StopReason::completed  ? "completed"
                       : traj.stop == StopReason::blow_up ? "blow_up"
                                                          : "max_steps"}};
}

json report_envelope(const json& cfg) {
  return json{{"version", kVersion}, {"config", cfg}};
}

void write_json(const std::string& path, const json& j) {
  write_text_atomic(path, j.dump(2) + "\n");
}

json equilibrium_json(const EquilibriumReport& e) {
  return json{{"w", e.location.w},
              {"v", e.location.v},
              {"eigenvalues",
               {{e.eigenvalues[0].real(), e.eigenvalues[0].imag()},
                {e.eigenvalues[1].real(), e.eigenvalues[1].imag()}}},
              {"classification", to_string(e.classification)},
              {"on_axis", e.on_axis},
              {"residual", e.residual},
              {"bracket", e.bracket}};
}

json regime_json(const lion::Regime& r) {
  return json{{"tag", lion::to_string(r.tag)},
              {"lambda_crit", r.lambda_crit},
              {"lambda_c", r.lambda_c}};
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const json& cfg, const std::string& out) {
  expect_mode(cfg, "full");
  ModelParams p;
  p.omegas = require_array(cfg, "omega");
  p.lambda = require_number(cfg, "lambda");
  if (cfg.contains("v_max")) p.v_max = cfg["v_max"].get<double>();
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::size_t n = p.n_osc();

  if (!cfg.contains("initial"))
    throw ConfigError("missing required field 'initial'");
  const json& init = cfg["initial"];
  OscillatorState s0;
  s0.w = require_array(init, "w");
  s0.x = require_array(init, "x");
  s0.y = require_array(init, "y");
  s0.z = require_array(init, "z");
  if (s0.w.size() != n || s0.x.size() != n || s0.y.size() != n || s0.z.size() != n)
    throw ConfigError("field 'initial' arrays must have the same length as 'omega'");

  const IntegratorConfig ic = integrator_from(cfg);
  const Trajectory traj = integrate(model_rhs(p), s0.to_flat(), ic);

  write_text_atomic(out + ".csv", trajectory_csv(traj, n));

  json j = report_envelope(cfg);
  j["integrator"] = integrator_meta(ic, traj);
  if (traj.size() == 0) {
    // diverged before the first sample; still emit the provenance shell
    write_json(out + ".json", j);
    return traj.stop == StopReason::blow_up ? kBlowUp : kAnalysisFailure;
  }

  SyncThresholds th;
  if (cfg.contains("analysis")) {
    const json& a = cfg["analysis"];
    if (a.contains("lock_bound")) th.lock_bound = a["lock_bound"].get<double>();
    if (a.contains("sync_eps")) th.sync_eps = a["sync_eps"].get<double>();
    if (a.contains("tail_fraction")) th.tail_fraction = a["tail_fraction"].get<double>();
  }
  const SyncReport rep = classify(traj, p, th);

  json r{{"horizon", {rep.horizon_begin, rep.horizon_end}},
         {"observed_over", "verdicts are observations over the recorded horizon"},
         {"max_phase_diff_sup", rep.max_phase_diff_sup},
         {"final_freq_spread", rep.final_freq_spread},
         {"final_phase_spread", rep.final_phase_spread},
         {"phase_locked", rep.phase_locked},
         {"freq_synced", rep.freq_synced},
         {"phase_synced", rep.phase_synced}};
  if (rep.decay_fit)
    r["decay_fit"] = {{"rate", rep.decay_fit->rate},
                      {"r_squared", rep.decay_fit->r_squared}};
  j["report"] = r;
  write_json(out + ".json", j);

  return traj.stop == StopReason::blow_up ? kBlowUp
         : traj.stop == StopReason::completed ? kOk
                                              : kAnalysisFailure;
}

// ------------------------------------------------------------------- orbit

int cmd_orbit(const json& cfg, const std::string& out, int nested) {
  expect_mode(cfg, "reduced2");
  const double omega = require_number(cfg, "omega");
  const double lambda = require_number(cfg, "lambda");
  if (lambda >= omega)
    throw ConfigError("field 'lambda' must be below 'omega' (weak coupling)");
  const double v0 = require_number(cfg, "v0");
  const double alpha = acosh_log(omega / lambda);
  if (v0 <= alpha)
    throw ConfigError("field 'v0' must exceed arccosh(omega/lambda) = " + fmt17(alpha));
  IntegratorConfig ic = integrator_from(cfg);

  auto orbit_json = [&](const two_osc::OrbitReport& rep) {
    return json{{"period", rep.period},
                {"closure_error", rep.closure_error},
                {"symmetry_error", rep.symmetry_error},
                {"upper", {{"w", rep.upper.w}, {"v", rep.upper.v}}},
                {"lower", {{"w", rep.lower.w}, {"v", rep.lower.v}}},
                {"ring_halfwidths", rep.ring_halfwidths},
                {"alpha", alpha}};
  };

  json j = report_envelope(cfg);
  const two_osc::OrbitReport main = two_osc::detect_periodic_orbit(v0, omega, lambda, ic);
  write_text_atomic(out + ".csv", planar_csv(main.trace));
  j["integrator"] = integrator_meta(ic, main.trace);
  j["report"] = orbit_json(main);

  if (nested > 0) {
    json rings = json::array();
    for (int k = 1; k <= nested; ++k) {
      const double vk = alpha + (v0 - alpha) * k / nested;
      const two_osc::OrbitReport rep = two_osc::detect_periodic_orbit(vk, omega, lambda, ic);
      write_text_atomic(out + "_ring" + std::to_string(k) + ".csv",
                        planar_csv(rep.trace));
      json rj = orbit_json(rep);
      rj["v0"] = vk;
      rings.push_back(rj);
    }
    j["report"]["nested"] = rings;
  }
  write_json(out + ".json", j);
  return kOk;
}

// -------------------------------------------------------------- equilibria

lion::LionParams lion_params_from(const json& cfg) {
  lion::LionParams p;
  p.omega = require_number(cfg, "omega");
  p.lambda = require_number(cfg, "lambda");
  p.n_osc = cfg.contains("n_osc") ? cfg["n_osc"].get<int>() : 3;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

int cmd_equilibria(const json& cfg, const std::string& out, bool field) {
  expect_mode(cfg, "lion");
  const lion::LionParams p = lion_params_from(cfg);
  const lion::Regime regime = lion::classify_regime(p);

  const std::vector<EquilibriumReport> eqs =
      (p.n_osc == 3 && p.lambda < p.omega) ? lion::find_equilibria_n3(p)
                                           : lion::equilibrium_sweep(p);
  json j = report_envelope(cfg);
  json list = json::array();
  for (const auto& e : eqs) list.push_back(equilibrium_json(e));
  j["report"] = {{"regime", regime_json(regime)},
                 {"lambda_crit", regime.lambda_crit},
                 {"equilibria", list},
                 {"sink_count", lion::sink_count(eqs)}};
  write_json(out + ".json", j);

  if (field) {
    const int nw = 100, nv = 50;
    const double v_max = 3.0;
    std::string csv = "w,v,wdot,vdot\n";
    for (int i = 0; i <= nw; ++i) {
      for (int k = 1; k <= nv; ++k) {
        const PlanarState s{2.0 * std::numbers::pi * i / nw, v_max * k / nv};
        const PlanarState d = lion::rhs(s, p);
        csv += fmt17(s.w) + "," + fmt17(s.v) + "," + fmt17(d.w) + "," + fmt17(d.v) + "\n";
      }
    }
    write_text_atomic(out + "_field.csv", csv);
  }
  return kOk;
}

// ------------------------------------------------------------------- sweep

int cmd_sweep(const json& cfg, const std::string& out, double lo, double hi,
              double step) {
  expect_mode(cfg, "lion");
  if (!(step > 0.0)) throw ConfigError("field 'lambda_step' must be positive");
  if (hi < lo) throw ConfigError("field 'lambda_max' must be >= 'lambda_min'");
  lion::LionParams base;
  base.omega = require_number(cfg, "omega");
  base.n_osc = cfg.contains("n_osc") ? cfg["n_osc"].get<int>() : 3;

  std::vector<double> lambdas;
  for (double lam = lo; lam <= hi + 1e-12; lam += step) lambdas.push_back(lam);

  struct Row {
    double lambda;
    int n_axis, n_interior, n_sinks;
  };
  std::vector<Row> rows(lambdas.size());
  parallel_for(lambdas.size(), [&](std::size_t i) {
    lion::LionParams p = base;
    p.lambda = lambdas[i];
    const auto eqs = lion::equilibrium_sweep(p);
    Row r{lambdas[i], 0, 0, 0};
    for (const auto& e : eqs) {
      (e.on_axis ? r.n_axis : r.n_interior)++;
      if (e.classification == EqClass::sink) r.n_sinks++;
    }
    rows[i] = r;
  });

  std::string csv = "lambda,n_axis_eq,n_interior_eq,n_sinks\n";
  for (const Row& r : rows)
    csv += fmt17(r.lambda) + "," + std::to_string(r.n_axis) + "," +
           std::to_string(r.n_interior) + "," + std::to_string(r.n_sinks) + "\n";
  write_text_atomic(out + ".csv", csv);
  return kOk;
}

// ------------------------------------------------------------------ regime

int cmd_regime(const json& cfg, const std::string& out) {
  expect_mode(cfg, "lion");
  const lion::LionParams p = lion_params_from(cfg);
  json j = report_envelope(cfg);
  j["report"] = regime_json(lion::classify_regime(p));
  std::cout << j.dump(2) << std::endl;
  if (!out.empty()) write_json(out + ".json", j);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quatsync: quaternionic Kuramoto model toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out = "quatsync_out";
  std::optional<double> opt_lambda, opt_omega, opt_t_end, opt_rtol;

  app.add_option("--config", config_path, "JSON experiment configuration file");
  app.add_option("--out", out, "output path prefix");
  app.add_option("--lambda", opt_lambda, "coupling strength (overrides config)");
  app.add_option("--omega", opt_omega, "frequency spread (overrides config; scalar modes)");
  app.add_option("--t-end", opt_t_end, "integration horizon (overrides config)");
  app.add_option("--rtol", opt_rtol, "relative tolerance (overrides config)");

  auto* simulate = app.add_subcommand("simulate", "integrate the full model, emit CSV + sync report");
  simulate->fallthrough();
  auto* orbit = app.add_subcommand("orbit", "detect a periodic orbit of the two-oscillator reduction");
  orbit->fallthrough();
  int nested = 0;
  std::optional<double> opt_v0;
  orbit->add_option("--v0", opt_v0, "initial v on the section w = pi/2");
  orbit->add_option("--nested", nested, "additionally trace k nested rings");
  auto* equilibria = app.add_subcommand("equilibria", "locate and classify equilibria of the reduced flow");
  equilibria->fallthrough();
  bool field = false;
  std::optional<int> opt_n;
  equilibria->add_flag("--field", field, "also export the vector-field grid CSV");
  equilibria->add_option("--n", opt_n, "oscillator count (overrides config)");
  auto* sweep = app.add_subcommand("sweep", "equilibrium counts across a coupling range");
  sweep->fallthrough();
  std::optional<double> opt_lmin, opt_lmax, opt_lstep;
  sweep->add_option("--lambda-min", opt_lmin, "sweep start");
  sweep->add_option("--lambda-max", opt_lmax, "sweep end");
  sweep->add_option("--lambda-step", opt_lstep, "sweep step");
  sweep->add_option("--n", opt_n, "oscillator count (overrides config)");
  auto* regime = app.add_subcommand("regime", "report the coupling regime for lion parameters");
  regime->fallthrough();
  regime->add_option("--n", opt_n, "oscillator count (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    json cfg = load_config(config_path);
    if (opt_lambda) cfg["lambda"] = *opt_lambda;
    if (opt_omega) cfg["omega"] = *opt_omega;
    if (opt_v0) cfg["v0"] = *opt_v0;
    if (opt_n) cfg["n_osc"] = *opt_n;
    if (opt_t_end) cfg["integrator"]["t_end"] = *opt_t_end;
    if (opt_rtol) cfg["integrator"]["rtol"] = *opt_rtol;
    if (cfg.contains("out") && out == "quatsync_out") out = cfg["out"].get<std::string>();

    if (simulate->parsed()) return cmd_simulate(cfg, out);
    if (orbit->parsed()) return cmd_orbit(cfg, out, nested);
    if (equilibria->parsed()) return cmd_equilibria(cfg, out, field);
    if (sweep->parsed()) {
      const double lo = opt_lmin ? *opt_lmin : require_number(cfg, "lambda_min");
      const double hi = opt_lmax ? *opt_lmax : require_number(cfg, "lambda_max");
      const double st = opt_lstep ? *opt_lstep : require_number(cfg, "lambda_step");
      return cmd_sweep(cfg, out, lo, hi, st);
    }
    if (regime->parsed())
      return cmd_regime(cfg, app.count("--out") > 0 || cfg.contains("out") ? out : "");
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NotWeakError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NoReturnError& e) {
    std::cerr << "analysis failure: " << e.what() << "\n";
    return kAnalysisFailure;
  } catch (const BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << "\n";
    return kBlowUp;
  } catch (const Error& e) {
    std::cerr << "analysis failure: " << e.what() << "\n";
    return kAnalysisFailure;
  }
  return kOk;
}
