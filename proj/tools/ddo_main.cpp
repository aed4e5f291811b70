// Benchmark harness for the divide-and-discard observer.
//
// Subcommands:
//   run      one scenario at one box budget, per-step CSV
//   sweep    one scenario over several box budgets, aggregated CSV
//   compare  like sweep, plus metrics normalized against the best budget
//
// Exit codes: 0 success, 2 configuration or usage error, 3 the observer
// discarded every box, 4 the dynamics left their domain, 1 anything else.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "ddo/ddo.h"
#include "json.hpp"

namespace {

using nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ObserverExit : std::runtime_error {
  int exit_code;
  ObserverExit(int code, const std::string& message)
      : std::runtime_error(message), exit_code(code) {}
};

struct ScenarioConfig {
  std::string scenario;
  std::string benchmark;  // "vdp" or "tank"

  double vdp_mu = 5.0;
  double vdp_h = 0.025;

  int tank_n = 30;
  double tank_h = 0.5;
  double tank_g = 9.81;
  double tank_u_level = 0.1;
  double tank_level_floor = 1e-6;
  std::vector<double> tank_kappa;
  std::vector<int> tank_inflow;
  std::vector<int> tank_measured;

  double w_factor = 1.0;
  double v_factor = 1.0;
  int horizon = 100;
  int repeats = 1;
  std::uint64_t truth_seed = 1;
  std::uint64_t directions_seed = 42;

  int m_max = 1;
  int i_max = 5;
  int k_split = 20;
  int k_prune = 20;
  bool rigorous = false;
  std::vector<double> scaling;
  std::vector<double> x0_true;
};

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown key \"" + it.key() + "\" in " + where);
  }
}

double require_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
  return obj[key].get<double>();
}

int require_int(const json& obj, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) throw ConfigError(std::string(key) + " must be an integer");
  return obj[key].get<int>();
}

std::uint64_t require_seed(const json& obj, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_unsigned() && !obj[key].is_number_integer()) {
    throw ConfigError(std::string(key) + " must be a nonnegative integer");
  }
  if (obj[key].is_number_integer() && obj[key].get<std::int64_t>() < 0) {
    throw ConfigError(std::string(key) + " must be a nonnegative integer");
  }
  return obj[key].get<std::uint64_t>();
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json root;
  try {
    in >> root;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON in ") + path + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  check_keys(root,
             {"scenario", "benchmark", "vdp", "tank", "w_factor", "v_factor", "horizon",
              "repeats", "seeds", "observer", "x0_true"},
             "config");

  ScenarioConfig cfg;
  if (!root.contains("benchmark") || !root["benchmark"].is_string()) {
    throw ConfigError("config needs a \"benchmark\" string (\"vdp\" or \"tank\")");
  }
  cfg.benchmark = root["benchmark"].get<std::string>();
  if (cfg.benchmark != "vdp" && cfg.benchmark != "tank") {
    throw ConfigError("benchmark must be \"vdp\" or \"tank\"");
  }
  cfg.scenario = cfg.benchmark;
  if (root.contains("scenario")) {
    if (!root["scenario"].is_string()) throw ConfigError("scenario must be a string");
    cfg.scenario = root["scenario"].get<std::string>();
  }
  if (cfg.scenario.empty() || cfg.scenario.find_first_of(",\n\r") != std::string::npos) {
    throw ConfigError("scenario must be non-empty and free of commas");
  }

  if (root.contains("vdp")) {
    if (cfg.benchmark != "vdp") throw ConfigError("\"vdp\" section with a non-vdp benchmark");
    const json& v = root["vdp"];
    if (!v.is_object()) throw ConfigError("\"vdp\" must be an object");
    check_keys(v, {"mu", "h"}, "vdp");
    cfg.vdp_mu = require_number(v, "mu", cfg.vdp_mu);
    cfg.vdp_h = require_number(v, "h", cfg.vdp_h);
  }
  if (root.contains("tank")) {
    if (cfg.benchmark != "tank") throw ConfigError("\"tank\" section with a non-tank benchmark");
    const json& t = root["tank"];
    if (!t.is_object()) throw ConfigError("\"tank\" must be an object");
    check_keys(t, {"n", "h", "g", "kappa", "u_level", "level_floor", "inflow", "measured"},
               "tank");
    cfg.tank_n = require_int(t, "n", cfg.tank_n);
    if (cfg.tank_n < 2) throw ConfigError("tank n must be at least 2");
    cfg.tank_h = require_number(t, "h", cfg.tank_h);
    cfg.tank_g = require_number(t, "g", cfg.tank_g);
    cfg.tank_u_level = require_number(t, "u_level", cfg.tank_u_level);
    cfg.tank_level_floor = require_number(t, "level_floor", cfg.tank_level_floor);
    if (t.contains("kappa")) {
      if (t["kappa"].is_number()) {
        cfg.tank_kappa.assign(static_cast<std::size_t>(cfg.tank_n), t["kappa"].get<double>());
      } else if (t["kappa"].is_array()) {
        cfg.tank_kappa = t["kappa"].get<std::vector<double>>();
      } else {
        throw ConfigError("tank kappa must be a number or an array");
      }
    }
    const auto read_indices = [&t](const char* key) {
      std::vector<int> out;
      if (t.contains(key)) {
        if (!t[key].is_array()) throw ConfigError(std::string("tank ") + key + " must be an array");
        out = t[key].get<std::vector<int>>();
      }
      return out;
    };
    cfg.tank_inflow = read_indices("inflow");
    cfg.tank_measured = read_indices("measured");
  }

  cfg.w_factor = require_number(root, "w_factor", cfg.w_factor);
  cfg.v_factor = require_number(root, "v_factor", cfg.v_factor);
  if (cfg.w_factor < 0.0 || cfg.v_factor < 0.0) {
    throw ConfigError("w_factor and v_factor must be nonnegative");
  }
  cfg.horizon = require_int(root, "horizon", cfg.horizon);
  if (cfg.horizon < 1) throw ConfigError("horizon must be at least 1");
  cfg.repeats = require_int(root, "repeats", cfg.repeats);
  if (cfg.repeats < 1) throw ConfigError("repeats must be at least 1");

  if (root.contains("seeds")) {
    const json& s = root["seeds"];
    if (!s.is_object()) throw ConfigError("\"seeds\" must be an object");
    check_keys(s, {"truth", "directions"}, "seeds");
    cfg.truth_seed = require_seed(s, "truth", cfg.truth_seed);
    cfg.directions_seed = require_seed(s, "directions", cfg.directions_seed);
  }

  if (root.contains("observer")) {
    const json& o = root["observer"];
    if (!o.is_object()) throw ConfigError("\"observer\" must be an object");
    check_keys(o, {"m_max", "i_max", "k_split", "k_prune", "rigorous", "scaling"}, "observer");
    cfg.m_max = require_int(o, "m_max", cfg.m_max);
    cfg.i_max = require_int(o, "i_max", cfg.i_max);
    cfg.k_split = require_int(o, "k_split", cfg.k_split);
    cfg.k_prune = require_int(o, "k_prune", cfg.k_prune);
    if (cfg.m_max < 1 || cfg.i_max < 1 || cfg.k_split < 1 || cfg.k_prune < 1) {
      throw ConfigError("observer counts must be at least 1");
    }
    if (o.contains("rigorous")) {
      if (!o["rigorous"].is_boolean()) throw ConfigError("observer rigorous must be a boolean");
      cfg.rigorous = o["rigorous"].get<bool>();
    }
    if (o.contains("scaling")) {
      if (!o["scaling"].is_array()) throw ConfigError("observer scaling must be an array");
      cfg.scaling = o["scaling"].get<std::vector<double>>();
    }
  }

  if (root.contains("x0_true")) {
    if (!root["x0_true"].is_array()) throw ConfigError("x0_true must be an array");
    cfg.x0_true = root["x0_true"].get<std::vector<double>>();
  }
  return cfg;
}

using ModelPtr = std::unique_ptr<ddo_model, void (*)(ddo_model*)>;
using TruthPtr = std::unique_ptr<ddo_truth, void (*)(ddo_truth*)>;
using ObserverPtr = std::unique_ptr<ddo_observer, void (*)(ddo_observer*)>;
using DirectionsPtr = std::unique_ptr<ddo_directions, void (*)(ddo_directions*)>;

void check(ddo_status status) {
  if (status == DDO_OK) return;
  int code = 1;
  if (status == DDO_ERR_INCONSISTENT_MEASUREMENTS) code = 3;
  if (status == DDO_ERR_DOMAIN_VIOLATION) code = 4;
  throw ObserverExit(code,
                     std::string(ddo_status_name(status)) + ": " + ddo_last_error());
}

ModelPtr build_model(const ScenarioConfig& cfg) {
  ddo_model* raw = nullptr;
  if (cfg.benchmark == "vdp") {
    check(ddo_vdp_model_create(cfg.vdp_mu, cfg.vdp_h, &raw));
  } else {
    ddo_tank_params prm;
    ddo_tank_params_init(&prm);
    prm.n = cfg.tank_n;
    prm.h = cfg.tank_h;
    prm.g = cfg.tank_g;
    prm.u_level = cfg.tank_u_level;
    prm.level_floor = cfg.tank_level_floor;
    if (!cfg.tank_kappa.empty()) {
      if (cfg.tank_kappa.size() != static_cast<std::size_t>(cfg.tank_n)) {
        throw ConfigError("tank kappa array must have n entries");
      }
      prm.kappa = cfg.tank_kappa.data();
    }
    if (!cfg.tank_inflow.empty()) {
      prm.inflow = cfg.tank_inflow.data();
      prm.inflow_count = static_cast<int>(cfg.tank_inflow.size());
    }
    if (!cfg.tank_measured.empty()) {
      prm.measured = cfg.tank_measured.data();
      prm.measured_count = static_cast<int>(cfg.tank_measured.size());
    }
    check(ddo_tank_model_create(&prm, &raw));
  }
  ModelPtr model(raw, &ddo_model_free);
  if (cfg.w_factor != 1.0 || cfg.v_factor != 1.0) {
    check(ddo_model_scale_uncertainty(model.get(), cfg.w_factor, cfg.v_factor));
  }
  return model;
}

struct StepRow {
  std::uint64_t seed = 0;
  int k = 0;
  int boxes = 0;
  double step_ms = 0.0;
  double hullvol_term = 0.0;
  double width_term = 0.0;
  int sound = 1;
};

struct RunStats {
  std::vector<StepRow> rows;
  double v_tilde = 0.0;
  double w_tilde = 0.0;
  double mean_step_ms = 0.0;
  bool sound = true;
};

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

StepRow observe_row(ddo_observer* obs, ddo_truth* truth, ddo_directions* dirs,
                    std::uint64_t seed, int k, double ms, std::vector<double>& scratch) {
  StepRow row;
  row.seed = seed;
  row.k = k;
  row.step_ms = ms;
  row.boxes = ddo_observer_box_count(obs);
  check(ddo_observer_hull_volume_term(obs, &row.hullvol_term));
  check(ddo_observer_width_term(obs, dirs, &row.width_term));
  check(ddo_truth_state(truth, k, scratch.data()));
  int hit = 0;
  check(ddo_observer_contains(obs, scratch.data(), &hit));
  row.sound = hit;
  return row;
}

// One full observer pass over a fresh truth simulation.
std::vector<StepRow> execute_run(const ScenarioConfig& cfg, ddo_model* model, int m_max,
                                 bool rigorous, std::uint64_t seed, ddo_directions* dirs) {
  ddo_truth* truth_raw = nullptr;
  check(ddo_truth_create(model, cfg.x0_true.empty() ? nullptr : cfg.x0_true.data(), nullptr,
                         cfg.horizon, seed, &truth_raw));
  TruthPtr truth(truth_raw, &ddo_truth_free);

  const int n = ddo_model_state_dim(model);
  const int m = ddo_model_input_dim(model);
  const int p = ddo_model_measurement_dim(model);

  ddo_observer_config ocfg;
  ddo_observer_config_init(&ocfg);
  ocfg.m_max = m_max;
  ocfg.i_max = cfg.i_max;
  ocfg.k_split = cfg.k_split;
  ocfg.k_prune = cfg.k_prune;
  ocfg.rigorous = rigorous ? 1 : 0;
  if (!cfg.scaling.empty()) {
    if (cfg.scaling.size() != static_cast<std::size_t>(n)) {
      throw ConfigError("observer scaling must have one entry per state dimension");
    }
    ocfg.scaling = cfg.scaling.data();
  }
  ddo_observer* obs_raw = nullptr;
  check(ddo_observer_create(model, &ocfg, &obs_raw));
  ObserverPtr obs(obs_raw, &ddo_observer_free);

  std::vector<double> y(static_cast<std::size_t>(p));
  std::vector<double> u(static_cast<std::size_t>(std::max(m, 1)));
  std::vector<double> x(static_cast<std::size_t>(n));
  std::vector<StepRow> rows;
  rows.reserve(static_cast<std::size_t>(cfg.horizon) + 1);

  check(ddo_truth_measurement(truth.get(), 0, y.data()));
  auto start = std::chrono::steady_clock::now();
  check(ddo_observer_init(obs.get(), y.data()));
  rows.push_back(observe_row(obs.get(), truth.get(), dirs, seed, 0, elapsed_ms(start), x));

  for (int k = 1; k <= cfg.horizon; ++k) {
    if (m > 0) check(ddo_truth_input(truth.get(), k - 1, u.data()));
    check(ddo_truth_measurement(truth.get(), k, y.data()));
    start = std::chrono::steady_clock::now();
    check(ddo_observer_step(obs.get(), m > 0 ? u.data() : nullptr, y.data()));
    rows.push_back(observe_row(obs.get(), truth.get(), dirs, seed, k, elapsed_ms(start), x));
  }
  return rows;
}

// Runs every repeat and aggregates the step metrics over k >= 1.
RunStats run_scenario(const ScenarioConfig& cfg, ddo_model* model, int m_max, bool rigorous,
                      std::uint64_t base_seed, ddo_directions* dirs) {
  RunStats stats;
  double v_acc = 0.0;
  double w_acc = 0.0;
  double ms_acc = 0.0;
  std::size_t terms = 0;
  for (int r = 0; r < cfg.repeats; ++r) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(r);
    std::vector<StepRow> rows = execute_run(cfg, model, m_max, rigorous, seed, dirs);
    for (const StepRow& row : rows) {
      if (row.k >= 1) {
        v_acc += row.hullvol_term;
        w_acc += row.width_term;
        ms_acc += row.step_ms;
        ++terms;
      }
      stats.sound = stats.sound && row.sound == 1;
    }
    stats.rows.insert(stats.rows.end(), rows.begin(), rows.end());
  }
  if (terms == 0) throw ConfigError("horizon produced no steps to aggregate");
  stats.v_tilde = v_acc / static_cast<double>(terms);
  stats.w_tilde = w_acc / static_cast<double>(terms);
  stats.mean_step_ms = ms_acc / static_cast<double>(terms);
  return stats;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  return out;
}

void write_step_csv(const std::string& path, const std::string& scenario,
                    const std::vector<StepRow>& rows) {
  std::ofstream out = open_output(path);
  out << "scenario,seed,k,M_k,step_ms,hullvol_term,width_term,sound\n";
  char buf[192];
  for (const StepRow& row : rows) {
    std::snprintf(buf, sizeof buf, ",%llu,%d,%d,%.6f,%.17g,%.17g,%d\n",
                  static_cast<unsigned long long>(row.seed), row.k, row.boxes, row.step_ms,
                  row.hullvol_term, row.width_term, row.sound);
    out << scenario << buf;
  }
}

struct AggRow {
  int m_max = 0;
  RunStats stats;
};

void write_agg_csv(const std::string& path, const std::string& scenario, std::uint64_t seed,
                   const std::vector<AggRow>& rows, const std::vector<double>* v_hat,
                   const std::vector<double>* w_hat) {
  std::ofstream out = open_output(path);
  out << "scenario,seed,m_max,v_tilde,w_tilde";
  if (v_hat) out << ",v_hat,w_hat";
  out << ",mean_step_ms\n";
  char buf[224];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::snprintf(buf, sizeof buf, ",%llu,%d,%.17g,%.17g",
                  static_cast<unsigned long long>(seed), rows[i].m_max, rows[i].stats.v_tilde,
                  rows[i].stats.w_tilde);
    out << scenario << buf;
    if (v_hat) {
      std::snprintf(buf, sizeof buf, ",%.17g,%.17g", (*v_hat)[i], (*w_hat)[i]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.6f\n", rows[i].stats.mean_step_ms);
    out << buf;
  }
}

int run_main(const ScenarioConfig& cfg, int m_max, bool rigorous, std::uint64_t seed,
             const std::string& out_path) {
  ModelPtr model = build_model(cfg);
  ddo_directions* dirs_raw = nullptr;
  check(ddo_directions_create(ddo_model_state_dim(model.get()),
                              10 * ddo_model_state_dim(model.get()), cfg.directions_seed,
                              &dirs_raw));
  DirectionsPtr dirs(dirs_raw, &ddo_directions_free);

  RunStats stats = run_scenario(cfg, model.get(), m_max, rigorous, seed, dirs.get());
  write_step_csv(out_path, cfg.scenario, stats.rows);
  std::printf("run %s seed=%llu m_max=%d: v_tilde=%.6g w_tilde=%.6g mean_step_ms=%.3f sound=%s\n",
              cfg.scenario.c_str(), static_cast<unsigned long long>(seed), m_max,
              stats.v_tilde, stats.w_tilde, stats.mean_step_ms, stats.sound ? "yes" : "no");
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

int sweep_main(const ScenarioConfig& cfg, const std::vector<int>& budgets, bool rigorous,
               std::uint64_t seed, const std::string& out_path, bool compare) {
  if (budgets.empty()) throw ConfigError("need at least one --mmax value");
  for (int b : budgets) {
    if (b < 1) throw ConfigError("every --mmax value must be at least 1");
  }
  ModelPtr model = build_model(cfg);
  ddo_directions* dirs_raw = nullptr;
  check(ddo_directions_create(ddo_model_state_dim(model.get()),
                              10 * ddo_model_state_dim(model.get()), cfg.directions_seed,
                              &dirs_raw));
  DirectionsPtr dirs(dirs_raw, &ddo_directions_free);

  std::vector<AggRow> rows;
  rows.reserve(budgets.size());
  for (int b : budgets) {
    AggRow row;
    row.m_max = b;
    row.stats = run_scenario(cfg, model.get(), b, rigorous, seed, dirs.get());
    rows.push_back(std::move(row));
  }

  std::vector<double> v_hat;
  std::vector<double> w_hat;
  if (compare) {
    std::vector<double> v(rows.size());
    std::vector<double> w(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      v[i] = rows[i].stats.v_tilde;
      w[i] = rows[i].stats.w_tilde;
    }
    check(ddo_normalize(v.data(), static_cast<int>(v.size())));
    check(ddo_normalize(w.data(), static_cast<int>(w.size())));
    v_hat = std::move(v);
    w_hat = std::move(w);
  }

  write_agg_csv(out_path, cfg.scenario, seed, rows, compare ? &v_hat : nullptr,
                compare ? &w_hat : nullptr);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::printf("%s %s m_max=%d: v_tilde=%.6g w_tilde=%.6g mean_step_ms=%.3f sound=%s",
                compare ? "compare" : "sweep", cfg.scenario.c_str(), rows[i].m_max,
                rows[i].stats.v_tilde, rows[i].stats.w_tilde, rows[i].stats.mean_step_ms,
                rows[i].stats.sound ? "yes" : "no");
    if (compare) std::printf(" v_hat=%.4f w_hat=%.4f", v_hat[i], w_hat[i]);
    std::printf("\n");
  }
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"divide-and-discard observer benchmarks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  int m_max_single = 0;
  std::vector<int> m_max_list;
  std::uint64_t seed_override = 0;
  bool rigorous_flag = false;
  int repeats_override = 0;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "scenario config (JSON)")->required();
    cmd->add_option("--seed", seed_override, "override the truth seed");
    cmd->add_option("--out", out_path, "output CSV path");
    cmd->add_flag("--rigorous", rigorous_flag, "force outward-rounded interval arithmetic");
    cmd->add_option("--repeats", repeats_override, "override the repeat count");
  };

  CLI::App* cmd_run = app.add_subcommand("run", "single run, per-step CSV");
  add_common(cmd_run);
  cmd_run->add_option("--mmax", m_max_single, "override the box budget");

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "budget sweep, aggregated CSV");
  add_common(cmd_sweep);
  cmd_sweep->add_option("--mmax", m_max_list, "box budgets (comma-separated)")
      ->delimiter(',');

  CLI::App* cmd_compare = app.add_subcommand("compare", "budget sweep with normalized metrics");
  add_common(cmd_compare);
  cmd_compare->add_option("--mmax", m_max_list, "box budgets (comma-separated)")
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ScenarioConfig cfg = load_config(config_path);
    if (repeats_override > 0) cfg.repeats = repeats_override;
    if (rigorous_flag) cfg.rigorous = true;
    const bool seed_given = cmd_run->count("--seed") || cmd_sweep->count("--seed") ||
                            cmd_compare->count("--seed");
    const std::uint64_t seed = seed_given ? seed_override : cfg.truth_seed;

    if (cmd_run->parsed()) {
      const int budget = cmd_run->count("--mmax") ? m_max_single : cfg.m_max;
      if (budget < 1) throw ConfigError("m_max must be at least 1");
      if (out_path.empty()) out_path = "run.csv";
      return run_main(cfg, budget, cfg.rigorous, seed, out_path);
    }
    const bool compare = cmd_compare->parsed();
    std::vector<int> budgets = m_max_list;
    if (budgets.empty()) budgets.push_back(cfg.m_max);
    if (out_path.empty()) out_path = compare ? "compare.csv" : "sweep.csv";
    return sweep_main(cfg, budgets, cfg.rigorous, seed, out_path, compare);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ObserverExit& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
