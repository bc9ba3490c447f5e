//
// Copyright 2026 the nicom authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Command-line front end: run one experiment, audit incentives, verify the
// weak-DP bound, compute penalty gaps, and sweep horizons.
//
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "nicom/config.hpp"
#include "nicom/harness.hpp"
#include "nicom/learning.hpp"
#include "nicom/nicom.hpp"
#include "nicom/strategic.hpp"

namespace fs = std::filesystem;
using nicom::Json;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<std::string> out;
  std::optional<std::int64_t> budget;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonFlags* flags) {
  cmd->add_option("--config", flags->config_path, "experiment config (JSON)")
      ->required();
  cmd->add_option("--seed", flags->seed, "master seed override");
  cmd->add_option("--reps", flags->reps, "replication count override");
  cmd->add_option("--out", flags->out, "output directory override");
  cmd->add_option("--budget", flags->budget,
                  "node/enumeration budget override");
  cmd->add_option("--jobs", flags->jobs, "parallel replication workers");
}

nicom::ExperimentConfig load(const CommonFlags& flags) {
  std::ifstream in(flags.config_path);
  if (!in) {
    throw nicom::ConfigError("cannot open config file " + flags.config_path);
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  nicom::ExperimentConfig cfg = nicom::load_experiment_config(text);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.reps) cfg.replications = *flags.reps;
  if (flags.out) cfg.output.dir = *flags.out;
  if (flags.budget) {
    cfg.budgets.nodes = *flags.budget;
    cfg.budgets.enumeration = *flags.budget;
  }
  return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw nicom::Error("cannot write " + path.string());
}

void write_json(const fs::path& path, const Json& j) {
  write_file(path, j.dump(2) + "\n");
}

int cmd_run(const CommonFlags& flags) {
  const nicom::ExperimentConfig cfg = load(flags);
  const nicom::Experiment exp = nicom::build_experiment(cfg);
  const fs::path dir(cfg.output.dir);
  std::function<void(int, const nicom::Trace&)> sink;
  if (cfg.output.write_traces) {
    sink = [&](int rep, const nicom::Trace& trace) {
      char name[48];
      std::snprintf(name, sizeof(name), "trace_rep%04d.csv", rep);
      write_file(dir / name, nicom::trace_to_csv(trace));
    };
  }
  const nicom::ReplicationSummary summary = nicom::run_replications(
      exp, cfg.seed, cfg.replications, flags.jobs, sink);
  write_json(dir / "summary.json", nicom::summary_to_json(exp, summary, cfg.seed));
  std::cout << "opt = " << nicom::to_fraction_string(summary.opt)
            << "  mean regret = " << nicom::to_double(summary.regret_mean)
            << " +- " << summary.regret_se << " (R = " << summary.replications
            << ")\n"
            << "summary written to " << (dir / "summary.json").string() << "\n";
  return 0;
}

int cmd_audit_nic(const CommonFlags& flags) {
  const nicom::ExperimentConfig cfg = load(flags);
  const nicom::Experiment exp = nicom::build_experiment(cfg);
  const nicom::OnlineMechanismSpec spec = exp.mechanism_spec();
  Json j;
  j["config_digest"] = nicom::config_digest(cfg.canonical);
  j["certified_params"] = exp.params.certified;
  j["lambda"] = nicom::to_fraction_string(exp.params.lambda);
  j["eta"] = exp.params.eta;
  Json agents = Json::array();
  bool all_certified = true;
  for (int i = 0; i < exp.population.n; ++i) {
    const nicom::AuditReport report = nicom::best_response_value(
        i, spec, exp.population, 1e-7, cfg.budgets.nodes);
    Json a;
    a["agent"] = i;
    a["truthful_value"] = report.truthful_value;
    a["best_response_value"] = report.best_value;
    a["gap"] = report.gap;
    if (report.gap_exact) {
      a["gap_exact"] = nicom::to_fraction_string(*report.gap_exact);
    }
    a["certified"] = report.certified;
    a["tolerance"] = report.tolerance;
    a["nodes"] = report.nodes;
    Json policy = Json::array();
    for (const auto& d : report.policy) {
      Json e;
      e["round"] = d.round;
      e["sampled_index"] = d.sampled_index;
      e["history"] = d.history;
      e["report"] = nicom::report_to_string(d.choice);
      policy.push_back(std::move(e));
    }
    a["best_response_policy"] = std::move(policy);
    all_certified = all_certified && report.certified;
    std::cout << "agent " << i << ": gap = " << report.gap << " ("
              << (report.certified ? "certified" : "NOT certified")
              << ", nodes = " << report.nodes << ")\n";
    agents.push_back(std::move(a));
  }
  j["agents"] = std::move(agents);
  j["all_certified"] = all_certified;
  write_json(fs::path(cfg.output.dir) / "audit_nic.json", j);
  return all_certified ? 0 : 1;
}

int cmd_audit_dsic(const CommonFlags& flags) {
  const nicom::ExperimentConfig cfg = load(flags);
  const nicom::Experiment exp = nicom::build_experiment(cfg);
  Json j;
  j["config_digest"] = nicom::config_digest(cfg.canonical);
  j["class"] = exp.mechanisms.name;
  Json members = Json::array();
  std::int64_t total_violations = 0;
  for (const auto& mech : exp.mechanisms.members) {
    const auto violations = nicom::audit_single_round(
        mech, nicom::IncentiveKind::DSIC, exp.type_spaces, exp.utility,
        cfg.budgets.enumeration);
    Json m;
    m["index"] = mech.index;
    m["descriptor"] = mech.descriptor;
    m["violations"] = Json::array();
    for (const auto& v : violations) {
      Json e;
      e["agent"] = v.agent;
      e["true_type"] = nicom::to_fraction_string(v.true_type);
      e["deviation"] = nicom::to_fraction_string(v.deviation);
      e["others"] = nicom::profile_to_string(v.others);
      e["deficit"] = nicom::to_fraction_string(v.deficit);
      m["violations"].push_back(std::move(e));
    }
    total_violations += static_cast<std::int64_t>(violations.size());
    members.push_back(std::move(m));
  }
  j["members"] = std::move(members);
  j["total_violations"] = total_violations;
  write_json(fs::path(cfg.output.dir) / "audit_dsic.json", j);
  std::cout << exp.mechanisms.name << ": " << total_violations
            << " DSIC violations across " << exp.mechanisms.size()
            << " mechanisms\n";
  return total_violations == 0 ? 0 : 1;
}

int cmd_dp_check(const CommonFlags& flags, const std::vector<double>& etas,
                 int t_max) {
  const nicom::ExperimentConfig cfg = load(flags);
  const nicom::Experiment exp = nicom::build_experiment(cfg);
  Json j;
  j["config_digest"] = nicom::config_digest(cfg.canonical);
  j["t_max"] = t_max;
  Json rows = Json::array();
  bool ok = true;
  for (double eta : etas) {
    const nicom::DpCheckReport report = nicom::dp_exhaustive_check(
        eta, exp.mechanisms, exp.objectives, exp.type_spaces, t_max);
    const double bound = 4.0 * eta + 1e-9;
    Json r;
    r["eta"] = eta;
    r["max_abs_log_ratio"] = report.max_abs_log_ratio;
    r["bound_4eta"] = 4.0 * eta;
    r["neighbor_pairs"] = report.neighbor_pairs;
    r["within_bound"] = report.max_abs_log_ratio <= bound;
    r["worst_case"] = report.worst_history;
    ok = ok && report.max_abs_log_ratio <= bound;
    std::cout << "eta = " << eta
              << ": max |log ratio| = " << report.max_abs_log_ratio
              << " (bound 4*eta = " << 4.0 * eta << ", "
              << report.neighbor_pairs << " neighbor pairs)\n";
    rows.push_back(std::move(r));
  }
  j["results"] = std::move(rows);
  j["all_within_bound"] = ok;
  write_json(fs::path(cfg.output.dir) / "dp_check.json", j);
  return ok ? 0 : 1;
}

int cmd_penalty_gap(const CommonFlags& flags) {
  const nicom::ExperimentConfig cfg = load(flags);
  const nicom::Experiment exp = nicom::build_experiment(cfg);
  const nicom::PenaltyGapResult result = nicom::penalty_gap(
      exp.commitment, exp.type_spaces, exp.utility, cfg.budgets.enumeration);
  Json j;
  j["config_digest"] = nicom::config_digest(cfg.canonical);
  j["commitment"] = exp.commitment.descriptor;
  j["cases"] = result.cases;
  if (result.gap) {
    j["beta"] = nicom::to_fraction_string(*result.gap);
    j["beta_float"] = nicom::to_double(*result.gap);
    const auto& w = *result.witness;
    Json witness;
    witness["agent"] = w.agent;
    witness["true_type"] = nicom::to_fraction_string(w.true_type);
    witness["deviation"] = nicom::to_fraction_string(w.deviation);
    witness["others"] = nicom::profile_to_string(w.others);
    j["witness"] = std::move(witness);
    std::cout << "beta = " << nicom::to_fraction_string(*result.gap) << " ("
              << result.cases << " cases)\n";
  } else {
    j["beta"] = nullptr;
    j["note"] = "no agent has two types to choose between";
    std::cout << "penalty gap vacuous: no deviation is possible\n";
  }
  write_json(fs::path(cfg.output.dir) / "penalty_gap.json", j);
  return 0;
}

int cmd_regret_sweep(const CommonFlags& flags) {
  const nicom::ExperimentConfig cfg = load(flags);
  const nicom::SweepResult sweep = nicom::regret_sweep(cfg, flags.jobs);
  const fs::path dir(cfg.output.dir);
  write_file(dir / "sweep.csv", nicom::sweep_to_csv(sweep));
  write_json(dir / "sweep.json", nicom::sweep_to_json(cfg, sweep));
  for (const auto& p : sweep.points) {
    std::cout << "T = " << p.horizon << ": ";
    if (p.ran) {
      std::cout << "mean regret = " << nicom::to_double(p.mean_regret)
                << " +- " << p.se << (p.clamped ? " [lambda clamped]" : "");
    } else {
      std::cout << p.flag;
    }
    std::cout << "\n";
  }
  if (sweep.slope) {
    std::cout << "fitted log-log slope = " << *sweep.slope << " over "
              << sweep.fitted_points << " horizons\n";
  } else {
    std::cout << sweep.flag << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "nicom: incentive-compatible online mechanism learning laboratory"};
  app.require_subcommand(1);

  CommonFlags run_flags, nic_flags, dsic_flags, dp_flags, gap_flags,
      sweep_flags;
  std::vector<double> dp_etas{0.05, 0.1, 0.5};
  int dp_tmax = 3;

  add_common(app.add_subcommand("run", "run one experiment"), &run_flags);
  add_common(app.add_subcommand("audit-nic",
                                "exact best-response audit per agent"),
             &nic_flags);
  add_common(app.add_subcommand("audit-dsic",
                                "single-round DSIC audit over the class"),
             &dsic_flags);
  CLI::App* dp = app.add_subcommand("dp-check",
                                    "exhaustive weak-DP verification");
  add_common(dp, &dp_flags);
  dp->add_option("--eta", dp_etas, "learning rates to check");
  dp->add_option("--t-max", dp_tmax, "largest round index (histories < t)");
  add_common(app.add_subcommand("penalty-gap", "brute-force penalty gap"),
             &gap_flags);
  add_common(app.add_subcommand("regret-sweep", "multi-horizon regret study"),
             &sweep_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) return cmd_run(run_flags);
    if (app.got_subcommand("audit-nic")) return cmd_audit_nic(nic_flags);
    if (app.got_subcommand("audit-dsic")) return cmd_audit_dsic(dsic_flags);
    if (app.got_subcommand("dp-check")) {
      return cmd_dp_check(dp_flags, dp_etas, dp_tmax);
    }
    if (app.got_subcommand("penalty-gap")) return cmd_penalty_gap(gap_flags);
    if (app.got_subcommand("regret-sweep")) return cmd_regret_sweep(sweep_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
