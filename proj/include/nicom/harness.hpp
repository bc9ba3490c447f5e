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
// Protocol execution, replication management and regret sweeps. Every output
// byte is a deterministic function of (config, master seed).
//
#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nicom/config.hpp"
#include "nicom/core.hpp"
#include "nicom/domains/facility.hpp"
#include "nicom/domains/resource.hpp"
#include "nicom/domains/vcg.hpp"
#include "nicom/nicom.hpp"
#include "nicom/strategic.hpp"

namespace nicom {

// Shortest decimal that round-trips the double.
inline std::string double_to_string(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

// A fully resolved experiment. The built-in strategies are
// history-independent, so the report sequence, the per-round Hedge score
// increments and the commitment's reaction to them are fixed across
// replications and precomputed here; replications differ only through their
// random streams.
struct Experiment {
  ExperimentConfig config;
  std::string domain_kind;
  MechanismClass mechanisms;
  SingleRoundMechanism commitment;
  std::vector<ObjectiveFunction> objectives;
  UtilityFn utility;
  std::vector<std::vector<Rational>> type_spaces;
  AgentPopulation population;
  std::vector<Strategy> strategies;
  NicomParams params;
  bool lambda_clamped = false;
  Rational beta_source;  // the penalty gap behind params.beta
  Rational opt;
  int opt_index = 0;

  std::vector<ReportProfile> reports;                 // b_t per round
  std::vector<std::vector<double>> hedge_increments;  // F_t(b_t, pi)
  std::vector<OutcomeDistribution> commitment_dists;  // pi_com(b_t)

  OnlineMechanismSpec mechanism_spec() const {
    return OnlineMechanismSpec{mechanisms, commitment,    params,
                               objectives, utility,       type_spaces};
  }
};

namespace detail {

inline std::vector<std::vector<int>> resolve_participation(
    const cfg::ParticipationSpec& spec, int n, int T) {
  std::vector<std::vector<int>> sets(n);
  if (spec.kind == "all") {
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < T; ++t) sets[i].push_back(t);
    }
  } else if (spec.kind == "prefix") {
    const int rounds = std::min(spec.rounds, T);
    if (rounds < 0) throw ConfigError("participation.rounds must be >= 0");
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < rounds; ++t) sets[i].push_back(t);
    }
  } else if (spec.kind == "prefix_pow") {
    if (spec.h < 0.0 || spec.h >= 1.0) {
      throw ConfigError("participation.h must be in [0,1)");
    }
    const int rounds = std::min<std::int64_t>(
        T, static_cast<std::int64_t>(
               std::ceil(std::pow(static_cast<double>(T), spec.h))));
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < rounds; ++t) sets[i].push_back(t);
    }
  } else if (spec.kind == "explicit") {
    if (static_cast<int>(spec.sets.size()) != n) {
      throw ConfigError("participation.sets must have one row per agent");
    }
    for (int i = 0; i < n; ++i) {
      for (int round : spec.sets[i]) {
        if (round < 1 || round > T) {
          throw ConfigError("participation round out of [1,T]");
        }
        sets[i].push_back(round - 1);
      }
      std::sort(sets[i].begin(), sets[i].end());
      sets[i].erase(std::unique(sets[i].begin(), sets[i].end()), sets[i].end());
    }
  } else {
    throw ConfigError("participation.kind unknown");
  }
  return sets;
}

// Uniform draw from a finite list, keyed deterministically by (seed, agent,
// round) so different horizons share prefixes.
inline const Rational& scripted_uniform(const std::vector<Rational>& values,
                                        std::uint64_t seed, int agent, int t) {
  Rng rng = Rng::derive(seed, (static_cast<std::uint64_t>(agent) << 32) |
                                  static_cast<std::uint64_t>(t));
  return values[rng.next_u64() % values.size()];
}

inline std::vector<ReportProfile> resolve_types(
    const ExperimentConfig& cfg, int T,
    const std::vector<std::vector<Rational>>& spaces,
    const std::vector<std::vector<int>>& participation) {
  const int n = cfg.domain.n;
  std::vector<ReportProfile> theta(T, ReportProfile(n));
  if (cfg.types.kind == "explicit") {
    if (cfg.participation.kind != "all") {
      throw ConfigError(
          "explicit type profiles already define participation; use "
          "participation.kind = all");
    }
    if (static_cast<int>(cfg.types.profiles.size()) != T) {
      throw ConfigError("agents.types.profiles must have one row per round");
    }
    for (int t = 0; t < T; ++t) {
      if (static_cast<int>(cfg.types.profiles[t].size()) != n) {
        throw ConfigError("agents.types.profiles row width != n");
      }
      for (int i = 0; i < n; ++i) {
        const auto& v = cfg.types.profiles[t][i];
        if (v.has_value() &&
            std::find(spaces[i].begin(), spaces[i].end(), *v) ==
                spaces[i].end()) {
          throw ConfigError("type " + to_fraction_string(*v) +
                            " is not in agent " + std::to_string(i) +
                            "'s type space");
        }
        theta[t][i] = v;
      }
    }
    return theta;
  }
  std::vector<std::vector<bool>> in(n, std::vector<bool>(T, false));
  for (int i = 0; i < n; ++i) {
    for (int t : participation[i]) in[i][t] = true;
  }
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n; ++i) {
      if (!in[i][t]) continue;
      if (cfg.types.kind == "constant") {
        if (std::find(spaces[i].begin(), spaces[i].end(), cfg.types.constant) ==
            spaces[i].end()) {
          throw ConfigError("constant type is not in the type space");
        }
        theta[t][i] = cfg.types.constant;
      } else {  // uniform
        theta[t][i] = scripted_uniform(spaces[i], cfg.types.seed, i, t);
      }
    }
  }
  return theta;
}

inline std::vector<std::vector<Rational>> resolve_discount(
    const ExperimentConfig& cfg, int n, int T) {
  if (cfg.discount.kind == "constant") {
    return AgentPopulation::constant_discount(n, T, cfg.discount.constant);
  }
  if (cfg.discount.kind == "geometric") {
    if (cfg.discount.nu < 0 || cfg.discount.nu >= 1) {
      throw ConfigError("discount.nu must be in [0,1)");
    }
    return AgentPopulation::geometric_discount(n, T, cfg.discount.nu);
  }
  if (cfg.discount.kind == "explicit") {
    if (static_cast<int>(cfg.discount.rows.size()) != n) {
      throw ConfigError("discount.rows must have one row per agent");
    }
    for (const auto& row : cfg.discount.rows) {
      if (static_cast<int>(row.size()) != T) {
        throw ConfigError("discount row length != T");
      }
    }
    return cfg.discount.rows;
  }
  throw ConfigError("discount.kind unknown");
}

// Per-round scalar rows (utilization r_{i,t} with width n, or kappa_t with
// width 1).
inline std::vector<std::vector<Rational>> resolve_scalar_rows(
    const cfg::Scalars& spec, int width, int T, const std::string& where) {
  std::vector<std::vector<Rational>> rows(T, std::vector<Rational>(width));
  if (spec.kind == "constant") {
    for (auto& row : rows) {
      for (auto& v : row) v = spec.constant;
    }
  } else if (spec.kind == "rounds") {
    if (static_cast<int>(spec.rows.size()) < T) {
      throw ConfigError(where + ".rows must cover every round");
    }
    for (int t = 0; t < T; ++t) {
      if (static_cast<int>(spec.rows[t].size()) != width) {
        throw ConfigError(where + ".rows row width mismatch");
      }
      rows[t] = spec.rows[t];
    }
  } else {  // uniform over {0..resolution}/resolution
    std::vector<Rational> values;
    for (int l = 0; l <= spec.resolution; ++l) {
      values.emplace_back(l, spec.resolution);
    }
    for (int t = 0; t < T; ++t) {
      for (int i = 0; i < width; ++i) {
        rows[t][i] = scripted_uniform(values, spec.seed, i, t);
      }
    }
  }
  return rows;
}

}  // namespace detail

// Resolve a configuration into a runnable experiment. horizon_override is
// used by the sweep.
inline Experiment build_experiment(
    const ExperimentConfig& cfg,
    std::optional<std::int64_t> horizon_override = std::nullopt) {
  Experiment exp;
  exp.config = cfg;
  const int T = static_cast<int>(horizon_override.value_or(cfg.horizon));
  if (T < 1) throw ConfigError("horizon must be >= 1");
  const int n = cfg.domain.n;
  exp.domain_kind = cfg.domain.kind;

  // Domain pieces.
  if (cfg.domain.kind == "facility") {
    facility::Config fc{n, cfg.domain.m, cfg.domain.k};
    exp.type_spaces = facility::type_spaces(fc);
    exp.utility = facility::utility_fn(fc);
    exp.commitment = facility::commitment(fc);
    if (cfg.mechanism_class.kind != "posted_location") {
      throw ConfigError("facility domain requires posted_location class");
    }
    exp.mechanisms =
        cfg.mechanism_class.subset.empty()
            ? facility::posted_location_class(fc, cfg.budgets.class_size)
            : facility::posted_location_subset(fc, cfg.mechanism_class.subset);
  } else if (cfg.domain.kind == "vcg") {
    vcg::Config vc{n, cfg.domain.m};
    exp.type_spaces = vcg::type_spaces(vc);
    exp.utility = vcg::utility_fn(vc);
    exp.commitment = vcg::commitment(vc);
    if (cfg.mechanism_class.kind != "vcg_reserve") {
      throw ConfigError("vcg domain requires vcg_reserve class");
    }
    exp.mechanisms =
        cfg.mechanism_class.subset.empty()
            ? vcg::reserve_class(vc, cfg.budgets.class_size)
            : vcg::reserve_subset(vc, cfg.mechanism_class.subset);
  } else {
    resource::Config rc{n, cfg.domain.k};
    exp.type_spaces = resource::type_spaces(rc);
    exp.utility = resource::utility_fn(rc);
    exp.commitment = resource::commitment(rc);
    if (cfg.mechanism_class.kind == "posted_allocation") {
      exp.mechanisms =
          resource::posted_allocation_class(rc, cfg.budgets.class_size);
    } else if (cfg.mechanism_class.kind == "max_min_fair") {
      exp.mechanisms = resource::max_min_fair_class(rc, cfg.budgets.class_size);
    } else {
      throw ConfigError(
          "resource domain requires posted_allocation or max_min_fair class");
    }
    if (!cfg.mechanism_class.subset.empty()) {
      throw ConfigError("resource classes do not support subsets");
    }
  }

  // Agents.
  const auto participation = detail::resolve_participation(
      cfg.participation, n, T);
  auto theta = detail::resolve_types(cfg, T, exp.type_spaces, participation);
  exp.population = AgentPopulation::make(std::move(theta),
                                         detail::resolve_discount(cfg, n, T));

  // Adversary scripts (fixed before the run; shared by all replications).
  if (cfg.domain.kind == "vcg") {
    if (cfg.externality.kind == "table") {
      vcg::Config vc{n, cfg.domain.m};
      const auto ext = vcg::table_externality(vc, cfg.externality.table);
      for (int t = 0; t < T; ++t) {
        exp.objectives.push_back(vcg::objective(vc, ext));
      }
    } else {
      const auto kappas = detail::resolve_scalar_rows(cfg.externality.kappa, 1,
                                                      T, "externality.kappa");
      vcg::Config vc{n, cfg.domain.m};
      for (int t = 0; t < T; ++t) {
        exp.objectives.push_back(
            vcg::objective(vc, vcg::unit_cost_externality(kappas[t][0])));
      }
    }
  } else {
    const auto rows = detail::resolve_scalar_rows(cfg.utilization, n, T,
                                                  "adversary.utilization");
    for (int t = 0; t < T; ++t) {
      if (cfg.domain.kind == "facility") {
        exp.objectives.push_back(
            facility::objective({n, cfg.domain.m, cfg.domain.k}, rows[t]));
      } else {
        exp.objectives.push_back(
            resource::objective({n, cfg.domain.k}, rows[t]));
      }
    }
  }

  // Strategies.
  exp.strategies.assign(n, Strategy::truthful());
  for (const auto& o : cfg.strategy_overrides) {
    if (o.agent < 0 || o.agent >= n) {
      throw ConfigError("strategy override for unknown agent");
    }
    if (static_cast<int>(o.reports.size()) != T) {
      throw ConfigError("scripted reports must cover every round");
    }
    exp.strategies[o.agent] = Strategy::scripted(o.reports);
  }
  for (int i = 0; i < n; ++i) {
    exp.strategies[i].validate(exp.population, i, exp.type_spaces[i]);
  }

  // Lottery parameters.
  const Rational alpha = cfg.nicom.alpha.value_or(
      long_sightedness(exp.population));
  Rational beta;
  if (cfg.nicom.beta.has_value()) {
    beta = *cfg.nicom.beta;
  } else if (cfg.nicom.mode != "override") {
    const PenaltyGapResult pg = penalty_gap(exp.commitment, exp.type_spaces,
                                            exp.utility,
                                            cfg.budgets.enumeration);
    if (!pg.gap.has_value()) {
      throw ConfigError(
          "the commitment's penalty gap is vacuous (no agent can misreport); "
          "supply nicom.beta explicitly");
    }
    beta = *pg.gap;
  }
  exp.beta_source = beta;
  if (cfg.nicom.mode == "auto") {
    try {
      exp.params = nicom_params(alpha, T, beta);
    } catch (const InfeasibleParamsError&) {
      if (cfg.nicom.on_infeasible != "clamp") throw;
      // Executable but uncertified: the mixture runs with lambda = 1 and the
      // regret bound still applies; only the incentive certificate is lost.
      exp.params.eta = 1.0 / std::sqrt(to_double(alpha * Rational(T)));
      exp.params.lambda = 1;
      exp.params.beta = beta;
      exp.params.alpha_T = alpha;
      exp.params.certified = false;
      exp.lambda_clamped = true;
    }
  } else if (cfg.nicom.mode == "boundary") {
    exp.params = nicom_params_for_eta(alpha, beta, cfg.nicom.eta);
  } else {
    exp.params = nicom_params_override(cfg.nicom.eta, cfg.nicom.lambda, beta,
                                       alpha);
  }

  // Benchmark and per-round tables.
  std::tie(exp.opt, exp.opt_index) =
      opt_value(exp.mechanisms, exp.population, exp.objectives);
  exp.reports.resize(T);
  exp.hedge_increments.resize(T);
  exp.commitment_dists.resize(T);
  const RoundDescriptor descriptor{exp.params.lambda, -1};
  for (int t = 0; t < T; ++t) {
    ReportProfile& b = exp.reports[t];
    b.resize(n);
    for (int i = 0; i < n; ++i) {
      b[i] = exp.strategies[i].report(exp.population, i, t, descriptor);
    }
    exp.hedge_increments[t].resize(exp.mechanisms.size());
    for (int j = 0; j < exp.mechanisms.size(); ++j) {
      exp.hedge_increments[t][j] = to_double(
          expected_objective(exp.mechanisms.members[j], b, exp.objectives[t]));
    }
    exp.commitment_dists[t] = exp.commitment.evaluate(b);
  }
  return exp;
}

// One full run of the protocol; deterministic given (master seed,
// replication index).
inline Trace run_protocol(const Experiment& exp, std::uint64_t master_seed,
                          int replication) {
  Rng rng = Rng::derive(master_seed, static_cast<std::uint64_t>(replication));
  const int T = exp.population.T;
  const int n = exp.population.n;
  HedgeState state = HedgeState::initial(exp.params.eta, exp.mechanisms.size());
  Trace trace;
  trace.rounds.reserve(T);
  for (int t = 0; t < T; ++t) {
    const WeightVector weights = hedge_weights(state);
    const int sampled = hedge_sample(weights, rng);
    const ReportProfile& reports = exp.reports[t];

    OutcomeDistribution dist;
    if (exp.params.lambda == 1) {
      dist = exp.commitment_dists[t];
    } else if (exp.params.lambda == 0) {
      dist = exp.mechanisms.members[sampled].evaluate(reports);
    } else {
      dist = mix_distributions(
          exp.params.lambda, exp.mechanisms.members[sampled].evaluate(reports),
          exp.commitment_dists[t]);
    }
    std::vector<Rational> probs;
    probs.reserve(dist.support.size());
    for (const auto& [outcome, prob] : dist.support) probs.push_back(prob);
    const int pick = rng.sample_rational(probs);
    const Outcome& outcome = dist.support[pick].first;

    RoundRecord record;
    record.round = t + 1;
    record.sampled_hedge_index = sampled;
    record.lambda = exp.params.lambda;
    record.reports = reports;
    record.true_types = exp.population.theta[t];
    record.outcome = outcome;
    record.objective = exp.objectives[t].value(exp.population.theta[t], outcome);
    if (record.objective < -1 || record.objective > 1) {
      throw InvariantError("realized objective outside [-1,1]");
    }
    record.utilities.assign(n, Rational(0));
    for (int i = 0; i < n; ++i) {
      if (exp.population.participates(i, t)) {
        record.utilities[i] =
            exp.utility(i, *exp.population.theta[t][i], outcome);
      }
    }
    trace.rounds.push_back(std::move(record));

    for (int j = 0; j < exp.mechanisms.size(); ++j) {
      state.scores[j] += exp.hedge_increments[t][j];
    }
    ++state.round;
  }
  return trace;
}

struct ReplicationSummary {
  int replications = 0;
  Rational opt;
  int opt_index = 0;
  Rational alg_mean;
  Rational regret_mean;
  double regret_se = 0.0;
  std::vector<Rational> agent_utility_mean;  // discounted
  std::vector<double> agent_utility_se;
};

namespace detail {

struct RepStats {
  Rational alg;
  std::vector<Rational> utils;
};

inline RepStats stats_of(const Experiment& exp, const Trace& trace) {
  RepStats s;
  s.alg = 0;
  s.utils.assign(exp.population.n, Rational(0));
  for (int t = 0; t < exp.population.T; ++t) {
    const RoundRecord& r = trace.rounds[t];
    s.alg += r.objective;
    for (int i = 0; i < exp.population.n; ++i) {
      s.utils[i] += exp.population.discount[i][t] * r.utilities[i];
    }
  }
  return s;
}

inline double standard_error(const std::vector<double>& xs) {
  const int R = static_cast<int>(xs.size());
  if (R < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= R;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (R - 1)) / std::sqrt(static_cast<double>(R));
}

}  // namespace detail

// R independent replications with replication-derived RNG streams. A sink,
// when given, receives every trace in index order (and forces sequential
// execution); aggregation is associative and happens in index order either
// way.
inline ReplicationSummary run_replications(
    const Experiment& exp, std::uint64_t master_seed, int replications,
    int jobs = 1,
    const std::function<void(int, const Trace&)>& sink = nullptr) {
  if (replications < 1) {
    throw InvalidArgumentError("replications must be >= 1");
  }
  std::vector<detail::RepStats> stats(replications);
  if (sink != nullptr || jobs <= 1) {
    for (int r = 0; r < replications; ++r) {
      const Trace trace = run_protocol(exp, master_seed, r);
      stats[r] = detail::stats_of(exp, trace);
      if (sink) sink(r, trace);
    }
  } else {
    std::vector<std::thread> workers;
    std::atomic<int> next{0};
    for (int w = 0; w < jobs; ++w) {
      workers.emplace_back([&]() {
        while (true) {
          const int r = next.fetch_add(1);
          if (r >= replications) return;
          stats[r] = detail::stats_of(exp, run_protocol(exp, master_seed, r));
        }
      });
    }
    for (auto& t : workers) t.join();
  }

  ReplicationSummary summary;
  summary.replications = replications;
  summary.opt = exp.opt;
  summary.opt_index = exp.opt_index;
  Rational alg_total(0);
  std::vector<Rational> util_total(exp.population.n, Rational(0));
  std::vector<double> regrets;
  std::vector<std::vector<double>> utils(exp.population.n);
  regrets.reserve(replications);
  for (const auto& s : stats) {
    alg_total += s.alg;
    regrets.push_back(to_double(exp.opt - s.alg));
    for (int i = 0; i < exp.population.n; ++i) {
      util_total[i] += s.utils[i];
      utils[i].push_back(to_double(s.utils[i]));
    }
  }
  summary.alg_mean = alg_total / replications;
  summary.regret_mean = exp.opt - summary.alg_mean;
  summary.regret_se = detail::standard_error(regrets);
  for (int i = 0; i < exp.population.n; ++i) {
    summary.agent_utility_mean.push_back(util_total[i] / replications);
    summary.agent_utility_se.push_back(detail::standard_error(utils[i]));
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Regret sweeps
// ---------------------------------------------------------------------------

struct SweepPoint {
  std::int64_t horizon = 0;
  bool ran = false;
  bool certified = false;
  bool clamped = false;
  double eta = 0.0;
  Rational lambda;
  Rational mean_regret;
  double se = 0.0;
  int replications = 0;
  std::string flag;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::optional<double> slope;  // log-log least squares over fitted points
  int fitted_points = 0;
  std::string flag;
};

inline SweepResult regret_sweep(const ExperimentConfig& cfg, int jobs = 1) {
  if (cfg.sweep.horizons.size() < 3) {
    throw ConfigError("sweep.horizons needs at least 3 horizons");
  }
  for (std::size_t i = 1; i < cfg.sweep.horizons.size(); ++i) {
    if (cfg.sweep.horizons[i] <= cfg.sweep.horizons[i - 1]) {
      throw ConfigError("sweep.horizons must be strictly increasing");
    }
  }
  const int reps = cfg.sweep.replications.value_or(cfg.replications);
  SweepResult result;
  for (std::int64_t T : cfg.sweep.horizons) {
    SweepPoint point;
    point.horizon = T;
    point.replications = reps;
    try {
      const Experiment exp = build_experiment(cfg, T);
      const std::uint64_t seed =
          splitmix64(cfg.seed ^ static_cast<std::uint64_t>(T));
      const ReplicationSummary s = run_replications(exp, seed, reps, jobs);
      point.ran = true;
      point.certified = exp.params.certified;
      point.clamped = exp.lambda_clamped;
      point.eta = exp.params.eta;
      point.lambda = exp.params.lambda;
      point.mean_regret = s.regret_mean;
      point.se = s.regret_se;
      if (point.mean_regret <= 0) {
        point.flag = "degenerate: zero regret";
      }
    } catch (const InfeasibleParamsError& e) {
      point.flag = e.what();
    }
    result.points.push_back(std::move(point));
  }

  // Least-squares slope of ln(mean regret) against ln(T) over the measurable
  // points.
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : result.points) {
    if (p.ran && p.mean_regret > 0) {
      xy.emplace_back(std::log(static_cast<double>(p.horizon)),
                      std::log(to_double(p.mean_regret)));
    }
  }
  result.fitted_points = static_cast<int>(xy.size());
  if (result.fitted_points >= 3) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : xy) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double k = static_cast<double>(xy.size());
    result.slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  } else {
    result.flag = "fewer than 3 measurable horizons; slope not fitted";
  }
  return result;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline std::string report_to_string(const Report& r) {
  return r ? to_fraction_string(*r) : "_";
}

// Trace CSV, bit-exact column order:
// round,sampled_hedge_index,lambda,reports,true_types,outcome,
// objective_value,utilities. Per-agent fields are ';'-joined, bot is "_".
inline std::string trace_to_csv(const Trace& trace) {
  std::string out =
      "round,sampled_hedge_index,lambda,reports,true_types,outcome,"
      "objective_value,utilities\n";
  for (const auto& r : trace.rounds) {
    out += std::to_string(r.round);
    out += ',';
    out += std::to_string(r.sampled_hedge_index);
    out += ',';
    out += to_fraction_string(r.lambda);
    out += ',';
    out += profile_to_string(r.reports);
    out += ',';
    out += profile_to_string(r.true_types);
    out += ',';
    out += outcome_to_string(r.outcome);
    out += ',';
    out += to_fraction_string(r.objective);
    out += ',';
    for (std::size_t i = 0; i < r.utilities.size(); ++i) {
      if (i > 0) out += ';';
      out += to_fraction_string(r.utilities[i]);
    }
    out += '\n';
  }
  return out;
}

inline Json summary_to_json(const Experiment& exp,
                            const ReplicationSummary& summary,
                            std::uint64_t master_seed) {
  Json j;
  j["config_digest"] = config_digest(exp.config.canonical);
  j["domain"] = exp.domain_kind;
  j["mechanism_class"] = exp.mechanisms.name;
  j["class_size"] = exp.mechanisms.size();
  j["horizon"] = exp.population.T;
  j["replications"] = summary.replications;
  j["master_seed"] = master_seed;
  j["eta"] = exp.params.eta;
  j["lambda"] = to_fraction_string(exp.params.lambda);
  j["beta"] = to_fraction_string(exp.params.beta);
  j["alpha"] = to_fraction_string(exp.params.alpha_T);
  j["certified"] = exp.params.certified;
  j["lambda_clamped"] = exp.lambda_clamped;
  j["opt"] = to_fraction_string(summary.opt);
  j["opt_index"] = summary.opt_index;
  j["alg_mean"] = to_fraction_string(summary.alg_mean);
  j["regret_mean"] = to_fraction_string(summary.regret_mean);
  j["regret_se"] = summary.regret_se;
  Json utils = Json::array();
  for (std::size_t i = 0; i < summary.agent_utility_mean.size(); ++i) {
    Json u;
    u["agent"] = i;
    u["discounted_mean"] = to_fraction_string(summary.agent_utility_mean[i]);
    u["se"] = summary.agent_utility_se[i];
    utils.push_back(std::move(u));
  }
  j["agent_utilities"] = std::move(utils);
  return j;
}

inline std::string sweep_to_csv(const SweepResult& sweep) {
  std::string out =
      "T,ran,certified,clamped,eta,lambda,mean_regret,se,replications,flag\n";
  for (const auto& p : sweep.points) {
    out += std::to_string(p.horizon);
    out += ',';
    out += p.ran ? "1" : "0";
    out += ',';
    out += p.certified ? "1" : "0";
    out += ',';
    out += p.clamped ? "1" : "0";
    out += ',';
    out += double_to_string(p.eta);
    out += ',';
    out += to_fraction_string(p.lambda);
    out += ',';
    out += p.ran ? to_fraction_string(p.mean_regret) : "";
    out += ',';
    out += double_to_string(p.se);
    out += ',';
    out += std::to_string(p.replications);
    out += ',';
    out += p.flag;
    out += '\n';
  }
  return out;
}

inline Json sweep_to_json(const ExperimentConfig& cfg,
                          const SweepResult& sweep) {
  Json j;
  j["config_digest"] = config_digest(cfg.canonical);
  Json points = Json::array();
  for (const auto& p : sweep.points) {
    Json e;
    e["T"] = p.horizon;
    e["ran"] = p.ran;
    e["certified"] = p.certified;
    e["clamped"] = p.clamped;
    e["eta"] = p.eta;
    e["lambda"] = to_fraction_string(p.lambda);
    if (p.ran) {
      e["mean_regret"] = to_fraction_string(p.mean_regret);
      e["mean_regret_float"] = to_double(p.mean_regret);
      e["se"] = p.se;
    }
    e["replications"] = p.replications;
    if (!p.flag.empty()) e["flag"] = p.flag;
    points.push_back(std::move(e));
  }
  j["points"] = std::move(points);
  if (sweep.slope.has_value()) {
    j["slope"] = *sweep.slope;
  }
  j["fitted_points"] = sweep.fitted_points;
  if (!sweep.flag.empty()) j["flag"] = sweep.flag;
  return j;
}

}  // namespace nicom
