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
// Strategic agents and exact incentive auditing: the trajectory-tree engine
// for expected discounted utilities, backward-induction best responses, and
// single-round DSIC/NIC audits.
//
#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nicom/core.hpp"
#include "nicom/errors.hpp"
#include "nicom/nicom.hpp"

namespace nicom {

// What a participating agent observes before reporting on round t: the
// lottery weight and the realized Hedge sample. Index -1 means the sample is
// irrelevant (pure-commitment rounds evaluated exactly).
struct RoundDescriptor {
  Rational lambda;
  int sampled_index = -1;
};

// A per-round reporting policy. The built-in variants are history-independent
// by construction; the history-dependent optimal deviator lives inside the
// auditor, not here.
class Strategy {
 public:
  enum class Kind { Truthful, Scripted };

  static Strategy truthful() { return Strategy(Kind::Truthful, {}); }

  static Strategy scripted(std::vector<Report> script) {
    return Strategy(Kind::Scripted, std::move(script));
  }

  Kind kind() const { return kind_; }

  Report report(const AgentPopulation& agents, int agent, int round,
                const RoundDescriptor&) const {
    if (!agents.participates(agent, round)) return std::nullopt;
    if (kind_ == Kind::Truthful) return agents.theta[round][agent];
    return script_.at(round);
  }

  // Scripted reports must lie in Theta_i exactly on the participation rounds.
  void validate(const AgentPopulation& agents, int agent,
                const std::vector<Rational>& space) const {
    if (kind_ == Kind::Truthful) return;
    if (static_cast<int>(script_.size()) != agents.T) {
      throw InvalidArgumentError("scripted strategy: script length != T");
    }
    for (int t = 0; t < agents.T; ++t) {
      const bool in = agents.participates(agent, t);
      if (in != script_[t].has_value()) {
        throw InvalidArgumentError(
            "scripted strategy: participation mismatch at round " +
            std::to_string(t + 1));
      }
      if (in && std::find(space.begin(), space.end(), *script_[t]) ==
                    space.end()) {
        throw InvalidArgumentError("scripted strategy: report off the grid");
      }
    }
  }

 private:
  Strategy(Kind kind, std::vector<Report> script)
      : kind_(kind), script_(std::move(script)) {}

  Kind kind_;
  std::vector<Report> script_;
};

// Everything that defines the online mechanism for one horizon.
struct OnlineMechanismSpec {
  MechanismClass mechanisms;
  SingleRoundMechanism commitment;
  NicomParams params;
  std::vector<ObjectiveFunction> objectives;  // one per round
  UtilityFn utility;
  std::vector<std::vector<Rational>> type_spaces;  // per agent
};

struct UtilityResult {
  std::vector<double> values;
  // Present on hedge-free instances (lambda = 1 or a singleton class), where
  // every branch probability is rational and the traversal is exact.
  std::optional<std::vector<Rational>> exact;
  std::int64_t nodes = 0;
};

struct DecisionEntry {
  int round = 0;  // 1-based
  int sampled_index = -1;
  std::string history;  // realized report history before this round
  Report choice;
};

struct AuditReport {
  int agent = 0;
  double truthful_value = 0.0;
  double best_value = 0.0;
  double gap = 0.0;  // best - truthful
  std::optional<Rational> truthful_exact;
  std::optional<Rational> best_exact;
  std::optional<Rational> gap_exact;
  bool certified = false;
  double tolerance = 0.0;
  std::int64_t nodes = 0;
  std::vector<DecisionEntry> policy;
};

namespace detail {

template <class Num>
Num from_rational(const Rational& r) {
  if constexpr (std::is_same_v<Num, Rational>) {
    return r;
  } else {
    return to_double(r);
  }
}

// The trajectory tree branches on the Hedge sample and (for the deviator) on
// the report; the outcome draw never needs a branch of its own, because once
// the round's reports are fixed the continuation game depends on the history
// only through the reports (Hedge scores read reports, the true types are
// fixed, and the built-in opponent strategies are history-independent), so
// the outcome integrates out exactly into the round's immediate utility.
template <class Num>
class TreeEngine {
 public:
  TreeEngine(const OnlineMechanismSpec& spec, const AgentPopulation& agents,
             std::int64_t node_budget)
      : spec_(spec),
        agents_(agents),
        budget_(node_budget),
        hedge_free_(spec.params.lambda == 1 || spec.mechanisms.size() == 1) {
    if (static_cast<int>(spec.objectives.size()) < agents.T) {
      throw InvalidArgumentError("tree engine: fewer objectives than rounds");
    }
  }

  bool hedge_free() const { return hedge_free_; }
  std::int64_t nodes() const { return nodes_; }

  // Expected discounted utility of every agent under a fixed strategy
  // profile.
  std::vector<Num> expected(const std::vector<Strategy>& strategies) {
    std::vector<double> scores(spec_.mechanisms.size(), 0.0);
    return expected_rec(0, scores, strategies);
  }

  // Optimal deviation value for one agent, all others truthful. The deviator
  // sees the full realized history and the round's sampled mechanism before
  // choosing a report in Theta_i.
  Num best_response(int deviator, bool optimize,
                    std::vector<DecisionEntry>* policy) {
    std::vector<double> scores(spec_.mechanisms.size(), 0.0);
    return response_rec(deviator, optimize, policy, 0, scores, "");
  }

 private:
  struct Branch {
    int index;
    Num prob;
  };

  std::vector<Branch> hedge_branches(const std::vector<double>& scores) {
    std::vector<Branch> out;
    if (hedge_free_) {
      // With lambda = 1 the sample never touches the outcome or the future
      // (weights read reports, not samples), so integrating it out is exact;
      // a singleton class trivially samples its only member.
      out.push_back({spec_.mechanisms.size() == 1 ? 0 : -1,
                     from_rational<Num>(Rational(1))});
      return out;
    }
    HedgeState state = HedgeState::initial(spec_.params.eta,
                                           spec_.mechanisms.size());
    state.scores = scores;
    const WeightVector w = hedge_weights(state);
    for (int j = 0; j < w.size(); ++j) {
      if constexpr (std::is_same_v<Num, Rational>) {
        throw InvariantError("exact traversal requested on a hedge instance");
      } else {
        if (w.p[j] > 0.0) out.push_back({j, w.p[j]});
      }
    }
    return out;
  }

  const OutcomeDistribution& round_distribution(int branch,
                                                const ReportProfile& reports) {
    const std::string key =
        std::to_string(branch) + "|" + profile_to_string(reports);
    auto it = dist_cache_.find(key);
    if (it != dist_cache_.end()) return it->second;
    OutcomeDistribution dist;
    if (spec_.params.lambda == 1 || branch < 0) {
      dist = spec_.commitment.evaluate(reports);
    } else if (spec_.params.lambda == 0) {
      dist = spec_.mechanisms.members[branch].evaluate(reports);
    } else {
      dist = mix_distributions(
          spec_.params.lambda,
          spec_.mechanisms.members[branch].evaluate(reports),
          spec_.commitment.evaluate(reports));
    }
    return dist_cache_.emplace(key, std::move(dist)).first->second;
  }

  const std::vector<double>& score_increments(int round,
                                              const ReportProfile& reports) {
    const std::string key =
        std::to_string(round) + "|" + profile_to_string(reports);
    auto it = f_cache_.find(key);
    if (it != f_cache_.end()) return it->second;
    std::vector<double> f(spec_.mechanisms.size());
    for (int j = 0; j < spec_.mechanisms.size(); ++j) {
      f[j] = to_double(expected_objective(spec_.mechanisms.members[j], reports,
                                          spec_.objectives[round]));
    }
    return f_cache_.emplace(key, std::move(f)).first->second;
  }

  void count_node() {
    if (++nodes_ > budget_) {
      throw BudgetExceededError("trajectory tree", budget_, nodes_);
    }
  }

  std::vector<double> advance_scores(const std::vector<double>& scores,
                                     int round, const ReportProfile& reports) {
    if (hedge_free_) return scores;
    const std::vector<double>& f = score_increments(round, reports);
    std::vector<double> next(scores);
    for (std::size_t j = 0; j < next.size(); ++j) next[j] += f[j];
    return next;
  }

  std::vector<Num> expected_rec(int t, const std::vector<double>& scores,
                                const std::vector<Strategy>& strategies) {
    if (t == agents_.T) {
      return std::vector<Num>(agents_.n, from_rational<Num>(Rational(0)));
    }
    std::vector<Num> total(agents_.n, from_rational<Num>(Rational(0)));
    for (const Branch& branch : hedge_branches(scores)) {
      count_node();
      const RoundDescriptor descriptor{spec_.params.lambda, branch.index};
      ReportProfile reports(agents_.n);
      for (int i = 0; i < agents_.n; ++i) {
        reports[i] = strategies[i].report(agents_, i, t, descriptor);
      }
      const OutcomeDistribution& dist = round_distribution(branch.index, reports);
      std::vector<Num> value(agents_.n, from_rational<Num>(Rational(0)));
      for (const auto& [outcome, prob] : dist.support) {
        for (int i = 0; i < agents_.n; ++i) {
          if (!agents_.participates(i, t)) continue;
          value[i] += from_rational<Num>(prob * agents_.discount[i][t] *
                                         spec_.utility(i, *agents_.theta[t][i],
                                                       outcome));
        }
      }
      const std::vector<Num> cont =
          expected_rec(t + 1, advance_scores(scores, t, reports), strategies);
      for (int i = 0; i < agents_.n; ++i) {
        total[i] += branch.prob * (value[i] + cont[i]);
      }
    }
    return total;
  }

  Num deviator_round_value(int deviator, int t, int branch,
                           const ReportProfile& reports) {
    Num value = from_rational<Num>(Rational(0));
    if (!agents_.participates(deviator, t)) return value;
    const OutcomeDistribution& dist = round_distribution(branch, reports);
    for (const auto& [outcome, prob] : dist.support) {
      value += from_rational<Num>(prob * agents_.discount[deviator][t] *
                                  spec_.utility(deviator,
                                                *agents_.theta[t][deviator],
                                                outcome));
    }
    return value;
  }

  Num response_rec(int deviator, bool optimize,
                   std::vector<DecisionEntry>* policy, int t,
                   const std::vector<double>& scores,
                   const std::string& path) {
    if (t == agents_.T) return from_rational<Num>(Rational(0));
    Num total = from_rational<Num>(Rational(0));
    for (const Branch& branch : hedge_branches(scores)) {
      ReportProfile reports(agents_.n);
      for (int i = 0; i < agents_.n; ++i) {
        if (i != deviator && agents_.participates(i, t)) {
          reports[i] = agents_.theta[t][i];
        }
      }
      std::vector<Report> options;
      if (!agents_.participates(deviator, t)) {
        options.push_back(std::nullopt);
      } else if (optimize) {
        for (const auto& v : spec_.type_spaces[deviator]) options.push_back(v);
      } else {
        options.push_back(agents_.theta[t][deviator]);
      }
      bool first = true;
      Num best = from_rational<Num>(Rational(0));
      Report best_choice;
      for (const Report& choice : options) {
        count_node();
        reports[deviator] = choice;
        Num value = deviator_round_value(deviator, t, branch.index, reports);
        value += response_rec(deviator, optimize, policy, t + 1,
                              advance_scores(scores, t, reports),
                              path + "(" + profile_to_string(reports) + ")");
        if (first || best < value) {
          best = std::move(value);
          best_choice = choice;
          first = false;
        }
      }
      if (policy != nullptr && optimize && options.size() > 1) {
        policy->push_back(
            DecisionEntry{t + 1, branch.index, "b<" + path + ">", best_choice});
      }
      total += branch.prob * best;
    }
    return total;
  }

  const OnlineMechanismSpec& spec_;
  const AgentPopulation& agents_;
  std::int64_t budget_;
  std::int64_t nodes_ = 0;
  bool hedge_free_;
  std::map<std::string, OutcomeDistribution> dist_cache_;
  std::map<std::string, std::vector<double>> f_cache_;
};

}  // namespace detail

// Exact traversal of the trajectory tree under a fixed strategy profile,
// returning each agent's expected discounted utility.
inline UtilityResult exact_expected_utilities(
    const OnlineMechanismSpec& spec, const AgentPopulation& agents,
    const std::vector<Strategy>& strategies,
    std::int64_t node_budget = 10'000'000) {
  if (static_cast<int>(strategies.size()) != agents.n) {
    throw InvalidArgumentError("expected utilities: strategy count != n");
  }
  for (int i = 0; i < agents.n; ++i) {
    strategies[i].validate(agents, i, spec.type_spaces[i]);
  }
  UtilityResult result;
  detail::TreeEngine<double> engine(spec, agents, node_budget);
  if (engine.hedge_free()) {
    detail::TreeEngine<Rational> exact(spec, agents, node_budget);
    auto values = exact.expected(strategies);
    result.values.reserve(values.size());
    for (const auto& v : values) result.values.push_back(to_double(v));
    result.exact = std::move(values);
    result.nodes = exact.nodes();
  } else {
    result.values = engine.expected(strategies);
    result.nodes = engine.nodes();
  }
  return result;
}

// Dynamic programming over the trajectory tree: the optimal history-dependent
// deviation for one agent when the others are truthful, compared against the
// truthful value. Pure-commitment and singleton-class instances are certified
// with exact rationals at tolerance 0; everything else carries the float
// tolerance.
inline AuditReport best_response_value(int agent,
                                       const OnlineMechanismSpec& spec,
                                       const AgentPopulation& agents,
                                       double tolerance = 1e-7,
                                       std::int64_t node_budget = 10'000'000) {
  if (agent < 0 || agent >= agents.n) {
    throw InvalidArgumentError("best response: agent out of range");
  }
  AuditReport report;
  report.agent = agent;
  report.tolerance = tolerance;
  detail::TreeEngine<double> probe(spec, agents, node_budget);
  if (probe.hedge_free()) {
    detail::TreeEngine<Rational> engine(spec, agents, node_budget);
    const Rational truthful = engine.best_response(agent, false, nullptr);
    const Rational best =
        engine.best_response(agent, true, &report.policy);
    report.truthful_exact = truthful;
    report.best_exact = best;
    report.gap_exact = best - truthful;
    report.truthful_value = to_double(truthful);
    report.best_value = to_double(best);
    report.gap = to_double(*report.gap_exact);
    report.certified = *report.gap_exact <= rational_from_double(tolerance);
    report.nodes = engine.nodes();
  } else {
    const double truthful = probe.best_response(agent, false, nullptr);
    const double best = probe.best_response(agent, true, &report.policy);
    report.truthful_value = truthful;
    report.best_value = best;
    report.gap = best - truthful;
    report.certified = report.gap <= tolerance;
    report.nodes = probe.nodes();
  }
  return report;
}

// ---------------------------------------------------------------------------
// Single-round audits
// ---------------------------------------------------------------------------

enum class IncentiveKind { DSIC, NIC };

struct IncentiveViolation {
  int agent = 0;
  Rational true_type;
  Rational deviation;
  ReportProfile others;  // opponents' reports (= their true types for NIC)
  Rational deficit;      // deviating minus truthful expected utility, > 0
};

// Exhaustive truthfulness check of a single-round mechanism. For one round
// the DSIC and NIC quantifications coincide: the opponents' slots range over
// their full type spaces (non-participation included) either way, and the
// deviator's utility reads only the reports. The kind is kept for labeling.
inline std::vector<IncentiveViolation> audit_single_round(
    const SingleRoundMechanism& mechanism, IncentiveKind,
    const std::vector<std::vector<Rational>>& type_spaces,
    const UtilityFn& utility, std::int64_t budget = 1'000'000) {
  const int n = static_cast<int>(type_spaces.size());
  std::int64_t required = 0;
  for (int i = 0; i < n; ++i) {
    const std::int64_t k = static_cast<std::int64_t>(type_spaces[i].size());
    std::int64_t others = 1;
    for (int j = 0; j < n; ++j) {
      if (j != i) others *= static_cast<std::int64_t>(type_spaces[j].size()) + 1;
    }
    required += k * k * others;
  }
  if (required > budget) {
    throw BudgetExceededError("single-round audit", budget, required);
  }

  std::vector<IncentiveViolation> violations;
  for (int i = 0; i < n; ++i) {
    const auto& own = type_spaces[i];
    std::vector<std::vector<Rational>> other_spaces;
    for (int j = 0; j < n; ++j) {
      if (j != i) other_spaces.push_back(type_spaces[j]);
    }
    for_each_profile(other_spaces, /*include_bot=*/true,
                     [&](const ReportProfile& others) {
      ReportProfile full(n);
      for (int j = 0, idx = 0; j < n; ++j) {
        if (j != i) full[j] = others[idx++];
      }
      std::vector<std::vector<Rational>> exp_util(
          own.size(), std::vector<Rational>(own.size()));
      for (std::size_t x = 0; x < own.size(); ++x) {
        full[i] = own[x];
        const OutcomeDistribution dist = mechanism.evaluate(full);
        for (std::size_t t = 0; t < own.size(); ++t) {
          Rational e(0);
          for (const auto& [outcome, prob] : dist.support) {
            e += prob * utility(i, own[t], outcome);
          }
          exp_util[x][t] = std::move(e);
        }
      }
      for (std::size_t t = 0; t < own.size(); ++t) {
        for (std::size_t x = 0; x < own.size(); ++x) {
          if (x == t) continue;
          if (exp_util[x][t] > exp_util[t][t]) {
            violations.push_back(IncentiveViolation{
                i, own[t], own[x], others, exp_util[x][t] - exp_util[t][t]});
          }
        }
      }
    });
  }
  return violations;
}

}  // namespace nicom
