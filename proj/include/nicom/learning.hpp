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
#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nicom/core.hpp"
#include "nicom/errors.hpp"
#include "nicom/rng.hpp"

namespace nicom {

// ---------------------------------------------------------------------------
// Hedge (exponential weights) over a finite mechanism class
// ---------------------------------------------------------------------------

// Weights are the only floating-point quantities in the system: exp is
// irrational, so exactness is impossible here. Every DP assertion downstream
// carries an explicit 1e-9 additive slack.
struct WeightVector {
  std::vector<double> p;

  int size() const { return static_cast<int>(p.size()); }
};

struct HedgeState {
  double eta = 0.0;
  std::vector<double> scores;  // cumulative sum of F_tau(b_tau, pi), per pi
  int round = 1;               // next round index, 1-based

  static HedgeState initial(double eta, int class_size) {
    if (eta < 0.0 || eta > 1.0) {
      throw InvalidArgumentError("hedge: eta must be in [0,1]");
    }
    if (class_size < 1) throw InvalidArgumentError("hedge: empty class");
    HedgeState s;
    s.eta = eta;
    s.scores.assign(class_size, 0.0);
    return s;
  }
};

// weights[pi] proportional to exp(eta * scores[pi]), computed with the usual
// max-shift so translated scores give bit-identical results.
inline WeightVector hedge_weights(const HedgeState& state) {
  WeightVector w;
  w.p.resize(state.scores.size());
  double max_score = state.scores[0];
  for (double s : state.scores) max_score = std::max(max_score, s);
  double total = 0.0;
  for (std::size_t i = 0; i < state.scores.size(); ++i) {
    w.p[i] = std::exp(state.eta * (state.scores[i] - max_score));
    total += w.p[i];
  }
  for (double& x : w.p) x /= total;
  return w;
}

// One Hedge step: scores[pi] += F_t(b_t, pi) for every pi, evaluated at the
// reported profile. The increment is exact before the float conversion.
inline HedgeState hedge_update(HedgeState state, const ReportProfile& reports,
                               const ObjectiveFunction& objective,
                               const MechanismClass& mechanisms) {
  if (static_cast<int>(state.scores.size()) != mechanisms.size()) {
    throw InvalidArgumentError("hedge: state size != class size");
  }
  for (int j = 0; j < mechanisms.size(); ++j) {
    const Rational f =
        expected_objective(mechanisms.members[j], reports, objective);
    if (f < -1 || f > 1) {
      throw InvariantError("hedge increment outside [-1,1]");
    }
    state.scores[j] += to_double(f);
  }
  ++state.round;
  return state;
}

inline int hedge_sample(const WeightVector& weights, Rng& rng) {
  return rng.sample_weights(weights.p);
}

// ---------------------------------------------------------------------------
// Weak-DP verification
// ---------------------------------------------------------------------------

// A builder maps a report history b_{<t} to the round-t weight vector.
using WeightBuilder =
    std::function<WeightVector(std::span<const ReportProfile>)>;

inline WeightBuilder hedge_weight_builder(
    double eta, MechanismClass mechanisms,
    std::vector<ObjectiveFunction> objectives) {
  return [eta, mechanisms = std::move(mechanisms),
          objectives = std::move(objectives)](
             std::span<const ReportProfile> history) {
    HedgeState state = HedgeState::initial(eta, mechanisms.size());
    for (std::size_t tau = 0; tau < history.size(); ++tau) {
      if (tau >= objectives.size()) {
        throw InvalidArgumentError("dp check: history longer than objectives");
      }
      state = hedge_update(std::move(state), history[tau], objectives[tau],
                           mechanisms);
    }
    return hedge_weights(state);
  };
}

// log q(x)(pi) - log q(x')(pi) for two histories differing in at most one
// round's report profile (the objectives are adversary-fixed and shared).
inline double dp_log_ratio(const WeightBuilder& builder,
                           std::span<const ReportProfile> history_a,
                           std::span<const ReportProfile> history_b,
                           int mechanism_index) {
  if (history_a.size() != history_b.size()) {
    throw NotNeighborsError("histories have different lengths");
  }
  int differing = 0;
  for (std::size_t t = 0; t < history_a.size(); ++t) {
    if (history_a[t] != history_b[t]) ++differing;
  }
  if (differing > 1) {
    throw NotNeighborsError(std::to_string(differing) +
                            " rounds differ (at most 1 allowed)");
  }
  const WeightVector wa = builder(history_a);
  const WeightVector wb = builder(history_b);
  return std::log(wa.p[mechanism_index]) - std::log(wb.p[mechanism_index]);
}

struct DpCheckReport {
  double max_abs_log_ratio = 0.0;
  std::int64_t neighbor_pairs = 0;
  int worst_round = 0;       // length t-1 of the worst history, plus one
  std::string worst_history; // serialized witness
};

// Exhaustive weak-DP driver: enumerate every report history of length
// < t_max over the full profile space (non-participation included), every
// single-entry substitution, and every mechanism.
inline DpCheckReport dp_exhaustive_check(
    double eta, const MechanismClass& mechanisms,
    const std::vector<ObjectiveFunction>& objectives,
    const std::vector<std::vector<Rational>>& type_spaces, int t_max) {
  const WeightBuilder builder =
      hedge_weight_builder(eta, mechanisms, objectives);

  std::vector<ReportProfile> profiles;
  for_each_profile(type_spaces, /*include_bot=*/true,
                   [&](const ReportProfile& p) { profiles.push_back(p); });

  DpCheckReport report;
  std::vector<ReportProfile> history;
  std::function<void(int)> visit = [&](int length) {
    if (static_cast<int>(history.size()) == length) {
      const WeightVector base = builder(history);
      for (std::size_t pos = 0; pos < history.size(); ++pos) {
        const ReportProfile saved = history[pos];
        for (const auto& alt : profiles) {
          if (alt == saved) continue;
          history[pos] = alt;
          const WeightVector other = builder(history);
          ++report.neighbor_pairs;
          for (int j = 0; j < mechanisms.size(); ++j) {
            const double ratio =
                std::fabs(std::log(base.p[j]) - std::log(other.p[j]));
            if (ratio > report.max_abs_log_ratio) {
              report.max_abs_log_ratio = ratio;
              report.worst_round = length + 1;
              history[pos] = saved;
              report.worst_history = "b<";
              for (const auto& h : history) {
                report.worst_history += "(" + profile_to_string(h) + ")";
              }
              report.worst_history +=
                  ">, entry " + std::to_string(pos) + " -> (" +
                  profile_to_string(alt) + "), pi=" + std::to_string(j);
              history[pos] = alt;
            }
          }
        }
        history[pos] = saved;
      }
      return;
    }
    for (const auto& p : profiles) {
      history.push_back(p);
      visit(length);
      history.pop_back();
    }
  };

  for (int t = 1; t <= t_max; ++t) {
    history.clear();
    visit(t - 1);
  }
  return report;
}

}  // namespace nicom
