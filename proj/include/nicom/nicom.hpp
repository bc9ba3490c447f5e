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
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nicom/core.hpp"
#include "nicom/errors.hpp"
#include "nicom/learning.hpp"
#include "nicom/rng.hpp"

namespace nicom {

// ---------------------------------------------------------------------------
// Parameters of the commitment lottery
// ---------------------------------------------------------------------------

// (eta, lambda, beta, alpha_T) with the certificate lambda*beta/(16*eta) >=
// alpha_T. The 16 is the smallest constant for which the incentive argument
// goes through when the learner is Hedge (a weak 4*eta-DP sequence feeding a
// condition with another factor of 4). lambda is kept as an exact rational;
// eta is a float, and its exact dyadic value is what enters the certificate.
struct NicomParams {
  double eta = 0.0;
  Rational lambda;
  Rational beta;
  Rational alpha_T;
  bool certified = false;

  // lambda*beta >= 16*eta*alpha_T, with 1e-12 slack for user-supplied floats.
  bool certificate_holds() const {
    const Rational lhs = lambda * beta;
    const Rational rhs =
        Rational(16) * rational_from_double(eta) * alpha_T;
    return lhs >= rhs || to_double(rhs - lhs) <= 1e-12;
  }
};

namespace detail {

// lambda(T) <= 1 requires T >= 256 * alpha / beta^2.
inline std::int64_t min_certifiable_horizon(const Rational& alpha,
                                            const Rational& beta) {
  return ceil_big(Rational(256) * alpha / (beta * beta))
      .convert_to<std::int64_t>();
}

}  // namespace detail

// The regret-optimal schedule: eta = 1/sqrt(alpha_T * T) and lambda at the
// certification boundary, lambda = 16 * eta * alpha_T / beta. lambda > 1
// means no certifiable lottery exists at this horizon.
inline NicomParams nicom_params(const Rational& alpha_T, std::int64_t T,
                                const Rational& beta) {
  if (alpha_T < 1) throw InvalidArgumentError("nicom_params: alpha_T must be >= 1");
  if (T < 1) throw InvalidArgumentError("nicom_params: T must be >= 1");
  if (beta <= 0) throw InvalidArgumentError("nicom_params: beta must be > 0");
  if (alpha_T * Rational(T) < 1) {
    throw InvalidArgumentError("nicom_params: alpha_T * T must be >= 1");
  }
  NicomParams p;
  p.eta = 1.0 / std::sqrt(to_double(alpha_T * Rational(T)));
  p.alpha_T = alpha_T;
  p.beta = beta;
  p.lambda = Rational(16) * alpha_T * rational_from_double(p.eta) / beta;
  if (p.lambda > 1) {
    throw InfeasibleParamsError(
        "lambda = " + std::to_string(to_double(p.lambda)) + " at T = " +
            std::to_string(T),
        detail::min_certifiable_horizon(alpha_T, beta));
  }
  p.certified = true;
  return p;
}

// Boundary-certified parameters for a caller-chosen learning rate: lambda =
// 16 * eta * alpha_T / beta. Useful when the certificate matters but the
// regret-optimal eta is too large for the horizon.
inline NicomParams nicom_params_for_eta(const Rational& alpha_T,
                                        const Rational& beta, double eta) {
  if (alpha_T < 1) throw InvalidArgumentError("nicom_params_for_eta: alpha_T must be >= 1");
  if (beta <= 0) throw InvalidArgumentError("nicom_params_for_eta: beta must be > 0");
  if (eta < 0.0 || eta > 1.0) {
    throw InvalidArgumentError("nicom_params_for_eta: eta must be in [0,1]");
  }
  NicomParams p;
  p.eta = eta;
  p.alpha_T = alpha_T;
  p.beta = beta;
  p.lambda = Rational(16) * alpha_T * rational_from_double(eta) / beta;
  if (p.lambda > 1) {
    const double max_eta = to_double(beta / (Rational(16) * alpha_T));
    throw InfeasibleParamsError(
        "lambda = " + std::to_string(to_double(p.lambda)) +
            "; largest certifiable eta is " + std::to_string(max_eta),
        0);
  }
  p.certified = true;
  return p;
}

// Explicit, possibly-uncertified parameters (override mode).
inline NicomParams nicom_params_override(double eta, Rational lambda,
                                         Rational beta, Rational alpha_T) {
  if (eta < 0.0 || eta > 1.0) {
    throw InvalidArgumentError("params: eta must be in [0,1]");
  }
  if (lambda < 0 || lambda > 1) {
    throw InvalidArgumentError("params: lambda must be in [0,1]");
  }
  NicomParams p;
  p.eta = eta;
  p.lambda = std::move(lambda);
  p.beta = std::move(beta);
  p.alpha_T = std::move(alpha_T);
  p.certified = p.beta > 0 && p.certificate_holds();
  return p;
}

// ---------------------------------------------------------------------------
// The per-round mixture mechanism
// ---------------------------------------------------------------------------

// Exact rational mixture of two distributions: (1-lambda)*a + lambda*b.
inline OutcomeDistribution mix_distributions(const Rational& lambda,
                                             const OutcomeDistribution& a,
                                             const OutcomeDistribution& b) {
  std::vector<std::pair<Outcome, Rational>> entries;
  entries.reserve(a.support.size() + b.support.size());
  const Rational one_minus(Rational(1) - lambda);
  for (const auto& [outcome, prob] : a.support) {
    entries.emplace_back(outcome, one_minus * prob);
  }
  for (const auto& [outcome, prob] : b.support) {
    entries.emplace_back(outcome, lambda * prob);
  }
  return OutcomeDistribution::make(std::move(entries));
}

// The round mechanism pi_t = (1-lambda) * pi_sr + lambda * pi_com. The agents
// observe the full descriptor (lambda, the realized sampled pi_sr, pi_com)
// before reporting; the lottery between the two components resolves after
// reports, inside the outcome draw.
struct MixtureMechanism {
  Rational lambda;
  SingleRoundMechanism hedge_component;  // the sampled pi_sr
  SingleRoundMechanism commitment;

  OutcomeDistribution evaluate(const ReportProfile& reports) const {
    if (lambda == 0) return hedge_component.evaluate(reports);
    if (lambda == 1) return commitment.evaluate(reports);
    return mix_distributions(lambda, hedge_component.evaluate(reports),
                             commitment.evaluate(reports));
  }

  SingleRoundMechanism as_single_round() const {
    SingleRoundMechanism m;
    m.index = hedge_component.index;
    m.descriptor = "mix(" + to_fraction_string(lambda) + "; " +
                   hedge_component.descriptor + "; " + commitment.descriptor +
                   ")";
    m.evaluate = [copy = *this](const ReportProfile& b) {
      return copy.evaluate(b);
    };
    return m;
  }
};

// Build the round-t mixture from an already-folded Hedge state.
inline MixtureMechanism nicom_round(const HedgeState& state,
                                    const NicomParams& params,
                                    const MechanismClass& mechanisms,
                                    const SingleRoundMechanism& commitment,
                                    Rng& rng) {
  const WeightVector weights = hedge_weights(state);
  const int sampled = hedge_sample(weights, rng);
  return MixtureMechanism{params.lambda, mechanisms.members[sampled],
                          commitment};
}

// Build the round mechanism directly from the protocol histories.
inline MixtureMechanism nicom_round(std::span<const ReportProfile> reports,
                                    std::span<const ObjectiveFunction> objectives,
                                    const NicomParams& params,
                                    const MechanismClass& mechanisms,
                                    const SingleRoundMechanism& commitment,
                                    Rng& rng) {
  if (reports.size() != objectives.size()) {
    throw InvalidArgumentError("nicom_round: misaligned histories");
  }
  HedgeState state = HedgeState::initial(params.eta, mechanisms.size());
  for (std::size_t tau = 0; tau < reports.size(); ++tau) {
    state = hedge_update(std::move(state), reports[tau], objectives[tau],
                         mechanisms);
  }
  return nicom_round(state, params, mechanisms, commitment, rng);
}

// ---------------------------------------------------------------------------
// Penalty gap (exhaustive)
// ---------------------------------------------------------------------------

struct PenaltyGapWitness {
  int agent = 0;
  Rational true_type;
  Rational deviation;
  ReportProfile others;  // size n-1, in increasing agent order
};

struct PenaltyGapResult {
  // Empty when no agent has two types to choose between (the minimization
  // domain is empty and the gap is vacuously unbounded).
  std::optional<Rational> gap;
  std::optional<PenaltyGapWitness> witness;
  std::int64_t cases = 0;
};

// Exact minimum over all i, theta_i, b_i != theta_i and all opponent report
// profiles (non-participation included) of the truthful-minus-deviating
// expected utility under pi. Full brute force.
inline PenaltyGapResult penalty_gap(
    const SingleRoundMechanism& mechanism,
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
    throw BudgetExceededError("penalty gap enumeration", budget, required);
  }

  PenaltyGapResult result;
  for (int i = 0; i < n; ++i) {
    const auto& own = type_spaces[i];
    if (own.size() < 2) continue;
    std::vector<std::vector<Rational>> other_spaces;
    for (int j = 0; j < n; ++j) {
      if (j != i) other_spaces.push_back(type_spaces[j]);
    }
    for_each_profile(other_spaces, /*include_bot=*/true,
                     [&](const ReportProfile& others) {
      // Insert each candidate report of agent i into the full profile once,
      // then score every (theta, b) pair off the cached expectations.
      ReportProfile full(n);
      for (int j = 0, idx = 0; j < n; ++j) {
        if (j != i) full[j] = others[idx++];
      }
      // exp_util[x][t]: expected utility of true type own[t] when i reports
      // own[x].
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
          ++result.cases;
          Rational gap = exp_util[t][t] - exp_util[x][t];
          if (!result.gap || gap < *result.gap) {
            result.gap = std::move(gap);
            result.witness =
                PenaltyGapWitness{i, own[t], own[x], others};
          }
        }
      }
    });
  }
  return result;
}

// ---------------------------------------------------------------------------
// Optimal benchmark and regret
// ---------------------------------------------------------------------------

// Opt(Pi; A) = max_pi sum_t F_t(theta_t, pi), exact, ties toward the lowest
// index. Returns (value, argmax index).
inline std::pair<Rational, int> opt_value(
    const MechanismClass& mechanisms, const AgentPopulation& agents,
    std::span<const ObjectiveFunction> objectives) {
  if (static_cast<int>(objectives.size()) < agents.T) {
    throw InvalidArgumentError("opt_value: fewer objectives than rounds");
  }
  Rational best(0);
  int best_index = 0;
  for (int j = 0; j < mechanisms.size(); ++j) {
    Rational total(0);
    for (int t = 0; t < agents.T; ++t) {
      total += expected_objective(mechanisms.members[j], agents.theta[t],
                                  objectives[t]);
    }
    if (j == 0 || total > best) {
      best = std::move(total);
      best_index = j;
    }
  }
  return {best, best_index};
}

// Reg = Opt - realized cumulative objective. A single-sample estimate of the
// expectation; replication averaging happens in the harness.
inline Rational regret(const Trace& trace, const MechanismClass& mechanisms,
                       const AgentPopulation& agents,
                       std::span<const ObjectiveFunction> objectives) {
  if (static_cast<int>(trace.rounds.size()) != agents.T) {
    throw InvalidArgumentError("regret: trace length != T");
  }
  Rational realized(0);
  for (const auto& record : trace.rounds) realized += record.objective;
  return opt_value(mechanisms, agents, objectives).first - realized;
}

}  // namespace nicom
