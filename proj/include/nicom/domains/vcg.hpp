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
// Permit sale via VCG with bidder-specific reserve prices. Welfare carries an
// ex-post externality c_t(o) revealed after the round.
//
#pragma once

#include <bit>
#include <functional>
#include <string>
#include <vector>

#include "nicom/core.hpp"
#include "nicom/errors.hpp"

namespace nicom::vcg {

struct Config {
  int n = 1;  // firms
  int m = 1;  // grid resolution of the valuation space

  void validate() const {
    if (n < 1 || n > 16) throw InvalidArgumentError("vcg: n must be in [1,16]");
    if (m < 1) throw InvalidArgumentError("vcg: m must be >= 1");
  }
};

inline std::vector<std::vector<Rational>> type_spaces(const Config& cfg) {
  cfg.validate();
  return std::vector<std::vector<Rational>>(cfg.n,
                                            TypeGrid::uniform(cfg.m).values);
}

// Quasi-linear utility (theta - p_i) for winners, 0 otherwise.
inline Rational utility(int agent, const Rational& type,
                        const AuctionOutcome& outcome) {
  if (!(outcome.winners >> agent & 1u)) return Rational(0);
  return type - outcome.prices[agent];
}

inline UtilityFn utility_fn(const Config&) {
  return [](int agent, const Rational& type, const Outcome& outcome) {
    const auto* a = std::get_if<AuctionOutcome>(&outcome);
    if (a == nullptr) {
      throw DomainMismatchError("auction utility on non-auction outcome");
    }
    return utility(agent, type, *a);
  };
}

// Externality c_t: a function of the winner set.
using ExternalityFn = std::function<Rational(std::uint32_t winners)>;

// c_t(o) = kappa * |o|.
inline ExternalityFn unit_cost_externality(const Rational& kappa) {
  if (kappa < 0 || kappa > 1) {
    throw InvalidArgumentError("vcg: kappa outside [0,1]");
  }
  return [kappa](std::uint32_t winners) {
    return kappa * Rational(std::popcount(winners));
  };
}

// Explicit per-subset table, indexed by winner bitmask. Intended for n <= 4.
inline ExternalityFn table_externality(const Config& cfg,
                                       std::vector<Rational> table) {
  cfg.validate();
  if (cfg.n > 4) {
    throw InvalidArgumentError("vcg: externality table only for n <= 4");
  }
  if (static_cast<int>(table.size()) != (1 << cfg.n)) {
    throw InvalidArgumentError("vcg: externality table must have 2^n entries");
  }
  if (table[0] != 0) {
    throw InvalidArgumentError("vcg: externality of the empty set must be 0");
  }
  for (const auto& c : table) {
    if (c < 0 || c > Rational(cfg.n)) {
      throw InvalidArgumentError("vcg: externality outside [0,n]");
    }
  }
  return [table = std::move(table)](std::uint32_t winners) {
    return table[winners];
  };
}

// The single-round VCG outcome under reserves w. Eligible bidders P_w(b) are
// the participants meeting their reserve; with additive welfare the argmax
// winner set is all of P_w(b) (ties at zero bids resolved toward inclusion),
// and the pivot payment
//   p*_i = max_{o subset P} sum_{j in P \ {i}} b_j 1[j in o]
//          - sum_{j in P \ {i}} b_j 1[j in o*]
// is identically zero. The reserve acts as a price floor: winners pay
// max(p*_i, w_i), which is what makes w_i "the minimum price charged".
inline Outcome outcome_for(const std::vector<Rational>& reserves,
                           const ReportProfile& bids) {
  const int n = static_cast<int>(reserves.size());
  AuctionOutcome outcome;
  outcome.prices.assign(n, Rational(0));
  std::uint32_t eligible = 0;
  for (int i = 0; i < n && i < static_cast<int>(bids.size()); ++i) {
    if (bids[i].has_value() && *bids[i] >= reserves[i]) {
      eligible |= std::uint32_t{1} << i;
    }
  }
  outcome.winners = eligible;
  for (int i = 0; i < n; ++i) {
    if (!(eligible >> i & 1u)) continue;
    // Both pivot terms equal the eligible welfare without i (bids are
    // nonnegative, so the unconstrained max keeps everyone), hence p*_i = 0
    // and the price is the reserve floor.
    const Rational pivot(0);
    outcome.prices[i] = pivot > reserves[i] ? pivot : reserves[i];
  }
  return outcome;
}

namespace detail {

inline SingleRoundMechanism reserve_mechanism(std::vector<Rational> reserves,
                                              int index) {
  SingleRoundMechanism mech;
  mech.index = index;
  mech.descriptor = "vcg(w=";
  for (std::size_t i = 0; i < reserves.size(); ++i) {
    if (i > 0) mech.descriptor += ' ';
    mech.descriptor += to_fraction_string(reserves[i]);
  }
  mech.descriptor += ")";
  mech.evaluate = [reserves = std::move(reserves)](const ReportProfile& bids) {
    return OutcomeDistribution::singleton(outcome_for(reserves, bids));
  };
  return mech;
}

}  // namespace detail

// One mechanism per reserve vector w in I_m^n; |class| = (m+1)^n.
inline MechanismClass reserve_class(const Config& cfg,
                                    std::int64_t class_budget = 100000) {
  cfg.validate();
  const TypeGrid grid = TypeGrid::uniform(cfg.m);
  std::int64_t count = 1;
  for (int i = 0; i < cfg.n; ++i) {
    count *= cfg.m + 1;
    if (count > class_budget) {
      throw BudgetExceededError("vcg reserve class size", class_budget, count);
    }
  }
  MechanismClass cls;
  cls.name = "vcg-reserve(n=" + std::to_string(cfg.n) +
             ",m=" + std::to_string(cfg.m) + ")";
  std::vector<int> digits(cfg.n, 0);
  for (int index = 0; index < count; ++index) {
    std::vector<Rational> w(cfg.n);
    for (int i = 0; i < cfg.n; ++i) w[i] = grid.values[digits[i]];
    cls.members.push_back(detail::reserve_mechanism(std::move(w), index));
    for (int i = cfg.n - 1; i >= 0; --i) {
      if (++digits[i] <= cfg.m) break;
      digits[i] = 0;
    }
  }
  return cls;
}

inline MechanismClass reserve_subset(
    const Config& cfg, const std::vector<std::vector<Rational>>& reserve_list) {
  cfg.validate();
  const TypeGrid grid = TypeGrid::uniform(cfg.m);
  MechanismClass cls;
  cls.name = "vcg-reserve-subset";
  for (const auto& w : reserve_list) {
    if (static_cast<int>(w.size()) != cfg.n) {
      throw InvalidArgumentError("vcg subset: reserve vector size != n");
    }
    for (const auto& x : w) {
      if (!grid.contains(x)) {
        throw InvalidArgumentError("vcg subset: reserve off the grid");
      }
    }
    cls.members.push_back(
        detail::reserve_mechanism(w, static_cast<int>(cls.members.size())));
  }
  if (cls.members.empty()) throw InvalidArgumentError("vcg subset: empty class");
  return cls;
}

// The commitment mechanism: a uniformly random posted price z over the 2m
// values {1/(2m), ..., 1}; bidders at or above z win and pay z. Sampling 2m
// values (rather than all 2m+1 points of I_{2m}) gives each interior
// half-step price probability exactly 1/(2m), which is what the (2m)^-2
// penalty-gap floor needs; including z = 0 would dilute the mass to
// 1/(2m+1) and the floor would fail (the gap drops to 1/(2m(2m+1))).
inline SingleRoundMechanism commitment(const Config& cfg) {
  cfg.validate();
  SingleRoundMechanism mech;
  mech.descriptor = "vcg-com(m=" + std::to_string(cfg.m) + ")";
  const int n = cfg.n;
  const int m = cfg.m;
  mech.evaluate = [n, m](const ReportProfile& bids) {
    std::vector<std::pair<Outcome, Rational>> entries;
    for (int l = 1; l <= 2 * m; ++l) {
      const Rational z(l, 2 * m);
      AuctionOutcome outcome;
      outcome.prices.assign(n, Rational(0));
      for (int i = 0; i < n && i < static_cast<int>(bids.size()); ++i) {
        if (bids[i].has_value() && *bids[i] >= z) {
          outcome.winners |= std::uint32_t{1} << i;
          outcome.prices[i] = z;
        }
      }
      entries.emplace_back(std::move(outcome), Rational(1, 2 * m));
    }
    return OutcomeDistribution::make(std::move(entries));
  };
  return mech;
}

// G_t = (sum_{i in o} theta_{i,t} - c_t(o)) / n, normalized into [-1,1].
inline ObjectiveFunction objective(const Config& cfg,
                                   ExternalityFn externality) {
  cfg.validate();
  ObjectiveFunction g;
  g.descriptor = "vcg-welfare";
  const int n = cfg.n;
  g.value = [n, externality = std::move(externality)](
                const ReportProfile& types, const Outcome& outcome) {
    const auto* a = std::get_if<AuctionOutcome>(&outcome);
    if (a == nullptr) {
      throw DomainMismatchError("vcg objective on non-auction outcome");
    }
    Rational total(0);
    for (int i = 0; i < n; ++i) {
      if ((a->winners >> i & 1u) && types[i].has_value()) total += *types[i];
    }
    total -= externality(a->winners);
    return total / n;
  };
  return g;
}

}  // namespace nicom::vcg
