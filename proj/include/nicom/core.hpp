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

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nicom/errors.hpp"
#include "nicom/rational.hpp"

namespace nicom {

// A report is either a type value or the non-participation symbol (nullopt).
using Report = std::optional<Rational>;
using ReportProfile = std::vector<Report>;

constexpr std::uint32_t kAllAgents = ~std::uint32_t{0};

// ---------------------------------------------------------------------------
// Type grids
// ---------------------------------------------------------------------------

// The 1d grid I_m = {0, 1/m, ..., 1} of exact rationals. Non-participation is
// represented outside the grid (Report == nullopt), never as a grid value.
struct TypeGrid {
  int m = 1;
  std::vector<Rational> values;

  static TypeGrid uniform(int m) {
    if (m < 1) throw InvalidArgumentError("TypeGrid: m must be >= 1");
    TypeGrid g;
    g.m = m;
    g.values.reserve(m + 1);
    for (int l = 0; l <= m; ++l) g.values.emplace_back(l, m);
    return g;
  }

  bool contains(const Rational& v) const {
    return std::find(values.begin(), values.end(), v) != values.end();
  }
};

// ---------------------------------------------------------------------------
// Outcomes
// ---------------------------------------------------------------------------

struct FacilitySite {
  Rational position;
  std::uint32_t access = 0;  // bitmask of agents allowed to use this facility

  friend bool operator==(const FacilitySite&, const FacilitySite&) = default;
};

struct FacilityOutcome {
  std::vector<FacilitySite> sites;

  friend bool operator==(const FacilityOutcome&,
                         const FacilityOutcome&) = default;
};

struct AuctionOutcome {
  std::uint32_t winners = 0;     // bitmask
  std::vector<Rational> prices;  // non-winners carry price 0

  friend bool operator==(const AuctionOutcome&,
                         const AuctionOutcome&) = default;
};

struct AllocationOutcome {
  std::vector<int> cpus;  // per-agent CPU counts; sum may be below k

  friend bool operator==(const AllocationOutcome&,
                         const AllocationOutcome&) = default;
};

using Outcome = std::variant<FacilityOutcome, AuctionOutcome, AllocationOutcome>;

namespace detail {

template <class T>
int cmp(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

template <class T, class Cmp>
int cmp_vec(const std::vector<T>& a, const std::vector<T>& b, Cmp element) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (int c = element(a[i], b[i]); c != 0) return c;
  }
  return 0;
}

inline int cmp_site(const FacilitySite& a, const FacilitySite& b) {
  if (int c = cmp(a.position, b.position); c != 0) return c;
  return cmp(a.access, b.access);
}

}  // namespace detail

// Total order over outcomes; used to canonicalize distribution supports.
inline int compare(const Outcome& a, const Outcome& b) {
  if (a.index() != b.index()) return a.index() < b.index() ? -1 : 1;
  if (const auto* fa = std::get_if<FacilityOutcome>(&a)) {
    const auto& fb = std::get<FacilityOutcome>(b);
    return detail::cmp_vec(fa->sites, fb.sites, detail::cmp_site);
  }
  if (const auto* aa = std::get_if<AuctionOutcome>(&a)) {
    const auto& ab = std::get<AuctionOutcome>(b);
    if (int c = detail::cmp(aa->winners, ab.winners); c != 0) return c;
    return detail::cmp_vec(aa->prices, ab.prices, detail::cmp<Rational>);
  }
  const auto& ca = std::get<AllocationOutcome>(a);
  const auto& cb = std::get<AllocationOutcome>(b);
  return detail::cmp_vec(ca.cpus, cb.cpus, detail::cmp<int>);
}

inline bool outcome_less(const Outcome& a, const Outcome& b) {
  return compare(a, b) < 0;
}

namespace detail {

inline std::string mask_to_string(std::uint32_t mask) {
  std::string out;
  for (int i = 0; i < 32; ++i) {
    if (mask >> i & 1u) {
      if (!out.empty()) out += '+';
      out += std::to_string(i);
    }
  }
  return out;
}

}  // namespace detail

// Canonical, comma-free string form (agents are 0-indexed). Used by the trace
// CSV and as a cache key.
inline std::string outcome_to_string(const Outcome& outcome) {
  std::string out;
  if (const auto* f = std::get_if<FacilityOutcome>(&outcome)) {
    for (std::size_t l = 0; l < f->sites.size(); ++l) {
      if (l > 0) out += '|';
      out += to_fraction_string(f->sites[l].position) + "@" +
             detail::mask_to_string(f->sites[l].access);
    }
    return "sites:" + out;
  }
  if (const auto* a = std::get_if<AuctionOutcome>(&outcome)) {
    out = "win=" + detail::mask_to_string(a->winners) + "|p=";
    for (std::size_t i = 0; i < a->prices.size(); ++i) {
      if (i > 0) out += '+';
      out += to_fraction_string(a->prices[i]);
    }
    return out;
  }
  const auto& c = std::get<AllocationOutcome>(outcome);
  out = "alloc=";
  for (std::size_t i = 0; i < c.cpus.size(); ++i) {
    if (i > 0) out += '+';
    out += std::to_string(c.cpus[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Distributions over outcomes
// ---------------------------------------------------------------------------

// A finite distribution with exact rational probabilities. Construction
// canonicalizes: duplicate outcomes are merged, zero-probability entries are
// dropped, the support is sorted, and the total mass must be exactly 1.
struct OutcomeDistribution {
  std::vector<std::pair<Outcome, Rational>> support;

  static OutcomeDistribution make(
      std::vector<std::pair<Outcome, Rational>> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) {
                return outcome_less(a.first, b.first);
              });
    OutcomeDistribution dist;
    Rational total(0);
    for (auto& [outcome, prob] : entries) {
      if (prob < 0) throw InvariantError("negative outcome probability");
      if (prob == 0) continue;
      total += prob;
      if (!dist.support.empty() &&
          compare(dist.support.back().first, outcome) == 0) {
        dist.support.back().second += prob;
      } else {
        dist.support.emplace_back(std::move(outcome), std::move(prob));
      }
    }
    if (total != 1) {
      throw InvariantError("outcome probabilities sum to " +
                           to_fraction_string(total) + ", not 1");
    }
    return dist;
  }

  static OutcomeDistribution singleton(Outcome outcome) {
    OutcomeDistribution dist;
    dist.support.emplace_back(std::move(outcome), Rational(1));
    return dist;
  }
};

// ---------------------------------------------------------------------------
// Mechanisms
// ---------------------------------------------------------------------------

// A single-round mechanism: a total map from full report profiles (with the
// non-participation symbol allowed in every slot) to an outcome distribution.
// Identity is the structural index within its class, for trace reproducibility.
struct SingleRoundMechanism {
  std::function<OutcomeDistribution(const ReportProfile&)> evaluate;
  int index = -1;  // -1 for mechanisms outside any class (e.g. commitments)
  std::string descriptor;
};

struct MechanismClass {
  std::string name;
  std::vector<SingleRoundMechanism> members;

  int size() const { return static_cast<int>(members.size()); }
};

// The planner's round objective G_t, mapping (true type profile, outcome) to
// a rational in [-1, 1]. Non-participating agents contribute zero.
struct ObjectiveFunction {
  std::function<Rational(const ReportProfile&, const Outcome&)> value;
  std::string descriptor;
};

// Domain utility u_i(theta_i, s); throws DomainMismatchError when the outcome
// payload belongs to a different domain.
using UtilityFn =
    std::function<Rational(int agent, const Rational& type, const Outcome&)>;

// ---------------------------------------------------------------------------
// Agent populations
// ---------------------------------------------------------------------------

// The agents tuple: n, T, per-round true type profiles (non-participation as
// nullopt), participation sets derived from the types, and per-agent
// non-increasing discount vectors. Immutable after construction.
struct AgentPopulation {
  int n = 0;
  int T = 0;
  std::vector<ReportProfile> theta;             // theta[t][i], t in [0, T)
  std::vector<std::vector<int>> participation;  // sorted rounds per agent
  std::vector<std::vector<Rational>> discount;  // discount[i][t]

  static AgentPopulation make(std::vector<ReportProfile> theta,
                              std::vector<std::vector<Rational>> discount) {
    AgentPopulation a;
    a.T = static_cast<int>(theta.size());
    a.n = a.T > 0 ? static_cast<int>(theta[0].size())
                  : static_cast<int>(discount.size());
    if (static_cast<int>(discount.size()) != a.n) {
      throw InvalidArgumentError("population: discount rows != n");
    }
    for (const auto& profile : theta) {
      if (static_cast<int>(profile.size()) != a.n) {
        throw InvalidArgumentError("population: ragged type profiles");
      }
    }
    a.participation.resize(a.n);
    for (int t = 0; t < a.T; ++t) {
      for (int i = 0; i < a.n; ++i) {
        if (theta[t][i].has_value()) a.participation[i].push_back(t);
      }
    }
    for (int i = 0; i < a.n; ++i) {
      if (static_cast<int>(discount[i].size()) != a.T) {
        throw InvalidArgumentError("population: discount length != T");
      }
      for (int t = 0; t < a.T; ++t) {
        const Rational& g = discount[i][t];
        if (g < 0 || g > 1) {
          throw InvalidArgumentError("population: discount outside [0,1]");
        }
        if (t + 1 < a.T && discount[i][t + 1] > g) {
          throw InvalidArgumentError("population: discount must be non-increasing");
        }
      }
    }
    a.theta = std::move(theta);
    a.discount = std::move(discount);
    return a;
  }

  bool participates(int agent, int round) const {
    return theta[round][agent].has_value();
  }

  static std::vector<std::vector<Rational>> constant_discount(int n, int T,
                                                              Rational value) {
    return std::vector<std::vector<Rational>>(
        n, std::vector<Rational>(T, value));
  }

  // gamma_i(t) = nu^t with rounds counted from 1, matching the convention in
  // which alpha <= 1/(1-nu).
  static std::vector<std::vector<Rational>> geometric_discount(
      int n, int T, const Rational& nu) {
    std::vector<Rational> row(T);
    Rational p = nu;
    for (int t = 0; t < T; ++t, p *= nu) row[t] = p;
    return std::vector<std::vector<Rational>>(n, row);
  }
};

// ---------------------------------------------------------------------------
// Traces
// ---------------------------------------------------------------------------

struct RoundRecord {
  int round = 0;  // 1-based, as in the protocol
  int sampled_hedge_index = -1;
  Rational lambda;
  ReportProfile reports;
  ReportProfile true_types;
  Outcome outcome;
  Rational objective;
  std::vector<Rational> utilities;  // per-round, undiscounted
};

struct Trace {
  std::vector<RoundRecord> rounds;
};

// ---------------------------------------------------------------------------
// Elementary operations
// ---------------------------------------------------------------------------

// Expected utility of agent i with true type theta_i when the profile b is
// reported to mechanism pi. Exact.
inline Rational expected_utility_single(const SingleRoundMechanism& mechanism,
                                        const ReportProfile& reports, int agent,
                                        const Rational& type,
                                        const UtilityFn& utility) {
  Rational total(0);
  for (const auto& [outcome, prob] : mechanism.evaluate(reports).support) {
    total += prob * utility(agent, type, outcome);
  }
  return total;
}

// F(types, pi) = E_{s ~ pi(types)} G(types, s), exact; range-checked.
inline Rational expected_objective(const SingleRoundMechanism& mechanism,
                                   const ReportProfile& types,
                                   const ObjectiveFunction& objective) {
  Rational total(0);
  for (const auto& [outcome, prob] : mechanism.evaluate(types).support) {
    Rational g = objective.value(types, outcome);
    if (g < -1 || g > 1) {
      throw InvariantError("objective value " + to_fraction_string(g) +
                           " outside [-1,1]");
    }
    total += prob * g;
  }
  return total;
}

// Long-sightedness: max over agents and rounds of
// min((1/gamma_i(t)) * sum_{tau >= t} gamma_i(tau), |T_i|). Rounds with
// gamma_i(t) = 0 are excluded (the ratio is 0/0 and such rounds carry no
// future stake); if every round of every agent is excluded the discounts are
// degenerate.
inline Rational long_sightedness(const AgentPopulation& agents) {
  bool any = false;
  Rational best(0);
  for (int i = 0; i < agents.n; ++i) {
    const auto& gamma = agents.discount[i];
    const Rational count(
        static_cast<long>(agents.participation[i].size()));
    Rational tail(0);
    std::vector<Rational> tails(agents.T);
    for (int t = agents.T - 1; t >= 0; --t) {
      tail += gamma[t];
      tails[t] = tail;
    }
    for (int t = 0; t < agents.T; ++t) {
      if (gamma[t] == 0) continue;
      Rational value = tails[t] / gamma[t];
      if (count < value) value = count;
      if (!any || value > best) best = value;
      any = true;
    }
  }
  if (!any) {
    throw DegenerateDiscountError("every discount vector is identically zero");
  }
  return best;
}

// ---------------------------------------------------------------------------
// Profile enumeration (shared by the brute-force auditors)
// ---------------------------------------------------------------------------

// All profiles over prod_i (space_i [+ bot]). The callback may return false to
// stop early.
inline void for_each_profile(
    const std::vector<std::vector<Rational>>& spaces, bool include_bot,
    const std::function<void(const ReportProfile&)>& visit) {
  const int n = static_cast<int>(spaces.size());
  ReportProfile profile(n);
  std::function<void(int)> rec = [&](int i) {
    if (i == n) {
      visit(profile);
      return;
    }
    if (include_bot) {
      profile[i] = std::nullopt;
      rec(i + 1);
    }
    for (const auto& v : spaces[i]) {
      profile[i] = v;
      rec(i + 1);
    }
  };
  rec(0);
}

inline std::string profile_to_string(const ReportProfile& profile) {
  std::string out;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (i > 0) out += ';';
    out += profile[i] ? to_fraction_string(*profile[i]) : "_";
  }
  return out;
}

}  // namespace nicom
