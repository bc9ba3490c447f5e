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
// Allocation of k CPUs among n users with all-or-nothing job utilities:
// u(theta, s) = 1[s >= theta]. Demands are integers in {1..k}.
//
#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "nicom/core.hpp"
#include "nicom/errors.hpp"

namespace nicom::resource {

struct Config {
  int n = 2;  // users; the commitment divides by n-1
  int k = 1;  // CPUs

  void validate() const {
    if (n < 2 || n > 31) throw InvalidArgumentError("resource: n must be in [2,31]");
    if (k < 1) throw InvalidArgumentError("resource: k must be >= 1");
  }
};

inline std::vector<std::vector<Rational>> type_spaces(const Config& cfg) {
  cfg.validate();
  std::vector<Rational> demands;
  for (int d = 1; d <= cfg.k; ++d) demands.emplace_back(d);
  return std::vector<std::vector<Rational>>(cfg.n, demands);
}

inline Rational utility(int agent, const Rational& type,
                        const AllocationOutcome& outcome) {
  return Rational(type <= Rational(outcome.cpus[agent]) ? 1 : 0);
}

inline UtilityFn utility_fn(const Config&) {
  return [](int agent, const Rational& type, const Outcome& outcome) {
    const auto* a = std::get_if<AllocationOutcome>(&outcome);
    if (a == nullptr) {
      throw DomainMismatchError("allocation utility on non-allocation outcome");
    }
    return utility(agent, type, *a);
  };
}

namespace detail {

// Reported demand as a clamped integer; non-participation counts as zero
// demand for the allocation rules.
inline int demand_of(const Report& report, int k) {
  if (!report.has_value()) return 0;
  long d = (numerator(*report) / denominator(*report)).convert_to<long>();
  if (Rational(d) != *report) {
    throw InvalidArgumentError("resource: non-integer demand " +
                               to_fraction_string(*report));
  }
  if (d < 0) return 0;
  if (d > k) return k;
  return static_cast<int>(d);
}

// All w in S_{n,k} (compositions of k into n non-negative parts), ascending
// lexicographically.
inline std::vector<std::vector<int>> compositions(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> w(n, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == n - 1) {
      w[i] = left;
      out.push_back(w);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      w[i] = v;
      rec(i + 1, left - v);
    }
  };
  rec(0, k);
  return out;
}

inline std::string vec_descriptor(const std::vector<int>& w) {
  std::string out = "(";
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(w[i]);
  }
  return out + ")";
}

}  // namespace detail

// Max-min fair allocation from an endowment w: everyone is first guaranteed
// min(demand, w_i); the surplus is handed out by integer progressive filling
// (one unit at a time to the least-served unsatisfied user, ties toward the
// lowest index). Units left over once all demands are met go to user 0 so
// the outcome stays in S_{n,k}.
inline std::vector<int> mmf_allocate(const std::vector<int>& endowment,
                                     const ReportProfile& reports, int k) {
  const int n = static_cast<int>(endowment.size());
  std::vector<int> demand(n, 0);
  for (int i = 0; i < n && i < static_cast<int>(reports.size()); ++i) {
    demand[i] = detail::demand_of(reports[i], k);
  }
  std::vector<int> alloc(n);
  int used = 0;
  for (int i = 0; i < n; ++i) {
    alloc[i] = std::min(demand[i], endowment[i]);
    used += alloc[i];
  }
  int surplus = k - used;
  while (surplus > 0) {
    int pick = -1;
    for (int i = 0; i < n; ++i) {
      if (alloc[i] < demand[i] && (pick < 0 || alloc[i] < alloc[pick])) {
        pick = i;
      }
    }
    if (pick < 0) {
      alloc[0] += surplus;
      break;
    }
    ++alloc[pick];
    --surplus;
  }
  return alloc;
}

// The posted-allocation class: the outcome is always the parameter vector.
inline MechanismClass posted_allocation_class(const Config& cfg,
                                              std::int64_t class_budget = 100000) {
  cfg.validate();
  const auto params = detail::compositions(cfg.n, cfg.k);
  if (static_cast<std::int64_t>(params.size()) > class_budget) {
    throw BudgetExceededError("posted-allocation class size", class_budget,
                              static_cast<std::int64_t>(params.size()));
  }
  MechanismClass cls;
  cls.name = "posted-allocation(n=" + std::to_string(cfg.n) +
             ",k=" + std::to_string(cfg.k) + ")";
  for (const auto& w : params) {
    SingleRoundMechanism mech;
    mech.index = static_cast<int>(cls.members.size());
    mech.descriptor = "pa" + detail::vec_descriptor(w);
    mech.evaluate =
        [dist = OutcomeDistribution::singleton(AllocationOutcome{w})](
            const ReportProfile&) { return dist; };
    cls.members.push_back(std::move(mech));
  }
  return cls;
}

// The max-min fair class: one mechanism per initial endowment.
inline MechanismClass max_min_fair_class(const Config& cfg,
                                         std::int64_t class_budget = 100000) {
  cfg.validate();
  const auto params = detail::compositions(cfg.n, cfg.k);
  if (static_cast<std::int64_t>(params.size()) > class_budget) {
    throw BudgetExceededError("max-min-fair class size", class_budget,
                              static_cast<std::int64_t>(params.size()));
  }
  MechanismClass cls;
  cls.name = "max-min-fair(n=" + std::to_string(cfg.n) +
             ",k=" + std::to_string(cfg.k) + ")";
  const int k = cfg.k;
  for (const auto& w : params) {
    SingleRoundMechanism mech;
    mech.index = static_cast<int>(cls.members.size());
    mech.descriptor = "mmf" + detail::vec_descriptor(w);
    mech.evaluate = [w, k](const ReportProfile& reports) {
      return OutcomeDistribution::singleton(
          AllocationOutcome{mmf_allocate(w, reports, k)});
    };
    cls.members.push_back(std::move(mech));
  }
  return cls;
}

// The commitment mechanism: sample a user i in [n] and a threshold j in [2k]
// uniformly (2nk equiprobable pairs). If the scrutinized user's demand is
// satisfied by the threshold (j > b_i), they receive exactly b_i and everyone
// else shares floor((k - b_i)/(n-1)); otherwise the scrutinized user gets
// nothing and the others share floor(k/(n-1)). A scrutinized non-participant
// is treated as never satisfied (s_i = 0, others get the full share);
// non-participants other than i always receive 0. Allocations may sum to
// less than k because of the floored shares.
inline SingleRoundMechanism commitment(const Config& cfg) {
  cfg.validate();
  SingleRoundMechanism mech;
  mech.descriptor = "resource-com(n=" + std::to_string(cfg.n) +
                    ",k=" + std::to_string(cfg.k) + ")";
  const int n = cfg.n;
  const int k = cfg.k;
  mech.evaluate = [n, k](const ReportProfile& reports) {
    std::vector<std::pair<Outcome, Rational>> entries;
    const Rational unit(1, 2 * n * k);
    for (int scrutinized = 0; scrutinized < n; ++scrutinized) {
      const bool absent =
          scrutinized >= static_cast<int>(reports.size()) ||
          !reports[scrutinized].has_value();
      const int demand =
          absent ? 0 : detail::demand_of(reports[scrutinized], k);
      for (int j = 1; j <= 2 * k; ++j) {
        const bool satisfied = !absent && j > demand;
        AllocationOutcome outcome;
        outcome.cpus.assign(n, 0);
        const int share =
            satisfied ? (k - demand) / (n - 1) : k / (n - 1);
        for (int u = 0; u < n; ++u) {
          if (u == scrutinized) {
            outcome.cpus[u] = satisfied ? demand : 0;
          } else if (u < static_cast<int>(reports.size()) &&
                     reports[u].has_value()) {
            outcome.cpus[u] = share;
          }
        }
        entries.emplace_back(std::move(outcome), unit);
      }
    }
    return OutcomeDistribution::make(std::move(entries));
  };
  return mech;
}

// G_t = (1/n) * sum_i r_{i,t} * 1[s_i >= theta_{i,t}].
inline ObjectiveFunction objective(const Config& cfg,
                                   std::vector<Rational> importance) {
  cfg.validate();
  if (static_cast<int>(importance.size()) != cfg.n) {
    throw InvalidArgumentError("resource objective: r size != n");
  }
  for (const auto& r : importance) {
    if (r < 0 || r > 1) {
      throw InvalidArgumentError("resource objective: r outside [0,1]");
    }
  }
  ObjectiveFunction g;
  g.descriptor = "jobs-completed";
  const int n = cfg.n;
  g.value = [n, importance = std::move(importance)](
                const ReportProfile& types, const Outcome& outcome) {
    const auto* a = std::get_if<AllocationOutcome>(&outcome);
    if (a == nullptr) {
      throw DomainMismatchError("resource objective on non-allocation outcome");
    }
    Rational total(0);
    for (int i = 0; i < n; ++i) {
      if (!types[i].has_value()) continue;
      total += importance[i] * utility(i, *types[i], *a);
    }
    return total / n;
  };
  return g;
}

}  // namespace nicom::resource
