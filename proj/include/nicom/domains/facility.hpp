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
// k-facility location on the 1d grid I_m: residents report their location,
// the planner places k facilities and decides who may use which facility.
//
#pragma once

#include <string>
#include <vector>

#include "nicom/core.hpp"
#include "nicom/errors.hpp"

namespace nicom::facility {

struct Config {
  int n = 1;  // residents
  int m = 1;  // grid resolution
  int k = 2;  // facilities

  void validate() const {
    if (n < 1 || n > 31) throw InvalidArgumentError("facility: n must be in [1,31]");
    if (m < 1) throw InvalidArgumentError("facility: m must be >= 1");
    if (k < 1) throw InvalidArgumentError("facility: k must be >= 1");
  }
};

inline std::vector<std::vector<Rational>> type_spaces(const Config& cfg) {
  cfg.validate();
  return std::vector<std::vector<Rational>>(cfg.n,
                                            TypeGrid::uniform(cfg.m).values);
}

// 1 minus the distance to the nearest facility the resident may use; 0 when
// no facility is accessible.
inline Rational utility(int agent, const Rational& type,
                        const FacilityOutcome& outcome) {
  bool any = false;
  Rational best(0);
  for (const auto& site : outcome.sites) {
    if (!(site.access >> agent & 1u)) continue;
    Rational d = abs(site.position - type);
    if (!any || d < best) best = std::move(d);
    any = true;
  }
  return any ? Rational(1) - best : Rational(0);
}

inline UtilityFn utility_fn(const Config&) {
  return [](int agent, const Rational& type, const Outcome& outcome) {
    const auto* f = std::get_if<FacilityOutcome>(&outcome);
    if (f == nullptr) {
      throw DomainMismatchError("facility utility on non-facility outcome");
    }
    return utility(agent, type, *f);
  };
}

namespace detail {

inline SingleRoundMechanism posted(const Config& cfg, std::vector<Rational> w,
                                   int index) {
  FacilityOutcome outcome;
  const std::uint32_t everyone = (std::uint32_t{1} << cfg.n) - 1;
  for (const auto& x : w) outcome.sites.push_back({x, everyone});
  SingleRoundMechanism mech;
  mech.index = index;
  mech.descriptor = "post(";
  for (std::size_t l = 0; l < w.size(); ++l) {
    if (l > 0) mech.descriptor += ' ';
    mech.descriptor += to_fraction_string(w[l]);
  }
  mech.descriptor += ")";
  mech.evaluate = [dist = OutcomeDistribution::singleton(std::move(outcome))](
                      const ReportProfile&) { return dist; };
  return mech;
}

}  // namespace detail

// The posted-location class: one report-independent mechanism per w in I_m^k,
// placing the facilities at w and letting every resident use any of them.
// |class| = (m+1)^k, enumerated lexicographically.
inline MechanismClass posted_location_class(const Config& cfg,
                                            std::int64_t class_budget = 100000) {
  cfg.validate();
  const TypeGrid grid = TypeGrid::uniform(cfg.m);
  std::int64_t count = 1;
  for (int l = 0; l < cfg.k; ++l) {
    count *= cfg.m + 1;
    if (count > class_budget) {
      throw BudgetExceededError("posted-location class size", class_budget,
                                count);
    }
  }
  MechanismClass cls;
  cls.name = "posted-location(m=" + std::to_string(cfg.m) +
             ",k=" + std::to_string(cfg.k) + ")";
  std::vector<int> digits(cfg.k, 0);
  for (int index = 0; index < count; ++index) {
    std::vector<Rational> w(cfg.k);
    for (int l = 0; l < cfg.k; ++l) w[l] = grid.values[digits[l]];
    cls.members.push_back(detail::posted(cfg, std::move(w), index));
    for (int l = cfg.k - 1; l >= 0; --l) {
      if (++digits[l] <= cfg.m) break;
      digits[l] = 0;
    }
  }
  return cls;
}

// A subset of the posted-location class, re-indexed contiguously.
inline MechanismClass posted_location_subset(
    const Config& cfg, const std::vector<std::vector<Rational>>& placements) {
  cfg.validate();
  const TypeGrid grid = TypeGrid::uniform(cfg.m);
  MechanismClass cls;
  cls.name = "posted-location-subset";
  for (const auto& w : placements) {
    if (static_cast<int>(w.size()) != cfg.k) {
      throw InvalidArgumentError("posted-location subset: placement size != k");
    }
    for (const auto& x : w) {
      if (!grid.contains(x)) {
        throw InvalidArgumentError("posted-location subset: " +
                                   to_fraction_string(x) + " not on the grid");
      }
    }
    cls.members.push_back(
        detail::posted(cfg, w, static_cast<int>(cls.members.size())));
  }
  if (cls.members.empty()) {
    throw InvalidArgumentError("posted-location subset: empty class");
  }
  return cls;
}

// The commitment mechanism: sample l in {1..m} uniformly, place one facility
// at (l-1)/m and the other k-1 at l/m, and let each reporting resident use
// exactly the facilities closest to their report (ties cannot occur: the two
// positions differ by exactly 1/m, whose midpoint is off the grid).
// Non-reporting residents get no access. Requires k >= 2: with one facility
// the deviator's access never degrades and the penalty gap would be 0.
inline SingleRoundMechanism commitment(const Config& cfg) {
  cfg.validate();
  if (cfg.k < 2) {
    throw InvalidArgumentError("facility commitment requires k >= 2");
  }
  SingleRoundMechanism mech;
  mech.descriptor = "facility-com(m=" + std::to_string(cfg.m) +
                    ",k=" + std::to_string(cfg.k) + ")";
  const Config copy = cfg;
  mech.evaluate = [copy](const ReportProfile& reports) {
    std::vector<std::pair<Outcome, Rational>> entries;
    for (int l = 1; l <= copy.m; ++l) {
      FacilityOutcome outcome;
      outcome.sites.push_back({Rational(l - 1, copy.m), 0});
      for (int j = 1; j < copy.k; ++j) {
        outcome.sites.push_back({Rational(l, copy.m), 0});
      }
      for (int i = 0; i < copy.n && i < static_cast<int>(reports.size()); ++i) {
        if (!reports[i].has_value()) continue;
        Rational best(-1);
        for (const auto& site : outcome.sites) {
          Rational d = abs(site.position - *reports[i]);
          if (best < 0 || d < best) best = std::move(d);
        }
        for (auto& site : outcome.sites) {
          if (abs(site.position - *reports[i]) == best) {
            site.access |= std::uint32_t{1} << i;
          }
        }
      }
      entries.emplace_back(std::move(outcome), Rational(1, copy.m));
    }
    return OutcomeDistribution::make(std::move(entries));
  };
  return mech;
}

// G_t = (1/n) * sum_i r_{i,t} u_i(theta_{i,t}, s); the 1/n normalization maps
// the planner's sum into [0,1] without disturbing the argmax over mechanisms.
inline ObjectiveFunction objective(const Config& cfg,
                                   std::vector<Rational> utilization) {
  cfg.validate();
  if (static_cast<int>(utilization.size()) != cfg.n) {
    throw InvalidArgumentError("facility objective: r size != n");
  }
  for (const auto& r : utilization) {
    if (r < 0 || r > 1) {
      throw InvalidArgumentError("facility objective: r outside [0,1]");
    }
  }
  ObjectiveFunction g;
  g.descriptor = "facility-welfare";
  const int n = cfg.n;
  g.value = [n, utilization = std::move(utilization)](
                const ReportProfile& types, const Outcome& outcome) {
    const auto* f = std::get_if<FacilityOutcome>(&outcome);
    if (f == nullptr) {
      throw DomainMismatchError("facility objective on non-facility outcome");
    }
    Rational total(0);
    for (int i = 0; i < n; ++i) {
      if (!types[i].has_value()) continue;
      total += utilization[i] * utility(i, *types[i], *f);
    }
    return total / n;
  };
  return g;
}

}  // namespace nicom::facility
