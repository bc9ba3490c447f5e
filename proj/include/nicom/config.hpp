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
// Experiment configuration: a strict JSON schema with nested sections for
// domain / agents / adversary / nicom / output. Unknown keys are errors.
// Rationals are written as "num/den" strings, non-participation as "_".
//
#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nicom/errors.hpp"
#include "nicom/rational.hpp"

namespace nicom {

using Json = nlohmann::ordered_json;

namespace cfg {

struct Domain {
  std::string kind;  // "facility" | "vcg" | "resource"
  int n = 1;
  int m = 1;  // facility, vcg
  int k = 1;  // facility, resource
};

struct MechanismClassSpec {
  // facility: "posted_location"; vcg: "vcg_reserve";
  // resource: "posted_allocation" | "max_min_fair".
  std::string kind;
  // Optional subset of parameter vectors (placements / reserves /
  // endowments); empty means the full class.
  std::vector<std::vector<Rational>> subset;
};

struct TypeScript {
  std::string kind;  // "explicit" | "constant" | "uniform"
  std::vector<std::vector<std::optional<Rational>>> profiles;  // [t][i]
  Rational constant;
  std::uint64_t seed = 0;
};

struct ParticipationSpec {
  std::string kind;  // "all" | "prefix" | "prefix_pow" | "explicit"
  int rounds = 0;    // prefix
  double h = 0.0;    // prefix_pow: the first ceil(T^h) rounds
  std::vector<std::vector<int>> sets;  // explicit, 1-based rounds
};

struct DiscountSpec {
  std::string kind;  // "constant" | "geometric" | "explicit"
  Rational constant = Rational(1);
  Rational nu;
  std::vector<std::vector<Rational>> rows;
};

struct Scalars {
  std::string kind;  // "constant" | "rounds" | "uniform"
  Rational constant;
  std::vector<std::vector<Rational>> rows;  // [t][i] (or [t][0] for kappa)
  std::uint64_t seed = 0;
  int resolution = 4;  // uniform draws live on {0..resolution}/resolution
};

struct ExternalitySpec {
  std::string kind;  // "unit_cost" | "table"
  Scalars kappa;
  std::vector<Rational> table;
};

struct StrategyOverride {
  int agent = 0;
  std::string kind;  // "scripted"
  std::vector<std::optional<Rational>> reports;  // length T, "_" for bot
};

struct NicomSpec {
  std::string mode = "auto";  // "auto" | "boundary" | "override"
  std::optional<Rational> alpha;  // default: long-sightedness of the agents
  std::optional<Rational> beta;   // default: brute-forced penalty gap
  double eta = 0.0;               // boundary / override
  Rational lambda;                // override
  // "error": reject horizons whose boundary lambda exceeds 1 (the faithful
  // schedule). "clamp": run anyway with lambda = 1 and certified = false;
  // regret measurements stay valid, the incentive certificate does not.
  std::string on_infeasible = "error";
};

struct OutputSpec {
  std::string dir = "out";
  bool write_traces = true;
};

struct Budgets {
  std::int64_t nodes = 10'000'000;
  std::int64_t enumeration = 1'000'000;
  std::int64_t class_size = 100'000;
};

struct SweepSpec {
  std::vector<std::int64_t> horizons;
  std::optional<int> replications;
};

}  // namespace cfg

struct ExperimentConfig {
  cfg::Domain domain;
  cfg::MechanismClassSpec mechanism_class;
  std::int64_t horizon = 1;
  cfg::TypeScript types;
  cfg::ParticipationSpec participation;
  cfg::DiscountSpec discount;
  cfg::Scalars utilization;          // facility / resource r_{i,t}
  cfg::ExternalitySpec externality;  // vcg only
  std::vector<cfg::StrategyOverride> strategy_overrides;
  cfg::NicomSpec nicom;
  std::uint64_t seed = 0;
  int replications = 1;
  cfg::OutputSpec output;
  cfg::Budgets budgets;
  cfg::SweepSpec sweep;

  Json canonical;  // the parsed document, for digests and provenance
};

namespace detail {

inline void require_keys(const Json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) {
      if (key == a) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

inline Rational get_rational(const Json& v, const std::string& where) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  throw ConfigError(where + " must be a \"num/den\" string or an integer");
}

inline std::optional<Rational> get_report(const Json& v,
                                          const std::string& where) {
  if (v.is_string() && v.get<std::string>() == "_") return std::nullopt;
  return get_rational(v, where);
}

template <class T>
T get_number(const Json& obj, const char* key, const std::string& where,
             T fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) {
    throw ConfigError(where + "." + key + " must be a number");
  }
  return obj.at(key).get<T>();
}

inline cfg::Scalars parse_scalars(const Json& obj, const std::string& where) {
  require_keys(obj, where, {"kind", "value", "rows", "seed", "resolution"});
  cfg::Scalars s;
  s.kind = obj.value("kind", std::string("constant"));
  if (s.kind == "constant") {
    s.constant = obj.contains("value")
                     ? get_rational(obj.at("value"), where + ".value")
                     : Rational(1);
  } else if (s.kind == "rounds") {
    if (!obj.contains("rows")) throw ConfigError(where + ".rows missing");
    for (const auto& row : obj.at("rows")) {
      std::vector<Rational> r;
      for (const auto& v : row) r.push_back(get_rational(v, where + ".rows"));
      s.rows.push_back(std::move(r));
    }
  } else if (s.kind == "uniform") {
    s.seed = get_number<std::uint64_t>(obj, "seed", where, 0);
    s.resolution = get_number<int>(obj, "resolution", where, 4);
    if (s.resolution < 1) throw ConfigError(where + ".resolution must be >= 1");
  } else {
    throw ConfigError(where + ".kind '" + s.kind + "' unknown");
  }
  return s;
}

}  // namespace detail

inline ExperimentConfig parse_experiment_config(const Json& doc) {
  using detail::get_number;
  using detail::get_rational;
  using detail::require_keys;

  require_keys(doc, "config",
               {"domain", "mechanism_class", "horizon", "agents", "adversary",
                "strategies", "nicom", "seed", "replications", "output",
                "budgets", "sweep"});
  ExperimentConfig out;
  out.canonical = doc;

  // domain
  if (!doc.contains("domain")) throw ConfigError("domain section missing");
  const Json& dom = doc.at("domain");
  require_keys(dom, "domain", {"kind", "n", "m", "k"});
  out.domain.kind = dom.value("kind", std::string());
  out.domain.n = get_number<int>(dom, "n", "domain", 1);
  out.domain.m = get_number<int>(dom, "m", "domain", 1);
  out.domain.k = get_number<int>(dom, "k", "domain", 1);
  if (out.domain.kind != "facility" && out.domain.kind != "vcg" &&
      out.domain.kind != "resource") {
    throw ConfigError("domain.kind must be facility|vcg|resource");
  }

  // mechanism class
  if (doc.contains("mechanism_class")) {
    const Json& mc = doc.at("mechanism_class");
    require_keys(mc, "mechanism_class", {"kind", "subset"});
    out.mechanism_class.kind = mc.value("kind", std::string());
    if (mc.contains("subset")) {
      for (const auto& row : mc.at("subset")) {
        std::vector<Rational> w;
        for (const auto& v : row) {
          w.push_back(get_rational(v, "mechanism_class.subset"));
        }
        out.mechanism_class.subset.push_back(std::move(w));
      }
    }
  }
  if (out.mechanism_class.kind.empty()) {
    out.mechanism_class.kind = out.domain.kind == "facility"
                                   ? "posted_location"
                                   : (out.domain.kind == "vcg"
                                          ? "vcg_reserve"
                                          : "posted_allocation");
  }

  out.horizon = get_number<std::int64_t>(doc, "horizon", "config", 1);
  if (out.horizon < 1) throw ConfigError("horizon must be >= 1");

  // agents
  if (!doc.contains("agents")) throw ConfigError("agents section missing");
  const Json& ag = doc.at("agents");
  require_keys(ag, "agents", {"types", "participation", "discount"});
  {
    const Json& ty = ag.contains("types") ? ag.at("types") : Json::object();
    require_keys(ty, "agents.types", {"kind", "profiles", "value", "seed"});
    out.types.kind = ty.value("kind", std::string("uniform"));
    if (out.types.kind == "explicit") {
      for (const auto& row : ty.at("profiles")) {
        std::vector<std::optional<Rational>> profile;
        for (const auto& v : row) {
          profile.push_back(detail::get_report(v, "agents.types.profiles"));
        }
        out.types.profiles.push_back(std::move(profile));
      }
    } else if (out.types.kind == "constant") {
      out.types.constant = get_rational(ty.at("value"), "agents.types.value");
    } else if (out.types.kind == "uniform") {
      out.types.seed = get_number<std::uint64_t>(ty, "seed", "agents.types", 0);
    } else {
      throw ConfigError("agents.types.kind unknown");
    }
  }
  {
    const Json& pa = ag.contains("participation") ? ag.at("participation")
                                                  : Json::object();
    require_keys(pa, "agents.participation", {"kind", "rounds", "h", "sets"});
    out.participation.kind = pa.value("kind", std::string("all"));
    out.participation.rounds =
        get_number<int>(pa, "rounds", "agents.participation", 0);
    out.participation.h = get_number<double>(pa, "h", "agents.participation", 0.0);
    if (pa.contains("sets")) {
      for (const auto& row : pa.at("sets")) {
        std::vector<int> set;
        for (const auto& v : row) set.push_back(v.get<int>());
        out.participation.sets.push_back(std::move(set));
      }
    }
  }
  {
    const Json& di = ag.contains("discount") ? ag.at("discount") : Json::object();
    require_keys(di, "agents.discount", {"kind", "value", "nu", "rows"});
    out.discount.kind = di.value("kind", std::string("constant"));
    if (di.contains("value")) {
      out.discount.constant = get_rational(di.at("value"), "agents.discount.value");
    }
    if (di.contains("nu")) {
      out.discount.nu = get_rational(di.at("nu"), "agents.discount.nu");
    }
    if (di.contains("rows")) {
      for (const auto& row : di.at("rows")) {
        std::vector<Rational> r;
        for (const auto& v : row) {
          r.push_back(get_rational(v, "agents.discount.rows"));
        }
        out.discount.rows.push_back(std::move(r));
      }
    }
  }

  // adversary
  {
    const Json& adv = doc.contains("adversary") ? doc.at("adversary")
                                                : Json::object();
    require_keys(adv, "adversary", {"utilization", "externality"});
    out.utilization =
        adv.contains("utilization")
            ? detail::parse_scalars(adv.at("utilization"), "adversary.utilization")
            : cfg::Scalars{.kind = "constant", .constant = Rational(1)};
    if (adv.contains("externality")) {
      const Json& ex = adv.at("externality");
      require_keys(ex, "adversary.externality", {"kind", "kappa", "values"});
      out.externality.kind = ex.value("kind", std::string("unit_cost"));
      if (out.externality.kind == "unit_cost") {
        out.externality.kappa =
            ex.contains("kappa")
                ? detail::parse_scalars(ex.at("kappa"),
                                        "adversary.externality.kappa")
                : cfg::Scalars{.kind = "constant", .constant = Rational(0)};
      } else if (out.externality.kind == "table") {
        for (const auto& v : ex.at("values")) {
          out.externality.table.push_back(
              get_rational(v, "adversary.externality.values"));
        }
      } else {
        throw ConfigError("adversary.externality.kind unknown");
      }
    } else {
      out.externality.kind = "unit_cost";
      out.externality.kappa = cfg::Scalars{.kind = "constant",
                                           .constant = Rational(0)};
    }
  }

  // strategies
  {
    const Json& st = doc.contains("strategies") ? doc.at("strategies")
                                                : Json::object();
    require_keys(st, "strategies", {"default", "overrides"});
    const std::string def = st.value("default", std::string("truthful"));
    if (def != "truthful") {
      throw ConfigError("strategies.default must be 'truthful'");
    }
    if (st.contains("overrides")) {
      for (const auto& entry : st.at("overrides")) {
        require_keys(entry, "strategies.overrides", {"agent", "kind", "reports"});
        cfg::StrategyOverride o;
        o.agent = entry.at("agent").get<int>();
        o.kind = entry.value("kind", std::string("scripted"));
        if (o.kind != "scripted") {
          throw ConfigError("strategies.overrides.kind must be 'scripted'");
        }
        for (const auto& v : entry.at("reports")) {
          o.reports.push_back(
              detail::get_report(v, "strategies.overrides.reports"));
        }
        out.strategy_overrides.push_back(std::move(o));
      }
    }
  }

  // nicom
  {
    const Json& ni = doc.contains("nicom") ? doc.at("nicom") : Json::object();
    require_keys(ni, "nicom",
                 {"mode", "alpha", "beta", "eta", "lambda", "on_infeasible"});
    out.nicom.mode = ni.value("mode", std::string("auto"));
    if (ni.contains("alpha")) {
      out.nicom.alpha = get_rational(ni.at("alpha"), "nicom.alpha");
    }
    if (ni.contains("beta")) {
      out.nicom.beta = get_rational(ni.at("beta"), "nicom.beta");
    }
    out.nicom.eta = get_number<double>(ni, "eta", "nicom", 0.0);
    if (ni.contains("lambda")) {
      out.nicom.lambda = get_rational(ni.at("lambda"), "nicom.lambda");
    }
    out.nicom.on_infeasible = ni.value("on_infeasible", std::string("error"));
    if (out.nicom.mode != "auto" && out.nicom.mode != "boundary" &&
        out.nicom.mode != "override") {
      throw ConfigError("nicom.mode must be auto|boundary|override");
    }
    if (out.nicom.on_infeasible != "error" &&
        out.nicom.on_infeasible != "clamp") {
      throw ConfigError("nicom.on_infeasible must be error|clamp");
    }
  }

  out.seed = get_number<std::uint64_t>(doc, "seed", "config", 0);
  out.replications = get_number<int>(doc, "replications", "config", 1);
  if (out.replications < 1) throw ConfigError("replications must be >= 1");

  if (doc.contains("output")) {
    const Json& o = doc.at("output");
    require_keys(o, "output", {"dir", "write_traces"});
    out.output.dir = o.value("dir", std::string("out"));
    if (o.contains("write_traces")) {
      out.output.write_traces = o.at("write_traces").get<bool>();
    }
  }

  if (doc.contains("budgets")) {
    const Json& b = doc.at("budgets");
    require_keys(b, "budgets", {"nodes", "enumeration", "class_size"});
    out.budgets.nodes =
        get_number<std::int64_t>(b, "nodes", "budgets", out.budgets.nodes);
    out.budgets.enumeration = get_number<std::int64_t>(
        b, "enumeration", "budgets", out.budgets.enumeration);
    out.budgets.class_size = get_number<std::int64_t>(
        b, "class_size", "budgets", out.budgets.class_size);
  }

  if (doc.contains("sweep")) {
    const Json& s = doc.at("sweep");
    require_keys(s, "sweep", {"horizons", "replications"});
    if (s.contains("horizons")) {
      for (const auto& v : s.at("horizons")) {
        out.sweep.horizons.push_back(v.get<std::int64_t>());
      }
    }
    if (s.contains("replications")) {
      out.sweep.replications = s.at("replications").get<int>();
    }
  }

  return out;
}

inline ExperimentConfig load_experiment_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  return parse_experiment_config(doc);
}

// Stable 64-bit FNV-1a digest of the canonical config serialization.
inline std::string config_digest(const Json& canonical) {
  const std::string text = canonical.dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(buf);
}

}  // namespace nicom
