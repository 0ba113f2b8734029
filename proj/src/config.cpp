#include "ppa/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ppa {

namespace {

struct Collector {
  std::vector<std::string> errors;
  void add(std::string msg) { errors.push_back(std::move(msg)); }
  bool ok() const { return errors.empty(); }
};

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where, Collector& errs) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return key == k; }) == allowed.end()) {
      errs.add(where + ": unknown key '" + key + "'");
    }
  }
}

bool require_object(const json& j, const std::string& where, Collector& errs) {
  if (!j.is_object()) {
    errs.add(where + ": expected an object");
    return false;
  }
  return true;
}

std::optional<double> get_number(const json& obj, const char* key, const std::string& where,
                                 Collector& errs) {
  if (!obj.contains(key)) return std::nullopt;
  if (!obj[key].is_number()) {
    errs.add(where + ": '" + key + "' must be a number");
    return std::nullopt;
  }
  return obj[key].get<double>();
}

std::optional<long> get_integer(const json& obj, const char* key, const std::string& where,
                                Collector& errs) {
  if (!obj.contains(key)) return std::nullopt;
  if (!obj[key].is_number_integer()) {
    errs.add(where + ": '" + key + "' must be an integer");
    return std::nullopt;
  }
  return obj[key].get<long>();
}

std::optional<SpaceSpec> parse_space_spec(const json& j, const std::string& where,
                                          Collector& errs) {
  if (!require_object(j, where, errs)) return std::nullopt;
  if (!j.contains("kind") || !j["kind"].is_string()) {
    errs.add(where + ": needs a string 'kind'");
    return std::nullopt;
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "euclidean" || kind == "poincare_ball") {
    check_keys(j, {"kind", "dim", "boundary_margin"}, where, errs);
    const auto dim = get_integer(j, "dim", where, errs);
    if (!dim) {
      errs.add(where + ": '" + kind + "' needs an integer 'dim'");
      return std::nullopt;
    }
    if (kind == "euclidean") {
      if (j.contains("boundary_margin")) errs.add(where + ": unknown key 'boundary_margin'");
      return SpaceSpec::euclidean(static_cast<int>(*dim));
    }
    const double margin = get_number(j, "boundary_margin", where, errs).value_or(1e-9);
    return SpaceSpec::poincare_ball(static_cast<int>(*dim), margin);
  }
  if (kind == "spider") {
    check_keys(j, {"kind", "legs"}, where, errs);
    const auto legs = get_integer(j, "legs", where, errs);
    if (!legs) {
      errs.add(where + ": 'spider' needs an integer 'legs'");
      return std::nullopt;
    }
    return SpaceSpec::spider(static_cast<int>(*legs));
  }
  if (kind == "product") {
    check_keys(j, {"kind", "components"}, where, errs);
    if (!j.contains("components") || !j["components"].is_array() || j["components"].empty()) {
      errs.add(where + ": 'product' needs a nonempty 'components' array");
      return std::nullopt;
    }
    std::vector<SpaceSpec> parts;
    for (std::size_t i = 0; i < j["components"].size(); ++i) {
      auto part = parse_space_spec(j["components"][i],
                                   where + ".components[" + std::to_string(i) + "]", errs);
      if (!part) return std::nullopt;
      parts.push_back(std::move(*part));
    }
    return SpaceSpec::product(std::move(parts));
  }
  errs.add(where + ": unknown space kind '" + kind + "'");
  return std::nullopt;
}

std::optional<Point> parse_point(const json& j, const GeodesicSpace& space,
                                 const std::string& where, Collector& errs) {
  std::optional<Point> p;
  if (const auto* prod = dynamic_cast<const ProductSpace*>(&space)) {
    if (!j.is_array() || j.size() != prod->arity()) {
      errs.add(where + ": expected an array of " + std::to_string(prod->arity()) +
               " component points");
      return std::nullopt;
    }
    std::vector<Point> parts;
    for (std::size_t i = 0; i < prod->arity(); ++i) {
      auto part =
          parse_point(j[i], prod->component(i), where + "[" + std::to_string(i) + "]", errs);
      if (!part) return std::nullopt;
      parts.push_back(std::move(*part));
    }
    p = Point::product(std::move(parts));
  } else if (dynamic_cast<const SpiderSpace*>(&space)) {
    if (!require_object(j, where, errs)) return std::nullopt;
    check_keys(j, {"leg", "radius"}, where, errs);
    const auto leg = get_integer(j, "leg", where, errs);
    const auto radius = get_number(j, "radius", where, errs);
    if (!leg || !radius) {
      errs.add(where + ": spider points need 'leg' and 'radius'");
      return std::nullopt;
    }
    p = Point::spider(static_cast<int>(*leg), *radius);
  } else {
    if (!j.is_array()) {
      errs.add(where + ": expected a coordinate array");
      return std::nullopt;
    }
    std::vector<double> coords;
    for (const auto& v : j) {
      if (!v.is_number()) {
        errs.add(where + ": coordinates must be numbers");
        return std::nullopt;
      }
      coords.push_back(v.get<double>());
    }
    p = Point::vector(std::move(coords));
  }
  if (p && !space.contains(*p)) {
    errs.add(where + ": point " + p->to_string() + " is not a member of " + space.description());
    return std::nullopt;
  }
  return p;
}

std::optional<ObjectiveSpec> parse_objective_spec(const json& j, const GeodesicSpace& space,
                                                  const std::string& where, Collector& errs) {
  if (!require_object(j, where, errs)) return std::nullopt;
  if (!j.contains("kind") || !j["kind"].is_string()) {
    errs.add(where + ": needs a string 'kind'");
    return std::nullopt;
  }
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "squared_distance" || kind == "distance" || kind == "gaussian_well") {
    check_keys(j, {"kind", "target", "coefficient"}, where, errs);
    if (!j.contains("target")) {
      errs.add(where + ": '" + kind + "' needs a 'target' point");
      return std::nullopt;
    }
    auto target = parse_point(j["target"], space, where + ".target", errs);
    if (!target) return std::nullopt;
    const double c = get_number(j, "coefficient", where, errs).value_or(1.0);
    if (kind == "squared_distance") return ObjectiveSpec::squared_distance(*target, c);
    if (kind == "distance") return ObjectiveSpec::distance(*target, c);
    return ObjectiveSpec::gaussian_well(*target, c);
  }
  if (kind == "ball_indicator") {
    check_keys(j, {"kind", "inner", "center", "radius"}, where, errs);
    if (!j.contains("inner") || !j.contains("center") || !j.contains("radius")) {
      errs.add(where + ": 'ball_indicator' needs 'inner', 'center' and 'radius'");
      return std::nullopt;
    }
    auto inner = parse_objective_spec(j["inner"], space, where + ".inner", errs);
    auto center = parse_point(j["center"], space, where + ".center", errs);
    const auto radius = get_number(j, "radius", where, errs);
    if (!inner || !center || !radius) return std::nullopt;
    return ObjectiveSpec::ball_indicator(std::move(*inner), *center, *radius);
  }
  if (kind == "tabulated") {
    check_keys(j, {"kind", "knots", "values", "weak_alpha", "strong_qc_alpha"}, where, errs);
    if (!j.contains("knots") || !j["knots"].is_array() || !j.contains("values") ||
        !j["values"].is_array()) {
      errs.add(where + ": 'tabulated' needs 'knots' and 'values' arrays");
      return std::nullopt;
    }
    std::vector<double> knots, values;
    for (const auto& v : j["knots"]) knots.push_back(v.get<double>());
    for (const auto& v : j["values"]) values.push_back(v.get<double>());
    auto spec = ObjectiveSpec::tabulated(std::move(knots), std::move(values));
    spec.weak_alpha_override = get_number(j, "weak_alpha", where, errs);
    spec.strong_qc_alpha_override = get_number(j, "strong_qc_alpha", where, errs);
    return spec;
  }
  errs.add(where + ": unknown objective kind '" + kind + "'");
  return std::nullopt;
}

std::optional<Schedule> parse_schedule(const json& j, const std::string& where, Collector& errs) {
  if (!require_object(j, where, errs)) return std::nullopt;
  if (!j.contains("kind") || !j["kind"].is_string()) {
    errs.add(where + ": needs a string 'kind'");
    return std::nullopt;
  }
  const std::string kind = j["kind"].get<std::string>();
  std::optional<Schedule> sched;
  if (kind == "constant") {
    check_keys(j, {"kind", "value", "lower_bound", "divergent_sum"}, where, errs);
    const auto value = get_number(j, "value", where, errs);
    if (!value) {
      errs.add(where + ": 'constant' needs a 'value'");
      return std::nullopt;
    }
    sched = Schedule::constant(*value);
  } else if (kind == "harmonic") {
    check_keys(j, {"kind", "scale", "lower_bound", "divergent_sum"}, where, errs);
    const auto scale = get_number(j, "scale", where, errs);
    if (!scale) {
      errs.add(where + ": 'harmonic' needs a 'scale'");
      return std::nullopt;
    }
    sched = Schedule::harmonic(*scale);
  } else if (kind == "sequence") {
    check_keys(j, {"kind", "values", "lower_bound", "divergent_sum"}, where, errs);
    if (!j.contains("values") || !j["values"].is_array() || j["values"].empty()) {
      errs.add(where + ": 'sequence' needs a nonempty 'values' array");
      return std::nullopt;
    }
    std::vector<double> values;
    for (const auto& v : j["values"]) {
      if (!v.is_number()) {
        errs.add(where + ": sequence values must be numbers");
        return std::nullopt;
      }
      values.push_back(v.get<double>());
    }
    sched = Schedule::sequence(std::move(values), false);
  } else {
    errs.add(where + ": unknown schedule kind '" + kind + "'");
    return std::nullopt;
  }
  if (j.contains("divergent_sum")) {
    if (!j["divergent_sum"].is_boolean()) {
      errs.add(where + ": 'divergent_sum' must be a boolean");
    } else {
      sched->divergent = j["divergent_sum"].get<bool>();
    }
  }
  sched->lower_bound = get_number(j, "lower_bound", where, errs);
  return sched;
}

bool involves_poincare(const SpaceSpec& spec) {
  if (spec.kind == SpaceSpec::Kind::poincare_ball) return true;
  return std::any_of(spec.components.begin(), spec.components.end(), involves_poincare);
}

}  // namespace

ParseOutcome parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    return ParseOutcome{std::nullopt, {std::string("config: invalid JSON: ") + e.what()}};
  }
  return parse_config_json(doc);
}

ParseOutcome parse_config_json(const json& doc) {
  Collector errs;
  ExperimentConfig cfg;
  cfg.echo = doc;

  if (!doc.is_object()) {
    return ParseOutcome{std::nullopt, {"config: root must be an object"}};
  }
  check_keys(doc,
             {"version", "space", "objective", "x0", "schedule", "stop", "tolerances", "seed",
              "monitors", "output"},
             "config", errs);

  if (!doc.contains("version") || !doc["version"].is_number_integer() ||
      doc["version"].get<int>() != 1) {
    errs.add("config: 'version' must be the integer 1");
  }
  for (const char* key : {"space", "objective", "x0", "schedule"}) {
    if (!doc.contains(key)) errs.add(std::string("config: missing required key '") + key + "'");
  }

  if (doc.contains("space")) {
    if (auto spec = parse_space_spec(doc["space"], "config.space", errs)) {
      cfg.space_spec = *spec;
      try {
        cfg.space = make_space(*spec);
      } catch (const ConfigError& e) {
        errs.add(std::string("config.space: ") + e.what());
      }
    }
  }

  if (cfg.space && doc.contains("objective")) {
    if (auto ospec = parse_objective_spec(doc["objective"], *cfg.space, "config.objective", errs)) {
      try {
        cfg.objective = make_objective(cfg.space, *ospec);
      } catch (const ConfigError& e) {
        errs.add(std::string("config.objective: ") + e.what());
      }
    }
  }

  if (cfg.space && doc.contains("x0")) {
    if (auto x0 = parse_point(doc["x0"], *cfg.space, "config.x0", errs)) {
      cfg.x0 = *x0;
      if (cfg.objective.evaluator &&
          !(cfg.objective(cfg.x0) < std::numeric_limits<double>::infinity())) {
        errs.add("config.x0: starting point is outside the objective's domain");
      }
    }
  }

  if (doc.contains("schedule")) {
    if (auto sched = parse_schedule(doc["schedule"], "config.schedule", errs)) {
      cfg.schedule = *sched;
    }
  }

  cfg.stop.step_epsilon = involves_poincare(cfg.space_spec) ? 1e-8 : 1e-10;
  if (doc.contains("stop")) {
    const json& s = doc["stop"];
    if (require_object(s, "config.stop", errs)) {
      check_keys(s, {"max_iterations", "step_epsilon", "slope_epsilon"}, "config.stop", errs);
      if (const auto v = get_integer(s, "max_iterations", "config.stop", errs)) {
        if (*v < 1) errs.add("config.stop: 'max_iterations' must be >= 1");
        cfg.stop.max_iterations = *v;
      }
      if (const auto v = get_number(s, "step_epsilon", "config.stop", errs)) {
        cfg.stop.step_epsilon = *v;
      }
      cfg.stop.slope_epsilon = get_number(s, "slope_epsilon", "config.stop", errs);
    }
  }

  cfg.resolvent_gap = std::nullopt;
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (require_object(t, "config.tolerances", errs)) {
      check_keys(t, {"monitor", "resolvent_gap", "resolvent_relative_gap"}, "config.tolerances",
                 errs);
      if (const auto v = get_number(t, "monitor", "config.tolerances", errs)) {
        cfg.monitor_tolerance = *v;
      }
      cfg.resolvent_gap = get_number(t, "resolvent_gap", "config.tolerances", errs);
      if (const auto v = get_number(t, "resolvent_relative_gap", "config.tolerances", errs)) {
        cfg.resolvent_relative_gap = *v;
      }
    }
  }

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) {
      errs.add("config: 'seed' must be a nonnegative integer");
    } else {
      const auto s = doc["seed"].get<long long>();
      if (s < 0) {
        errs.add("config: 'seed' must be a nonnegative integer");
      } else {
        cfg.seed = static_cast<unsigned long long>(s);
      }
    }
  }

  if (doc.contains("monitors")) {
    if (!doc["monitors"].is_array()) {
      errs.add("config: 'monitors' must be an array of names");
    } else {
      for (const auto& m : doc["monitors"]) {
        const std::string name = m.is_string() ? m.get<std::string>() : "";
        if (name == "f_monotone") {
          cfg.monitors.f_monotone = true;
        } else if (name == "fejer") {
          cfg.monitors.fejer = true;
        } else if (name == "tilde") {
          cfg.monitors.tilde = true;
        } else if (name == "strong_qc") {
          cfg.monitors.strong_qc = true;
        } else if (name == "rate") {
          cfg.monitors.rate = true;
        } else {
          errs.add("config.monitors: unknown monitor '" + (m.is_string() ? name : m.dump()) +
                   "'");
        }
      }
    }
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    if (require_object(o, "config.output", errs)) {
      check_keys(o, {"trajectory_csv", "summary_json"}, "config.output", errs);
      if (o.contains("trajectory_csv")) {
        if (o["trajectory_csv"].is_string()) {
          cfg.output.trajectory_csv = o["trajectory_csv"].get<std::string>();
        } else {
          errs.add("config.output: 'trajectory_csv' must be a string");
        }
      }
      if (o.contains("summary_json")) {
        if (o["summary_json"].is_string()) {
          cfg.output.summary_json = o["summary_json"].get<std::string>();
        } else {
          errs.add("config.output: 'summary_json' must be a string");
        }
      }
    }
  }

  // Cross-field admissibility, only meaningful once the pieces exist.
  if (cfg.objective.evaluator) {
    try {
      cfg.schedule.validate(cfg.objective.weak_convexity_alpha, cfg.stop.max_iterations);
    } catch (const StepSizeError& e) {
      errs.add(std::string("config.schedule: ") + e.what());
    }
    const bool needs_ref = cfg.monitors.fejer || cfg.monitors.tilde || cfg.monitors.strong_qc ||
                           cfg.monitors.rate;
    if (needs_ref && !cfg.objective.known_minimizer) {
      errs.add("config.monitors: fejer/tilde/strong_qc/rate need an objective with a known "
               "minimizer");
    }
    if (cfg.monitors.strong_qc && !cfg.objective.strong_qc_alpha) {
      errs.add("config.monitors: strong_qc needs an objective with a declared strong "
               "quasi-convexity alpha");
    }
    if (cfg.monitors.strong_qc && !cfg.schedule.divergent) {
      errs.add("config.monitors: strong_qc needs a schedule declared sum-divergent");
    }
  }

  if (!errs.ok()) return ParseOutcome{std::nullopt, std::move(errs.errors)};
  return ParseOutcome{std::move(cfg), {}};
}

}  // namespace ppa
