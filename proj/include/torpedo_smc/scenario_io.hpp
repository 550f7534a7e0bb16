#pragma once

#include "torpedo_smc/sim_engine.hpp"

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace torpedo_smc {

/// Scenario file could not be read. Distinct from ValidationError so the CLI
/// can map it to the I/O exit code.
class ScenarioReadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace scenario_detail {

using nlohmann::json;

inline std::string join(std::string_view prefix, std::string_view key) {
  return prefix.empty() ? std::string(key) : std::string(prefix) + "." + std::string(key);
}

inline void reject_unknown(const json& obj, std::string_view prefix, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) throw ValidationError(join(prefix, key), "unknown key");
  }
}

inline const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ValidationError(path, "must be an object");
  return j;
}

inline double get_number(const json& obj, std::string_view prefix, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(join(prefix, key), "must be a number");
  return v.get<double>();
}

inline std::vector<double> get_number_list(const json& obj, std::string_view prefix, const char* key) {
  const std::string path = join(prefix, key);
  if (!obj.contains(key)) throw ValidationError(path, "missing");
  const json& v = obj.at(key);
  if (!v.is_array()) throw ValidationError(path, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ValidationError(path, "must be an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline ZpkModel parse_zpk(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"zeros", "poles", "gain"});
  ZpkModel m;
  m.zeros = j.contains("zeros") ? get_number_list(j, path, "zeros") : std::vector<double>{};
  m.poles = get_number_list(j, path, "poles");
  if (!j.contains("gain")) throw ValidationError(join(path, "gain"), "missing");
  m.gain = get_number(j, path, "gain", 0.0);
  try {
    (void)from_zpk(m);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(path, e.what());
  }
  return m;
}

template <class Make>
auto guarded(const std::string& path, Make&& make) {
  try {
    return make();
  } catch (const ValidationError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    // Gain constructors report the bare gain name first; keep only the tail.
    const std::string msg = e.what();
    const auto sp = msg.find(' ');
    const std::string key = msg.substr(0, sp);
    throw ValidationError(join(path, key), sp == std::string::npos ? msg : msg.substr(sp + 1));
  }
}

inline ControllerConfig parse_controller(const json& j) {
  const std::string path = "controller";
  require_object(j, path);
  if (!j.contains("kind")) throw ValidationError("controller.kind", "missing");
  if (!j.at("kind").is_string()) throw ValidationError("controller.kind", "must be a string");
  const std::string name = j.at("kind").get<std::string>();
  const auto kind = parse_controller_kind(name);
  if (!kind) throw ValidationError("controller.kind", "unknown controller kind '" + name + "'");

  ControllerConfig preset = ControllerConfig::preset(*kind);
  switch (*kind) {
    case ControllerKind::Smc1: {
      reject_unknown(j, path, {"kind", "k1", "k2", "k"});
      const auto& s = std::get<LinearSurface>(preset.surface);
      const auto& l = std::get<RelayLaw>(preset.law);
      return guarded(path, [&] {
        return ControllerConfig{*kind,
                                LinearSurface{get_number(j, path, "k1", s.k1), get_number(j, path, "k2", s.k2)},
                                RelayLaw{get_number(j, path, "k", l.k)}};
      });
    }
    case ControllerKind::Smc2: {
      reject_unknown(j, path, {"kind", "beta1", "beta2", "beta3", "k"});
      const auto& s = std::get<SecondOrderSurface>(preset.surface);
      const auto& l = std::get<RelayLaw>(preset.law);
      return guarded(path, [&] {
        return ControllerConfig{*kind,
                                SecondOrderSurface{get_number(j, path, "beta1", s.beta1),
                                                   get_number(j, path, "beta2", s.beta2),
                                                   get_number(j, path, "beta3", s.beta3)},
                                RelayLaw{get_number(j, path, "k", l.k)}};
      });
    }
    case ControllerKind::PidSmc1: {
      reject_unknown(j, path, {"kind", "alpha1", "alpha2", "alpha3", "lambda", "phi"});
      const auto& s = std::get<PidSurface>(preset.surface);
      const auto& l = std::get<SaturationLaw>(preset.law);
      return guarded(path, [&] {
        return ControllerConfig{*kind,
                                PidSurface{get_number(j, path, "alpha1", s.alpha1),
                                           get_number(j, path, "alpha2", s.alpha2),
                                           get_number(j, path, "alpha3", s.alpha3)},
                                SaturationLaw{get_number(j, path, "lambda", l.lambda),
                                              get_number(j, path, "phi", l.phi)}};
      });
    }
  }
  throw ValidationError("controller.kind", "unknown controller kind");
}

inline json zpk_to_json(const ZpkModel& m) {
  return json{{"zeros", m.zeros}, {"poles", m.poles}, {"gain", m.gain}};
}

}  // namespace scenario_detail

/// Parses a scenario document. Missing keys take the defaults of Scenario;
/// gains missing from the controller object take that kind's preset values.
inline Scenario parse_scenario(std::string_view text) {
  using scenario_detail::json;
  namespace d = scenario_detail;

  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ValidationError("document", std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("document", "top level must be an object");
  d::reject_unknown(doc, "",
                    {"plant", "controller", "reference", "duration", "dt", "disturbance", "eta", "initial_state"});

  Scenario sc;
  if (doc.contains("plant")) {
    const json& p = doc.at("plant");
    if (p.is_string()) {
      if (p.get<std::string>() != "torpedo") throw ValidationError("plant", "unknown plant preset '" + p.get<std::string>() + "'");
    } else if (p.is_object()) {
      d::reject_unknown(p, "plant", {"immersion", "inclination"});
      if (!p.contains("immersion")) throw ValidationError("plant.immersion", "missing");
      if (!p.contains("inclination")) throw ValidationError("plant.inclination", "missing");
      sc.plant = CustomPlant{d::parse_zpk(p.at("immersion"), "plant.immersion"),
                             d::parse_zpk(p.at("inclination"), "plant.inclination")};
    } else {
      throw ValidationError("plant", "must be \"torpedo\" or an object with immersion/inclination models");
    }
  }
  if (doc.contains("controller")) sc.controller = d::parse_controller(doc.at("controller"));
  if (doc.contains("reference")) {
    const json& r = d::require_object(doc.at("reference"), "reference");
    d::reject_unknown(r, "reference", {"amplitude", "step_time"});
    sc.reference.amplitude = d::get_number(r, "reference", "amplitude", sc.reference.amplitude);
    sc.reference.step_time = d::get_number(r, "reference", "step_time", sc.reference.step_time);
  }
  sc.duration = d::get_number(doc, "", "duration", sc.duration);
  sc.dt = d::get_number(doc, "", "dt", sc.dt);
  sc.eta = d::get_number(doc, "", "eta", sc.eta);
  if (doc.contains("disturbance")) {
    const json& j = d::require_object(doc.at("disturbance"), "disturbance");
    d::reject_unknown(j, "disturbance", {"enabled", "M", "seed"});
    if (j.contains("enabled")) {
      if (!j.at("enabled").is_boolean()) throw ValidationError("disturbance.enabled", "must be a boolean");
      sc.disturbance.enabled = j.at("enabled").get<bool>();
    }
    sc.disturbance.bound = d::get_number(j, "disturbance", "M", sc.disturbance.bound);
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) throw ValidationError("disturbance.seed", "must be a non-negative integer");
      sc.disturbance.seed = j.at("seed").get<std::uint64_t>();
    }
  }
  if (doc.contains("initial_state")) sc.initial_state = d::get_number_list(doc, "", "initial_state");

  validate(sc);
  return sc;
}

/// Normalized document with every field spelled out.
inline nlohmann::ordered_json scenario_to_json(const Scenario& sc) {
  using nlohmann::ordered_json;
  namespace d = scenario_detail;

  ordered_json doc;
  if (sc.plant)
    doc["plant"] = ordered_json{{"immersion", d::zpk_to_json(sc.plant->immersion)},
                                {"inclination", d::zpk_to_json(sc.plant->inclination)}};
  else
    doc["plant"] = "torpedo";

  ordered_json c;
  c["kind"] = std::string(to_string(sc.controller.kind));
  std::visit(
      [&c](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, LinearSurface>) {
          c["k1"] = s.k1;
          c["k2"] = s.k2;
        } else if constexpr (std::is_same_v<S, SecondOrderSurface>) {
          c["beta1"] = s.beta1;
          c["beta2"] = s.beta2;
          c["beta3"] = s.beta3;
        } else {
          c["alpha1"] = s.alpha1;
          c["alpha2"] = s.alpha2;
          c["alpha3"] = s.alpha3;
        }
      },
      sc.controller.surface);
  if (const auto* r = std::get_if<RelayLaw>(&sc.controller.law)) {
    c["k"] = r->k;
  } else {
    const auto& sat = std::get<SaturationLaw>(sc.controller.law);
    c["lambda"] = sat.lambda;
    c["phi"] = sat.phi;
  }
  doc["controller"] = c;
  doc["reference"] = ordered_json{{"amplitude", sc.reference.amplitude}, {"step_time", sc.reference.step_time}};
  doc["duration"] = sc.duration;
  doc["dt"] = sc.dt;
  doc["disturbance"] =
      ordered_json{{"enabled", sc.disturbance.enabled}, {"M", sc.disturbance.bound}, {"seed", sc.disturbance.seed}};
  doc["eta"] = sc.eta;
  if (!sc.initial_state.empty()) doc["initial_state"] = sc.initial_state;
  return doc;
}

inline std::string serialize_scenario(const Scenario& sc) { return scenario_to_json(sc).dump(2) + "\n"; }

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioReadError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw ScenarioReadError("failed reading scenario file '" + path + "'");
  return parse_scenario(buf.str());
}

}  // namespace torpedo_smc
