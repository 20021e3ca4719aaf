#include "kdsim/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include <fmt/format.h>

#include "kdsim/errors.hpp"

namespace kdsim {

namespace {

using nlohmann::json;

using Setter = std::function<void(const json&)>;

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError(fmt::format("{} must be a number", key));
  return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError(fmt::format("{} must be an integer", key));
  return v.get<int>();
}

std::vector<double> as_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError(fmt::format("{} must be an array of numbers", key));
  std::vector<double> out;
  for (const auto& x : v) out.push_back(as_number(x, key));
  return out;
}

cplx as_complex(const json& v, const std::string& key) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw ConfigError(fmt::format("{} must be a number or [re, im]", key));
}

void apply_fields(const json& obj, const std::string& where, const std::map<std::string, Setter>& fields,
                  const std::set<std::string>& required = {}) {
  if (!obj.is_object()) throw ConfigError(fmt::format("{} must be a JSON object", where));
  for (const auto& [key, value] : obj.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ConfigError(fmt::format("unknown key '{}' in {}", key, where));
    it->second(value);
  }
  for (const auto& key : required) {
    if (!obj.contains(key)) throw ConfigError(fmt::format("missing required field '{}' in {}", key, where));
  }
}

Setter num(double& target, std::string key) {
  return [&target, key](const json& v) { target = as_number(v, key); };
}

Setter integer(int& target, std::string key) {
  return [&target, key](const json& v) { target = as_int(v, key); };
}

Setter list(std::vector<double>& target, std::string key) {
  return [&target, key](const json& v) { target = as_list(v, key); };
}

OracleOptions parse_oracle(const json& obj) {
  OracleOptions o;
  apply_fields(obj, "oracle",
               {
                   {"n_fock", integer(o.n_fock, "oracle.n_fock")},
                   {"dt_max", num(o.dt_max, "oracle.dt_max")},
                   {"ratios", list(o.ratios, "oracle.ratios")},
                   {"eta", num(o.eta, "oracle.eta")},
                   {"kappa", num(o.kappa, "oracle.kappa")},
                   {"tau", num(o.tau, "oracle.tau")},
                   {"scan_ratio", num(o.scan_ratio, "oracle.scan_ratio")},
                   {"positions", integer(o.positions, "oracle.positions")},
                   {"include_ladder",
                    [&o](const json& v) {
                      if (!v.is_boolean()) throw ConfigError("oracle.include_ladder must be a boolean");
                      o.include_ladder = v.get<bool>();
                    }},
                   {"random_cases", integer(o.random_cases, "oracle.random_cases")},
                   {"bch_mu", list(o.bch_mu, "oracle.bch_mu")},
                   {"factorization_xi", list(o.factorization_xi, "oracle.factorization_xi")},
                   {"factorization_grid", integer(o.factorization_grid, "oracle.factorization_grid")},
                   {"factorization_atoms", integer(o.factorization_atoms, "oracle.factorization_atoms")},
                   {"signal_dt", list(o.signal_dt, "oracle.signal_dt")},
                   {"signal_t1", num(o.signal_t1, "oracle.signal_t1")},
               });
  if (o.n_fock != 0 && o.n_fock < 30) throw ConfigError("oracle.n_fock must be 0 (auto) or >= 30");
  if (o.ratios.empty()) throw ConfigError("oracle.ratios must not be empty");
  if (o.random_cases < 1) throw ConfigError("oracle.random_cases must be >= 1");
  if (o.positions < 2) throw ConfigError("oracle.positions must be >= 2");
  return o;
}

SweepOptions parse_sweep(const json& obj) {
  SweepOptions s;
  apply_fields(obj, "sweep",
               {
                   {"dt_list", list(s.dt_list, "sweep.dt_list")},
                   {"delta_p_list", list(s.delta_p_list, "sweep.delta_p_list")},
                   {"mass", num(s.mass, "sweep.mass")},
                   {"xi1", num(s.xi1, "sweep.xi1")},
                   {"xi2", num(s.xi2, "sweep.xi2")},
                   {"alpha_l", [&s](const json& v) { s.alpha_l = as_complex(v, "sweep.alpha_l"); }},
                   {"beta_l", [&s](const json& v) { s.beta_l = as_complex(v, "sweep.beta_l"); }},
                   {"t_free", num(s.t_free, "sweep.t_free")},
               },
               {"dt_list"});
  if (s.dt_list.empty()) throw ConfigError("sweep.dt_list must not be empty");
  for (double dt : s.dt_list) {
    if (!(dt >= 0.0)) throw ConfigError("sweep.dt_list entries must be >= 0");
  }
  if (obj.contains("delta_p_list") && s.delta_p_list.empty()) throw ConfigError("sweep.delta_p_list must not be empty");
  if (!(s.t_free >= 0.0)) throw ConfigError("sweep.t_free must be >= 0");
  return s;
}

Tolerances parse_tolerances(const json& obj) {
  Tolerances t;
  apply_fields(obj, "tolerances",
               {
                   {"char_fn_rel", num(t.char_fn_rel, "tolerances.char_fn_rel")},
                   {"phase_cancellation", num(t.phase_cancellation, "tolerances.phase_cancellation")},
                   {"reordering_phase", num(t.reordering_phase, "tolerances.reordering_phase")},
                   {"cos2cos2_rel", num(t.cos2cos2_rel, "tolerances.cos2cos2_rel")},
                   {"signal_rel", num(t.signal_rel, "tolerances.signal_rel")},
                   {"visibility_abs", num(t.visibility_abs, "tolerances.visibility_abs")},
                   {"atomic_cancellation", num(t.atomic_cancellation, "tolerances.atomic_cancellation")},
                   {"literal_forms", num(t.literal_forms, "tolerances.literal_forms")},
                   {"recoil_phase_rel", num(t.recoil_phase_rel, "tolerances.recoil_phase_rel")},
                   {"factorization_exponent_width",
                    num(t.factorization_exponent_width, "tolerances.factorization_exponent_width")},
                   {"factorization_exact", num(t.factorization_exact, "tolerances.factorization_exact")},
                   {"bch_exponent_width", num(t.bch_exponent_width, "tolerances.bch_exponent_width")},
                   {"bch_commutator", num(t.bch_commutator, "tolerances.bch_commutator")},
                   {"zassenhaus", num(t.zassenhaus, "tolerances.zassenhaus")},
                   {"displaced_oscillator", num(t.displaced_oscillator, "tolerances.displaced_oscillator")},
                   {"constant_generator", num(t.constant_generator, "tolerances.constant_generator")},
                   {"effective_phase_rel", num(t.effective_phase_rel, "tolerances.effective_phase_rel")},
                   {"node_phase", num(t.node_phase, "tolerances.node_phase")},
                   {"node_fit_residual", num(t.node_fit_residual, "tolerances.node_fit_residual")},
                   {"richardson", num(t.richardson, "tolerances.richardson")},
                   {"norm_drift", num(t.norm_drift, "tolerances.norm_drift")},
                   {"omega_c0_ratio_rel", num(t.omega_c0_ratio_rel, "tolerances.omega_c0_ratio_rel")},
               });
  return t;
}

}  // namespace

Tolerances Tolerances::scaled(double f) const {
  if (!(f > 0.0) || !std::isfinite(f)) throw ConfigError("tolerance scale must be a positive number");
  Tolerances t = *this;
  for (double* v : {&t.char_fn_rel, &t.phase_cancellation, &t.reordering_phase, &t.cos2cos2_rel, &t.signal_rel,
                    &t.visibility_abs, &t.atomic_cancellation, &t.literal_forms, &t.recoil_phase_rel,
                    &t.factorization_exponent_width, &t.factorization_exact, &t.bch_exponent_width,
                    &t.bch_commutator, &t.zassenhaus, &t.displaced_oscillator, &t.constant_generator,
                    &t.effective_phase_rel, &t.node_phase, &t.node_fit_residual, &t.richardson, &t.norm_drift,
                    &t.omega_c0_ratio_rel}) {
    *v *= f;
  }
  return t;
}

RunConfig parse_config(const json& doc) {
  RunConfig rc;
  auto& c = rc.physical;
  json physical = json::object();
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "oracle") {
      rc.oracle = parse_oracle(value);
    } else if (key == "sweep") {
      rc.sweep = parse_sweep(value);
    } else if (key == "tolerances") {
      rc.tolerances = parse_tolerances(value);
    } else {
      physical[key] = value;
    }
  }
  apply_fields(physical, "config",
               {
                   {"lambda_laser", num(c.lambda_laser, "lambda_laser")},
                   {"cavity_waist", num(c.cavity_waist, "cavity_waist")},
                   {"cavity_length", num(c.cavity_length, "cavity_length")},
                   {"np_radius", num(c.np_radius, "np_radius")},
                   {"epsilon_r", num(c.epsilon_r, "epsilon_r")},
                   {"dipole_moment", num(c.dipole_moment, "dipole_moment")},
                   {"atom_mass", num(c.atom_mass, "atom_mass")},
                   {"np_mass", num(c.np_mass, "np_mass")},
                   {"delta_p", num(c.delta_p, "delta_p")},
                   {"delta_al_ratio", num(c.delta_al_ratio, "delta_al_ratio")},
                   {"eta0", num(c.eta0, "eta0")},
                   {"tau_pulse", num(c.tau_pulse, "tau_pulse")},
                   {"polarization_overlap", num(c.polarization_overlap, "polarization_overlap")},
               },
               {"lambda_laser", "cavity_waist", "cavity_length", "np_radius", "epsilon_r", "dipole_moment",
                "atom_mass", "np_mass", "delta_p", "delta_al_ratio", "eta0", "tau_pulse"});
  c.validate();
  return rc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config '{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return parse_config(doc);
}

double tolerance_scale_from_env() {
  const char* raw = std::getenv("KDSIM_TOLERANCE_SCALE");
  if (!raw || !*raw) return 1.0;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(fmt::format("KDSIM_TOLERANCE_SCALE must be a positive number, got '{}'", raw));
  }
  return v;
}

nlohmann::json derived_to_json(const PhysicalConfig& cfg, const DerivedParams& p) {
  json out;
  out["frequency_convention"] = "angular (rad/s)";
  json fields = json::array();
  for (const auto& f : describe(p)) {
    fields.push_back({{"name", f.name}, {"value", f.value}, {"unit", f.unit}, {"provenance", f.provenance}});
  }
  out["derived"] = fields;
  json validity = json::array();
  for (const auto& e : validity_report(p).entries) {
    json row{{"name", e.name}, {"verdict", to_string(e.verdict)}};
    row["value"] = e.value ? json(*e.value) : json(nullptr);
    validity.push_back(row);
  }
  out["validity"] = validity;
  const auto rn = raman_nath_check(cfg, cfg.delta_p / cfg.np_mass);
  out["raman_nath"] = {{"k_v_tau", rn.k_v_tau}, {"regime_warning", rn.regime_warning}};
  return out;
}

std::string derived_table(const PhysicalConfig& cfg, const DerivedParams& p) {
  std::string s = "# derived parameters (all frequencies angular, rad/s)\n";
  s += fmt::format("{:<26} {:>20} {:<7} {}\n", "name", "value", "unit", "formula");
  for (const auto& f : describe(p)) {
    s += fmt::format("{:<26} {:>20.12g} {:<7} {}\n", f.name, f.value, f.unit, f.provenance);
  }
  s += "\n# validity ratios\n";
  for (const auto& e : validity_report(p).entries) {
    s += fmt::format("{:<26} {:>20} {}\n", e.name, e.value ? fmt::format("{:.6g}", *e.value) : std::string("-"),
                     to_string(e.verdict));
  }
  const auto rn = raman_nath_check(cfg, cfg.delta_p / cfg.np_mass);
  s += fmt::format("{:<26} {:>20.6g} {}\n", "k*v*tau (particle)", rn.k_v_tau, rn.regime_warning ? "warn" : "pass");
  return s;
}

}  // namespace kdsim
