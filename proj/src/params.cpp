#include "kdsim/params.hpp"

#include <cmath>

#include <fmt/format.h>

#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"

namespace kdsim {

namespace {

void require_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw ConfigError(fmt::format("{} must be finite and strictly positive (got {})", name, value));
  }
}

double checked(double value, const char* name) {
  if (!std::isfinite(value) || value == 0.0) {
    throw NumericError(fmt::format("derived field {} is not a finite non-zero number ({})", name, value));
  }
  return value;
}

}  // namespace

void PhysicalConfig::validate() const {
  require_positive(lambda_laser, "lambda_laser");
  require_positive(cavity_waist, "cavity_waist");
  require_positive(cavity_length, "cavity_length");
  require_positive(np_radius, "np_radius");
  require_positive(dipole_moment, "dipole_moment");
  require_positive(atom_mass, "atom_mass");
  require_positive(np_mass, "np_mass");
  require_positive(delta_p, "delta_p");
  require_positive(eta0, "eta0");
  require_positive(tau_pulse, "tau_pulse");
  if (!std::isfinite(epsilon_r) || epsilon_r <= 1.0) {
    throw ConfigError(fmt::format("epsilon_r must exceed 1 (got {})", epsilon_r));
  }
  if (!std::isfinite(polarization_overlap) || std::abs(polarization_overlap) > 1.0) {
    throw ConfigError(fmt::format("polarization_overlap must lie in [-1, 1] (got {})", polarization_overlap));
  }
  if (!std::isfinite(delta_al_ratio) || delta_al_ratio < 1.0) {
    throw ConfigError(fmt::format("delta_al_ratio must be >= 1 (got {})", delta_al_ratio));
  }
}

DerivedParams derive_params(const PhysicalConfig& cfg) {
  cfg.validate();
  using namespace si;

  DerivedParams p;
  p.k = checked(2.0 * pi / cfg.lambda_laser, "k");
  p.omega_c = checked(speed_of_light * p.k, "omega_c");
  p.epsilon_c = checked(3.0 * (cfg.epsilon_r - 1.0) / (cfg.epsilon_r + 2.0), "epsilon_c");
  const double half_waist = 0.5 * cfg.cavity_waist;
  p.v_cavity = checked(pi * half_waist * half_waist * cfg.cavity_length, "v_cavity");
  p.v_np = checked(4.0 * pi * std::pow(cfg.np_radius, 3) / 3.0, "v_np");
  p.e_field_cavity = checked(std::sqrt(hbar * p.omega_c / (2.0 * epsilon0 * p.v_cavity)), "e_field_cavity");
  p.omega_c0 = checked(p.epsilon_c * p.v_np * p.omega_c / (4.0 * p.v_cavity), "omega_c0");
  p.omega_a0 = checked(cfg.dipole_moment * std::sqrt(p.omega_c / (2.0 * epsilon0 * p.v_cavity * hbar)), "omega_a0");
  p.delta_al = checked(cfg.delta_al_ratio * p.omega_a0, "delta_al");
  p.omega_effm = checked(cfg.eta0 * cfg.eta0 * p.omega_a0 * p.omega_a0 / p.delta_al, "omega_effm");
  p.xi = checked(p.omega_effm * cfg.tau_pulse / 4.0, "xi");
  p.v_k_np = checked(hbar * p.k / cfg.np_mass, "v_k_np");
  p.v_k_atom = checked(hbar * p.k / cfg.atom_mass, "v_k_atom");
  // eta0 = Omega_c0 (e_c.e_l) (E_l/E_c) / delta_cl  =>  delta_cl per unit field ratio.
  // A zero overlap leaves the drive decoupled; the ratio is then reported as zero.
  p.delta_cl_per_field_ratio = p.omega_c0 * cfg.polarization_overlap / cfg.eta0;
  if (!std::isfinite(p.delta_cl_per_field_ratio)) {
    throw NumericError("derived field delta_cl_per_field_ratio is not finite");
  }
  p.eta0 = cfg.eta0;
  p.tau_pulse = cfg.tau_pulse;
  return p;
}

std::vector<FieldInfo> describe(const DerivedParams& p) {
  return {
      {"k", p.k, "1/m", "k = 2*pi/lambda_laser"},
      {"epsilon_c", p.epsilon_c, "1", "epsilon_c = 3*(epsilon_r-1)/(epsilon_r+2)"},
      {"v_cavity", p.v_cavity, "m^3", "V_c = pi*(w/2)^2*L"},
      {"v_np", p.v_np, "m^3", "V_N = 4*pi*R^3/3"},
      {"omega_c", p.omega_c, "rad/s", "omega_c = c*k"},
      {"e_field_cavity", p.e_field_cavity, "V/m", "E_c = sqrt(hbar*omega_c/(2*eps0*V_c))"},
      {"omega_c0", p.omega_c0, "rad/s", "Omega_c0 = eps0*epsilon_c*V_N*E_c^2/(2*hbar) = epsilon_c*V_N*omega_c/(4*V_c)"},
      {"omega_a0", p.omega_a0, "rad/s", "Omega_a0 = (d_a.e_c)*sqrt(omega_c/(2*eps0*V_c*hbar))"},
      {"delta_al", p.delta_al, "rad/s", "delta_al = delta_al_ratio*Omega_a0"},
      {"omega_effm", p.omega_effm, "rad/s", "Omega_effm = eta0^2*Omega_a0^2/delta_al"},
      {"xi", p.xi, "1", "xi = Omega_effm*tau/4"},
      {"tau_omega_effm", p.omega_effm * p.tau_pulse, "1", "tau*Omega_effm"},
      {"v_k_np", p.v_k_np, "m/s", "v_k = hbar*k/m"},
      {"v_k_atom", p.v_k_atom, "m/s", "v_ka = hbar*k/m_a"},
      {"delta_cl_per_field_ratio", p.delta_cl_per_field_ratio, "rad/s",
       "omega_c-omega_l = Omega_c0*(e_c.e_l)*(E_l/E_c)/eta0, per unit E_l/E_c"},
  };
}

RamanNathCheck raman_nath_check(const PhysicalConfig& cfg, double v_char) {
  if (!(v_char >= 0.0)) {
    throw ConfigError(fmt::format("characteristic velocity must be >= 0 (got {})", v_char));
  }
  const double k = 2.0 * si::pi / cfg.lambda_laser;
  RamanNathCheck r;
  r.k_v_tau = k * v_char * cfg.tau_pulse;
  r.regime_warning = r.k_v_tau >= 0.1;
  return r;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::warn: return "warn";
    case Verdict::fail: return "fail";
    case Verdict::not_evaluated: return "n/a";
  }
  return "?";
}

Verdict classify_ratio(double ratio) {
  const double r = std::abs(ratio);
  if (!std::isfinite(r)) return Verdict::fail;
  // Boundaries carry a relative slack of 1e-12 so ratios built from
  // rounded products (5 * 0.1) land on the intended side.
  constexpr double slack = 1.0 + 1e-12;
  if (r < 0.15 / slack) return Verdict::pass;
  if (r <= 0.5 * slack) return Verdict::warn;
  return Verdict::fail;
}

Verdict ValidityReport::overall() const {
  Verdict worst = Verdict::pass;
  for (const auto& e : entries) {
    if (e.verdict == Verdict::fail) return Verdict::fail;
    if (e.verdict == Verdict::warn) worst = Verdict::warn;
  }
  return worst;
}

ValidityReport validity_report(const DerivedParams& p, std::optional<double> delta_cl_eff) {
  ValidityReport report;
  const double ratio = p.omega_a0 / p.delta_al;
  report.entries.push_back({"omega_a0/delta_al", ratio, classify_ratio(ratio)});
  if (delta_cl_eff) {
    const double big_delta = p.delta_al - *delta_cl_eff;
    const double r = p.delta_al / big_delta;
    report.entries.push_back({"delta_al/Delta", r, classify_ratio(r)});
  } else {
    report.entries.push_back({"delta_al/Delta", std::nullopt, Verdict::not_evaluated});
  }
  const double mu = std::abs(p.eta0) * ratio;
  report.entries.push_back({"|mu|", mu, classify_ratio(mu)});
  return report;
}

}  // namespace kdsim
