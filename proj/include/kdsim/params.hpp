#pragma once

#include <optional>
#include <string>
#include <vector>

namespace kdsim {

// Raw experimental inputs, SI units throughout.
struct PhysicalConfig {
  double lambda_laser = 0.0;          // m
  double cavity_waist = 0.0;          // m
  double cavity_length = 0.0;         // m
  double np_radius = 0.0;             // m
  double epsilon_r = 0.0;             // relative permittivity of the particle
  double dipole_moment = 0.0;         // C m, projection of the transition dipole on e_c
  double atom_mass = 0.0;             // kg
  double np_mass = 0.0;               // kg
  double delta_p = 0.0;               // kg m/s, initial momentum spread of the particle
  double delta_al_ratio = 0.0;        // atom-laser detuning in units of Omega_a0
  double eta0 = 0.0;                  // peak cavity displacement |eta_0|
  double tau_pulse = 0.0;             // s
  double polarization_overlap = 1.0;  // e_c . e_l

  // Throws ConfigError naming the first field that breaks an invariant.
  void validate() const;
};

// All frequencies are angular (rad/s).
struct DerivedParams {
  double k = 0.0;               // 1/m
  double epsilon_c = 0.0;
  double v_cavity = 0.0;        // m^3
  double v_np = 0.0;            // m^3
  double omega_c = 0.0;         // rad/s
  double e_field_cavity = 0.0;  // V/m, vacuum field amplitude
  double omega_c0 = 0.0;        // rad/s, particle-cavity two-photon coupling at an antinode
  double omega_a0 = 0.0;        // rad/s, atom-cavity single-photon coupling at an antinode
  double delta_al = 0.0;        // rad/s
  double omega_effm = 0.0;      // rad/s, peak light-shift frequency
  double xi = 0.0;              // omega_effm * tau / 4
  double v_k_np = 0.0;          // m/s
  double v_k_atom = 0.0;        // m/s
  // Cavity-laser detuning needed per unit of (e_c.e_l) E_l/E_c to reach eta0.
  double delta_cl_per_field_ratio = 0.0;  // rad/s

  // Carried through so downstream checks do not need the raw config.
  double eta0 = 0.0;
  double tau_pulse = 0.0;
};

struct FieldInfo {
  std::string name;
  double value;
  std::string unit;
  std::string provenance;
};

DerivedParams derive_params(const PhysicalConfig& cfg);

// Name, value, unit and defining formula of every derived field, in a fixed order.
std::vector<FieldInfo> describe(const DerivedParams& p);

struct RamanNathCheck {
  double k_v_tau = 0.0;
  bool regime_warning = false;  // set when k v tau >= 0.1
};

RamanNathCheck raman_nath_check(const PhysicalConfig& cfg, double v_char);

enum class Verdict { pass, warn, fail, not_evaluated };

std::string to_string(Verdict v);

// pass < 0.15, warn <= 0.5, fail otherwise.
Verdict classify_ratio(double ratio);

struct ValidityEntry {
  std::string name;
  std::optional<double> value;
  Verdict verdict;
};

struct ValidityReport {
  std::vector<ValidityEntry> entries;
  Verdict overall() const;
};

// Dimensionless smallness ratios behind the light-shift model. The detuning
// Delta = delta_al - delta'_cl needs the effective cavity-laser detuning, which
// is not derivable from PhysicalConfig; the ratio is reported as not evaluated
// when it is absent.
ValidityReport validity_report(const DerivedParams& p,
                               std::optional<double> delta_cl_eff = std::nullopt);

}  // namespace kdsim
