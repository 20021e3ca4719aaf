#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdsim/harmonics.hpp"
#include "kdsim/params.hpp"

namespace kdsim {

// Every pass/fail threshold used by the validation suites. Exponent checks
// are windows centred on the expected order; the *_width fields are their
// half-widths.
struct Tolerances {
  double char_fn_rel = 1e-8;
  double phase_cancellation = 1e-12;
  double reordering_phase = 1e-9;
  double cos2cos2_rel = 1e-8;
  double signal_rel = 1e-6;
  double visibility_abs = 1e-3;
  double atomic_cancellation = 1e-10;
  double literal_forms = 1e-10;
  double recoil_phase_rel = 1e-15;
  double factorization_exponent_width = 0.2;
  double factorization_exact = 1e-12;
  double bch_exponent_width = 0.3;
  double bch_commutator = 1e-15;
  double zassenhaus = 1e-10;
  double displaced_oscillator = 1e-8;
  double constant_generator = 1e-10;
  double effective_phase_rel = 0.05;
  double node_phase = 1e-8;
  double node_fit_residual = 0.02;
  double richardson = 1e-8;
  double norm_drift = 1e-10;
  double omega_c0_ratio_rel = 1e-12;

  Tolerances scaled(double factor) const;
};

// Settings for the brute-force oracles.
struct OracleOptions {
  int n_fock = 0;       // 0 = sized from eta
  double dt_max = 0.0;  // 0 = half of the stability bound
  std::vector<double> ratios{0.1, 0.05, 0.025};
  double eta = 2.0;
  double kappa = 1.0;
  double tau = 0.0;  // 0 = 1.6 / Omega_a0
  double scan_ratio = 0.05;
  int positions = 8;
  bool include_ladder = true;
  int random_cases = 100;
  std::vector<double> bch_mu{0.2, 0.1, 0.05, 0.025};
  std::vector<double> factorization_xi{0.04, 0.02, 0.01};
  int factorization_grid = 8;
  int factorization_atoms = 2;
  std::vector<double> signal_dt{0.5e-3, 1.2e-3, 3e-3};
  double signal_t1 = 0.1;
};

struct SweepOptions {
  std::vector<double> dt_list;
  std::vector<double> delta_p_list;  // defaults to the config's delta_p
  double mass = 0.0;                 // defaults to np_mass
  double xi1 = -1.0;                 // < 0: the derived xi
  double xi2 = -1.0;
  cplx alpha_l{1.0 / 1.4142135623730951, 0.0};
  cplx beta_l{1.0 / 1.4142135623730951, 0.0};
  double t_free = 0.1;
};

struct RunConfig {
  PhysicalConfig physical;
  OracleOptions oracle;
  std::optional<SweepOptions> sweep;
  Tolerances tolerances;
};

// Top-level keys are the PhysicalConfig fields plus the optional blocks
// "oracle", "sweep" and "tolerances". Unknown keys anywhere are errors.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

// KDSIM_TOLERANCE_SCALE, default 1.
double tolerance_scale_from_env();

nlohmann::json derived_to_json(const PhysicalConfig& cfg, const DerivedParams& p);
std::string derived_table(const PhysicalConfig& cfg, const DerivedParams& p);

}  // namespace kdsim
