#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "kdsim/harmonics.hpp"

namespace kdsim {

// Laser-driven atom-cavity system with the particle and atom positions frozen
// for the duration of the pulse. Frequencies in rad/s.
//
//   H/hbar = Omega_a (a s+ e^{i d_ac t} + a^dag s- e^{-i d_ac t}) - Omega_c a^dag a
//            - (Omega_l a^dag e^{i d_cl t} + h.c.),        d_ac = d_al - d_cl
//
// with Omega_a = Omega_a0 cos(k x_atom), Omega_c = Omega_c0 cos^2(k x_np),
// Omega_l = Omega_l0 cos(k x_np). Basis index = atom * n_fock + n, atom 0 = g.
struct CavityModel {
  int n_fock = 0;
  double omega_a0 = 0.0;
  double delta_al = 0.0;
  double delta_cl = 0.0;
  double omega_c0 = 0.0;
  double omega_l0 = 0.0;
  double x_np = 0.0;    // m
  double x_atom = 0.0;  // m
  double k = 0.0;       // 1/m
  double tau = 0.0;     // s

  double omega_a() const;
  double omega_c() const;
  double omega_l() const;
  double delta_ac() const { return delta_al - delta_cl; }
  double delta_cl_eff() const { return delta_cl - omega_c(); }  // d'_cl
  double detuning() const { return delta_al - delta_cl_eff(); }  // Delta
  double eta() const;                                            // Omega_l / d'_cl
  double mu_abs() const;                                         // |eta Omega_a / d_al|
  double phi_eff() const;                                        // tau |eta|^2 Omega_a^2 / d_al
  std::size_t dim() const { return 2 * static_cast<std::size_t>(n_fock); }

  void validate() const;

  // ceil(4 (|eta| + 1)^2 + 20)
  static int auto_fock(double eta);
};

using JointKet = Eigen::VectorXcd;

JointKet ground_vacuum(const CavityModel& model);

// Dense H/hbar at time t.
Eigen::MatrixXcd build_hamiltonian(const CavityModel& model, double t);

// 0.01 / max(|d_al|, |Omega_l0|, |Omega_a0|, |d_cl|)
double max_stable_step(const CavityModel& model);

enum class Integrator { midpoint, magnus4 };

struct PropagationStats {
  std::size_t steps = 0;
  double max_top_fock = 0.0;  // largest population in the two highest Fock levels
  double max_excited = 0.0;   // largest atom excited-state population seen
  double norm_drift = 0.0;
};

// Fixed-step propagation. Throws TruncationError when the top two Fock levels
// hold more than 1e-8, ConfigError when dt_max breaks max_stable_step.
JointKet propagate(const CavityModel& model, const JointKet& psi0, double t_end, double dt_max,
                   Integrator scheme = Integrator::magnus4, PropagationStats* stats = nullptr);

// Same, with the Hamiltonian's clock running from t_start to t_end.
JointKet propagate_interval(const CavityModel& model, const JointKet& psi0, double t_start, double t_end,
                            double dt_max, Integrator scheme = Integrator::magnus4,
                            PropagationStats* stats = nullptr);

double excited_population(const CavityModel& model, const JointKet& psi);
cplx mean_a(const CavityModel& model, const JointKet& psi);

struct PhaseResult {
  double phi_full = 0.0;  // arg <g, reference | psi>, unwrapped against phi_eff
  double phi_eff = 0.0;
  double p_excite = 0.0;  // at the end of the pulse
  double p_excite_max = 0.0;
  double rel_err = 0.0;
  double mu_abs = 0.0;
  double richardson_state = 0.0;  // |psi(dt) - psi(dt/2)|
  double richardson_phase = 0.0;
  double norm_drift = 0.0;
  std::size_t steps = 0;  // at the finer step
};

// Requires every validity ratio of the model to be at worst "warn".
// dt_max <= 0 selects half of max_stable_step.
PhaseResult effective_phase_experiment(const CavityModel& model, double dt_max = 0.0);

// Convergence study: Omega_a0 and tau fixed, d_al = Omega_a0 / r and
// d'_cl = -kappa d_al / r so every neglected term shrinks linearly with r.
struct LadderSpec {
  double omega_a0 = 0.0;
  double omega_c0 = 0.0;
  double k = 0.0;
  double tau = 0.0;
  double eta = 2.0;
  double kappa = 1.0;
  int n_fock = 0;       // 0 = auto
  double dt_max = 0.0;  // 0 = half of max_stable_step
  // Round tau to whole periods of the dressed-state beat sqrt(d_al^2 + 4 |eta Omega_a|^2),
  // which removes the switch-on transient of the projected ground amplitude.
  bool commensurate_tau = true;
  std::vector<double> ratios;
};

CavityModel ladder_model(const LadderSpec& spec, double ratio, double x_np = 0.0, double x_atom = 0.0);

struct LadderPoint {
  double ratio = 0.0;
  PhaseResult result;
};

struct LadderReport {
  std::vector<LadderPoint> points;
  bool monotone = false;
  bool excitation_bounded = false;  // p_excite_max < 4 |mu|^2 at every rung
  double final_rel_err = 0.0;
};

LadderReport effective_phase_ladder(const LadderSpec& spec, int jobs = 1);

// phi_full versus particle position (rescaled to the nominal tau), fitted to A cos^2(k x_np).
struct PositionScan {
  std::vector<double> x_np;
  std::vector<double> phi_full;
  std::vector<double> fitted;
  double amplitude = 0.0;
  double residual_rel = 0.0;  // max |phi - fit| / max |phi|
};

PositionScan node_antinode_scan(const LadderSpec& spec, double ratio, int n_positions = 8, int jobs = 1);

struct BchReport {
  double mu_abs = 0.0;
  double dev_sigma_plus = 0.0;  // max elementwise |exact - second order|
  double dev_excited = 0.0;
  double dev_max = 0.0;
  double commutator_dev = 0.0;  // commutator table, should be exactly 0
};

BchReport bch_pauli_check(cplx mu);

struct BchScaling {
  std::vector<BchReport> rows;
  double exponent = 0.0;  // least-squares slope of log(dev) vs log|mu|
};

BchScaling bch_scaling(std::span<const double> mu_abs, double mu_arg = 0.7);

struct ZassenhausReport {
  double max_abs_diff = 0.0;  // state-vector difference
  cplx scalar{};              // exp(-2 k^2 [x(t_j), x(t_i)])
};

ZassenhausReport zassenhaus_check(double k, double mass, double t_i, double t_j);
ZassenhausReport zassenhaus_check(double k, double mass, double delta_p, double t_i, double t_j);

struct DisplacedOscillatorReport {
  double max_alpha_err = 0.0;  // max |<a> - alpha(t)| / |eta|
  double max_state_err = 0.0;  // max |psi(t) - psi_exact(t)|, global phase included
  int samples = 0;
};

// Drive only (Omega_a = 0): the cavity stays in the coherent state
// alpha(t) = eta (e^{i d_cl t} - e^{i Omega_c t}) times the scalar
// exp(i Omega_l eta t - eta^2 (1 - e^{-i d'_cl t})).
DisplacedOscillatorReport displaced_oscillator_check(const CavityModel& model, double t_end, int samples);

// Constant generator (d_cl = d_al = 0): propagation against the dense matrix exponential.
double constant_generator_check(const CavityModel& model, double t_end);

}  // namespace kdsim
