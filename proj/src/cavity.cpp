#include "kdsim/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include <fmt/format.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/params.hpp"
#include "kdsim/wavepacket.hpp"

namespace kdsim {

namespace {

constexpr double kTopFockLimit = 1e-8;
constexpr double kTaylorTolerance = 1e-34;  // squared norm of the last Taylor term
constexpr int kMaxTaylorTerms = 60;
constexpr std::size_t kMonitorEvery = 16;

// H/hbar = atom a s+ + conj(atom) a^dag s- + diag a^dag a + drive a^dag + conj(drive) a.
struct Generator {
  cplx atom{};
  double diag = 0.0;
  cplx drive{};

  Generator& operator+=(const Generator& o) {
    atom += o.atom;
    diag += o.diag;
    drive += o.drive;
    return *this;
  }
  Generator operator*(double s) const { return {atom * s, diag * s, drive * s}; }
};

Generator generator_at(const CavityModel& m, double t) {
  return {m.omega_a() * std::polar(1.0, m.delta_ac() * t), -m.omega_c(), -m.omega_l() * std::polar(1.0, m.delta_cl * t)};
}

class Stepper {
 public:
  // With the atom decoupled and unexcited only the ground sector is propagated.
  Stepper(const CavityModel& m, bool ground_only)
      : nf_(m.n_fock), sectors_(ground_only ? 1 : 2), sq_(static_cast<std::size_t>(m.n_fock) + 1) {
    for (std::size_t n = 0; n < sq_.size(); ++n) sq_[n] = std::sqrt(static_cast<double>(n));
    term_.resize(m.dim());
    next_.resize(m.dim());
  }

  // out = G in
  void apply(const Generator& g, const cplx* in, cplx* out) const {
    const cplx drive_c = std::conj(g.drive);
    const cplx atom_c = std::conj(g.atom);
    for (int s = 0; s < sectors_; ++s) {
      const cplx* v = in + s * nf_;
      cplx* w = out + s * nf_;
      for (int n = 0; n < nf_; ++n) {
        cplx acc = g.diag * static_cast<double>(n) * v[n];
        if (n > 0) acc += g.drive * sq_[n] * v[n - 1];
        if (n + 1 < nf_) acc += drive_c * sq_[n + 1] * v[n + 1];
        w[n] = acc;
      }
    }
    if (g.atom == cplx{} || sectors_ == 1) return;
    const cplx* vg = in;
    const cplx* ve = in + nf_;
    cplx* wg = out;
    cplx* we = out + nf_;
    for (int n = 0; n + 1 < nf_; ++n) {
      we[n] += g.atom * sq_[n + 1] * vg[n + 1];
      wg[n + 1] += atom_c * sq_[n + 1] * ve[n];
    }
  }

  // psi <- exp(-i h G) psi by a Taylor series run to convergence.
  void exp_step(const Generator& g, double h, std::vector<cplx>& psi) {
    std::copy(psi.begin(), psi.end(), term_.begin());
    for (int j = 1; j <= kMaxTaylorTerms; ++j) {
      apply(g, term_.data(), next_.data());
      const cplx f(0.0, -h / j);
      double sq = 0.0;
      const auto active = static_cast<std::size_t>(sectors_ * nf_);
      for (std::size_t i = 0; i < active; ++i) {
        term_[i] = f * next_[i];
        psi[i] += term_[i];
        sq += std::norm(term_[i]);
      }
      if (sq < kTaylorTolerance) return;
    }
    throw NumericError("Taylor exponential did not converge; step too large");
  }

 private:
  int nf_;
  int sectors_;
  std::vector<double> sq_;
  std::vector<cplx> term_;
  std::vector<cplx> next_;
};

double top_fock_population(int nf, const std::vector<cplx>& psi) {
  double p = 0.0;
  for (int s = 0; s < 2; ++s) {
    for (int n = std::max(0, nf - 2); n < nf; ++n) p += std::norm(psi[s * nf + n]);
  }
  return p;
}

double excited(int nf, const std::vector<cplx>& psi) {
  double p = 0.0;
  for (int n = 0; n < nf; ++n) p += std::norm(psi[nf + n]);
  return p;
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * si::pi); }

void check_ratio(const char* name, double value) {
  if (classify_ratio(value) == Verdict::fail) {
    throw ConfigError(fmt::format("cavity model outside the light-shift regime: {} = {:.3g}", name, value));
  }
}

template <class T, class F>
std::vector<T> run_parallel(std::size_t count, int jobs, F&& task) {
  std::vector<T> out(count);
  const std::size_t width = static_cast<std::size_t>(std::max(1, jobs));
  for (std::size_t start = 0; start < count; start += width) {
    std::vector<std::future<T>> batch;
    for (std::size_t i = start; i < std::min(count, start + width); ++i) {
      batch.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred, task, i));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) out[start + i] = batch[i].get();
  }
  return out;
}

}  // namespace

double CavityModel::omega_a() const { return omega_a0 * std::cos(k * x_atom); }

double CavityModel::omega_c() const {
  const double c = std::cos(k * x_np);
  return omega_c0 * c * c;
}

double CavityModel::omega_l() const { return omega_l0 * std::cos(k * x_np); }

double CavityModel::eta() const { return omega_l() / delta_cl_eff(); }

double CavityModel::mu_abs() const { return std::abs(eta() * omega_a() / delta_al); }

double CavityModel::phi_eff() const {
  const double e = eta();
  const double a = omega_a();
  return tau * e * e * a * a / delta_al;
}

void CavityModel::validate() const {
  if (n_fock < 30) throw ConfigError(fmt::format("n_fock must be >= 30, got {}", n_fock));
  const double fields[] = {omega_a0, delta_al, delta_cl, omega_c0, omega_l0, x_np, x_atom, k, tau};
  for (double f : fields) {
    if (!std::isfinite(f)) throw ConfigError("cavity model fields must be finite");
  }
  if (!(k > 0.0)) throw ConfigError("cavity model: k must be > 0");
  if (!(tau >= 0.0)) throw ConfigError("cavity model: tau must be >= 0");
  if (omega_l() != 0.0 && delta_cl_eff() == 0.0) throw ConfigError("cavity model: resonant drive (d'_cl = 0)");
}

int CavityModel::auto_fock(double eta) {
  const double e = std::abs(eta) + 1.0;
  return static_cast<int>(std::ceil(4.0 * e * e + 20.0));
}

JointKet ground_vacuum(const CavityModel& model) {
  JointKet psi = JointKet::Zero(static_cast<Eigen::Index>(model.dim()));
  psi[0] = 1.0;
  return psi;
}

Eigen::MatrixXcd build_hamiltonian(const CavityModel& model, double t) {
  model.validate();
  const Generator g = generator_at(model, t);
  const int nf = model.n_fock;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(model.dim()),
                                              static_cast<Eigen::Index>(model.dim()));
  for (int s = 0; s < 2; ++s) {
    for (int n = 0; n < nf; ++n) {
      const int i = s * nf + n;
      h(i, i) = g.diag * n;
      if (n + 1 < nf) {
        h(i + 1, i) = g.drive * std::sqrt(n + 1.0);
        h(i, i + 1) = std::conj(g.drive) * std::sqrt(n + 1.0);
      }
    }
  }
  for (int n = 0; n + 1 < nf; ++n) {
    h(nf + n, n + 1) = g.atom * std::sqrt(n + 1.0);         // a s+ : |g,n+1> -> |e,n>
    h(n + 1, nf + n) = std::conj(g.atom) * std::sqrt(n + 1.0);
  }
  return h;
}

double max_stable_step(const CavityModel& m) {
  const double fastest =
      std::max({std::abs(m.delta_al), std::abs(m.omega_l0), std::abs(m.omega_a0), std::abs(m.delta_cl)});
  return fastest > 0.0 ? 0.01 / fastest : std::numeric_limits<double>::infinity();
}

JointKet propagate(const CavityModel& model, const JointKet& psi0, double t_end, double dt_max, Integrator scheme,
                   PropagationStats* stats) {
  return propagate_interval(model, psi0, 0.0, t_end, dt_max, scheme, stats);
}

JointKet propagate_interval(const CavityModel& model, const JointKet& psi0, double t_start, double t_end,
                            double dt_max, Integrator scheme, PropagationStats* stats) {
  model.validate();
  if (static_cast<std::size_t>(psi0.size()) != model.dim()) throw ConfigError("initial ket has the wrong dimension");
  if (!(t_end >= t_start)) throw ConfigError("propagate: t_end must not precede the start time");
  if (!(dt_max > 0.0) || dt_max > max_stable_step(model) * (1.0 + 1e-12)) {
    throw ConfigError(fmt::format("dt_max = {:.3g} s exceeds 0.01 / fastest frequency = {:.3g} s", dt_max,
                                  max_stable_step(model)));
  }
  const double span = t_end - t_start;
  const auto steps = static_cast<std::size_t>(std::ceil(span / dt_max - 1e-9));
  const double h = steps ? span / static_cast<double>(steps) : 0.0;
  const int nf = model.n_fock;

  std::vector<cplx> psi(psi0.data(), psi0.data() + psi0.size());
  const double norm0 = psi0.squaredNorm();
  const bool ground_only = model.omega_a() == 0.0 && psi0.segment(nf, nf).squaredNorm() == 0.0;
  Stepper stepper(model, ground_only);
  PropagationStats st;
  st.steps = steps;

  // Commutator-free fourth-order Magnus: two exponentials at the Gauss nodes.
  const double c1 = 0.5 - std::sqrt(3.0) / 6.0;
  const double c2 = 0.5 + std::sqrt(3.0) / 6.0;
  const double a1 = 0.25 + std::sqrt(3.0) / 6.0;
  const double a2 = 0.25 - std::sqrt(3.0) / 6.0;

  auto monitor = [&](std::size_t step) {
    const double top = top_fock_population(nf, psi);
    st.max_top_fock = std::max(st.max_top_fock, top);
    st.max_excited = std::max(st.max_excited, excited(nf, psi));
    if (top > kTopFockLimit) {
      throw TruncationError(fmt::format(
          "Fock truncation breached at step {} (t = {:.4g} s): top two levels hold {:.3g} > {:.0e}; raise n_fock above {}",
          step, t_start + static_cast<double>(step) * h, top, kTopFockLimit, nf));
    }
  };

  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t_start + static_cast<double>(s) * h;
    if (scheme == Integrator::midpoint) {
      stepper.exp_step(generator_at(model, t + 0.5 * h), h, psi);
    } else {
      const Generator g1 = generator_at(model, t + c1 * h);
      const Generator g2 = generator_at(model, t + c2 * h);
      Generator first = g1 * a1;
      first += g2 * a2;
      Generator second = g1 * a2;
      second += g2 * a1;
      stepper.exp_step(first, h, psi);
      stepper.exp_step(second, h, psi);
    }
    if ((s + 1) % kMonitorEvery == 0) monitor(s + 1);
  }
  monitor(steps);

  JointKet out = Eigen::Map<JointKet>(psi.data(), static_cast<Eigen::Index>(psi.size()));
  st.norm_drift = std::abs(out.squaredNorm() - norm0);
  if (stats) *stats = st;
  return out;
}

double excited_population(const CavityModel& model, const JointKet& psi) {
  return psi.segment(model.n_fock, model.n_fock).squaredNorm();
}

cplx mean_a(const CavityModel& model, const JointKet& psi) {
  const int nf = model.n_fock;
  cplx acc{};
  for (int s = 0; s < 2; ++s) {
    for (int n = 1; n < nf; ++n) acc += std::conj(psi[s * nf + n - 1]) * std::sqrt(static_cast<double>(n)) * psi[s * nf + n];
  }
  return acc;
}

PhaseResult effective_phase_experiment(const CavityModel& model, double dt_max) {
  model.validate();
  if (model.omega_a() != 0.0) {
    check_ratio("Omega_a/delta_al", std::abs(model.omega_a() / model.delta_al));
    check_ratio("delta_al/Delta", std::abs(model.delta_al / model.detuning()));
    check_ratio("|mu|", model.mu_abs());
  }
  const double dt = dt_max > 0.0 ? dt_max : 0.5 * max_stable_step(model);
  CavityModel reference = model;
  reference.omega_a0 = 0.0;

  const JointKet psi0 = ground_vacuum(model);
  PropagationStats coarse_stats;
  PropagationStats fine_stats;
  PropagationStats ref_stats;
  const JointKet coarse = propagate(model, psi0, model.tau, dt, Integrator::magnus4, &coarse_stats);
  const JointKet fine = propagate(model, psi0, model.tau, 0.5 * dt, Integrator::magnus4, &fine_stats);
  const JointKet ref_coarse = propagate(reference, psi0, model.tau, dt);
  const JointKet ref_fine = propagate(reference, psi0, model.tau, 0.5 * dt, Integrator::magnus4, &ref_stats);

  const auto ground = [&](const JointKet& v) { return v.head(model.n_fock); };
  const double phase_coarse = std::arg(ground(ref_coarse).dot(ground(coarse)));
  const double phase_fine = std::arg(ground(ref_fine).dot(ground(fine)));

  PhaseResult r;
  r.phi_eff = model.phi_eff();
  r.phi_full = r.phi_eff + wrap_angle(phase_fine - r.phi_eff);
  r.rel_err = r.phi_eff != 0.0 ? std::abs(r.phi_full - r.phi_eff) / std::abs(r.phi_eff) : std::abs(r.phi_full);
  r.p_excite = excited_population(model, fine);
  r.p_excite_max = std::max(fine_stats.max_excited, r.p_excite);
  r.mu_abs = model.mu_abs();
  r.richardson_state = (coarse - fine).norm();
  r.richardson_phase = std::abs(wrap_angle(phase_coarse - phase_fine));
  r.norm_drift = std::max({coarse_stats.norm_drift, fine_stats.norm_drift, ref_stats.norm_drift});
  r.steps = fine_stats.steps;
  return r;
}

CavityModel ladder_model(const LadderSpec& spec, double ratio, double x_np, double x_atom) {
  if (!(ratio > 0.0)) throw ConfigError("ladder ratio must be > 0");
  CavityModel m;
  m.omega_a0 = spec.omega_a0;
  m.omega_c0 = spec.omega_c0;
  m.k = spec.k;
  m.tau = spec.tau;
  m.x_np = x_np;
  m.x_atom = x_atom;
  m.delta_al = spec.omega_a0 / ratio;
  const double delta_cl_eff = -spec.kappa * m.delta_al / ratio;
  // d'_cl is set at the antinode; away from it Omega_c shrinks and d'_cl moves by < Omega_c0.
  m.delta_cl = delta_cl_eff + spec.omega_c0;
  m.omega_l0 = spec.eta * std::abs(delta_cl_eff);
  m.n_fock = spec.n_fock > 0 ? spec.n_fock : CavityModel::auto_fock(spec.eta);
  if (spec.commensurate_tau) {
    const double g = m.eta() * m.omega_a();
    const double beat = std::sqrt(m.delta_al * m.delta_al + 4.0 * g * g);
    const double periods = std::max(1.0, std::round(spec.tau * beat / (2.0 * si::pi)));
    m.tau = 2.0 * si::pi * periods / beat;
  }
  return m;
}

LadderReport effective_phase_ladder(const LadderSpec& spec, int jobs) {
  if (spec.ratios.empty()) throw ConfigError("ladder needs at least one ratio");
  LadderReport rep;
  auto results = run_parallel<PhaseResult>(spec.ratios.size(), jobs, [&](std::size_t i) {
    return effective_phase_experiment(ladder_model(spec, spec.ratios[i]), spec.dt_max);
  });
  rep.monotone = true;
  rep.excitation_bounded = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    rep.points.push_back({spec.ratios[i], results[i]});
    const auto& r = results[i];
    rep.excitation_bounded = rep.excitation_bounded && r.p_excite_max < 4.0 * r.mu_abs * r.mu_abs;
    if (i > 0) {
      const bool shrinking_ratio = spec.ratios[i] < spec.ratios[i - 1];
      const bool improving = r.rel_err < results[i - 1].rel_err;
      rep.monotone = rep.monotone && shrinking_ratio == improving;
    }
  }
  rep.final_rel_err = results.back().rel_err;
  return rep;
}

PositionScan node_antinode_scan(const LadderSpec& spec, double ratio, int n_positions, int jobs) {
  if (n_positions < 2) throw ConfigError("position scan needs at least two points");
  PositionScan scan;
  const double half_period = si::pi / spec.k;
  for (int i = 0; i < n_positions; ++i) scan.x_np.push_back(half_period * i / n_positions);
  // Pulse lengths differ slightly between positions when rounded to whole beat
  // periods; phases are rescaled to the nominal tau.
  auto phases = run_parallel<double>(scan.x_np.size(), jobs, [&](std::size_t i) {
    const CavityModel m = ladder_model(spec, ratio, scan.x_np[i]);
    return effective_phase_experiment(m, spec.dt_max).phi_full * spec.tau / m.tau;
  });
  scan.phi_full = phases;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double c = std::cos(spec.k * scan.x_np[i]);
    num += phases[i] * c * c;
    den += c * c * c * c;
  }
  scan.amplitude = num / den;
  double peak = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double c = std::cos(spec.k * scan.x_np[i]);
    scan.fitted.push_back(scan.amplitude * c * c);
    peak = std::max(peak, std::abs(phases[i]));
    worst = std::max(worst, std::abs(phases[i] - scan.fitted.back()));
  }
  scan.residual_rel = peak > 0.0 ? worst / peak : 0.0;
  return scan;
}

BchReport bch_pauli_check(cplx mu) {
  using M2 = Eigen::Matrix2cd;
  // basis (g, e)
  M2 sp = M2::Zero();
  sp(1, 0) = 1.0;
  const M2 sm = sp.adjoint();
  M2 pe = M2::Zero();
  pe(1, 1) = 1.0;
  const M2 sz = pe - (M2::Identity() - pe);
  const M2 r = mu * sp + std::conj(mu) * sm;
  const cplx i(0.0, 1.0);
  const M2 u = (i * r).exp();
  const M2 ud = u.adjoint();

  const cplx mc = std::conj(mu);
  const double m2 = std::norm(mu);
  const M2 sp_exact = u * sp * ud;
  const M2 sp_series = sp - i * mc * sz + mc * mc * sm - mc * mu * sp;
  const M2 pe_exact = u * pe * ud;
  const M2 pe_series = pe + i * (mc * sm - mu * sp) - m2 * sz;

  const auto comm = [](const M2& a, const M2& b) -> M2 { return a * b - b * a; };
  double cdev = 0.0;
  cdev = std::max(cdev, (comm(r, sz) - 2.0 * (mc * sm - mu * sp)).cwiseAbs().maxCoeff());
  cdev = std::max(cdev, (comm(r, pe) - (mc * sm - mu * sp)).cwiseAbs().maxCoeff());
  cdev = std::max(cdev, (comm(r, sp) + mc * sz).cwiseAbs().maxCoeff());
  cdev = std::max(cdev, (comm(r, sm) - mu * sz).cwiseAbs().maxCoeff());

  BchReport rep;
  rep.mu_abs = std::abs(mu);
  rep.dev_sigma_plus = (sp_exact - sp_series).cwiseAbs().maxCoeff();
  rep.dev_excited = (pe_exact - pe_series).cwiseAbs().maxCoeff();
  rep.dev_max = std::max(rep.dev_sigma_plus, rep.dev_excited);
  rep.commutator_dev = cdev;
  return rep;
}

BchScaling bch_scaling(std::span<const double> mu_abs, double mu_arg) {
  if (mu_abs.size() < 2) throw ConfigError("BCH scaling needs at least two |mu| values");
  BchScaling out;
  std::vector<double> lx;
  std::vector<double> ly;
  for (double a : mu_abs) {
    if (!(a > 0.0) || a > 0.5) throw ConfigError("BCH check requires 0 < |mu| <= 0.5");
    out.rows.push_back(bch_pauli_check(std::polar(a, mu_arg)));
    lx.push_back(std::log(a));
    ly.push_back(std::log(out.rows.back().dev_max));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  out.exponent = sxy / sxx;
  return out;
}

ZassenhausReport zassenhaus_check(double k, double mass, double t_i, double t_j) {
  return zassenhaus_check(k, mass, 4.0 * si::hbar * k, t_i, t_j);
}

ZassenhausReport zassenhaus_check(double k, double mass, double delta_p, double t_i, double t_j) {
  const MomentumGrid grid = aligned_grid(delta_p, 2.0 * si::hbar * k, 2.0 * si::hbar * k, 10.0);
  const GridState s = init_gaussian(delta_p, mass, grid);
  // exp(i 2k [x(t_i) - x(t_j)]) = exp(i 2k p (t_i - t_j) / m), diagonal in p.
  const GridState lhs = apply_velocity_phase(s, 2.0, k, t_i - t_j);
  // [x(t_j), x(t_i)] = i hbar (t_i - t_j) / m
  const cplx scalar = std::polar(1.0, -2.0 * k * k * si::hbar * (t_i - t_j) / mass);
  const auto at = [&](const GridState& v, double n, double t) {
    return free_propagate(apply_kick(free_propagate(v, t), {n, k}), -t);
  };
  const GridState rhs = at(at(s, 2.0, t_i), -2.0, t_j).scaled(scalar);
  return {max_abs_difference(lhs, rhs), scalar};
}

DisplacedOscillatorReport displaced_oscillator_check(const CavityModel& model, double t_end, int samples) {
  if (samples < 1) throw ConfigError("displaced-oscillator check needs samples >= 1");
  CavityModel m = model;
  m.omega_a0 = 0.0;
  m.validate();
  const double eta = m.eta();
  const double dcl = m.delta_cl_eff();
  // a quarter of the stability bound keeps the accumulated step error below 1e-9
  const double dt = 0.25 * max_stable_step(m);
  DisplacedOscillatorReport rep;
  rep.samples = samples;
  JointKet psi = ground_vacuum(m);
  double t = 0.0;
  for (int s = 1; s <= samples; ++s) {
    const double t_next = t_end * s / samples;
    psi = propagate_interval(m, psi, t, t_next, dt);
    t = t_next;
    const cplx alpha = eta * (std::polar(1.0, m.delta_cl * t) - std::polar(1.0, m.omega_c() * t));
    const cplx scalar = std::exp(cplx(0.0, m.omega_l() * eta * t) - eta * eta * (1.0 - std::polar(1.0, -dcl * t)));
    JointKet exact = JointKet::Zero(psi.size());
    cplx amp = scalar;
    for (int n = 0; n < m.n_fock; ++n) {
      exact[n] = amp;
      amp *= alpha / std::sqrt(n + 1.0);
    }
    rep.max_alpha_err = std::max(rep.max_alpha_err, std::abs(mean_a(m, psi) - alpha) / std::abs(eta));
    rep.max_state_err = std::max(rep.max_state_err, (psi - exact).norm());
  }
  return rep;
}

double constant_generator_check(const CavityModel& model, double t_end) {
  CavityModel m = model;
  m.delta_al = 0.0;
  m.delta_cl = 0.0;
  const Eigen::MatrixXcd h = build_hamiltonian(m, 0.0);
  const JointKet psi0 = ground_vacuum(m);
  const JointKet exact = (cplx(0.0, -t_end) * h).exp() * psi0;
  const double dt = std::min(max_stable_step(m), 0.01 / std::max(std::abs(m.omega_c0), 1e-300));
  const JointKet numeric = propagate(m, psi0, t_end, dt);
  return (numeric - exact).norm();
}

}  // namespace kdsim
