#include "kdsim/interferometer.hpp"

#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"

namespace kdsim {

namespace {

using si::hbar;

constexpr double kSymmetryTolerance = 1e-12;

GridState heisenberg_kick(const GridState& s, double n, double k, double t) {
  if (t == 0.0) return apply_kick(s, {n, k});
  return free_propagate(apply_kick(free_propagate(s, t), {n, k}), -t);
}

GridState apply_program(const GridState& s, const NpProgram& prog, double k) {
  GridState out = s;
  for (auto it = prog.factors.rbegin(); it != prog.factors.rend(); ++it) out = apply_series_at(out, it->f, k, it->t);
  return out;
}

std::vector<TimedSeries> adjoint_then(const NpProgram& left, const NpProgram& right) {
  std::vector<TimedSeries> ops;
  for (auto it = left.factors.rbegin(); it != left.factors.rend(); ++it) ops.push_back({it->f.adjoint(), it->t});
  ops.insert(ops.end(), right.factors.begin(), right.factors.end());
  return ops;
}

double norm_of_difference(const GridState& a, const GridState& b) {
  return std::sqrt((a.amplitudes() - b.amplitudes()).squaredNorm() * a.dp());
}

struct PathTerms {
  double red = 0.0;   // <R^dag R>
  double blue = 0.0;  // <B^dag B>
  cplx cross{};       // <R^dag B>
};

PathTerms path_terms(const PathSpec& spec, const NpState& np, cplx common) {
  const auto [red, blue] = particle_programs(spec);
  PathTerms out;
  if (const auto* g = std::get_if<GaussianState>(&np)) {
    g->validate();
    const auto rr = adjoint_then(red, red);
    const auto bb = adjoint_then(blue, blue);
    const auto rb = adjoint_then(red, blue);
    out.red = std::norm(common) * expect_series_product(*g, rr, spec.k).real();
    out.blue = std::norm(common) * expect_series_product(*g, bb, spec.k).real();
    out.cross = std::norm(common) * expect_series_product(*g, rb, spec.k);
  } else {
    const auto& s = std::get<GridState>(np);
    const GridState r = apply_program(s, red, spec.k).scaled(common);
    const GridState b = apply_program(s, blue, spec.k).scaled(common);
    out.red = overlap(r, r).real();
    out.blue = overlap(b, b).real();
    out.cross = overlap(r, b);
  }
  return out;
}

MomentumGrid atom_grid(const PathSpec& spec, double delta_p) {
  return aligned_grid(delta_p, 2.0 * hbar * spec.k, 4.0 * hbar * spec.k, 10.0);
}

// Eigen-free dense complex matrix for the ring model.
using Mat = std::vector<cplx>;

Mat ring_propagator(int g, double mass, double k, double t) {
  // U(t) = F^dag diag(exp(-i p_m^2 t / (2 M hbar))) F, p_m = 2 hbar k m.
  Mat u(static_cast<std::size_t>(g * g));
  for (int a = 0; a < g; ++a) {
    for (int b = 0; b < g; ++b) {
      cplx acc{};
      for (int mi = 0; mi < g; ++mi) {
        const int m = mi < g / 2 ? mi : mi - g;
        const double p = 2.0 * hbar * k * m;
        const double phase = -p * p * t / (2.0 * mass * hbar) + 2.0 * si::pi * m * (a - b) / g;
        acc += std::polar(1.0, phase);
      }
      u[static_cast<std::size_t>(a * g + b)] = acc / static_cast<double>(g);
    }
  }
  return u;
}

class RingState {
 public:
  RingState(int particles, int g) : particles_(particles), g_(g) {
    std::size_t n = 1;
    for (int i = 0; i < particles; ++i) n *= static_cast<std::size_t>(g);
    amp_.assign(n, cplx{});
  }

  std::size_t stride(int axis) const {
    std::size_t s = 1;
    for (int i = axis + 1; i < particles_; ++i) s *= static_cast<std::size_t>(g_);
    return s;
  }

  void product_init(const std::vector<cplx>& single) {
    for (std::size_t idx = 0; idx < amp_.size(); ++idx) {
      cplx v = 1.0;
      std::size_t rest = idx;
      for (int a = particles_ - 1; a >= 0; --a) {
        v *= single[rest % static_cast<std::size_t>(g_)];
        rest /= static_cast<std::size_t>(g_);
      }
      amp_[idx] = v;
    }
  }

  int coord(std::size_t idx, int axis) const {
    return static_cast<int>((idx / stride(axis)) % static_cast<std::size_t>(g_));
  }

  void apply_axis(int axis, const Mat& u) {
    const std::size_t st = stride(axis);
    const std::size_t gz = static_cast<std::size_t>(g_);
    std::vector<cplx> col(gz);
    for (std::size_t base = 0; base < amp_.size(); ++base) {
      if ((base / st) % gz != 0) continue;
      for (std::size_t i = 0; i < gz; ++i) col[i] = amp_[base + i * st];
      for (std::size_t i = 0; i < gz; ++i) {
        cplx acc{};
        for (std::size_t j = 0; j < gz; ++j) acc += u[i * gz + j] * col[j];
        amp_[base + i * st] = acc;
      }
    }
  }

  // exp(4 i xi cos^2(k x) cos^2(k x_aj)) with x on axis 0 and x_aj on axis `atom`.
  void apply_pulse(int atom, double xi) {
    for (std::size_t idx = 0; idx < amp_.size(); ++idx) {
      const double cx = std::cos(si::pi * coord(idx, 0) / g_);
      const double ca = std::cos(si::pi * coord(idx, atom) / g_);
      amp_[idx] *= std::polar(1.0, 4.0 * xi * cx * cx * ca * ca);
    }
  }

  const std::vector<cplx>& amp() const { return amp_; }

 private:
  int particles_;
  int g_;
  std::vector<cplx> amp_;
};

double pure_state_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx ab{};
  for (std::size_t i = 0; i < a.size(); ++i) ab += std::conj(a[i]) * b[i];
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(b[i] - a[i] * ab);
  return std::sqrt(acc);
}

}  // namespace

bool PathSpec::symmetric() const {
  const double scale = std::max({std::abs(t1), std::abs(t4), 1e-300});
  return std::abs((t2 - t1) - (t4 - t3)) <= kSymmetryTolerance * scale;
}

void PathSpec::validate() const {
  if (!(t1 >= 0.0)) throw ConfigError("PathSpec: t1 must be >= 0 (times run from release)");
  // Coincident pulses (t1 = t2, t3 = t4) are allowed as the degenerate limit.
  if (!(t1 <= t2 && t2 <= t3 && t3 <= t4)) throw ConfigError("PathSpec: need t1 <= t2 <= t3 <= t4");
  for (int s : kick_sign) {
    if (s != 1 && s != -1) throw ConfigError("PathSpec: kick signs must be +1 or -1");
  }
  if (kick_sign[0] != kick_sign[1] || kick_sign[2] != -kick_sign[0] || kick_sign[3] != -kick_sign[1]) {
    throw ConfigError("PathSpec: the two paths must open and close with opposite kicks of equal sign pattern");
  }
  if (!(xi[0] >= 0.0) || !(xi[1] >= 0.0)) throw ConfigError("PathSpec: xi must be >= 0");
  if (std::abs(recombiner[0]) > 1.0 + 1e-12 || std::abs(recombiner[1]) > 1.0 + 1e-12) {
    throw ConfigError("PathSpec: |alpha_l| and |beta_l| must not exceed 1");
  }
  if (!(k > 0.0)) throw ConfigError("PathSpec: k must be > 0");
  if (!symmetric()) {
    throw ConfigError(fmt::format(
        "PathSpec: t4 - t3 = {:.6g} s differs from t2 - t1 = {:.6g} s; the atomic parts of the two paths only "
        "coincide for the symmetric layout t3 - t1 = t4 - t2",
        t4 - t3, t2 - t1));
  }
}

std::pair<NpProgram, NpProgram> particle_programs(const PathSpec& spec) {
  spec.validate();
  const bool linear = !spec.exact_pulses;
  // Red: scattered by pulse 1, unscattered by pulse 2. Blue: the reverse.
  NpProgram red;
  red.factors.push_back({diffraction_amplitude(spec.xi[1], 0, linear).scaled(spec.recombiner[0]), spec.t2});
  red.factors.push_back({diffraction_amplitude(spec.xi[0], spec.kick_sign[0], linear), spec.t1});
  NpProgram blue;
  blue.factors.push_back({diffraction_amplitude(spec.xi[1], spec.kick_sign[1], linear).scaled(spec.recombiner[1]),
                          spec.t2});
  blue.factors.push_back({diffraction_amplitude(spec.xi[0], 0, linear), spec.t1});
  return {red, blue};
}

PathPrograms path_operators(const PathSpec& spec, const AtomProbe& atom) {
  if (!(atom.mass > 0.0)) throw ConfigError("path_operators: atom mass must be > 0");
  auto [red, blue] = particle_programs(spec);
  PathPrograms out;
  out.red = std::move(red);
  out.blue = std::move(blue);

  const double k = spec.k;
  const double dp = atom.delta_p > 0.0 ? atom.delta_p : hbar * k;
  const GridState a = init_gaussian(dp, atom.mass, atom_grid(spec, dp));
  const double s1 = 2.0 * spec.kick_sign[0];
  const double s2 = 2.0 * spec.kick_sign[1];
  const double s3 = 2.0 * spec.kick_sign[2];
  const double s4 = 2.0 * spec.kick_sign[3];
  const double t = spec.big_t();

  // time-ordered forms
  const GridState red_literal =
      free_evolve(apply_kick(free_evolve(apply_kick(a, {s1, k}), spec.t3 - spec.t1), {s3, k}), spec.t4 - spec.t3);
  const GridState blue_literal =
      apply_kick(free_evolve(apply_kick(free_evolve(a, spec.t2 - spec.t1), {s2, k}), spec.t4 - spec.t2), {s4, k});
  // Heisenberg forms, kicks pulled back to t1
  const double span = spec.t4 - spec.t1;
  const GridState red_heis =
      free_evolve(heisenberg_kick(heisenberg_kick(a, s1, k, 0.0), s3, k, spec.t3 - spec.t1), span);
  const GridState blue_heis =
      free_evolve(heisenberg_kick(heisenberg_kick(a, s2, k, spec.t2 - spec.t1), s4, k, spec.t4 - spec.t1), span);
  // single velocity phase times the recoil scalar
  out.atomic_phase = std::polar(1.0, -2.0 * hbar * k * k * t / atom.mass);
  const GridState reduced = free_evolve(apply_velocity_phase(a, s3, k, t), span).scaled(out.atomic_phase);

  out.atomic_cancellation = std::max(norm_of_difference(red_literal, blue_literal), norm_of_difference(red_heis, reduced));
  out.literal_vs_heisenberg = std::max(norm_of_difference(red_literal, red_heis), norm_of_difference(blue_literal, blue_heis));
  return out;
}

SignalBreakdown general_signal(const PathSpec& spec, const NpState& np) {
  const PathTerms terms = path_terms(spec, np, 1.0);
  SignalBreakdown out;
  out.p_total = terms.red + terms.blue + 2.0 * terms.cross.real();
  const double a2 = std::norm(spec.recombiner[0]);
  const double b2 = std::norm(spec.recombiner[1]);
  out.p_background = 3.0 * (spec.xi[0] * spec.xi[0] * a2 + spec.xi[1] * spec.xi[1] * b2) / 8.0;
  out.p_interference = out.p_total - out.p_background;
  double mass = 0.0;
  double delta_p = 0.0;
  if (const auto* g = std::get_if<GaussianState>(&np)) {
    mass = g->mass;
    delta_p = g->delta_p;
  } else {
    const auto& s = std::get<GridState>(np);
    mass = s.mass();
    delta_p = std::sqrt(s.variance_p());
  }
  out.theta_q = theta_q(spec.k, mass, spec.dt());
  out.visibility_G = visibility_G(delta_p, mass, spec.k, spec.dt());
  return out;
}

double recoil_phase_check(const PathSpec& spec, const NpState& np, double atom_mass) {
  if (!(atom_mass > 0.0)) throw ConfigError("recoil_phase_check: atom mass must be > 0");
  const cplx phase = std::polar(1.0, -2.0 * hbar * spec.k * spec.k * spec.big_t() / atom_mass);
  const PathTerms with = path_terms(spec, np, phase);
  const PathTerms without = path_terms(spec, np, 1.0);
  const double p_with = with.red + with.blue + 2.0 * with.cross.real();
  const double p_without = without.red + without.blue + 2.0 * without.cross.real();
  return std::abs(p_with - p_without);
}

double literal_form_check(const PathSpec& spec, const GridState& atom, const GridState& np) {
  spec.validate();
  const double k = spec.k;
  const double span = spec.t4 - spec.t1;
  const double s1 = 2.0 * spec.kick_sign[0];
  const double s2 = 2.0 * spec.kick_sign[1];
  const double s3 = 2.0 * spec.kick_sign[2];
  const double s4 = 2.0 * spec.kick_sign[3];
  const auto cos2 = HarmonicSeries::cos2();

  const GridState red_a_lit =
      free_evolve(apply_kick(free_evolve(apply_kick(atom, {s1, k}), spec.t3 - spec.t1), {s3, k}), spec.t4 - spec.t3);
  const GridState red_a_heis = free_evolve(heisenberg_kick(apply_kick(atom, {s1, k}), s3, k, spec.t3 - spec.t1), span);
  const GridState blue_a_lit =
      apply_kick(free_evolve(apply_kick(free_evolve(atom, spec.t2 - spec.t1), {s2, k}), spec.t4 - spec.t2), {s4, k});
  const GridState blue_a_heis =
      free_evolve(heisenberg_kick(heisenberg_kick(atom, s2, k, spec.t2 - spec.t1), s4, k, span), span);

  // particle sector: U(t4 - t2) cos^2 U(t2 - t1) against U(t4 - t1) cos^2(k x(t2 - t1))
  const GridState red_n_lit = free_evolve(apply_series(np, cos2, k), span);
  const GridState red_n_heis = free_evolve(apply_series_at(np, cos2, k, 0.0), span);
  const GridState blue_n_lit = free_evolve(apply_series(free_evolve(np, spec.t2 - spec.t1), cos2, k), spec.t4 - spec.t2);
  const GridState blue_n_heis = free_evolve(apply_series_at(np, cos2, k, spec.t2 - spec.t1), span);

  return std::max({norm_of_difference(red_a_lit, red_a_heis), norm_of_difference(blue_a_lit, blue_a_heis),
                   norm_of_difference(red_n_lit, red_n_heis), norm_of_difference(blue_n_lit, blue_n_heis)});
}

FactorizationReport many_atom_factorization_check(int n_atoms, std::span<const double> xis, int grid_size,
                                                  const FactorizationOptions& opts) {
  if (n_atoms < 1 || n_atoms > 3) throw ConfigError("factorization check supports 1 to 3 atoms");
  if (grid_size < 2 || grid_size > 16) throw ConfigError("factorization grid must have 2..16 points per particle");
  if (xis.empty()) throw ConfigError("factorization check needs at least one xi");
  const int particles = n_atoms + 1;
  double dim = std::pow(static_cast<double>(grid_size), particles);
  if (dim > std::pow(16.0, 4)) throw ConfigError(fmt::format("ring dimension {} exceeds 16^4", dim));

  const double k = 2.0 * si::pi / opts.lambda;
  const double np_mass = opts.np_mass > 0.0 ? opts.np_mass : 1e8 * si::amu;
  const double atom_mass = opts.atom_mass > 0.0 ? opts.atom_mass : 86.909 * si::amu;
  const Mat u_np = ring_propagator(grid_size, np_mass, k, opts.dt);
  const Mat u_np_back = ring_propagator(grid_size, np_mass, k, -opts.dt);
  const Mat u_at = ring_propagator(grid_size, atom_mass, k, opts.dt);
  const Mat u_at_back = ring_propagator(grid_size, atom_mass, k, -opts.dt);

  // single-particle momentum Gaussian moved to positions
  std::vector<cplx> single(static_cast<std::size_t>(grid_size));
  {
    double norm = 0.0;
    std::vector<double> pm(static_cast<std::size_t>(grid_size));
    for (int mi = 0; mi < grid_size; ++mi) {
      const int m = mi < grid_size / 2 ? mi : mi - grid_size;
      pm[static_cast<std::size_t>(mi)] = std::exp(-m * m / (4.0 * opts.momentum_width * opts.momentum_width));
      norm += pm[static_cast<std::size_t>(mi)] * pm[static_cast<std::size_t>(mi)];
    }
    for (int s = 0; s < grid_size; ++s) {
      cplx acc{};
      for (int mi = 0; mi < grid_size; ++mi) {
        const int m = mi < grid_size / 2 ? mi : mi - grid_size;
        acc += pm[static_cast<std::size_t>(mi)] * std::polar(1.0, 2.0 * si::pi * m * s / grid_size);
      }
      single[static_cast<std::size_t>(s)] = acc / std::sqrt(norm * grid_size);
    }
  }

  FactorizationReport rep;
  rep.n_atoms = n_atoms;
  rep.grid_size = grid_size;
  for (double xi : xis) {
    RingState exact(particles, grid_size);
    exact.product_init(single);
    for (int j = 1; j <= n_atoms; ++j) exact.apply_pulse(j, xi);
    for (int a = 0; a < particles; ++a) exact.apply_axis(a, a == 0 ? u_np : u_at);
    for (int j = 1; j <= n_atoms; ++j) exact.apply_pulse(j, xi);
    for (int a = 0; a < particles; ++a) exact.apply_axis(a, a == 0 ? u_np_back : u_at_back);

    RingState fact(particles, grid_size);
    fact.product_init(single);
    for (int j = n_atoms; j >= 1; --j) {
      fact.apply_pulse(j, xi);
      fact.apply_axis(0, u_np);
      fact.apply_axis(j, u_at);
      fact.apply_pulse(j, xi);
      fact.apply_axis(0, u_np_back);
      fact.apply_axis(j, u_at_back);
    }
    rep.rows.push_back({xi, pure_state_distance(exact.amp(), fact.amp())});
  }

  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& r : rep.rows) {
    if (r.error > 0.0 && r.xi > 0.0) {
      lx.push_back(std::log(r.xi));
      ly.push_back(std::log(r.error));
    }
  }
  if (lx.size() >= 2) {
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    rep.exponent = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  return rep;
}

}  // namespace kdsim
