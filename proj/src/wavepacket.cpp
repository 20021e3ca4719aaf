#include "kdsim/wavepacket.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include <fmt/format.h>
#include <unsupported/Eigen/FFT>

#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"

namespace kdsim {

namespace {

using si::hbar;

constexpr double kAlignTolerance = 1e-9;    // in units of dp
constexpr double kEscapeTolerance = 1e-14;  // probability allowed to leave the grid
constexpr double kBandTolerance = 1e-24;    // spectral weight allowed near the position-window edge

void check_same_grid(const GridState& a, const GridState& b) {
  if (a.size() != b.size() || a.dp() != b.dp()) throw GridError("states live on different grids");
}

// Probability that would wrap around when shifting by `cells` (rounded outward).
double escaping_mass(const Eigen::VectorXcd& amp, double dp, double cells) {
  const auto n = static_cast<std::ptrdiff_t>(amp.size());
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(std::abs(cells)));
  double mass = 0.0;
  if (cells > 0) {
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, n - reach); i < n; ++i) mass += std::norm(amp[i]);
  } else {
    for (std::ptrdiff_t i = 0; i < std::min(reach, n); ++i) mass += std::norm(amp[i]);
  }
  return mass * dp;
}

[[noreturn]] void throw_escape(const GridState& s, double shift, double mass) {
  // Span needed: outermost occupied momentum plus the shift, with margin.
  double reach = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::norm(s.amplitudes()[i]) * s.dp() > kEscapeTolerance) reach = std::max(reach, std::abs(s.momentum(i)));
  }
  throw GridError(fmt::format(
      "kick of {:.6g} kg m/s pushes probability {:.3g} off the grid; need half-span >= {:.6g} kg m/s (have {:.6g})",
      shift, mass, reach + std::abs(shift), -s.p_min()));
}

Eigen::VectorXcd fourier_shift(const Eigen::VectorXcd& amp, double cells) {
  const auto n = static_cast<std::ptrdiff_t>(amp.size());
  std::vector<cplx> in(amp.data(), amp.data() + n);
  std::vector<cplx> spec;
  Eigen::FFT<double> fft;
  fft.fwd(spec, in);

  double total = 0.0;
  double edge = 0.0;
  for (std::ptrdiff_t m = 0; m < n; ++m) {
    const std::ptrdiff_t f = m < n / 2 ? m : m - n;
    const double w = std::norm(spec[m]);
    total += w;
    if (std::abs(f) >= 3 * n / 8) edge += w;
  }
  if (edge > kBandTolerance * total) {
    throw GridError(fmt::format(
        "state not band-limited for a sub-cell shift (edge weight {:.3g}); refine dp or use an aligned grid",
        edge / total));
  }
  for (std::ptrdiff_t m = 0; m < n; ++m) {
    const std::ptrdiff_t f = m < n / 2 ? m : m - n;
    spec[m] *= f == -n / 2 ? cplx{} : std::polar(1.0, -2.0 * si::pi * static_cast<double>(f) * cells / n);
  }
  std::vector<cplx> out;
  fft.inv(out, spec);
  return Eigen::Map<Eigen::VectorXcd>(out.data(), n);
}

GridState multiply_phase(const GridState& s, auto phase_of_p) {
  Eigen::VectorXcd out = s.amplitudes();
  for (std::size_t i = 0; i < s.size(); ++i) out[i] *= std::polar(1.0, phase_of_p(s.momentum(i)));
  return GridState(s.grid(), s.mass(), std::move(out));
}

}  // namespace

GridState::GridState(MomentumGrid grid, double mass, Eigen::VectorXcd amplitudes)
    : grid_(grid), mass_(mass), amp_(std::move(amplitudes)) {
  if (!std::has_single_bit(grid_.n_points) || grid_.n_points < 2) {
    throw GridError(fmt::format("n_points must be a power of two, got {}", grid_.n_points));
  }
  if (!(grid_.dp > 0.0)) throw GridError("grid spacing must be > 0");
  if (static_cast<std::size_t>(amp_.size()) != grid_.n_points) throw GridError("amplitude count != n_points");
}

double GridState::norm() const { return amp_.squaredNorm() * grid_.dp; }

double GridState::mean_p() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) acc += momentum(i) * std::norm(amp_[i]);
  return acc * grid_.dp / norm();
}

double GridState::variance_p() const {
  const double mu = mean_p();
  double acc = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double d = momentum(i) - mu;
    acc += d * d * std::norm(amp_[i]);
  }
  return acc * grid_.dp / norm();
}

GridState GridState::scaled(cplx factor) const { return GridState(grid_, mass_, amp_ * factor); }

GridState GridState::plus(const GridState& other) const {
  check_same_grid(*this, other);
  return GridState(grid_, mass_, amp_ + other.amp_);
}

MomentumGrid aligned_grid(double delta_p, double kick_quantum, double max_kick, double span_sigmas,
                          std::size_t min_points, double points_per_sigma) {
  if (!(delta_p > 0.0) || !(kick_quantum > 0.0)) throw ConfigError("aligned_grid: delta_p and kick_quantum must be > 0");
  if (!(span_sigmas >= 8.0)) throw ConfigError("aligned_grid: span_sigmas must be >= 8");
  const double q = std::max(1.0, std::ceil(kick_quantum * points_per_sigma / delta_p));
  const double dp = kick_quantum / q;
  const double half = span_sigmas * delta_p + std::abs(max_kick);
  const auto needed = static_cast<std::size_t>(2.0 * std::ceil(half / dp) + 2.0);
  return {dp, std::bit_ceil(std::max(min_points, needed))};
}

GridState init_gaussian(double delta_p, double mass, std::size_t n_points, double span_sigmas, double mean_p) {
  if (!std::has_single_bit(n_points) || n_points < 1024) {
    throw ConfigError(fmt::format("n_points must be a power of two >= 1024, got {}", n_points));
  }
  if (!(span_sigmas >= 8.0)) throw ConfigError("span_sigmas must be >= 8");
  if (!(delta_p > 0.0)) throw ConfigError("delta_p must be > 0");
  return init_gaussian(delta_p, mass, MomentumGrid{2.0 * span_sigmas * delta_p / n_points, n_points}, mean_p);
}

GridState init_gaussian(double delta_p, double mass, const MomentumGrid& grid, double mean_p) {
  if (!(delta_p > 0.0)) throw ConfigError("delta_p must be > 0");
  if (!(mass > 0.0)) throw ConfigError("mass must be > 0");
  if (grid.dp > delta_p / 16.0) {
    throw GridError(fmt::format("grid too coarse: dp = {:.3g} > delta_p/16 = {:.3g}", grid.dp, delta_p / 16.0));
  }
  if (-grid.p_min() < 8.0 * delta_p + std::abs(mean_p)) throw GridError("grid span smaller than 8 delta_p");
  Eigen::VectorXcd amp(grid.n_points);
  for (std::size_t i = 0; i < grid.n_points; ++i) {
    const double p = grid.p_min() + static_cast<double>(i) * grid.dp - mean_p;
    amp[i] = std::exp(-p * p / (4.0 * delta_p * delta_p));
  }
  amp /= std::sqrt(amp.squaredNorm() * grid.dp);
  return GridState(grid, mass, std::move(amp));
}

GridState apply_kick(const GridState& s, const KickOp& op) {
  const double shift = op.n * hbar * op.k;
  const double cells = shift / s.dp();
  const double whole = std::round(cells);
  if (shift == 0.0) return s;

  const double lost = escaping_mass(s.amplitudes(), s.dp(), cells);
  if (lost > kEscapeTolerance) throw_escape(s, shift, lost);

  const auto n = static_cast<std::ptrdiff_t>(s.size());
  if (std::abs(cells - whole) <= kAlignTolerance * std::max(1.0, std::abs(cells))) {
    const auto j = static_cast<std::ptrdiff_t>(whole);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
    for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, j); i < std::min(n, n + j); ++i) out[i] = s.amplitudes()[i - j];
    return GridState(s.grid(), s.mass(), std::move(out));
  }
  return GridState(s.grid(), s.mass(), fourier_shift(s.amplitudes(), cells));
}

GridState free_evolve(const GridState& s, double t) {
  if (!(t >= 0.0)) throw ConfigError("free_evolve: t must be >= 0");
  return free_propagate(s, t);
}

GridState free_propagate(const GridState& s, double t) {
  const double c = -t / (2.0 * s.mass() * hbar);
  return multiply_phase(s, [c](double p) { return c * p * p; });
}

GridState apply_velocity_phase(const GridState& s, double n, double k, double t) {
  const double c = n * k * t / s.mass();
  return multiply_phase(s, [c](double p) { return c * p; });
}

GridState apply_series(const GridState& s, const HarmonicSeries& f, double k) {
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(static_cast<std::ptrdiff_t>(s.size()));
  for (const auto& h : f.terms()) acc += h.coeff * apply_kick(s, {2.0 * h.order, k}).amplitudes();
  return GridState(s.grid(), s.mass(), std::move(acc));
}

GridState apply_series_at(const GridState& s, const HarmonicSeries& f, double k, double t) {
  if (t == 0.0) return apply_series(s, f, k);
  return free_propagate(apply_series(free_propagate(s, t), f, k), -t);
}

cplx overlap(const GridState& bra, const GridState& ket) {
  check_same_grid(bra, ket);
  return bra.amplitudes().dot(ket.amplitudes()) * bra.dp();
}

cplx expect_shift_product(const GridState& s, std::span<const TimedKick> ops) {
  GridState phi = s;
  for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
    phi = it->t == 0.0 ? apply_kick(phi, it->kick)
                       : free_propagate(apply_kick(free_propagate(phi, it->t), it->kick), -it->t);
  }
  return overlap(s, phi);
}

cplx grid_char_fn(const GridState& s, double n1, double n2, double k, double t) {
  return overlap(s, apply_kick(apply_velocity_phase(s, n2, k, t), {n1, k}));
}

double max_abs_difference(const GridState& a, const GridState& b) {
  check_same_grid(a, b);
  return (a.amplitudes() - b.amplitudes()).cwiseAbs().maxCoeff() * std::sqrt(a.dp());
}

}  // namespace kdsim
