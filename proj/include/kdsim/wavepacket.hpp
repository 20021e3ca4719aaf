#pragma once

#include <complex>
#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "kdsim/harmonics.hpp"

namespace kdsim {

// Uniform symmetric momentum grid p_i = (i - n/2) dp, n a power of two.
struct MomentumGrid {
  double dp = 0.0;
  std::size_t n_points = 0;

  double p_min() const { return -0.5 * static_cast<double>(n_points) * dp; }
};

// Momentum-space amplitudes of a 1D particle, normalized as sum |psi_i|^2 dp = 1.
// Immutable; every operation returns a new state.
class GridState {
 public:
  GridState(MomentumGrid grid, double mass, Eigen::VectorXcd amplitudes);

  const MomentumGrid& grid() const { return grid_; }
  std::size_t size() const { return grid_.n_points; }
  double dp() const { return grid_.dp; }
  double p_min() const { return grid_.p_min(); }
  double p_max() const { return grid_.p_min() + static_cast<double>(size() - 1) * dp(); }
  double mass() const { return mass_; }
  double momentum(std::size_t i) const { return grid_.p_min() + static_cast<double>(i) * grid_.dp; }
  const Eigen::VectorXcd& amplitudes() const { return amp_; }

  double norm() const;
  double mean_p() const;
  double variance_p() const;

  GridState scaled(cplx factor) const;
  GridState plus(const GridState& other) const;

 private:
  MomentumGrid grid_;
  double mass_;
  Eigen::VectorXcd amp_;
};

// Smallest grid whose spacing divides `kick_quantum` exactly (so kicks that are
// integer multiples of it are index translations) while resolving delta_p with
// at least `points_per_sigma` points and spanning span_sigmas * delta_p + max_kick.
MomentumGrid aligned_grid(double delta_p, double kick_quantum, double max_kick, double span_sigmas = 8.0,
                          std::size_t min_points = 1024, double points_per_sigma = 64.0);

// Discrete Gaussian with spacing dp = 2 span_sigmas delta_p / n_points.
GridState init_gaussian(double delta_p, double mass, std::size_t n_points, double span_sigmas,
                        double mean_p = 0.0);
GridState init_gaussian(double delta_p, double mass, const MomentumGrid& grid, double mean_p = 0.0);

// exp(i n k x): translation of the momentum amplitudes by n hbar k.
struct KickOp {
  double n = 0.0;
  double k = 0.0;
};

// Exact index translation when n hbar k is a multiple of dp (to 1e-9 of a
// cell), band-limited Fourier interpolation otherwise.
GridState apply_kick(const GridState& s, const KickOp& op);

// exp(-i p^2 t / (2 m hbar)), t >= 0.
GridState free_evolve(const GridState& s, double t);
// Same phase for either sign of t (t < 0 undoes free_evolve).
GridState free_propagate(const GridState& s, double t);

// exp(i n k p t / m).
GridState apply_velocity_phase(const GridState& s, double n, double k, double t);

// f(k x) for a standing-wave function given by its harmonics.
GridState apply_series(const GridState& s, const HarmonicSeries& f, double k);

// f(k x(t)) = U^dagger(t) f(k x) U(t), U the free propagator.
GridState apply_series_at(const GridState& s, const HarmonicSeries& f, double k, double t);

cplx overlap(const GridState& bra, const GridState& ket);

struct TimedKick {
  KickOp kick;
  double t = 0.0;
};

// <s| prod_j exp(i n_j k x(t_j)) |s>, factors listed left to right as written.
cplx expect_shift_product(const GridState& s, std::span<const TimedKick> ops);

// <G| exp(i n1 k x) exp(i n2 k v t) |G> evaluated on the grid.
cplx grid_char_fn(const GridState& s, double n1, double n2, double k, double t);

// Largest elementwise |a - b| * sqrt(dp) over two states on the same grid.
double max_abs_difference(const GridState& a, const GridState& b);

}  // namespace kdsim
