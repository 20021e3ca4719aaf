#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace kdsim {

using cplx = std::complex<double>;

// One Fourier component c * exp(i 2 m k x) of a standing-wave function.
struct Harmonic {
  int order = 0;
  cplx coeff{};
};

// A function of k*x with period pi (one standing-wave period lambda/2),
// kept as a sparse Fourier series sorted by order.
class HarmonicSeries {
 public:
  HarmonicSeries() = default;
  explicit HarmonicSeries(std::vector<Harmonic> terms);

  const std::vector<Harmonic>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  int max_abs_order() const;

  cplx evaluate(double kx) const;
  HarmonicSeries adjoint() const;  // complex conjugate function
  HarmonicSeries scaled(cplx factor) const;

  friend HarmonicSeries operator*(const HarmonicSeries& a, const HarmonicSeries& b);
  friend HarmonicSeries operator+(const HarmonicSeries& a, const HarmonicSeries& b);

  static HarmonicSeries constant(cplx value);
  static HarmonicSeries cos2();  // cos^2(kx) = 1/2 + (e^{2ikx} + e^{-2ikx})/4

  // Samples f on one period and keeps the components above `cutoff`.
  static HarmonicSeries sample(const std::function<cplx(double)>& f, int samples = 128,
                               double cutoff = 1e-18);

 private:
  std::vector<Harmonic> terms_;
};

// Particle-side amplitude for an atom to leave a standing-wave pulse of
// strength xi in diffraction order n (momentum change 2 n hbar k). The pulse
// exp(4 i xi cos^2(kx) cos^2(kx_a)) expands exactly into
// i^n J_n(2 xi cos^2 kx) exp(2 i xi cos^2 kx) exp(2 i n k x_a).
// With `linear` set the amplitude is truncated at first order in xi:
// order 0 -> 1, order +-1 -> i xi cos^2(kx), other orders -> 0.
HarmonicSeries diffraction_amplitude(double xi, int order, bool linear);

}  // namespace kdsim
