#include "kdsim/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "kdsim/constants.hpp"

namespace kdsim {

namespace {

HarmonicSeries from_map(const std::map<int, cplx>& m) {
  std::vector<Harmonic> terms;
  terms.reserve(m.size());
  for (const auto& [order, c] : m) {
    if (c != cplx{}) terms.push_back({order, c});
  }
  return HarmonicSeries(std::move(terms));
}

}  // namespace

HarmonicSeries::HarmonicSeries(std::vector<Harmonic> terms) : terms_(std::move(terms)) {
  std::sort(terms_.begin(), terms_.end(),
            [](const Harmonic& a, const Harmonic& b) { return a.order < b.order; });
}

int HarmonicSeries::max_abs_order() const {
  int m = 0;
  for (const auto& t : terms_) m = std::max(m, std::abs(t.order));
  return m;
}

cplx HarmonicSeries::evaluate(double kx) const {
  cplx sum{};
  for (const auto& t : terms_) sum += t.coeff * std::polar(1.0, 2.0 * t.order * kx);
  return sum;
}

HarmonicSeries HarmonicSeries::adjoint() const {
  std::vector<Harmonic> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back({-t.order, std::conj(t.coeff)});
  return HarmonicSeries(std::move(out));
}

HarmonicSeries HarmonicSeries::scaled(cplx factor) const {
  std::vector<Harmonic> out = terms_;
  for (auto& t : out) t.coeff *= factor;
  return HarmonicSeries(std::move(out));
}

HarmonicSeries operator*(const HarmonicSeries& a, const HarmonicSeries& b) {
  std::map<int, cplx> acc;
  for (const auto& x : a.terms_) {
    for (const auto& y : b.terms_) acc[x.order + y.order] += x.coeff * y.coeff;
  }
  return from_map(acc);
}

HarmonicSeries operator+(const HarmonicSeries& a, const HarmonicSeries& b) {
  std::map<int, cplx> acc;
  for (const auto& x : a.terms_) acc[x.order] += x.coeff;
  for (const auto& y : b.terms_) acc[y.order] += y.coeff;
  return from_map(acc);
}

HarmonicSeries HarmonicSeries::constant(cplx value) {
  if (value == cplx{}) return {};
  return HarmonicSeries({{0, value}});
}

HarmonicSeries HarmonicSeries::cos2() {
  return HarmonicSeries({{-1, 0.25}, {0, 0.5}, {1, 0.25}});
}

HarmonicSeries HarmonicSeries::sample(const std::function<cplx(double)>& f, int samples,
                                      double cutoff) {
  // f(theta) on theta_j = pi j / N; c_m = (1/N) sum_j f(theta_j) e^{-2 i m theta_j}.
  std::vector<cplx> values(samples);
  for (int j = 0; j < samples; ++j) values[j] = f(si::pi * j / samples);
  std::vector<Harmonic> terms;
  for (int m = -samples / 2 + 1; m < samples / 2; ++m) {
    cplx c{};
    for (int j = 0; j < samples; ++j) {
      c += values[j] * std::polar(1.0, -2.0 * si::pi * m * j / samples);
    }
    c /= static_cast<double>(samples);
    if (std::abs(c) > cutoff) terms.push_back({m, c});
  }
  return HarmonicSeries(std::move(terms));
}

HarmonicSeries diffraction_amplitude(double xi, int order, bool linear) {
  if (linear) {
    if (order == 0) return HarmonicSeries::constant(1.0);
    if (std::abs(order) == 1) return HarmonicSeries::cos2().scaled(cplx(0.0, xi));
    return {};
  }
  if (xi == 0.0) return order == 0 ? HarmonicSeries::constant(1.0) : HarmonicSeries{};
  const cplx phase_n = std::pow(cplx(0.0, 1.0), std::abs(order));
  // J_{-n}(z) = (-1)^n J_n(z), so i^{-n} J_{-n} = i^{n} J_n.
  return HarmonicSeries::sample([&](double kx) {
    const double c2 = std::cos(kx) * std::cos(kx);
    const double z = 2.0 * xi * c2;
    return phase_n * std::cyl_bessel_j(static_cast<double>(std::abs(order)), z) *
           std::polar(1.0, 2.0 * xi * c2);
  });
}

}  // namespace kdsim
