#include "kdsim/gaussian.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"

namespace kdsim {

namespace {

using si::hbar;

// |imag| allowed on quantities that are real by construction.
constexpr double kRealityTolerance = 1e-12;

double assert_real(cplx value, const char* what) {
  if (std::abs(value.imag()) > kRealityTolerance * std::max(1.0, std::abs(value))) {
    throw std::logic_error(fmt::format("{} should be real but has imaginary part {}", what, value.imag()));
  }
  return value.real();
}

void expand(const GaussianState& state, std::span<const TimedSeries> ops, double k,
            std::vector<Insertion>& current, cplx weight, cplx& sum) {
  const std::size_t depth = current.size();
  if (depth == ops.size()) {
    sum += weight * multi_time_char(state, current, k);
    return;
  }
  for (const auto& h : ops[depth].f.terms()) {
    current.push_back({2.0 * h.order, ops[depth].t});
    expand(state, ops, k, current, weight * h.coeff, sum);
    current.pop_back();
  }
}

}  // namespace

void GaussianState::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw ConfigError("GaussianState: mass must be > 0");
  if (!(delta_p > 0.0) || !std::isfinite(delta_p)) throw ConfigError("GaussianState: delta_p must be > 0");
  if (!(t_free >= 0.0) || !std::isfinite(t_free)) throw ConfigError("GaussianState: t_free must be >= 0");
  if (!std::isfinite(v_drift) || !std::isfinite(g_x)) throw ConfigError("GaussianState: drift terms must be finite");
}

cplx char_fn(const GaussianState& state, double n1, double n2, double k) {
  const double t = state.t_free;
  const double m = state.mass;
  const double dp = state.delta_p;
  const double v_k = hbar * k / m;
  const double a = hbar * n1 * k / dp;
  const double b = n2 * k * dp * t / m;
  const double modulus = std::exp(-a * a / 8.0) * std::exp(-0.5 * b * b);
  const double phase = -0.5 * n1 * n2 * k * v_k * t + n2 * k * (state.v_drift * t + 0.5 * state.g_x * t * t);
  return std::polar(modulus, phase);
}

cplx multi_time_char(const GaussianState& state, std::span<const Insertion> ops, double k) {
  const double m = state.mass;
  double total_n = 0.0;
  double weighted_t = 0.0;
  double phase = 0.0;
  for (std::size_t j = 0; j < ops.size(); ++j) {
    const auto& op = ops[j];
    total_n += op.n;
    weighted_t += op.n * op.t;
    phase += op.n * k * (state.v_drift * op.t + 0.5 * state.g_x * op.t * op.t);
    // Reordering to a single exponential: [x(t_i), x(t_j)] = i hbar (t_j - t_i) / m.
    for (std::size_t i = 0; i < j; ++i) {
      phase -= hbar * k * k * ops[i].n * op.n * (op.t - ops[i].t) / (2.0 * m);
    }
  }
  const double a = hbar * k * total_n / state.delta_p;
  const double b = k * state.delta_p * weighted_t / m;
  return std::polar(std::exp(-a * a / 8.0 - 0.5 * b * b), phase);
}

cplx expect_series_product(const GaussianState& state, std::span<const TimedSeries> ops, double k) {
  std::vector<Insertion> current;
  current.reserve(ops.size());
  cplx sum{};
  expand(state, ops, k, current, 1.0, sum);
  return sum;
}

double expect_cos4(const GaussianState& state, double k) {
  const auto c2 = HarmonicSeries::cos2();
  const TimedSeries ops[] = {{c2 * c2, state.t_free}};
  return assert_real(expect_series_product(state, ops, k), "<cos^4>");
}

TwoTimeExpectation expect_cos2cos2(const GaussianState& state_at_t1, double dt, double k) {
  if (!(dt >= 0.0)) throw ConfigError("expect_cos2cos2: dt must be >= 0");
  const double t1 = state_at_t1.t_free;
  const auto c2 = HarmonicSeries::cos2();
  const TimedSeries ops[] = {{c2, t1}, {c2, t1 + dt}};
  TwoTimeExpectation out;
  out.full = expect_series_product(state_at_t1, ops, k);
  const double g = visibility_G(state_at_t1.delta_p, state_at_t1.mass, k, dt);
  out.long_time = 0.25 + 0.125 * std::polar(g, theta_q(k, state_at_t1.mass, dt));
  out.dropped_suppression = visibility_G(state_at_t1.delta_p, state_at_t1.mass, k, t1);
  return out;
}

double theta_q(double k, double mass, double dt) {
  return 2.0 * hbar * k * k * dt / mass;
}

double visibility_G(double delta_p, double mass, double k, double dt) {
  const double x = 2.0 * k * delta_p * dt / mass;
  return std::exp(-0.5 * x * x);
}

void PulsePair::validate() const {
  if (!(xi1 >= 0.0) || !(xi2 >= 0.0)) throw ConfigError("PulsePair: xi_j must be >= 0");
  if (std::abs(alpha_l) > 1.0 + 1e-12 || std::abs(beta_l) > 1.0 + 1e-12) {
    throw ConfigError("PulsePair: |alpha_l| and |beta_l| must not exceed 1");
  }
  if (!(dt >= 0.0)) throw ConfigError("PulsePair: dt must be >= 0");
  if (!(dt1 >= 0.0)) throw ConfigError("PulsePair: dt1 must be >= 0");
}

SignalComparison signal(const PulsePair& pulses, const GaussianState& state, double k) {
  pulses.validate();
  state.validate();
  GaussianState at_t1 = state;
  at_t1.t_free = pulses.dt1;
  GaussianState at_t2 = state;
  at_t2.t_free = pulses.dt1 + pulses.dt;

  const double a2 = std::norm(pulses.alpha_l);
  const double b2 = std::norm(pulses.beta_l);
  const cplx cross_amp = std::conj(pulses.alpha_l) * pulses.beta_l * pulses.xi1 * pulses.xi2;
  const double background =
      3.0 * (pulses.xi1 * pulses.xi1 * a2 + pulses.xi2 * pulses.xi2 * b2) / 8.0;
  const double th = theta_q(k, state.mass, pulses.dt);
  const double g = visibility_G(state.delta_p, state.mass, k, pulses.dt);

  SignalComparison out;
  {
    const cplx cross = cross_amp / 4.0 * (1.0 + 0.5 * std::polar(g, th));
    auto& s = out.closed;
    s.p_background = background;
    s.p_interference = 2.0 * cross.real();
    s.p_total = s.p_background + s.p_interference;
    s.theta_q = th;
    s.visibility_G = g;
  }
  {
    const auto two_time = expect_cos2cos2(at_t1, pulses.dt, k);
    const double path_r = pulses.xi1 * pulses.xi1 * a2 * expect_cos4(at_t1, k);
    const double path_b = pulses.xi2 * pulses.xi2 * b2 * expect_cos4(at_t2, k);
    const cplx cross = cross_amp * two_time.full;
    auto& s = out.full;
    s.p_total = path_r + path_b + 2.0 * cross.real();
    s.p_background = background;
    s.p_interference = s.p_total - s.p_background;
    s.theta_q = th;
    s.visibility_G = g;
  }
  out.abs_diff = std::abs(out.closed.p_total - out.full.p_total);
  return out;
}

double p_reference(double xi1, double xi2) {
  if (!(xi1 >= 0.0) || !(xi2 >= 0.0)) throw ConfigError("p_reference: xi_j must be >= 0");
  return 3.0 * (xi1 * xi1 + xi2 * xi2) / 8.0;
}

ScatteredProbability scattered_probability(const GaussianState& state, double xi, double k) {
  return {xi * xi * expect_cos4(state, k), 3.0 * xi * xi / 8.0};
}

std::vector<double> order_populations(const GaussianState& state, double xi, double k, int max_order) {
  std::vector<double> out;
  out.reserve(2 * max_order + 1);
  for (int n = -max_order; n <= max_order; ++n) {
    const auto density = HarmonicSeries::sample([&](double kx) {
      const double c2 = std::cos(kx) * std::cos(kx);
      const double j = std::cyl_bessel_j(static_cast<double>(std::abs(n)), 2.0 * xi * c2);
      return cplx(j * j, 0.0);
    });
    const TimedSeries ops[] = {{density, state.t_free}};
    out.push_back(assert_real(expect_series_product(state, ops, k), "order population"));
  }
  return out;
}

}  // namespace kdsim
