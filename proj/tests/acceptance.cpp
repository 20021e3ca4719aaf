// One PASS/FAIL line per acceptance criterion, with wall time.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>

#include <fmt/format.h>

#include "kdsim/cavity.hpp"
#include "kdsim/config.hpp"
#include "kdsim/constants.hpp"
#include "kdsim/gaussian.hpp"
#include "kdsim/interferometer.hpp"
#include "kdsim/validate.hpp"
#include "kdsim/wavepacket.hpp"

using namespace kdsim;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

const IdentityResult& find(const ValidationReport& rep, const std::string& name) {
  for (const auto& r : rep.results) {
    if (r.name == name) return r;
  }
  throw std::runtime_error("missing identity " + name);
}

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

RunConfig large() { return load_config(KDSIM_SOURCE_DIR "/configs/large_cavity.json"); }

int failures = 0;

void criterion(int id, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool pass = out.ok && in_time;
  if (!pass) ++failures;
  std::printf("%s criterion %d (%.2f s of %.0f s) %s%s\n", pass ? "PASS" : "FAIL", id, secs, budget_s,
              out.detail.c_str(), in_time ? "" : " [over time budget]");
  std::fflush(stdout);
}

}  // namespace

int main() {
  criterion(1, 1, [] {
    const auto rc = large();
    const auto p = derive_params(rc.physical);
    const double tw = p.omega_effm * p.tau_pulse;
    return Outcome{within(p.omega_a0, 3.3e5, 0.10) && within(p.omega_effm, 8.3e5, 0.10) && within(tw, 0.083, 0.05),
                   fmt::format("Omega_a0={:.4g} rad/s Omega_effm={:.4g} rad/s tau*Omega_effm={:.4g}", p.omega_a0,
                               p.omega_effm, tw)};
  });

  criterion(2, 1, [] {
    PhysicalConfig c = large().physical;
    const double big = derive_params(c).omega_c0;
    c.cavity_waist = 40e-6;
    c.cavity_length = 1e-2;
    const double small = derive_params(c).omega_c0;
    const double ratio = small / big;
    const double f_small = 1.4e6 / small;
    const double f_big = 1.1e3 / big;
    const bool ok = within(ratio, 1250.0, 1e-3) && f_small < 3.0 && f_small > 1.0 / 3.0 && f_big < 3.0 &&
                    f_big > 1.0 / 3.0;
    return Outcome{ok, fmt::format("ratio={:.6g} Omega_c0 small={:.4g} large={:.4g}; reference/computed factor "
                                   "{:.3f} (small) {:.3f} (large)",
                                   ratio, small, big, f_small, f_big)};
  });

  criterion(3, 1, [] {
    const auto rc = large();
    const auto p = derive_params(rc.physical);
    const double th = theta_q(p.k, rc.physical.np_mass, 1.2e-3);
    return Outcome{within(th, 9.89e-5, 0.02) && within(p.v_k_np, 5.1e-9, 0.02),
                   fmt::format("theta_q(1.2 ms)={:.4g} rad v_k={:.4g} m/s", th, p.v_k_np)};
  });

  criterion(4, 30, [] {
    const auto rc = large();
    const auto rep = run_wavepacket_suite(rc, {});
    const auto& np = find(rep, "wavepacket.char_fn.particle");
    const auto& at = find(rep, "wavepacket.char_fn.atom");
    const auto& pc = find(rep, "wavepacket.phase_cancellation");
    const bool ok = np.samples >= 100 && np.max_rel_err < 1e-8 && at.max_rel_err < 1e-8 && pc.max_rel_err < 1e-12;
    return Outcome{ok, fmt::format("char_fn worst rel err {:.3g} ({} cases) / {:.3g} ({} cases); |Im|/|mod| {:.3g}",
                                   np.max_rel_err, np.samples, at.max_rel_err, at.samples, pc.max_rel_err)};
  });

  criterion(5, 60, [] {
    const auto rc = large();
    const auto& c = rc.physical;
    const auto rep = run_interferometer_suite(rc, {});
    const auto& sig = find(rep, "interferometer.signal_closed_form");
    const double k = derive_params(c).k;
    const GridState np = init_gaussian(c.delta_p, c.np_mass, aligned_grid(c.delta_p, 2 * si::hbar * k, 4 * si::hbar * k, 10.0));
    PathSpec spec;
    spec.t1 = 0.1;
    spec.t2 = 0.1012;
    spec.t3 = 0.1032;
    spec.t4 = 0.1044;
    spec.xi = {0.0207, 0.0207};
    spec.recombiner = {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)};
    spec.k = k;
    const double g = general_signal(spec, np).visibility_G;
    const bool ok = sig.max_rel_err < 1e-6 && std::abs(g - 0.969) <= 1e-3;
    return Outcome{ok, fmt::format("grid vs closed form worst rel err {:.3g} over {} runs; G(1.2 ms)={:.6f}",
                                   sig.max_rel_err, sig.samples, g)};
  });

  criterion(6, 600, [] {
    const auto rc = large();
    const auto d = derive_params(rc.physical);
    LadderSpec s;
    s.omega_a0 = d.omega_a0;
    s.omega_c0 = d.omega_c0;
    s.k = d.k;
    s.tau = 1.6 / d.omega_a0;
    s.eta = 2.0;
    s.ratios = {0.1, 0.05, 0.025};
    const auto ladder = effective_phase_ladder(s);
    std::string rungs;
    int n_fock = 0;
    for (const auto& p : ladder.points) {
      rungs += fmt::format(" r={}: err={:.3g}% Pe_max={:.3g}<{:.3g};", p.ratio, 100 * p.result.rel_err,
                           p.result.p_excite_max, 4 * p.result.mu_abs * p.result.mu_abs);
      n_fock = std::max(n_fock, ladder_model(s, p.ratio).n_fock);
    }
    const double node = si::pi / (2 * d.k);
    const double phi_atom = effective_phase_experiment(ladder_model(s, 0.1, 0.0, node)).phi_full;
    const double phi_np = effective_phase_experiment(ladder_model(s, 0.1, node, 0.0)).phi_full;
    const double antinode = ladder.points.front().result.phi_full;
    const bool nodes = std::abs(phi_atom) < 1e-8 && std::abs(phi_np) < 1e-8;
    const bool ok = ladder.monotone && ladder.final_rel_err < 0.05 && ladder.excitation_bounded && nodes &&
                    n_fock <= 60;
    return Outcome{ok, fmt::format("monotone={}{} node phases {:.2g}/{:.2g} rad (antinode {:.4g}); n_fock={}",
                                   ladder.monotone, rungs, phi_atom, phi_np, antinode, n_fock)};
  });

  criterion(7, 60, [] {
    const auto rc = large();
    auto quick = rc;
    quick.oracle.include_ladder = false;
    const auto rep = run_cavity_suite(quick, {});
    const auto& bch = find(rep, "cavity.bch_exponent");
    const auto& dis = find(rep, "cavity.displaced_oscillator");
    const auto& zas = find(rep, "cavity.zassenhaus_two_time");
    const double exponent = rep.details["bch"]["exponent"].get<double>();
    const bool ok = std::abs(exponent - 3.0) <= 0.3 && dis.max_rel_err < 1e-8 && zas.max_rel_err < 1e-10;
    (void)bch;
    return Outcome{ok, fmt::format("BCH exponent {:.3f}; displaced oscillator err {:.3g}; Zassenhaus {:.3g}", exponent,
                                   dis.max_rel_err, zas.max_rel_err)};
  });

  criterion(8, 120, [] {
    const double xis[] = {0.04, 0.02, 0.01};
    const auto rep = many_atom_factorization_check(2, xis, 8);
    FactorizationOptions zero;
    zero.dt = 0.0;
    double exact = 0.0;
    for (const auto& r : many_atom_factorization_check(2, xis, 8, zero).rows) exact = std::max(exact, r.error);
    const bool ok = rep.exponent >= 1.8 && rep.exponent <= 2.2 && exact < 1e-12;
    return Outcome{ok, fmt::format("exponent {:.3f} (errors {:.3g}, {:.3g}, {:.3g}); dt=0 error {:.3g}", rep.exponent,
                                   rep.rows[0].error, rep.rows[1].error, rep.rows[2].error, exact)};
  });

  criterion(9, 1, [] {
    // Independent route: xi^2 times the period average of cos^4, by an exact
    // trapezoid sum, for each pulse.
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double avg = 0.0;
    const int n = 64;
    for (int i = 0; i < n; ++i) avg += std::pow(std::cos(si::pi * i / n), 4);
    avg /= n;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double x1 = u(rng);
      const double x2 = u(rng);
      const double want = (x1 * x1 + x2 * x2) * avg;
      worst = std::max(worst, std::abs(p_reference(x1, x2) - want) / want);
    }
    const double eps = std::numeric_limits<double>::epsilon();
    return Outcome{worst <= 8 * eps, fmt::format("worst rel err {:.3g} (= {:.2f} ulp) over 1000 random pairs", worst,
                                                 worst / eps)};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
