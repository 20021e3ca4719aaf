#include "kdsim/sweep.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "kdsim/constants.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/gaussian.hpp"
#include "kdsim/interferometer.hpp"
#include "kdsim/wavepacket.hpp"

namespace kdsim {

namespace {

// Runs task(i) for i < count on `jobs` threads; results land by index.
template <class F>
void for_each_index(std::size_t count, int jobs, F&& task) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_lock);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  std::vector<std::jthread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

std::vector<SweepTable> run_sweep(const RunConfig& cfg, bool with_oracle, int jobs) {
  if (!cfg.sweep) throw ConfigError("config has no sweep block");
  const SweepOptions& sw = *cfg.sweep;
  if (sw.dt_list.empty()) throw ConfigError("sweep.dt_list must not be empty");
  const DerivedParams d = derive_params(cfg.physical);
  const double k = d.k;
  const double mass = sw.mass > 0.0 ? sw.mass : cfg.physical.np_mass;
  const double xi1 = sw.xi1 >= 0.0 ? sw.xi1 : d.xi;
  const double xi2 = sw.xi2 >= 0.0 ? sw.xi2 : d.xi;
  const std::vector<double> dps = sw.delta_p_list.empty() ? std::vector<double>{cfg.physical.delta_p} : sw.delta_p_list;

  std::vector<SweepTable> tables(dps.size());
  for (std::size_t j = 0; j < dps.size(); ++j) {
    tables[j].delta_p = dps[j];
    tables[j].rows.resize(sw.dt_list.size());
  }
  for_each_index(dps.size() * sw.dt_list.size(), jobs, [&](std::size_t idx) {
    const std::size_t j = idx / sw.dt_list.size();
    const std::size_t i = idx % sw.dt_list.size();
    const double dt = sw.dt_list[i];
    const GaussianState g{mass, dps[j], 0.0, 0.0, 0.0};
    const PulsePair pulses{xi1, xi2, sw.alpha_l, sw.beta_l, dt, sw.t_free};
    const SignalComparison s = signal(pulses, g, k);
    SweepRow row;
    row.dt = dt;
    row.theta_q = s.closed.theta_q;
    row.visibility_G = s.closed.visibility_G;
    row.p_closed = s.closed.p_total;
    row.p_full = s.full.p_total;
    row.p_background = s.closed.p_background;
    row.abs_err = s.abs_diff;
    if (with_oracle) {
      PathSpec spec;
      spec.t1 = sw.t_free;
      spec.t2 = sw.t_free + dt;
      spec.t3 = spec.t2;
      spec.t4 = spec.t3 + dt;
      spec.xi = {xi1, xi2};
      spec.recombiner = {sw.alpha_l, sw.beta_l};
      spec.k = k;
      const GridState np =
          init_gaussian(dps[j], mass, aligned_grid(dps[j], 2.0 * si::hbar * k, 4.0 * si::hbar * k, 10.0));
      row.p_grid = general_signal(spec, np).p_total;
      row.grid_abs_err = std::abs(*row.p_grid - row.p_full);
    }
    tables[j].rows[i] = row;
  });
  return tables;
}

std::string sweep_csv(const SweepTable& table) {
  const bool oracle = !table.rows.empty() && table.rows.front().p_grid.has_value();
  std::string out = "dt_s,theta_q_rad,G,P_closed,P_full,P_background,abs_err";
  out += oracle ? ",P_grid,grid_abs_err\n" : "\n";
  for (const auto& r : table.rows) {
    out += fmt::format("{:.15g},{:.15g},{:.15g},{:.15g},{:.15g},{:.15g},{:.15g}", r.dt, r.theta_q, r.visibility_G,
                       r.p_closed, r.p_full, r.p_background, r.abs_err);
    if (oracle) out += fmt::format(",{:.15g},{:.15g}", *r.p_grid, *r.grid_abs_err);
    out += "\n";
  }
  return out;
}

}  // namespace kdsim
