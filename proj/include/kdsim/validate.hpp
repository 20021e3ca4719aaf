#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdsim/config.hpp"

namespace kdsim {

struct IdentityResult {
  std::string name;
  double max_rel_err = 0.0;  // the identity's error measure; see `metric`
  double tolerance = 0.0;
  int samples = 0;
  bool pass = false;
  std::string metric;
};

struct ValidationOptions {
  std::uint64_t seed = 20240601;
  int jobs = 1;
  // Test fixture: evaluate every closed-form reference with theta_q -> -theta_q.
  bool flip_theta_sign = false;
};

struct ValidationReport {
  std::vector<IdentityResult> results;
  nlohmann::json details = nlohmann::json::object();

  bool all_pass() const;
  void append(const ValidationReport& other);
  nlohmann::json to_json() const;  // deterministic for a fixed seed
  std::string summary() const;
};

ValidationReport run_params_suite(const RunConfig& cfg, const ValidationOptions& opts);
ValidationReport run_wavepacket_suite(const RunConfig& cfg, const ValidationOptions& opts);
ValidationReport run_interferometer_suite(const RunConfig& cfg, const ValidationOptions& opts);
// The convergence ladder and position scan run only when cfg.oracle.include_ladder is set.
ValidationReport run_cavity_suite(const RunConfig& cfg, const ValidationOptions& opts);

ValidationReport run_validation(const RunConfig& cfg, const ValidationOptions& opts);

}  // namespace kdsim
