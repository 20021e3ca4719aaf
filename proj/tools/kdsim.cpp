#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "kdsim/config.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/sweep.hpp"
#include "kdsim/validate.hpp"

namespace fs = std::filesystem;
using namespace kdsim;

namespace {

constexpr int kOk = 0;
constexpr int kOther = 1;
constexpr int kConfig = 2;
constexpr int kTolerance = 3;

struct Common {
  std::string config;
  std::string out;
  int jobs = 1;
  std::uint64_t seed = ValidationOptions{}.seed;
};

RunConfig load(const Common& c) {
  RunConfig rc = load_config(c.config);
  rc.tolerances = rc.tolerances.scaled(tolerance_scale_from_env());
  if (c.jobs < 1) throw ConfigError("--jobs must be >= 1");
  return rc;
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  if (dir.empty()) return;
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  out << text;
}

int report(const ValidationReport& rep, const Common& c, const std::string& file) {
  std::cout << rep.summary();
  write_file(c.out, file, rep.to_json().dump(2) + "\n");
  return rep.all_pass() ? kOk : kTolerance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kdsim: particle-mediated atom interferometry simulator"};
  app.require_subcommand(1);
  Common c;
  bool with_oracle = false;
  bool flip_theta = false;

  auto add_config = [&](CLI::App* sub) { sub->add_option("--config", c.config, "JSON config")->required(); };

  auto* params = app.add_subcommand("params", "print derived parameters");
  add_config(params);
  params->add_option("--out", c.out, "directory for derived_params.json/.txt");

  auto* validate = app.add_subcommand("validate", "run every identity and oracle suite");
  add_config(validate);
  validate->add_option("--out", c.out, "directory for validation.json");
  validate->add_option("--seed", c.seed, "seed for randomized cases");
  validate->add_option("--jobs", c.jobs, "worker threads");
  validate->add_flag("--flip-theta-sign", flip_theta, "fixture: negate theta_q in closed-form references")
      ->group("");

  auto* sweep = app.add_subcommand("sweep", "signal versus pulse separation");
  add_config(sweep);
  sweep->add_option("--out", c.out, "directory for the CSV tables")->required();
  sweep->add_option("--jobs", c.jobs, "worker threads");
  sweep->add_flag("--with-oracle", with_oracle, "add grid-propagated signal columns");

  auto* oracle = app.add_subcommand("oracle", "brute-force oracles");
  oracle->require_subcommand(1);
  auto* cavity = oracle->add_subcommand("cavity", "cavity-QED oracle suite");
  add_config(cavity);
  cavity->add_option("--out", c.out, "directory for cavity_oracle.json");
  cavity->add_option("--jobs", c.jobs, "worker threads");
  auto* wave = oracle->add_subcommand("wavepacket", "momentum-grid oracle suite");
  add_config(wave);
  wave->add_option("--out", c.out, "directory for wavepacket_oracle.json");
  wave->add_option("--seed", c.seed, "seed for randomized cases");
  wave->add_option("--jobs", c.jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    const RunConfig rc = load(c);
    ValidationOptions vo;
    vo.seed = c.seed;
    vo.jobs = c.jobs;
    vo.flip_theta_sign = flip_theta;

    if (params->parsed()) {
      const DerivedParams d = derive_params(rc.physical);
      const std::string table = derived_table(rc.physical, d);
      std::cout << table;
      write_file(c.out, "derived_params.txt", table);
      write_file(c.out, "derived_params.json", derived_to_json(rc.physical, d).dump(2) + "\n");
      return kOk;
    }
    if (validate->parsed()) return report(run_validation(rc, vo), c, "validation.json");
    if (cavity->parsed()) return report(run_cavity_suite(rc, vo), c, "cavity_oracle.json");
    if (wave->parsed()) {
      ValidationReport rep = run_wavepacket_suite(rc, vo);
      rep.append(run_interferometer_suite(rc, vo));
      return report(rep, c, "wavepacket_oracle.json");
    }
    if (sweep->parsed()) {
      const auto tables = run_sweep(rc, with_oracle, c.jobs);
      nlohmann::json index = nlohmann::json::array();
      for (std::size_t j = 0; j < tables.size(); ++j) {
        const std::string name = tables.size() == 1 ? "sweep.csv" : fmt::format("sweep_dp{}.csv", j);
        write_file(c.out, name, sweep_csv(tables[j]));
        index.push_back({{"delta_p", tables[j].delta_p}, {"file", name}});
        std::cout << fmt::format("wrote {} ({} rows, delta_p = {:.6g} kg m/s)\n", name, tables[j].rows.size(),
                                 tables[j].delta_p);
      }
      write_file(c.out, "sweep_index.json", index.dump(2) + "\n");
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOther;
  }
  return kOther;
}
