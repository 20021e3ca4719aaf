#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kdsim/config.hpp"
#include "kdsim/errors.hpp"
#include "kdsim/sweep.hpp"
#include "kdsim/validate.hpp"

using namespace kdsim;
using nlohmann::json;

namespace {
json base() {
  return json::parse(std::ifstream(KDSIM_SOURCE_DIR "/configs/large_cavity.json"));
}
}  // namespace

TEST_SUITE("config") {
  TEST_CASE("shipped configs parse") {
    const auto rc = parse_config(base());
    CHECK(rc.physical.eta0 == 5.0);
    REQUIRE(rc.sweep.has_value());
    CHECK(rc.sweep->dt_list.size() == 12);
    CHECK_NOTHROW(load_config(KDSIM_SOURCE_DIR "/configs/small_cavity.json"));
  }

  TEST_CASE("unknown and missing keys") {
    auto doc = base();
    doc["cavity_lenght"] = 1.0;
    CHECK_THROWS_WITH_AS(parse_config(doc), doctest::Contains("cavity_lenght"), ConfigError);
    doc = base();
    doc.erase("tau_pulse");
    CHECK_THROWS_WITH_AS(parse_config(doc), doctest::Contains("tau_pulse"), ConfigError);
    doc = base();
    doc["oracle"] = {{"n_fok", 40}};
    CHECK_THROWS_WITH_AS(parse_config(doc), doctest::Contains("n_fok"), ConfigError);
    doc = base();
    doc["sweep"]["dt_list"] = json::array();
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
    doc = base();
    doc["eta0"] = "five";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
  }

  TEST_CASE("tolerance scale") {
    const Tolerances t;
    CHECK(t.scaled(2.0).signal_rel == 2.0 * t.signal_rel);
    CHECK_THROWS_AS(t.scaled(0.0), ConfigError);
    setenv("KDSIM_TOLERANCE_SCALE", "3", 1);
    CHECK(tolerance_scale_from_env() == 3.0);
    setenv("KDSIM_TOLERANCE_SCALE", "x", 1);
    CHECK_THROWS_AS(tolerance_scale_from_env(), ConfigError);
    unsetenv("KDSIM_TOLERANCE_SCALE");
    CHECK(tolerance_scale_from_env() == 1.0);
  }

  TEST_CASE("derived json carries provenance") {
    const auto rc = parse_config(base());
    const auto j = derived_to_json(rc.physical, derive_params(rc.physical));
    CHECK(j["frequency_convention"] == "angular (rad/s)");
    for (const auto& f : j["derived"]) CHECK_FALSE(f["provenance"].get<std::string>().empty());
  }

  TEST_CASE("sweep is deterministic across worker counts") {
    const auto rc = parse_config(base());
    const auto one = run_sweep(rc, true, 1);
    const auto four = run_sweep(rc, true, 4);
    REQUIRE(one.size() == 1);
    CHECK(sweep_csv(one[0]) == sweep_csv(four[0]));
    const auto& rows = one[0].rows;
    CHECK(rows.front().visibility_G == 1.0);
    CHECK(rows.back().visibility_G == doctest::Approx(0.55).epsilon(0.05));
    for (const auto& r : rows) CHECK(*r.grid_abs_err < 1e-6 * r.p_full);
    std::istringstream csv(sweep_csv(one[0]));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "dt_s,theta_q_rad,G,P_closed,P_full,P_background,abs_err,P_grid,grid_abs_err");
  }

  TEST_CASE("sign mutation is caught") {
    auto doc = base();
    doc["oracle"] = {{"random_cases", 10}};
    const auto rc = parse_config(doc);
    ValidationOptions ok;
    CHECK(run_wavepacket_suite(rc, ok).all_pass());
    ValidationOptions flipped;
    flipped.flip_theta_sign = true;
    const auto bad = run_wavepacket_suite(rc, flipped);
    CHECK_FALSE(bad.all_pass());
    const auto bad_signal = run_interferometer_suite(rc, flipped);
    CHECK_FALSE(bad_signal.all_pass());
  }

  TEST_CASE("validation json is reproducible") {
    auto doc = base();
    doc["oracle"] = {{"random_cases", 10}};
    const auto rc = parse_config(doc);
    ValidationOptions o;
    o.seed = 11;
    CHECK(run_wavepacket_suite(rc, o).to_json().dump() == run_wavepacket_suite(rc, o).to_json().dump());
  }
}
