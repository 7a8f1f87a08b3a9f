#include <doctest.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fixtures.hpp"
#include "optomech/config.hpp"
#include "optomech/error.hpp"
#include "optomech/sweep.hpp"

using namespace optomech;

namespace {

const char* kBase = R"(# reference device
cavity_length_m = 1e-3
mirror_mass_kg = 5e-12
mechanical_frequency_hz = 10e6
mechanical_damping_hz = 100
cavity_decay_hz = 14e6
laser_wavelength_m = 810e-9
input_power_w = 0.05
detuning_hz = 10e6   # trailing comment
temperature_k = 0.4
linewidth_hz = 100
correlation_rate_hz = 1e5
)";

ConfigFile base_config() {
  ConfigFile c;
  std::istringstream in(kBase);
  c.parse(in, "base");
  return c;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::internal;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') cur += '"', ++i;
      else if (ch == '"') quoted = false;
      else cur += ch;
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string to_csv(const std::vector<SweepRecord>& recs) {
  std::ostringstream os;
  emit(recs, OutputFormat::csv, os);
  return os.str();
}

}  // namespace

TEST_SUITE("sweep") {
  TEST_CASE("config converts Hz to angular frequency") {
    const SweepConfig cfg = base_config().to_sweep_config();
    CHECK(cfg.base.mechanical_freq == doctest::Approx(fixture::kTwoPi * 10e6));
    CHECK(cfg.base.cavity_decay == doctest::Approx(fixture::kTwoPi * 14e6));
    CHECK(cfg.base.detuning == doctest::Approx(fixture::kTwoPi * 10e6));
    CHECK(cfg.noise.linewidth == doctest::Approx(fixture::kTwoPi * 100));
    CHECK(cfg.noise.correlation_rate == doctest::Approx(fixture::kTwoPi * 1e5));
    CHECK(cfg.base.temperature == 0.4);
    CHECK(cfg.axes.empty());
    CHECK(cfg.policy == BranchPolicy::all);
  }

  TEST_CASE("config errors name the problem") {
    ConfigFile c = base_config();
    CHECK(code_of([&] { c.set("nonsense", "1"); }) == ErrorCode::config);
    CHECK(code_of([] { ConfigFile f; f.load("/nonexistent/x.cfg"); }) == ErrorCode::io);
    {
      ConfigFile f;
      std::istringstream in("cavity_length_m = 1e-3\n");
      f.parse(in);
      try {
        f.to_sweep_config();
        FAIL("expected an error");
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::config);
        CHECK(std::string(e.what()).find("correlation_rate_hz") != std::string::npos);
      }
    }
    {
      ConfigFile f;
      std::istringstream in("cavity_length_m 1e-3\n");
      try {
        f.parse(in, "x.cfg");
        FAIL("expected an error");
      } catch (const Error& e) {
        CHECK(std::string(e.what()).find("x.cfg:1") != std::string::npos);
      }
    }
    ConfigFile bad = base_config();
    bad.set("mirror_mass_kg", "-1");
    CHECK(code_of([&] { bad.to_sweep_config(); }) == ErrorCode::config);
    bad = base_config();
    bad.set("input_power_w", "abc");
    CHECK(code_of([&] { bad.to_sweep_config(); }) == ErrorCode::config);
    bad = base_config();
    bad.set("correlation_rate_hz", "0");
    CHECK(code_of([&] { bad.to_sweep_config(); }) == ErrorCode::config);
    bad = base_config();
    bad.set("axis1", "cavity_length_m lin 1 2 3");
    CHECK(code_of([&] { bad.to_sweep_config(); }) == ErrorCode::config);
    bad = base_config();
    bad.set("axis1", "input_power_w log 0 1 3");
    CHECK(code_of([&] { bad.to_sweep_config(); }) == ErrorCode::config);
    bad = base_config();
    bad.set("axis2", "input_power_w lin 0 1 3");
    CHECK(code_of([&] { bad.to_sweep_config(); }) == ErrorCode::config);
    bad = base_config();
    bad.set("branch_policy", "continuity");
    CHECK(code_of([&] { bad.to_sweep_config(); }) == ErrorCode::config);
  }

  TEST_CASE("axis values") {
    const Axis lin = parse_axis("input_power_w lin 0 1 5");
    CHECK(lin.values() == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
    const Axis lg = parse_axis("detuning_hz log 1 1000 4");
    const auto v = lg.values();
    CHECK(v[1] == doctest::Approx(10));
    CHECK(v[2] == doctest::Approx(100));
    CHECK(v[3] == 1000);
    CHECK(parse_axis("temperature_k lin 3 9 1").values() == std::vector<double>{3});
  }

  TEST_CASE("zero drive gives a single vacuum record") {
    ConfigFile c = base_config();
    c.set("input_power_w", "0");
    c.set("temperature_k", "0");
    const auto recs = run_sweep(c.to_sweep_config());
    REQUIRE(recs.size() == 1);
    const SweepRecord& r = recs[0];
    CHECK(r.error.empty());
    REQUIRE(r.stable());
    CHECK(r.state->photons == 0.0);
    CHECK(*r.phase_noise == 0.0);
    CHECK(r.phonons->value == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(r.entanglement->log_negativity == 0.0);
  }

  TEST_CASE("emit produces a header-only file for no records") {
    const std::string csv = to_csv({});
    const auto lines = split_lines(csv);
    REQUIRE(lines.size() == 1);
    CHECK(split_csv(lines[0]).size() == record_columns().size());
    std::ostringstream js;
    emit({}, OutputFormat::json, js);
    CHECK(nlohmann::json::parse(js.str()).is_array());
    CHECK(nlohmann::json::parse(js.str()).empty());
  }

  TEST_CASE("csv round-trips every numeric field exactly") {
    ConfigFile c = base_config();
    c.set("axis1", "detuning_hz lin 0 30e6 7");
    const auto recs = run_sweep(c.to_sweep_config());
    REQUIRE(recs.size() >= 7);
    const auto lines = split_lines(to_csv(recs));
    REQUIRE(lines.size() == recs.size() + 1);
    const auto header = split_csv(lines[0]);
    const auto& cols = record_columns();
    for (std::size_t c2 = 0; c2 < cols.size(); ++c2) CHECK(header[c2] == cols[c2].name);
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const auto fields = split_csv(lines[i + 1]);
      REQUIRE(fields.size() == cols.size());
      for (std::size_t k = 0; k < cols.size(); ++k) {
        const Cell cell = cols[k].get(recs[i]);
        if (std::holds_alternative<std::monostate>(cell)) {
          CHECK(fields[k].empty());
        } else if (const double* d = std::get_if<double>(&cell)) {
          if (std::isfinite(*d)) CHECK(std::strtod(fields[k].c_str(), nullptr) == *d);
        } else if (const auto* n = std::get_if<std::int64_t>(&cell)) {
          CHECK(std::stoll(fields[k]) == *n);
        } else {
          CHECK(fields[k] == std::get<std::string>(cell));
        }
      }
    }
  }

  TEST_CASE("json output parses and matches the records") {
    ConfigFile c = base_config();
    c.set("axis1", "input_power_w log 1e-3 1e-1 5");
    const auto recs = run_sweep(c.to_sweep_config());
    std::ostringstream js;
    emit(recs, OutputFormat::json, js);
    const auto doc = nlohmann::json::parse(js.str());
    REQUIRE(doc.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      CHECK(doc[i].size() == record_columns().size());
      CHECK(doc[i]["input_power"].get<double>() == recs[i].params.input_power);
      if (recs[i].stable()) {
        CHECK(doc[i]["phonons"].get<double>() == recs[i].phonons->value);
      } else {
        CHECK(doc[i]["phonons"].is_null());
      }
    }
  }

  TEST_CASE("serial and parallel sweeps are byte-identical") {
    ConfigFile c = base_config();
    c.set("axis1", "input_power_w log 1e-3 1 9");
    c.set("axis2", "detuning_hz lin -5e6 40e6 11");
    SweepConfig cfg = c.to_sweep_config();
    const std::string serial = to_csv(run_sweep(cfg));
    CHECK(serial == to_csv(run_sweep(cfg)));
    cfg.workers = 4;
    CHECK(serial == to_csv(run_sweep(cfg)));
  }

  TEST_CASE("grid order is axis1-major") {
    ConfigFile c = base_config();
    c.set("axis1", "input_power_w lin 0.01 0.02 2");
    c.set("axis2", "detuning_hz lin 0 10e6 3");
    c.set("branch_policy", "lowest");
    const auto recs = run_sweep(c.to_sweep_config());
    REQUIRE(recs.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(recs[i].point_index == i);
      CHECK(recs[i].params.input_power == (i < 3 ? 0.01 : 0.02));
    }
    CHECK(recs[1].params.detuning == doctest::Approx(fixture::kTwoPi * 5e6));
  }

  TEST_CASE("a failing point does not abort its neighbours") {
    ConfigFile c = base_config();
    // Strongly blue-detuned points are unstable and keep empty downstream blocks.
    c.set("axis1", "detuning_hz lin -40e6 20e6 7");
    c.set("input_power_w", "0.01");
    const auto recs = run_sweep(c.to_sweep_config());
    bool any_unstable = false, any_stable = false;
    for (const auto& r : recs) {
      if (!r.stable()) {
        any_unstable = true;
        CHECK_FALSE(r.covariance.has_value());
        CHECK_FALSE(r.entanglement.has_value());
      } else {
        any_stable = true;
        CHECK(r.covariance.has_value());
      }
    }
    CHECK(any_unstable);
    CHECK(any_stable);
  }

  TEST_CASE("continuity policy visits up then down") {
    ConfigFile c = base_config();
    c.set("axis1", "input_power_w lin 0.01 0.05 5");
    c.set("branch_policy", "continuity");
    const auto recs = run_sweep(c.to_sweep_config());
    REQUIRE(recs.size() == 10);
    CHECK(recs[0].direction == "up");
    CHECK(recs[9].direction == "down");
    CHECK(recs[4].params.input_power == recs[5].params.input_power);
  }

  TEST_CASE("unwritable output path is an io error") {
    CHECK(code_of([] { emit({}, OutputFormat::csv, std::string("/nonexistent/dir/out.csv")); }) ==
          ErrorCode::io);
  }

  TEST_CASE("raster regrid") {
    std::vector<SweepRecord> recs;
    auto add = [&](double eta, double det, double en, bool stable) {
      SweepRecord r;
      r.params.mechanical_freq = 2.0;
      SteadyState s;
      s.eta = eta;
      s.delta = det * 2.0;
      s.stable = stable;
      r.state = s;
      EntanglementResult e;
      e.log_negativity = en;
      r.entanglement = e;
      recs.push_back(r);
    };
    add(0.05, 1.0, 0.2, true);
    add(0.07, 1.0, 0.3, true);
    add(0.95, 2.0, 0.0, true);
    add(0.5, 1.5, 9.0, false);  // unstable: ignored
    add(1.5, 1.5, 9.0, true);   // eta outside [0, 1]: ignored
    const Raster r = fig3_regrid(recs, 10, 2);
    CHECK(r.detuning_lo == doctest::Approx(1.0));
    CHECK(r.detuning_hi == doctest::Approx(2.0));
    REQUIRE(r.at(0, 0).has_value());
    CHECK(*r.at(0, 0) == doctest::Approx(0.3));
    CHECK(r.counts[0 * 2 + 0] == 2);
    REQUIRE(r.at(9, 1).has_value());
    CHECK(*r.at(9, 1) == 0.0);
    CHECK_FALSE(r.at(5, 0).has_value());
    CHECK(r.eta_center(0) == doctest::Approx(0.05));

    std::ostringstream os;
    emit_raster(r, os);
    CHECK(split_lines(os.str()).size() == 1 + 10 * 2);

    const Raster empty = fig3_regrid({}, 4, 3);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK_FALSE(empty.at(i, j).has_value());
  }
}
