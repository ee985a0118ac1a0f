#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rpid/report.hpp"
#include "rpid/scenario_io.hpp"

using namespace rpid;

namespace {

const char* kCase1Text = R"(# exact-model rolling tuning
mode = rolling_exact
y_r = 2
theta = 0.5, 0.3, 1.8, 0.9
x0 = 1, 1
n_horizon = 10
m_sample = 10
k0 = 0.1, 0.1, 0.1
)";

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("4-decimal formatting is correctly rounded, ties to even") {
  // 0.03125 and 0.09375 are exactly representable ties
  CHECK(format_fixed(0.03125, 4) == "0.0312");
  CHECK(format_fixed(0.09375, 4) == "0.0938");
  // the doubles nearest these literals sit strictly off the tie
  CHECK(format_fixed(0.00005, 4) == "0.0001");
  CHECK(format_fixed(-0.00005, 4) == "-0.0001");
  CHECK(format_fixed(1.99995, 4) == "1.9999");
  CHECK(format_fixed(0.62505, 4) == "0.6250");
  CHECK(format_fixed(2.0, 4) == "2.0000");
  CHECK(format_fixed(0.0, 4) == "0.0000");
}

TEST_CASE("scenario parsing") {
  SUBCASE("full document") {
    const Scenario sc = parse_scenario_text(kCase1Text, "case1_n10.scn");
    CHECK(sc.mode == RunMode::rolling_exact);
    CHECK(sc.y_r == 2.0);
    CHECK(sc.n_horizon == 10);
    CHECK(sc.m_sample == 10);
    CHECK(sc.k0 == PidGains{0.1, 0.1, 0.1});
    CHECK(sc.plant.params == std::vector<double>{0.5, 0.3, 1.8, 0.9});
    CHECK(sc.plant.x0 == StateVector{1.0, 1.0});
    // defaults
    CHECK(sc.criterion == Criterion::ise);
    CHECK(sc.s_max == 20);
    CHECK(sc.bounds.lo == std::array<double, 3>{0, 0, 0});
    CHECK(sc.bounds.hi == std::array<double, 3>{10, 10, 10});
    CHECK(sc.term_k_tol == 1e-6);
    CHECK(sc.term_e_tol == 1e-4);
    CHECK_FALSE(sc.reset_memory_on_update);
    CHECK(sc.opt.n_starts == 1);
  }
  SUBCASE("unknown key is named") {
    CHECK_THROWS_WITH_AS(parse_scenario_text("foo = 1\n", "x.scn"),
                         doctest::Contains("foo"), std::runtime_error);
  }
  SUBCASE("missing required key is named") {
    CHECK_THROWS_WITH_AS(parse_scenario_text("mode = canonical\n", "x.scn"),
                         doctest::Contains("y_r"), std::runtime_error);
  }
  SUBCASE("validation failure names the field") {
    std::string text(kCase1Text);
    const auto pos = text.find("n_horizon = 10");
    text.replace(pos, 14, "n_horizon = 0 ");
    CHECK_THROWS_WITH_AS(parse_scenario_text(text, "x.scn"),
                         doctest::Contains("n_horizon"), std::runtime_error);
  }
  SUBCASE("parse errors carry the line number") {
    std::string text(kCase1Text);
    const auto pos = text.find("y_r = 2");
    text.replace(pos, 7, "y_r = ?");  // line 3 of the document
    CHECK_THROWS_WITH_AS(parse_scenario_text(text, "x.scn"),
                         doctest::Contains("x.scn:3"), std::runtime_error);
  }
  SUBCASE("duplicate keys are rejected") {
    CHECK_THROWS_WITH_AS(parse_scenario_text("y_r = 1\ny_r = 2\n", "x.scn"),
                         doctest::Contains("duplicate"), std::runtime_error);
  }
  SUBCASE("vector arity is checked") {
    std::string text(kCase1Text);
    const auto pos = text.find("theta = 0.5, 0.3, 1.8, 0.9");
    text.replace(pos, 26, "theta = 0.5, 0.3          ");
    CHECK_THROWS_WITH_AS(parse_scenario_text(text, "x.scn"),
                         doctest::Contains("theta"), std::runtime_error);
  }
}

TEST_CASE("bundled scenario files parse to the documented experiments") {
  const std::filesystem::path dir =
      std::filesystem::path(RPID_SOURCE_DIR) / "scenarios";
  const Scenario c1a = parse_scenario(dir / "case1_n10.scn");
  CHECK(c1a.mode == RunMode::rolling_exact);
  CHECK(c1a.n_horizon == 10);
  CHECK(c1a.m_sample == 10);
  CHECK(c1a.y_r == 2.0);
  CHECK(c1a.name == "case1_n10");

  const Scenario c1b = parse_scenario(dir / "case1_n30.scn");
  CHECK(c1b.mode == RunMode::rolling_exact);
  CHECK(c1b.n_horizon == 30);

  const Scenario c2a = parse_scenario(dir / "case2_n10.scn");
  CHECK(c2a.mode == RunMode::rolling_sysid);
  CHECK(c2a.m_sample == 10);

  const Scenario c2b = parse_scenario(dir / "case2_n30.scn");
  CHECK(c2b.mode == RunMode::rolling_sysid);
  CHECK(c2b.n_horizon == 30);
  CHECK(c2b.k0 == PidGains{0.1, 0.1, 0.1});
}

TEST_CASE("records table rendering") {
  SUBCASE("zero record renders zero cells") {
    RollingRecord rec;
    rec.s = 1;
    rec.x_at = {0.0, 0.0};
    const std::string table = emit_records_table({&rec, 1});
    CHECK(table.find("  1 |   0.0000   0.0000   0.0000 |   0.0000   0.0000 |   0.0000") !=
          std::string::npos);
  }
  SUBCASE("reference-style row") {
    RollingRecord rec;
    rec.s = 1;
    rec.gains = {0.0707, 0.3634, 0.1498};
    rec.x_at = {0.0005, 1.0971};
    rec.y_at = 1.8785;
    const std::string table = emit_records_table({&rec, 1});
    CHECK(table.find("0.0707") != std::string::npos);
    CHECK(table.find("1.0971") != std::string::npos);
    CHECK(table.find("1.8785") != std::string::npos);
  }
  SUBCASE("converged runs show identical consecutive rows up to s") {
    RollingRecord a;
    a.s = 4;
    a.gains = {0.0627, 0.2308, 0.0624};
    a.x_at = {0.0, 10.0 / 9.0};
    a.y_at = 2.0;
    RollingRecord b = a;
    b.s = 5;
    const std::vector<RollingRecord> recs{a, b};
    std::istringstream table(emit_records_table(recs));
    std::string header, rule, row1, row2;
    std::getline(table, header);
    std::getline(table, rule);
    std::getline(table, row1);
    std::getline(table, row2);
    CHECK(row1.substr(3) == row2.substr(3));
    CHECK(row1.substr(0, 3) != row2.substr(0, 3));
  }
}

TEST_CASE("trajectory CSV") {
  SUBCASE("empty trajectory gives the bare header") {
    std::ostringstream out;
    emit_trajectory_csv(Trajectory{}, {}, 10, out);
    CHECK(out.str() == "k,x1,x2,u,y,e,s,kp,ki,kd\n");
  }
  SUBCASE("zero-gain rollout rows") {
    const PlantModel plant = make_example_plant({0.5, 0.3, 1.8, 0.9});
    const RolloutResult r =
        rollout(plant, {0, 0, 0}, PidMemory{}, {plant.x0, 0}, 2.0, 3);
    const std::vector<PidGains> gains(3, PidGains{0, 0, 0});
    std::ostringstream out;
    emit_trajectory_csv(r.trajectory, gains, 10, out);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "k,x1,x2,u,y,e,s,kp,ki,kd");
    std::getline(lines, line);
    CHECK(line == "0,1,1,0,0.9,1.1,1,0,0,0");
    std::getline(lines, line);
    CHECK(line == "1,0.5,0.3,0,0.315,1.685,1,0,0,0");
    std::getline(lines, line);
    CHECK(line == "2,0.075,0.075,0,0.1299375,1.8700625,1,0,0,0");
  }
}

TEST_CASE("fnv1a64 known vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("bundle writing is reproducible byte for byte") {
  const Scenario sc = parse_scenario_text(kCase1Text, "case1_n10.scn");
  const RunResult run = run_scenario(sc);

  const auto dir = std::filesystem::temp_directory_path() / "rpid_bundle_test";
  std::filesystem::remove_all(dir);
  write_bundle(run, sc, dir / "first", fnv1a64(kCase1Text), 1.0);
  CHECK(std::filesystem::exists(dir / "first" / "records.txt"));
  CHECK(std::filesystem::exists(dir / "first" / "trajectory.csv"));
  CHECK(std::filesystem::exists(dir / "first" / "meta.json"));

  const RunResult rerun = run_scenario(sc);
  write_bundle(rerun, sc, dir / "second", fnv1a64(kCase1Text), 2.0);
  CHECK(slurp(dir / "first" / "records.txt") == slurp(dir / "second" / "records.txt"));
  CHECK(slurp(dir / "first" / "trajectory.csv") ==
        slurp(dir / "second" / "trajectory.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("gains_per_step maps periods onto samples") {
  RunResult run;
  run.applied_gains = {{1, 0, 0}, {2, 0, 0}};
  for (int k = 0; k < 6; ++k) {
    run.trajectory.samples.push_back({k, {0, 0}, 0, 0, 0});
  }
  const auto per_step = gains_per_step(run, 3);
  REQUIRE(per_step.size() == 6);
  CHECK(per_step[0].kp == 1.0);
  CHECK(per_step[2].kp == 1.0);
  CHECK(per_step[3].kp == 2.0);
  CHECK(per_step[5].kp == 2.0);
}
