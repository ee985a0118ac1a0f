#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rpid/controller.hpp"

using namespace rpid;

TEST_CASE("error sign convention") {
  CHECK(error(2.0, 0.9) == doctest::Approx(1.1));
  CHECK(error(2.0, 2.0) == 0.0);
  CHECK(error(0.0, 3.0) == -3.0);
}

TEST_CASE("place-type law") {
  SUBCASE("zero gains give zero control") {
    PidMemory m{5.0, 1.0, -2.0, 3.0};
    CHECK(pid_place({0, 0, 0}, m, 5.0).u == 0.0);
  }
  SUBCASE("pure proportional") {
    CHECK(pid_place({1, 0, 0}, PidMemory{}, 0.5).u == doctest::Approx(0.5));
  }
  SUBCASE("first step with equal gains") {
    // kp*e + ki*e + kd*e at e = 1.1
    const PidOutput out = pid_place({0.1, 0.1, 0.1}, PidMemory{}, 1.1);
    CHECK(out.u == doctest::Approx(0.33));
  }
  SUBCASE("memory update") {
    PidMemory m{2.0, 0.5, 0.25, 7.0};
    const PidOutput out = pid_place({1, 1, 1}, m, 1.5);
    CHECK(out.memory.error_sum == doctest::Approx(3.5));
    CHECK(out.memory.e_prev == 1.5);
    CHECK(out.memory.e_prev2 == 0.5);
    CHECK(out.memory.u_prev == out.u);
  }
}

TEST_CASE("increment-type law") {
  SUBCASE("zero gains hold the previous control") {
    PidMemory m;
    m.u_prev = 0.7;
    CHECK(pid_increment({0, 0, 0}, m, 1.0).u == doctest::Approx(0.7));
  }
  SUBCASE("first step with unit gains") {
    CHECK(pid_increment({1, 1, 1}, PidMemory{}, 1.0).u == doctest::Approx(3.0));
  }
  SUBCASE("pure integral telescopes") {
    PidMemory m;
    std::vector<double> us;
    for (int i = 0; i < 3; ++i) {
      const PidOutput out = pid_increment({0, 1, 0}, m, 1.0);
      us.push_back(out.u);
      m = out.memory;
    }
    CHECK(us[0] == doctest::Approx(1.0));
    CHECK(us[1] == doctest::Approx(2.0));
    CHECK(us[2] == doctest::Approx(3.0));
  }
}

TEST_CASE("place and increment produce the same control sequence from zero memory") {
  std::mt19937_64 gen(99);
  auto uniform = [&gen](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
  };
  for (int trial = 0; trial < 300; ++trial) {
    const PidGains gains{uniform(-2, 10), uniform(-2, 10), uniform(-2, 10)};
    PidMemory mp, mi;
    for (int step = 0; step < 25; ++step) {
      const double e = uniform(-5, 5);
      const PidOutput a = pid_place(gains, mp, e);
      const PidOutput b = pid_increment(gains, mi, e);
      mp = a.memory;
      mi = b.memory;
      CHECK(std::abs(a.u - b.u) <= 1e-12 * std::max(1.0, std::abs(a.u)));
    }
  }
}

TEST_CASE("place-type control is linear in the gains from zero memory") {
  const double e = 1.7;
  const PidGains k1{0.3, 1.1, -0.4};
  const PidGains k2{2.0, -0.5, 0.9};
  const double u1 = pid_place(k1, PidMemory{}, e).u;
  const double u2 = pid_place(k2, PidMemory{}, e).u;
  const PidGains sum{k1.kp + k2.kp, k1.ki + k2.ki, k1.kd + k2.kd};
  CHECK(pid_place(sum, PidMemory{}, e).u == doctest::Approx(u1 + u2));
  const PidGains twice{2 * k1.kp, 2 * k1.ki, 2 * k1.kd};
  CHECK(pid_place(twice, PidMemory{}, e).u == doctest::Approx(2 * u1));
  CHECK(pid_place({0, 0, 0}, PidMemory{}, e).u == 0.0);
}

TEST_CASE("memory accounts for every processed error exactly") {
  std::mt19937_64 gen(3);
  auto uniform = [&gen](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53);
  };
  PidMemory m;
  double expected = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double e = uniform(-4, 4);
    expected += e;
    m = pid_place({0.2, 0.4, 0.1}, m, e).memory;
    CHECK(m.error_sum == expected);  // same summation order, bit-exact
  }
}

TEST_CASE("gain vector helpers") {
  PidGains k{1, 2, 3};
  CHECK(k[0] == 1.0);
  CHECK(k[1] == 2.0);
  CHECK(k[2] == 3.0);
  k[2] = 5.0;
  CHECK(k.kd == 5.0);
  CHECK(max_abs_diff({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(max_abs_diff({0, 0, 0}, {1, 0, 0}) == 1.0);
  CHECK(max_abs_diff({1, 5, 3}, {2, 2, 3}) == 3.0);
}
