#include "rpid/controller.hpp"

#include <algorithm>

namespace rpid {

double max_abs_diff(const PidGains& a, const PidGains& b) {
  return std::max({std::abs(a.kp - b.kp), std::abs(a.ki - b.ki), std::abs(a.kd - b.kd)});
}

double error(double y_r, double y) { return y_r - y; }

namespace {

PidMemory advance(const PidMemory& m, double e, double u) {
  PidMemory next;
  next.error_sum = m.error_sum + e;
  next.e_prev2 = m.e_prev;
  next.e_prev = e;
  next.u_prev = u;
  return next;
}

}  // namespace

PidOutput pid_place(const PidGains& g, const PidMemory& m, double e) {
  const double u = g.kp * e + g.ki * (m.error_sum + e) + g.kd * (e - m.e_prev);
  return {u, advance(m, e, u)};
}

PidOutput pid_increment(const PidGains& g, const PidMemory& m, double e) {
  const double u = m.u_prev + g.kp * (e - m.e_prev) + g.ki * e +
                   g.kd * (e - 2.0 * m.e_prev + m.e_prev2);
  return {u, advance(m, e, u)};
}

PidOutput pid_apply(PidLaw law, const PidGains& g, const PidMemory& m, double e) {
  return law == PidLaw::place ? pid_place(g, m, e) : pid_increment(g, m, e);
}

}  // namespace rpid
