#pragma once

#include <cmath>
#include <cstddef>

namespace rpid {

/// PID gain vector K = [kp, ki, kd].
struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;

  double operator[](std::size_t i) const { return i == 0 ? kp : (i == 1 ? ki : kd); }
  double& operator[](std::size_t i) { return i == 0 ? kp : (i == 1 ? ki : kd); }

  friend bool operator==(const PidGains&, const PidGains&) = default;
};

/// Largest componentwise gain change, used by the rolling termination test.
double max_abs_diff(const PidGains& a, const PidGains& b);

/// Controller state carried between steps. A freshly constructed memory
/// (all zeros) corresponds to the instant before step k = 0 executes.
struct PidMemory {
  double error_sum = 0.0;  // sum of e(j) over all processed steps
  double e_prev = 0.0;     // e(k-1)
  double e_prev2 = 0.0;    // e(k-2)
  double u_prev = 0.0;     // u(k-1)

  friend bool operator==(const PidMemory&, const PidMemory&) = default;
};

enum class PidLaw { place, increment };

struct PidOutput {
  double u = 0.0;
  PidMemory memory;
};

/// Tracking error e = y_r - y.
double error(double y_r, double y);

/// Place-type law: u = kp*e + ki*(error_sum + e) + kd*(e - e_prev).
/// The integral term includes the current error, so after the update
/// error_sum holds the sum through the step just processed.
PidOutput pid_place(const PidGains& gains, const PidMemory& memory, double e);

/// Increment-type law: u = u_prev + kp*(e - e_prev) + ki*e
///                       + kd*(e - 2*e_prev + e_prev2).
/// From zero-initialized memory this produces the same control sequence
/// as the place type.
PidOutput pid_increment(const PidGains& gains, const PidMemory& memory, double e);

PidOutput pid_apply(PidLaw law, const PidGains& gains, const PidMemory& memory, double e);

}  // namespace rpid
