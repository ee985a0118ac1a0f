#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>

#include "rpid/rolling.hpp"

namespace rpid {

/// Fixed-point formatting with the usual correctly-rounded semantics:
/// the printed digits are the nearest `decimals`-digit decimal to the
/// binary value, ties to even.
std::string format_fixed(double value, int decimals);

/// Fixed-width per-period table `s | Kp Ki Kd | x1 x2 | y`, values to four
/// decimal places.
std::string emit_records_table(std::span<const RollingRecord> records);

/// CSV with header k,x1,...,xn,u,y,e,s,kp,ki,kd; one row per executed step.
/// The s column is the rolling-period index k / m_sample + 1 and the gain
/// columns are the gains active at that step.
void emit_trajectory_csv(const Trajectory& trajectory,
                         std::span<const PidGains> gains_per_step, int m_sample,
                         std::ostream& out);

/// Per-step gains expanded from the per-period applied gains.
std::vector<PidGains> gains_per_step(const RunResult& result, int m_sample);

std::string trajectory_csv(const RunResult& result, const Scenario& scenario);

/// FNV-1a, used to fingerprint scenario files in run metadata.
std::uint64_t fnv1a64(std::string_view bytes);

/// Write records.txt, trajectory.csv and meta.json under out_dir.
/// records.txt and trajectory.csv are byte-identical across re-runs of the
/// same scenario; meta.json additionally carries timings.
void write_bundle(const RunResult& result, const Scenario& scenario,
                  const std::filesystem::path& out_dir, std::uint64_t scenario_hash,
                  double elapsed_ms);

}  // namespace rpid
