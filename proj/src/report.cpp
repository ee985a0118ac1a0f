#include "rpid/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rpid {

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

namespace {

constexpr int kCellWidth = 8;

void put_cell(std::ostream& out, double v) {
  const std::string s = format_fixed(v, 4);
  out << ' ';
  for (int pad = kCellWidth - static_cast<int>(s.size()); pad > 0; --pad) out << ' ';
  out << s;
}

std::string format_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string emit_records_table(std::span<const RollingRecord> records) {
  std::ostringstream out;
  out << "  s |       Kp       Ki       Kd |       x1       x2 |        y\n";
  out << "----+----------------------------+-------------------+---------\n";
  for (const RollingRecord& r : records) {
    out << ' ';
    if (r.s < 10) out << ' ';
    out << r.s << " |";
    put_cell(out, r.gains.kp);
    put_cell(out, r.gains.ki);
    put_cell(out, r.gains.kd);
    out << " |";
    for (double xi : r.x_at) put_cell(out, xi);
    out << " |";
    put_cell(out, r.y_at);
    out << '\n';
  }
  return out.str();
}

std::vector<PidGains> gains_per_step(const RunResult& result, int m_sample) {
  std::vector<PidGains> out;
  out.reserve(result.trajectory.size());
  for (std::size_t i = 0; i < result.trajectory.size(); ++i) {
    std::size_t period = m_sample > 0 ? i / static_cast<std::size_t>(m_sample) : 0;
    if (period >= result.applied_gains.size()) {
      period = result.applied_gains.empty() ? 0 : result.applied_gains.size() - 1;
    }
    out.push_back(result.applied_gains.empty() ? PidGains{}
                                               : result.applied_gains[period]);
  }
  return out;
}

void emit_trajectory_csv(const Trajectory& trajectory,
                         std::span<const PidGains> gains, int m_sample,
                         std::ostream& out) {
  const std::size_t n =
      trajectory.empty() ? 2 : trajectory.samples.front().x.size();
  out << 'k';
  for (std::size_t i = 1; i <= n; ++i) out << ",x" << i;
  out << ",u,y,e,s,kp,ki,kd\n";
  for (std::size_t i = 0; i < trajectory.samples.size(); ++i) {
    const TrajectorySample& s = trajectory.samples[i];
    out << s.k;
    for (double xi : s.x) out << ',' << format_g(xi);
    out << ',' << format_g(s.u) << ',' << format_g(s.y) << ',' << format_g(s.e);
    out << ',' << (m_sample > 0 ? s.k / m_sample + 1 : 1);
    const PidGains g = i < gains.size() ? gains[i] : PidGains{};
    out << ',' << format_g(g.kp) << ',' << format_g(g.ki) << ',' << format_g(g.kd);
    out << '\n';
  }
}

std::string trajectory_csv(const RunResult& result, const Scenario& scenario) {
  std::ostringstream out;
  const auto gains = gains_per_step(result, scenario.m_sample);
  emit_trajectory_csv(result.trajectory, gains, scenario.m_sample, out);
  return out.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const char ch : bytes) {
    hash ^= static_cast<unsigned char>(ch);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

void write_bundle(const RunResult& result, const Scenario& scenario,
                  const std::filesystem::path& out_dir, std::uint64_t scenario_hash,
                  double elapsed_ms) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  {
    std::ofstream records(out_dir / "records.txt", std::ios::binary);
    if (!records) throw std::runtime_error("cannot write " + (out_dir / "records.txt").string());
    records << emit_records_table(result.records);
  }
  {
    std::ofstream csv(out_dir / "trajectory.csv", std::ios::binary);
    if (!csv) throw std::runtime_error("cannot write " + (out_dir / "trajectory.csv").string());
    const auto gains = gains_per_step(result, scenario.m_sample);
    emit_trajectory_csv(result.trajectory, gains, scenario.m_sample, csv);
  }

  nlohmann::json meta;
  meta["scenario"] = scenario.name;
  meta["mode"] = mode_name(scenario.mode);
  meta["criterion"] = criterion_name(scenario.criterion);
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(scenario_hash));
  meta["scenario_hash"] = hash_hex;
  meta["termination"] = termination_name(result.terminated_by);
  meta["periods"] = result.records.size();
  meta["steps"] = result.trajectory.size();
  meta["elapsed_ms"] = elapsed_ms;

  nlohmann::json records = nlohmann::json::array();
  for (const RollingRecord& r : result.records) {
    nlohmann::json row;
    row["s"] = r.s;
    row["gains"] = {r.gains.kp, r.gains.ki, r.gains.kd};
    row["x"] = r.x_at;
    row["y"] = r.y_at;
    row["j"] = r.j_value;  // NaN serializes as null
    if (r.model) {
      row["model"] = r.model->flat();
      row["rank_deficient"] = r.fit_rank_deficient;
    }
    records.push_back(std::move(row));
  }
  meta["records"] = std::move(records);

  std::ofstream meta_out(out_dir / "meta.json", std::ios::binary);
  if (!meta_out) throw std::runtime_error("cannot write " + (out_dir / "meta.json").string());
  meta_out << meta.dump(2) << '\n';
}

}  // namespace rpid
