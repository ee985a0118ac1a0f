#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rpid/acceptance.hpp"
#include "rpid/report.hpp"
#include "rpid/rolling.hpp"
#include "rpid/scenario_io.hpp"

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int cmd_run(const std::string& scenario_path, const std::string& out_dir, bool quiet) {
  const std::filesystem::path path(scenario_path);
  const std::string raw = read_file(path);
  rpid::Scenario sc = rpid::parse_scenario_text(raw, path.filename().string());
  sc.name = path.stem().string();

  const auto t0 = std::chrono::steady_clock::now();
  const rpid::RunResult result = rpid::run_scenario(sc);
  const auto t1 = std::chrono::steady_clock::now();
  const double elapsed_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();

  rpid::write_bundle(result, sc, out_dir, rpid::fnv1a64(raw), elapsed_ms);

  if (!quiet) {
    std::cout << sc.name << " (" << rpid::mode_name(sc.mode)
              << ", N=" << sc.n_horizon << ", M=" << sc.m_sample << ", "
              << rpid::criterion_name(sc.criterion) << ")\n";
    std::cout << rpid::emit_records_table(result.records);
    std::cout << "termination: " << rpid::termination_name(result.terminated_by)
              << ", steps: " << result.trajectory.size() << ", bundle: " << out_dir
              << "\n";
  }
  return 0;
}

int cmd_tables(const std::string& scenarios_dir) {
  const char* files[] = {"case1_n10.scn", "case1_n30.scn", "case2_n10.scn",
                         "case2_n30.scn"};
  for (const char* file : files) {
    const std::filesystem::path path = std::filesystem::path(scenarios_dir) / file;
    const rpid::Scenario sc = rpid::parse_scenario(path);
    const rpid::RunResult result = rpid::run_scenario(sc);
    std::cout << "== " << sc.name << " (" << rpid::mode_name(sc.mode)
              << ", N=" << sc.n_horizon << ", M=" << sc.m_sample << ", "
              << rpid::criterion_name(sc.criterion) << ") ==\n";
    std::cout << rpid::emit_records_table(result.records);
    std::cout << "termination: " << rpid::termination_name(result.terminated_by)
              << "\n\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimization-based PID tuning with periodic model and gain updates"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Execute a scenario file and write a result bundle");
  std::string scenario_path, out_dir = "out";
  bool quiet = false;
  run->add_option("--scenario", scenario_path, "Scenario file (.scn)")->required();
  run->add_option("--out", out_dir, "Output directory");
  run->add_flag("--quiet", quiet, "Suppress stdout summary");

  auto* tables = app.add_subcommand(
      "tables", "Run the four bundled scenarios and print their results tables");
  std::string scenarios_dir = "scenarios";
  tables->add_option("--scenarios-dir", scenarios_dir, "Directory with the .scn files");

  auto* verify = app.add_subcommand(
      "verify", "Run the acceptance suite and print one line per criterion");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(scenario_path, out_dir, quiet);
    if (tables->parsed()) return cmd_tables(scenarios_dir);
    if (verify->parsed()) return rpid::run_acceptance_cli(std::cout);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
