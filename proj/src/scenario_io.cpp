#include "rpid/scenario_io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rpid {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(std::string_view origin, int line, const std::string& what) {
  std::ostringstream msg;
  msg << origin << ":" << line << ": " << what;
  throw std::runtime_error(msg.str());
}

double parse_double(std::string_view token, std::string_view origin, int line,
                    std::string_view key) {
  token = trim(token);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    fail(origin, line, "key '" + std::string(key) + "': cannot parse number '" +
                           std::string(token) + "'");
  }
  return value;
}

std::vector<double> parse_vector(std::string_view value, std::size_t expected,
                                 std::string_view origin, int line, std::string_view key) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= value.size()) {
    const auto comma = value.find(',', pos);
    const auto token = value.substr(pos, comma == std::string_view::npos
                                             ? std::string_view::npos
                                             : comma - pos);
    out.push_back(parse_double(token, origin, line, key));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (out.size() != expected) {
    fail(origin, line, "key '" + std::string(key) + "': expected " +
                           std::to_string(expected) + " values, got " +
                           std::to_string(out.size()));
  }
  return out;
}

bool parse_bool(std::string_view value, std::string_view origin, int line,
                std::string_view key) {
  if (value == "true") return true;
  if (value == "false") return false;
  fail(origin, line, "key '" + std::string(key) + "': expected true or false, got '" +
                         std::string(value) + "'");
}

int parse_int(std::string_view token, std::string_view origin, int line,
              std::string_view key) {
  token = trim(token);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    fail(origin, line, "key '" + std::string(key) + "': cannot parse integer '" +
                           std::string(token) + "'");
  }
  return value;
}

const std::set<std::string, std::less<>> kKnownKeys = {
    "mode", "y_r", "theta", "x0", "n_horizon", "m_sample", "k0", "criterion",
    "bounds_lo", "bounds_hi", "s_max", "term_k_tol", "term_e_tol",
    "reset_memory_on_update", "predict_fresh_memory", "law", "divergence_cap",
    "gtol", "max_iters", "max_evals", "fd_step", "n_starts", "seed"};

const std::set<std::string, std::less<>> kRequiredKeys = {
    "mode", "y_r", "theta", "n_horizon", "m_sample", "k0"};

}  // namespace

Scenario parse_scenario_text(std::string_view text, std::string_view origin) {
  std::map<std::string, std::pair<std::string, int>, std::less<>> entries;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos
                                                 ? std::string_view::npos
                                                 : eol - pos);
    ++line_no;
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;

    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(origin, line_no, "expected 'key = value', got '" + std::string(line) + "'");
    }
    const std::string key{trim(line.substr(0, eq))};
    const std::string value{trim(line.substr(eq + 1))};
    if (!kKnownKeys.contains(key)) {
      fail(origin, line_no, "unknown key '" + key + "'");
    }
    if (entries.contains(key)) {
      fail(origin, line_no, "duplicate key '" + key + "'");
    }
    entries.emplace(key, std::pair{value, line_no});
  }

  std::string missing;
  for (const auto& required : kRequiredKeys) {
    if (!entries.contains(required)) {
      missing += missing.empty() ? "" : ", ";
      missing += "'" + required + "'";
    }
  }
  if (!missing.empty()) {
    throw std::runtime_error(std::string(origin) + ": missing required key(s) " + missing);
  }

  auto get = [&](std::string_view key) -> const std::pair<std::string, int>* {
    const auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  };

  Scenario sc;
  sc.name = origin;

  {
    const auto* e = get("mode");
    const auto mode = mode_from_name(e->first);
    if (!mode) fail(origin, e->second, "mode: expected canonical, rolling_exact or rolling_sysid");
    sc.mode = *mode;
  }

  std::array<double, 4> theta{};
  {
    const auto* e = get("theta");
    const auto v = parse_vector(e->first, 4, origin, e->second, "theta");
    std::copy(v.begin(), v.end(), theta.begin());
  }
  StateVector x0 = {1.0, 1.0};
  if (const auto* e = get("x0")) {
    const auto v = parse_vector(e->first, 2, origin, e->second, "x0");
    x0.assign(v.begin(), v.end());
  }
  sc.plant = make_example_plant(theta, std::move(x0));

  {
    const auto* e = get("y_r");
    sc.y_r = parse_double(e->first, origin, e->second, "y_r");
  }
  {
    const auto* e = get("n_horizon");
    sc.n_horizon = parse_int(e->first, origin, e->second, "n_horizon");
  }
  {
    const auto* e = get("m_sample");
    sc.m_sample = parse_int(e->first, origin, e->second, "m_sample");
  }
  {
    const auto* e = get("k0");
    const auto v = parse_vector(e->first, 3, origin, e->second, "k0");
    sc.k0 = {v[0], v[1], v[2]};
  }
  if (const auto* e = get("criterion")) {
    const auto c = criterion_from_name(e->first);
    if (!c) fail(origin, e->second, "criterion: expected ise, itse, iae or itae");
    sc.criterion = *c;
  }
  if (const auto* e = get("bounds_lo")) {
    const auto v = parse_vector(e->first, 3, origin, e->second, "bounds_lo");
    std::copy(v.begin(), v.end(), sc.bounds.lo.begin());
  }
  if (const auto* e = get("bounds_hi")) {
    const auto v = parse_vector(e->first, 3, origin, e->second, "bounds_hi");
    std::copy(v.begin(), v.end(), sc.bounds.hi.begin());
  }
  if (const auto* e = get("s_max")) sc.s_max = parse_int(e->first, origin, e->second, "s_max");
  if (const auto* e = get("term_k_tol")) {
    sc.term_k_tol = parse_double(e->first, origin, e->second, "term_k_tol");
  }
  if (const auto* e = get("term_e_tol")) {
    sc.term_e_tol = parse_double(e->first, origin, e->second, "term_e_tol");
  }
  if (const auto* e = get("reset_memory_on_update")) {
    sc.reset_memory_on_update = parse_bool(e->first, origin, e->second, "reset_memory_on_update");
  }
  if (const auto* e = get("predict_fresh_memory")) {
    sc.predict_fresh_memory = parse_bool(e->first, origin, e->second, "predict_fresh_memory");
  }
  if (const auto* e = get("law")) {
    if (e->first == "place") {
      sc.law = PidLaw::place;
    } else if (e->first == "increment") {
      sc.law = PidLaw::increment;
    } else {
      fail(origin, e->second, "law: expected place or increment");
    }
  }
  if (const auto* e = get("divergence_cap")) {
    sc.divergence_cap = parse_double(e->first, origin, e->second, "divergence_cap");
  }
  if (const auto* e = get("gtol")) sc.opt.gtol = parse_double(e->first, origin, e->second, "gtol");
  if (const auto* e = get("max_iters")) {
    sc.opt.max_iters = parse_int(e->first, origin, e->second, "max_iters");
  }
  if (const auto* e = get("max_evals")) {
    sc.opt.max_evals = parse_int(e->first, origin, e->second, "max_evals");
  }
  if (const auto* e = get("fd_step")) {
    sc.opt.fd_step = parse_double(e->first, origin, e->second, "fd_step");
  }
  if (const auto* e = get("n_starts")) {
    sc.opt.n_starts = parse_int(e->first, origin, e->second, "n_starts");
  }
  if (const auto* e = get("seed")) {
    const std::string_view token = e->first;
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), seed);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      fail(origin, e->second, "key 'seed': cannot parse unsigned integer '" +
                                  std::string(token) + "'");
    }
    sc.opt.seed = seed;
  }

  try {
    validate_scenario(sc);
  } catch (const std::invalid_argument& err) {
    throw std::runtime_error(std::string(origin) + ": " + err.what());
  }
  return sc;
}

Scenario parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open scenario file: " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  Scenario sc = parse_scenario_text(buffer.str(), path.filename().string());
  sc.name = path.stem().string();
  return sc;
}

}  // namespace rpid
