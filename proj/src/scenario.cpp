#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <set>
#include <sstream>

#include "pricefront/cli.hpp"

namespace pricefront::cli {

ScenarioError::ScenarioError(const std::string& origin, int line, const std::string& msg)
    : ConfigError(line > 0 ? origin + ":" + std::to_string(line) + ": " + msg : origin + ": " + msg), line_(line) {}

bool Scenario::wants(const std::string& solver) const {
  return std::find(solvers.begin(), solvers.end(), solver) != solvers.end();
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(v);
  while (std::getline(in, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

struct Parser {
  std::string origin;
  int line = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw ScenarioError(origin, line, msg); }

  double number(const std::string& v) const {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(out)) {
      fail("expected a number, got '" + v + "'");
    }
    return out;
  }
  long long integer(const std::string& v) const {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) fail("expected an integer, got '" + v + "'");
    return out;
  }
  bool boolean(const std::string& v) const {
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    fail("expected true or false, got '" + v + "'");
  }
  int positive_int(const std::string& v) const {
    const long long n = integer(v);
    if (n < 0 || n > 2'000'000'000) fail("value out of range: '" + v + "'");
    return static_cast<int>(n);
  }
};

}  // namespace

Scenario parse_scenario(std::istream& in, const std::string& origin) {
  Scenario s;
  Parser ps{origin, 0};
  std::string section;
  std::set<std::string> seen;
  std::vector<std::string> canon;
  int t_end_line = 0;

  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> keys = {
      {"initial.source", [&](const std::string& v) { s.source = v; }},
      {"initial.grid_points", [&](const std::string& v) { s.model.grid_points = ps.positive_int(v); }},
      {"initial.p_hint", [&](const std::string& v) { s.p_hint = ps.number(v); }},
      {"model.a", [&](const std::string& v) { s.model.a = ps.number(v); }},
      {"model.a0", [&](const std::string& v) { s.model.a0 = ps.number(v); }},
      {"model.rescue_half_factor", [&](const std::string& v) { s.model.rescue_half_factor = ps.number(v); }},
      {"model.contraction_tol", [&](const std::string& v) { s.model.contraction_tol = ps.number(v); }},
      {"model.max_picard_iters", [&](const std::string& v) { s.model.max_picard_iters = ps.positive_int(v); }},
      {"model.window_safety_factor", [&](const std::string& v) { s.model.window_safety_factor = ps.number(v); }},
      {"quadrature.points_per_window", [&](const std::string& v) { s.quadrature.points_per_window = ps.positive_int(v); }},
      {"quadrature.nodes_per_window", [&](const std::string& v) { s.quadrature.nodes_per_window = ps.positive_int(v); }},
      {"quadrature.checkpoint_lag", [&](const std::string& v) { s.quadrature.checkpoint_lag = ps.number(v); }},
      {"quadrature.checkpoint_stride", [&](const std::string& v) { s.quadrature.checkpoint_stride = ps.number(v); }},
      {"quadrature.substitution", [&](const std::string& v) { s.quadrature.substitution = ps.boolean(v); }},
      {"quadrature.spectral_tol", [&](const std::string& v) { s.quadrature.spectral_tol = ps.number(v); }},
      {"quadrature.skip_tol", [&](const std::string& v) { s.quadrature.skip_tol = ps.number(v); }},
      {"run.t_end",
       [&](const std::string& v) {
         s.t_end = ps.number(v);
         t_end_line = ps.line;
       }},
      {"run.solvers",
       [&](const std::string& v) {
         s.solvers = split_list(v);
         for (const auto& name : s.solvers) {
           if (name != "picard" && name != "fd" && name != "particles") ps.fail("unknown solver '" + name + "'");
         }
         if (s.solvers.empty()) ps.fail("no solver given");
       }},
      {"run.output_dir", [&](const std::string& v) { s.output_dir = v; }},
      {"run.output_interval",
       [&](const std::string& v) {
         s.output_interval = ps.number(v);
         if (s.output_interval < 0.0) ps.fail("output_interval must be non-negative");
       }},
      {"run.snapshot_times",
       [&](const std::string& v) {
         s.snapshot_times.clear();
         for (const auto& item : split_list(v)) {
           const double t = ps.number(item);
           if (t < 0.0) ps.fail("snapshot times must be non-negative");
           s.snapshot_times.push_back(t);
         }
       }},
      {"run.norm_cadence", [&](const std::string& v) { s.norm_cadence = ps.positive_int(v); }},
      {"fd.nx", [&](const std::string& v) { s.fd.nx = ps.positive_int(v); }},
      {"fd.dt", [&](const std::string& v) { s.fd.dt = ps.number(v); }},
      {"fd.theta", [&](const std::string& v) { s.fd.theta = ps.number(v); }},
      {"fd.delta_width", [&](const std::string& v) { s.fd.delta_width = ps.positive_int(v); }},
      {"fd.rannacher_steps", [&](const std::string& v) { s.fd.rannacher_steps = ps.positive_int(v); }},
      {"fd.record_every", [&](const std::string& v) { s.fd.record_every = ps.positive_int(v); }},
      {"particles.n", [&](const std::string& v) { s.particles = static_cast<std::size_t>(ps.positive_int(v)); }},
      {"particles.seed",
       [&](const std::string& v) {
         const long long n = ps.integer(v);
         if (n < 0) ps.fail("seed must be non-negative");
         s.seed = static_cast<std::uint64_t>(n);
       }},
      {"particles.dt", [&](const std::string& v) { s.particle_dt = ps.number(v); }},
      {"particles.bins", [&](const std::string& v) { s.bins = ps.positive_int(v); }},
      {"thresholds.norm_factor", [&](const std::string& v) { s.thresholds.norm_factor = ps.number(v); }},
      {"thresholds.flux_factor", [&](const std::string& v) { s.thresholds.flux_factor = ps.number(v); }},
      {"thresholds.curvature_max", [&](const std::string& v) { s.thresholds.curvature_max = ps.number(v); }},
      {"diagnostics.bound_suite_first", [&](const std::string& v) { s.bound_suite_first = ps.positive_int(v); }},
      {"diagnostics.bound_suite_every", [&](const std::string& v) { s.bound_suite_every = ps.positive_int(v); }},
      {"diagnostics.bound_suite_samples", [&](const std::string& v) { s.bound_suite_samples = ps.positive_int(v); }},
  };

  std::string raw;
  while (std::getline(in, raw)) {
    ++ps.line;
    std::string text = raw;
    const auto c = text.find_first_of("#;");
    if (c != std::string::npos) text.erase(c);
    text = trim(text);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') ps.fail("unterminated section header");
      section = trim(std::string_view(text).substr(1, text.size() - 2));
      if (section.empty()) ps.fail("empty section name");
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) ps.fail("expected 'key = value'");
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    if (key.empty()) ps.fail("missing key before '='");
    if (section.empty()) ps.fail("key '" + key + "' appears before any [section]");
    const std::string full = section + "." + key;
    const auto it = keys.find(full);
    if (it == keys.end()) ps.fail("unknown key '" + key + "' in section [" + section + "]");
    if (!seen.insert(full).second) ps.fail("duplicate key '" + full + "'");
    if (value.empty()) ps.fail("missing value for '" + key + "'");
    it->second(value);
    canon.push_back(full + "=" + value);
  }

  ps.line = t_end_line;
  if (!(s.t_end >= 0.0)) ps.fail("t_end must be non-negative");
  ps.line = 0;
  if (s.wants("particles") && !s.wants("picard")) {
    ps.fail("the particle stage needs the picard trajectory; add picard to run.solvers");
  }
  if (!(s.particle_dt > 0.0)) ps.fail("particles.dt must be positive");
  if (s.bins < 1) ps.fail("particles.bins must be positive");
  if (s.norm_cadence < 1) ps.fail("run.norm_cadence must be positive");
  try {
    s.model.validate();
    s.quadrature.validate();
    if (s.wants("fd")) s.fd.validate();
  } catch (const ConfigError& e) {
    ps.fail(e.what());
  }
  std::sort(canon.begin(), canon.end());
  for (const auto& l : canon) s.canonical += l + "\n";
  s.name = origin;
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string(), 0, "cannot open scenario file");
  Scenario s = parse_scenario(in, path.string());
  s.name = path.stem().string();
  s.base_dir = path.parent_path();
  return s;
}

std::string config_hash(const Scenario& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s.canonical) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::filesystem::path resolve_output_dir(const Scenario& s) {
  std::filesystem::path dir = s.output_dir.empty() ? std::filesystem::path(s.name) : std::filesystem::path(s.output_dir);
  if (dir.is_absolute()) return dir;
  if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0') {
    return std::filesystem::path(root) / dir;
  }
  return dir;
}

InitialData load_initial(const Scenario& s) {
  std::vector<double> samples;
  if (is_builtin(s.source)) {
    samples = builtin_samples(s.source, s.model.grid_points);
  } else {
    std::filesystem::path p(s.source);
    if (p.is_relative()) p = s.base_dir / p;
    samples = read_initial_file(p.string(), s.model.grid_points);
  }
  return validate_initial(samples, s.model, s.p_hint);
}

}  // namespace pricefront::cli
