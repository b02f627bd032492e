#include "fkdv/run_config.hpp"

#include "fkdv/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fkdv {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double to_real(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigError(fmt::format("{}: '{}' is not a number", what, text));
  return v;
}

long to_integer(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  long v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw ConfigError(fmt::format("{}: '{}' is not an integer", what, text));
  return v;
}

bool to_bool(const std::string& text, const std::string& what) {
  const std::string t = lower(trim(text));
  if (t == "1" || t == "true" || t == "yes" || t == "on")
    return true;
  if (t == "0" || t == "false" || t == "no" || t == "off")
    return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", what, text));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!trim(item).empty())
      out.push_back(trim(item));
  return out;
}

bool is_power_of_two(long m) { return m > 0 && (m & (m - 1)) == 0; }

} // namespace

std::vector<int> parse_sweep(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) {
    const long n = to_integer(item, "sweep");
    if (n < 4 || n > (1L << 26))
      throw ConfigError(fmt::format("sweep: element count {} out of range", n));
    if (!out.empty() && n <= out.back())
      throw ConfigError("sweep must be strictly increasing");
    out.push_back(static_cast<int>(n));
  }
  return out;
}

DtRule parse_dt_rule(const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "courant")
    return DtRule::courant();
  if (t.rfind("prop:", 0) == 0) {
    const double c = to_real(t.substr(5), "dt rule");
    if (!(c > 0.0))
      throw ConfigError("dt rule: proportionality constant must be positive");
    return DtRule::proportional(c);
  }
  const double dt = to_real(t, "dt");
  if (!(dt > 0.0))
    throw ConfigError("dt must be positive");
  return DtRule::explicit_dt(dt);
}

ReferenceChoice parse_reference(const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "closed")
    return {ReferenceKind::closed_form, 0};
  const auto colon = t.find(':');
  if (colon == std::string::npos)
    throw ConfigError(fmt::format("reference: expected closed, self:<M> or spectral:<M>, got '{}'", text));
  const std::string head = t.substr(0, colon);
  const long m = to_integer(t.substr(colon + 1), "reference resolution");
  if (head == "self") {
    if (m < 4)
      throw ConfigError("reference: self resolution must be at least 4 elements");
    return {ReferenceKind::self_fine, static_cast<int>(m)};
  }
  if (head == "spectral") {
    if (!is_power_of_two(m) || m < 16)
      throw ConfigError("reference: spectral resolution must be a power of two >= 16");
    return {ReferenceKind::spectral, static_cast<int>(m)};
  }
  throw ConfigError(fmt::format("reference: unknown kind '{}'", head));
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ','))
    out.push_back(to_real(item, "list"));
  return out;
}

void apply_setting(RunConfig& cfg, const std::string& raw_key, const std::string& value) {
  const std::string key = lower(trim(raw_key));
  const std::string v = trim(value);
  if (key == "experiment")
    cfg.experiment = v;
  else if (key == "alpha")
    cfg.alpha = to_real(v, key);
  else if (key == "sweep")
    cfg.sweep = parse_sweep(v);
  else if (key == "dt" || key == "dt_rule")
    cfg.dt_rule = parse_dt_rule(v);
  else if (key == "tol_factor")
    cfg.tol_factor = to_real(v, key);
  else if (key == "t0")
    cfg.t0 = to_real(v, key);
  else if (key == "t_final")
    cfg.t_final = to_real(v, key);
  else if (key == "reference")
    cfg.reference = parse_reference(v);
  else if (key == "max_iters")
    cfg.max_fixed_point_iters = static_cast<int>(to_integer(v, key));
  else if (key == "snapshot_intermediates")
    cfg.snapshot_intermediates = static_cast<int>(to_integer(v, key));
  else if (key == "snapshots")
    cfg.write_snapshots = to_bool(v, key);
  else if (key == "out")
    cfg.out_dir = v;
  else if (key == "jobs")
    cfg.jobs = static_cast<int>(to_integer(v, key));
  else if (key == "cache_dir")
    cfg.cache_dir = v.empty() ? std::nullopt : std::optional<std::filesystem::path>(v);
  else if (key == "backend") {
    const std::string b = lower(v);
    if (b == "real_space" || b == "real-space")
      cfg.backend = AssemblyBackend::real_space;
    else if (b == "spectral")
      cfg.backend = AssemblyBackend::spectral;
    else
      throw ConfigError(fmt::format("backend: unknown value '{}'", v));
  } else if (key == "inner_pts")
    cfg.quad.inner_pts = static_cast<int>(to_integer(v, key));
  else if (key == "pv_pts")
    cfg.quad.pv_pts = static_cast<int>(to_integer(v, key));
  else if (key == "max_images")
    cfg.quad.max_images = static_cast<int>(to_integer(v, key));
  else if (key == "image_tail_tol")
    cfg.quad.image_tail_tol = to_real(v, key);
  else if (key == "spectral_dt")
    cfg.spectral_dt = to_real(v, key);
  else
    throw ConfigError(fmt::format("unknown configuration key '{}'", raw_key));
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty() || body.front() == '[')
      continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ConfigError(fmt::format("config line {}: expected key = value", lineno));
    try {
      apply_setting(cfg, body.substr(0, eq), body.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("config line {}: {}", lineno, e.what()));
    }
  }
  return cfg;
}

RunConfig load_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in)
    throw ConfigError(fmt::format("cannot read config file {}", file.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void RunConfig::validate() const {
  (void)find_experiment(experiment);
  if (alpha)
    (void)FractionalOrder(*alpha);
  if (tol_factor && !(*tol_factor > 0.0))
    throw ConfigError("tol_factor must be positive");
  if (jobs < 1)
    throw ConfigError("jobs must be at least 1");
  if (snapshot_intermediates < 0)
    throw ConfigError("snapshot_intermediates must be non-negative");
  if (max_fixed_point_iters < 1)
    throw ConfigError("max_iters must be at least 1");
  if (spectral_dt < 0.0)
    throw ConfigError("spectral_dt must be non-negative");
  if (t0 && t_final && !(*t_final >= *t0))
    throw ConfigError("t_final precedes t0");
  quad.validate();
}

ExperimentSpec resolve_experiment(const RunConfig& cfg) {
  ExperimentSpec spec = find_experiment(cfg.experiment);
  if (cfg.alpha)
    spec.alpha = FractionalOrder(*cfg.alpha).value();
  if (cfg.sweep)
    spec.sweep = *cfg.sweep;
  if (cfg.dt_rule)
    spec.dt_rule = *cfg.dt_rule;
  if (cfg.t0)
    spec.t0 = *cfg.t0;
  if (cfg.t_final)
    spec.t_final = *cfg.t_final;
  if (!(spec.t_final >= spec.t0))
    throw ConfigError(fmt::format("final time {} precedes initial time {}", spec.t_final, spec.t0));
  return spec;
}

ReferenceChoice resolve_reference(const RunConfig& cfg, const ExperimentSpec& spec) {
  ReferenceChoice ref;
  if (cfg.reference)
    ref = *cfg.reference;
  else {
    ref.kind = spec.reference;
    ref.resolution = spec.reference == ReferenceKind::self_fine   ? spec.self_reference_elems
                     : spec.reference == ReferenceKind::spectral ? spec.spectral_modes
                                                                  : 0;
  }
  if (ref.kind == ReferenceKind::closed_form && !spec.exact)
    throw ConfigError(fmt::format("experiment {} has no closed-form solution; use self:<M> or spectral:<M>",
                                  spec.name));
  if (ref.kind == ReferenceKind::closed_form && cfg.alpha && spec.alpha != find_experiment(spec.name).alpha)
    std::fprintf(stderr, "warning: closed-form reference of %s assumes the preset order\n", spec.name.c_str());
  return ref;
}

SchemeConfig scheme_config(const RunConfig& cfg, const ExperimentSpec& spec) {
  SchemeConfig s;
  s.alpha = FractionalOrder(spec.alpha);
  s.dt_rule = spec.dt_rule;
  if (cfg.tol_factor)
    s.tol_factor = *cfg.tol_factor;
  s.max_fixed_point_iters = cfg.max_fixed_point_iters;
  s.quad = cfg.quad;
  s.validate();
  return s;
}

} // namespace fkdv
