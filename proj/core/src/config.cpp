#include "rbfpu/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace rbfpu {

const char* to_string(JacobianMode m) noexcept {
  switch (m) {
    case JacobianMode::ReducedDense:
      return "reduced-dense";
    case JacobianMode::SparseAlternative:
      return "sparse-alternative";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string k) {
  k = trim(k);
  while (!k.empty() && k.front() == '-') k.erase(k.begin());
  std::replace(k.begin(), k.end(), '-', '_');
  return k;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  std::array<char, 32> buf{};
  const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), r.ptr);
}

void check(bool ok, const char* key, const char* what) {
  if (!ok) throw ConfigError(key, what);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "shape",        "h",           "ell",           "epsilon",      "patch_radius", "cluster_lambda",
      "re_schedule",  "jacobian_mode", "output_dir",  "export",       "tr_delta0",    "tr_delta_max",
      "tr_eta_accept", "tr_shrink",  "tr_grow",       "tr_tol_residual", "tr_tol_step", "tr_max_iters"};
  return keys;
}

ObstacleShape parse_shape(const std::string& text) {
  const std::string t = trim(text);
  if (t == "circle") return ObstacleShape::circle();
  if (t == "square") return ObstacleShape::square();
  if (t.rfind("rounded:", 0) == 0) {
    const int alpha = to_int("shape", t.substr(8));
    if (alpha < 1) throw ConfigError("shape", "rounded square degree must be >= 1");
    return ObstacleShape::rounded_square(alpha);
  }
  throw ConfigError("shape", "expected circle, square or rounded:<alpha>, got '" + text + "'");
}

void RunConfig::validate() const {
  check(disc.h > 0.0 && std::isfinite(disc.h), "h", "must be > 0");
  check(disc.transform.ell >= 1.0 && std::isfinite(disc.transform.ell), "ell", "must be >= 1");
  check(disc.kernel.epsilon > 0.0 && std::isfinite(disc.kernel.epsilon), "epsilon", "must be > 0");
  check(disc.patch_radius > 0.0 && std::isfinite(disc.patch_radius), "patch_radius", "must be > 0");
  check(disc.cluster.lambda > 0.0 && std::isfinite(disc.cluster.lambda), "cluster_lambda", "must be > 0");
  try {
    validate_schedule(re_schedule);
  } catch (const DomainError& e) {
    throw ConfigError("re_schedule", e.what());
  }
  check(solver.delta0 > 0.0, "tr_delta0", "must be > 0");
  check(solver.delta_max >= solver.delta0, "tr_delta_max", "must be >= tr_delta0");
  check(solver.eta_accept > 0.0 && solver.eta_accept < 0.25, "tr_eta_accept", "must lie in (0, 0.25)");
  check(solver.shrink > 0.0 && solver.shrink < 1.0, "tr_shrink", "must lie in (0, 1)");
  check(solver.grow > 1.0, "tr_grow", "must be > 1");
  check(solver.tol_residual > 0.0, "tr_tol_residual", "must be > 0");
  check(solver.tol_step >= 0.0, "tr_tol_step", "must be >= 0");
  check(solver.max_iters >= 1, "tr_max_iters", "must be >= 1");
  check(!output_dir.empty(), "output_dir", "must not be empty");
}

Settings read_settings_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file " + path.string());
  Settings out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    out.emplace_back(normalize_key(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

RunConfig config_from_settings(const Settings& s) {
  RunConfig c;
  for (const auto& [raw_key, value] : s) {
    std::string key = normalize_key(raw_key);
    if (key == "re") key = "re_schedule";
    if (key == "shape") {
      c.disc.shape = parse_shape(value);
    } else if (key == "h") {
      c.disc.h = to_double(key, value);
    } else if (key == "ell") {
      c.disc.transform.ell = to_double(key, value);
    } else if (key == "epsilon") {
      c.disc.kernel.epsilon = to_double(key, value);
    } else if (key == "patch_radius") {
      c.disc.patch_radius = to_double(key, value);
    } else if (key == "cluster_lambda") {
      c.disc.cluster.lambda = to_double(key, value);
    } else if (key == "re_schedule") {
      c.re_schedule.clear();
      for (const auto& item : split_list(value)) c.re_schedule.push_back(to_double(key, item));
    } else if (key == "jacobian_mode") {
      const std::string v = trim(value);
      if (v == "reduced-dense") {
        c.jacobian_mode = JacobianMode::ReducedDense;
      } else if (v == "sparse-alternative") {
        c.jacobian_mode = JacobianMode::SparseAlternative;
      } else {
        throw ConfigError(key, "expected reduced-dense or sparse-alternative, got '" + value + "'");
      }
    } else if (key == "output_dir") {
      c.output_dir = trim(value);
    } else if (key == "export") {
      ExportSet e{false, false, false, false};
      for (const auto& item : split_list(value)) {
        if (item == "all") {
          e = ExportSet{};
        } else if (item == "none") {
          e = ExportSet{false, false, false, false};
        } else if (item == "metrics") {
          e.metrics = true;
        } else if (item == "surface") {
          e.surface = true;
        } else if (item == "field") {
          e.field = true;
        } else if (item == "residuals") {
          e.residuals = true;
        } else {
          throw ConfigError(key, "unknown export '" + item + "'");
        }
      }
      c.exports = e;
    } else if (key == "tr_delta0") {
      c.solver.delta0 = to_double(key, value);
    } else if (key == "tr_delta_max") {
      c.solver.delta_max = to_double(key, value);
    } else if (key == "tr_eta_accept") {
      c.solver.eta_accept = to_double(key, value);
    } else if (key == "tr_shrink") {
      c.solver.shrink = to_double(key, value);
    } else if (key == "tr_grow") {
      c.solver.grow = to_double(key, value);
    } else if (key == "tr_tol_residual") {
      c.solver.tol_residual = to_double(key, value);
    } else if (key == "tr_tol_step") {
      c.solver.tol_step = to_double(key, value);
    } else if (key == "tr_max_iters") {
      c.solver.max_iters = to_int(key, value);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
  c.validate();
  return c;
}

Settings describe(const RunConfig& c) {
  std::string sched;
  for (std::size_t i = 0; i < c.re_schedule.size(); ++i) sched += (i ? "," : "") + fmt(c.re_schedule[i]);
  std::string exports;
  auto add = [&](bool on, const char* name) {
    if (on) exports += (exports.empty() ? "" : ",") + std::string(name);
  };
  add(c.exports.metrics, "metrics");
  add(c.exports.surface, "surface");
  add(c.exports.field, "field");
  add(c.exports.residuals, "residuals");
  if (exports.empty()) exports = "none";
  return {
      {"shape", c.disc.shape.name()},
      {"h", fmt(c.disc.h)},
      {"ell", fmt(c.disc.transform.ell)},
      {"epsilon", fmt(c.disc.kernel.epsilon)},
      {"patch_radius", fmt(c.disc.patch_radius)},
      {"cluster_lambda", fmt(c.disc.cluster.lambda)},
      {"re_schedule", sched},
      {"jacobian_mode", to_string(c.jacobian_mode)},
      {"output_dir", c.output_dir.string()},
      {"export", exports},
      {"tr_delta0", fmt(c.solver.delta0)},
      {"tr_delta_max", fmt(c.solver.delta_max)},
      {"tr_eta_accept", fmt(c.solver.eta_accept)},
      {"tr_shrink", fmt(c.solver.shrink)},
      {"tr_grow", fmt(c.solver.grow)},
      {"tr_tol_residual", fmt(c.solver.tol_residual)},
      {"tr_tol_step", fmt(c.solver.tol_step)},
      {"tr_max_iters", std::to_string(c.solver.max_iters)},
  };
}

std::string describe_line(const RunConfig& c) {
  std::string out;
  for (const auto& [k, v] : describe(c)) {
    if (!out.empty()) out += ' ';
    out += k + "=" + v;
  }
  return out;
}

}  // namespace rbfpu
