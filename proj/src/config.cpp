#include "buridan/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

namespace buridan {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view s, const std::string& key, int line) {
  s = trim(s);
  if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size() || std::isnan(v)) {
    throw ConfigError(line, key + ": expected a number, got '" + std::string(s) + "'");
  }
  return v;
}

template <class Int>
Int to_int(std::string_view s, const std::string& key, int line) {
  s = trim(s);
  Int v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw ConfigError(line, key + ": expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

std::string choice(std::string_view s, const std::string& key, int line,
                   std::initializer_list<const char*> allowed) {
  const std::string v(trim(s));
  for (const char* a : allowed) {
    if (v == a) return v;
  }
  std::string msg = key + ": '" + v + "' is not one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw ConfigError(line, msg);
}

std::vector<double> list_or_throw(std::string_view s, const std::string& key, int line) {
  try {
    return parse_number_list(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line, key + ": " + e.what());
  }
}

const std::vector<std::string> kKeys = {
    "N", "J", "T", "T0", "g", "g0", "m0", "delta0", "gamma", "Gamma", "hbar", "sector",
    "engine", "memory", "init", "model", "times", "times_abs", "t_end", "tol", "cells",
    "seed", "trajectories", "out_dir", "lambda_threshold", "p_wrong_bound", "purity_limit",
    "coupling_limit", "g_spread", "r_up", "offdiag", "threads", "sweep"};

}  // namespace

std::vector<std::string> config_keys() { return kKeys; }

int RunConfig::line_of(const std::string& key) const {
  const auto it = lines.find(key);
  return it == lines.end() ? 0 : it->second;
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto next = text.find(',', pos);
    const auto item = trim(text.substr(pos, next == std::string_view::npos ? text.npos : next - pos));
    if (item.empty()) throw std::invalid_argument("empty entry in number list");
    double v = 0.0;
    const auto r = std::from_chars(item.data(), item.data() + item.size(), v);
    if (r.ec != std::errc() || r.ptr != item.data() + item.size()) {
      throw std::invalid_argument("'" + std::string(item) + "' is not a number");
    }
    out.push_back(v);
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

void apply_setting(RunConfig& c, std::string_view key_sv, std::string_view value, int line) {
  const std::string key(trim(key_sv));
  auto& p = c.params;
  if (key == "N") {
    p.n_spins = to_int<int>(value, key, line);
  } else if (key == "J") {
    p.coupling_j = to_double(value, key, line);
  } else if (key == "T") {
    p.temp_bath = to_double(value, key, line);
  } else if (key == "T0") {
    p.temp_init = to_double(value, key, line);
  } else if (key == "g") {
    p.coupling_g = to_double(value, key, line);
  } else if (key == "g0") {
    p.pre_field = to_double(value, key, line);
  } else if (key == "m0") {
    p.m_offset = to_double(value, key, line);
  } else if (key == "delta0") {
    p.delta0 = to_double(value, key, line);
  } else if (key == "gamma") {
    p.gamma = to_double(value, key, line);
  } else if (key == "Gamma") {
    p.debye_cutoff = to_double(value, key, line);
  } else if (key == "hbar") {
    p.hbar = to_double(value, key, line);
  } else if (key == "sector") {
    p.sector = choice(value, key, line, {"up", "down"}) == "up" ? Sector::up : Sector::down;
  } else if (key == "engine") {
    c.engine = choice(value, key, line, {"master", "fp"});
  } else if (key == "memory") {
    c.memory = choice(value, key, line, {"short", "full"});
  } else if (key == "init") {
    c.init = choice(value, key, line, {"paramagnet", "gaussian"});
  } else if (key == "model") {
    c.model = choice(value, key, line, {"drift-only", "gaussian-linear", "gaussian-cubic", "suzuki"});
  } else if (key == "times") {
    c.times = list_or_throw(value, key, line);
  } else if (key == "times_abs") {
    c.times_abs = list_or_throw(value, key, line);
  } else if (key == "t_end") {
    c.t_end = to_double(value, key, line);
  } else if (key == "tol") {
    c.tol = to_double(value, key, line);
  } else if (key == "cells") {
    c.cells = to_int<int>(value, key, line);
  } else if (key == "seed") {
    c.seed = to_int<std::uint64_t>(value, key, line);
  } else if (key == "trajectories") {
    c.trajectories = to_int<std::size_t>(value, key, line);
  } else if (key == "out_dir") {
    c.out_dir = std::string(trim(value));
  } else if (key == "lambda_threshold") {
    c.lambda_threshold = to_double(value, key, line);
  } else if (key == "p_wrong_bound") {
    c.p_wrong_bound = to_double(value, key, line);
  } else if (key == "purity_limit") {
    c.purity_limit = to_double(value, key, line);
  } else if (key == "coupling_limit") {
    c.coupling_limit = to_double(value, key, line);
  } else if (key == "g_spread") {
    c.g_spread = to_double(value, key, line);
  } else if (key == "r_up") {
    c.r_up = to_double(value, key, line);
  } else if (key == "offdiag") {
    c.offdiag = to_double(value, key, line);
  } else if (key == "threads") {
    c.threads = to_int<unsigned>(value, key, line);
  } else if (key == "sweep") {
    const auto colon = value.find(':');
    if (colon == std::string_view::npos) {
      throw ConfigError(line, "sweep: expected 'key: v1, v2, ...'");
    }
    c.sweep_key = std::string(trim(value.substr(0, colon)));
    if (std::find(kKeys.begin(), kKeys.end(), c.sweep_key) == kKeys.end()) {
      throw ConfigError(line, "sweep: unknown key '" + c.sweep_key + "'");
    }
    c.sweep_values = list_or_throw(value.substr(colon + 1), key, line);
  } else {
    throw ConfigError(line, "unknown key '" + key + "'");
  }
  c.lines[key] = line;
}

void validate_config(const RunConfig& c) {
  try {
    c.params.validate();
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    const std::string field = msg.substr(0, msg.find(':'));
    throw ConfigError(c.line_of(field), msg);
  }
  auto check = [&](bool ok, const char* key, const char* why) {
    if (!ok) throw ConfigError(c.line_of(key), std::string(key) + ": " + why);
  };
  auto ascending = [](const std::vector<double>& v) {
    return std::is_sorted(v.begin(), v.end()) &&
           std::adjacent_find(v.begin(), v.end()) == v.end() &&
           std::all_of(v.begin(), v.end(), [](double x) { return x >= 0.0 && std::isfinite(x); });
  };
  check(ascending(c.times), "times", "must be ascending, distinct and >= 0");
  check(ascending(c.times_abs), "times_abs", "must be ascending, distinct and >= 0");
  check(c.t_end > 0.0 && std::isfinite(c.t_end), "t_end", "must be > 0");
  check(c.tol > 0.0 && c.tol < 1.0, "tol", "must lie in (0, 1)");
  check(c.cells >= 100, "cells", "must be >= 100");
  check(c.trajectories > 0, "trajectories", "must be > 0");
  check(c.lambda_threshold > 0.0, "lambda_threshold", "must be > 0");
  check(c.p_wrong_bound > 0.0 && c.p_wrong_bound < 1.0, "p_wrong_bound", "must lie in (0, 1)");
  check(c.g_spread >= 0.0, "g_spread", "must be >= 0");
  check(c.r_up >= 0.0 && c.r_up <= 1.0, "r_up", "must lie in [0, 1]");
  check(c.offdiag >= 0.0 && c.offdiag <= std::sqrt(c.r_up * (1.0 - c.r_up)) + 1e-15, "offdiag",
        "must lie in [0, sqrt(r_up (1 - r_up))]");
}

void require_ferromagnetic(const RunConfig& c) {
  if (!(c.params.temp_bath < c.params.coupling_j)) {
    throw ConfigError(c.line_of("T"), "T: must be below J for this command");
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::set<std::string> seen;
  int line = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    ++line;
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    const auto hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line, "expected 'key = value'");
    const std::string key(trim(raw.substr(0, eq)));
    if (key.empty()) throw ConfigError(line, "missing key before '='");
    if (!seen.insert(key).second) throw ConfigError(line, "duplicate key '" + key + "'");
    apply_setting(c, key, raw.substr(eq + 1), line);
  }
  validate_config(c);
  for (const char* req : {"N", "T", "g"}) {
    if (!seen.count(req)) throw ConfigError(0, std::string("missing ") + req);
  }
  return c;
}

}  // namespace buridan
