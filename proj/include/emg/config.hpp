#pragma once

// Flat key=value configuration: one pair per line, '#' starts a comment,
// blank lines ignored. Missing keys keep their ModelParams defaults.
//
//   beta = 0.8
//   gamma_B = 2.0
//   axis1 = beta: 0.2, 0.8          # optional sweep axes
//   axis2 = gamma_B: 0.01:1:0.33    # start:stop:step ranges allowed

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "emg/params.hpp"

namespace emg {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct SweepAxis {
  std::string name;
  std::vector<double> values;

  bool operator==(const SweepAxis&) const = default;
};

struct SweepSpec {
  ModelParams base;
  SweepAxis axis1;
  std::optional<SweepAxis> axis2;
  std::string output_dir;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> to_int(std::string_view s) {
  s = trim(s);
  std::int64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec == std::errc{} && p == s.data() + s.size() && !s.empty()) return v;
  // Accept integral floating forms such as 1e5.
  const auto d = to_double(s);
  if (d && std::isfinite(*d) && *d == std::floor(*d) && std::abs(*d) < 9.0e18)
    return static_cast<std::int64_t>(*d);
  return std::nullopt;
}

inline std::optional<std::uint64_t> to_u64(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Names of the numeric parameters that can be swept.
inline const std::vector<std::string>& numeric_param_names() {
  static const std::vector<std::string> names{
      "N", "m", "R", "beta", "gamma_A", "gamma_B", "S_th", "omega_th",
      "t_relax", "t_meas", "n_runs", "hist_bins"};
  return names;
}

/// Sets a numeric parameter from a double; integer fields require integral
/// values. Throws std::invalid_argument for an unknown name or bad value.
inline void set_numeric_param(ModelParams& p, std::string_view name, double v) {
  auto as_int = [&]() -> std::int64_t {
    if (!std::isfinite(v) || v != std::floor(v))
      throw std::invalid_argument(std::string(name) + " must be an integer");
    return static_cast<std::int64_t>(v);
  };
  auto as_i32 = [&]() -> int {
    const auto i = as_int();
    if (i < INT32_MIN || i > INT32_MAX) throw std::invalid_argument(std::string(name) + " out of range");
    return static_cast<int>(i);
  };
  if (name == "N") p.N = as_i32();
  else if (name == "m") p.m = as_i32();
  else if (name == "R") p.R = v;
  else if (name == "beta") p.beta = v;
  else if (name == "gamma_A") p.gamma_A = v;
  else if (name == "gamma_B") p.gamma_B = v;
  else if (name == "S_th") p.S_th = v;
  else if (name == "omega_th") p.omega_th = v;
  else if (name == "t_relax") p.t_relax = as_int();
  else if (name == "t_meas") p.t_meas = as_int();
  else if (name == "n_runs") p.n_runs = as_i32();
  else if (name == "hist_bins") p.hist_bins = as_i32();
  else throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
}

/// Parses "a, b, c" with optional "start:stop:step" ranges (inclusive of
/// stop up to 1e-9 of a step).
inline std::vector<double> parse_value_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = detail::trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (item.empty()) throw std::invalid_argument("empty value in list");
    if (item.find(':') != std::string_view::npos) {
      const auto c1 = item.find(':');
      const auto c2 = item.find(':', c1 + 1);
      if (c2 == std::string_view::npos) throw std::invalid_argument("range must be start:stop:step");
      const auto a = detail::to_double(item.substr(0, c1));
      const auto b = detail::to_double(item.substr(c1 + 1, c2 - c1 - 1));
      const auto s = detail::to_double(item.substr(c2 + 1));
      if (!a || !b || !s || !(*s > 0.0) || *b < *a)
        throw std::invalid_argument("bad range '" + std::string(item) + "'");
      const auto steps = static_cast<std::int64_t>(std::floor((*b - *a) / *s + 1e-9));
      for (std::int64_t i = 0; i <= steps; ++i) out.push_back(*a + static_cast<double>(i) * *s);
    } else {
      const auto v = detail::to_double(item);
      if (!v) throw std::invalid_argument("bad number '" + std::string(item) + "'");
      out.push_back(*v);
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

namespace detail {

inline SweepAxis parse_axis(std::string_view value, const ModelParams& base, int line) {
  const auto colon = value.find(':');
  if (colon == std::string_view::npos) throw ConfigError(line, "axis must be 'name: values'");
  SweepAxis axis;
  axis.name = std::string(trim(value.substr(0, colon)));
  bool known = false;
  for (const auto& n : numeric_param_names()) known = known || n == axis.name;
  if (!known) throw ConfigError(line, "unknown axis parameter '" + axis.name + "'");
  try {
    axis.values = parse_value_list(value.substr(colon + 1));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(line, e.what());
  }
  for (double v : axis.values) {
    ModelParams probe = base;
    try {
      set_numeric_param(probe, axis.name, v);
      probe.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line, std::string("axis value out of domain: ") + e.what());
    }
  }
  return axis;
}

}  // namespace detail

/// Returns ModelParams, or a SweepSpec when axis1 is present. Unknown keys,
/// malformed lines and out-of-domain values raise ConfigError with the line.
inline std::variant<ModelParams, SweepSpec> parse_config(std::string_view text) {
  ModelParams p;
  struct PendingAxis {
    std::string value;
    int line;
  };
  std::optional<PendingAxis> axis1, axis2;
  std::vector<std::pair<std::string, int>> seen;

  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected key=value");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "missing key");
    if (value.empty()) throw ConfigError(line_no, "missing value for '" + key + "'");
    for (const auto& [k, l] : seen)
      if (k == key) throw ConfigError(line_no, "duplicate key '" + key + "' (first on line " + std::to_string(l) + ")");
    seen.emplace_back(key, line_no);

    if (key == "axis1") { axis1 = PendingAxis{std::string(value), line_no}; continue; }
    if (key == "axis2") { axis2 = PendingAxis{std::string(value), line_no}; continue; }
    if (key == "predictor") {
      if (value == "repeat_last") p.predictor = Predictor::repeat_last;
      else if (value == "oppose_last") p.predictor = Predictor::oppose_last;
      else throw ConfigError(line_no, "predictor must be repeat_last or oppose_last");
      continue;
    }
    if (key == "volatility") {
      if (value == "uncentered") p.volatility = VolatilityMode::uncentered;
      else if (value == "centered") p.volatility = VolatilityMode::centered;
      else throw ConfigError(line_no, "volatility must be uncentered or centered");
      continue;
    }
    if (key == "master_seed") {
      const auto v = detail::to_u64(value);
      if (!v) throw ConfigError(line_no, "master_seed must be an unsigned 64-bit integer");
      p.master_seed = *v;
      continue;
    }
    bool known = false;
    for (const auto& n : numeric_param_names()) known = known || n == key;
    if (!known) throw ConfigError(line_no, "unknown key '" + key + "'");
    const auto v = detail::to_double(value);
    if (!v) throw ConfigError(line_no, "'" + key + "' is not a number");
    try {
      set_numeric_param(p, key, *v);
      ModelParams probe = p;
      probe.validate();
    } catch (const ParamError& e) {
      if (e.field() == key) throw ConfigError(line_no, e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line_no, e.what());
    }
  }

  // Cross-field checks once every key has been read.
  try {
    p.validate();
  } catch (const ParamError& e) {
    int line = 0;
    for (const auto& [k, l] : seen)
      if (k == e.field()) line = l;
    throw ConfigError(line, e.what());
  }

  if (!axis1) {
    if (axis2) throw ConfigError(axis2->line, "axis2 given without axis1");
    return p;
  }
  SweepSpec spec;
  spec.base = p;
  spec.axis1 = detail::parse_axis(axis1->value, p, axis1->line);
  if (axis2) {
    spec.axis2 = detail::parse_axis(axis2->value, p, axis2->line);
    if (spec.axis2->name == spec.axis1.name) throw ConfigError(axis2->line, "axis2 repeats axis1");
  }
  return spec;
}

/// Parses a file that must not declare sweep axes.
inline ModelParams parse_params(std::string_view text) {
  auto parsed = parse_config(text);
  if (auto* p = std::get_if<ModelParams>(&parsed)) return *p;
  throw ConfigError(0, "expected a single configuration, found sweep axes");
}

/// Every key, doubles at 17 significant digits, so parse(serialize(p)) == p.
inline std::string serialize(const ModelParams& p) {
  std::ostringstream os;
  os << "N = " << p.N << '\n'
     << "m = " << p.m << '\n'
     << "R = " << detail::format_double(p.R) << '\n'
     << "beta = " << detail::format_double(p.beta) << '\n'
     << "gamma_A = " << detail::format_double(p.gamma_A) << '\n'
     << "gamma_B = " << detail::format_double(p.gamma_B) << '\n'
     << "S_th = " << detail::format_double(p.S_th) << '\n'
     << "omega_th = " << detail::format_double(p.omega_th) << '\n'
     << "t_relax = " << p.t_relax << '\n'
     << "t_meas = " << p.t_meas << '\n'
     << "n_runs = " << p.n_runs << '\n'
     << "master_seed = " << p.master_seed << '\n'
     << "predictor = " << (p.predictor == Predictor::repeat_last ? "repeat_last" : "oppose_last") << '\n'
     << "volatility = " << (p.volatility == VolatilityMode::uncentered ? "uncentered" : "centered") << '\n'
     << "hist_bins = " << p.hist_bins << '\n';
  return os.str();
}

}  // namespace emg
