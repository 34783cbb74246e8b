#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "brwfpt/cli.hpp"

namespace brwfpt::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(trim(cur));
  return parts;
}

template <class T>
bool parse_number(const std::string& s, T& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    std::istringstream is(t);
    is >> out;
    return !is.fail() && is.eof();
  } else {
    const auto* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, out);
    if (ec == std::errc() && ptr == end) return true;
    // Accept integral values in float notation, e.g. 1e5.
    double d = 0.0;
    if (!parse_number(t, d) || d != std::floor(d) || d < static_cast<double>(std::numeric_limits<T>::min()) ||
        d > static_cast<double>(std::numeric_limits<T>::max())) {
      return false;
    }
    out = static_cast<T>(d);
    return true;
  }
}

bool parse_bool(const std::string& s, bool& out) {
  const std::string t = trim(s);
  if (t == "true" || t == "1" || t == "yes" || t == "on") {
    out = true;
    return true;
  }
  if (t == "false" || t == "0" || t == "no" || t == "off") {
    out = false;
    return true;
  }
  return false;
}

const std::vector<std::string> kKeys = {
    "dimension", "offspring", "jump", "sigma",   "x",       "t",     "chat1_factor", "omega",
    "omega_grid", "samples",  "epsilon", "delta", "seed",   "threads", "K",          "r",
    "horizon",    "cap",      "timing",  "input", "output", "bone_sum_check"};

const std::vector<std::string> kRequired = {"dimension", "offspring"};

}  // namespace

ConfigLoadError::ConfigLoadError(std::vector<FieldError> errors)
    : ConfigError([&] {
        std::ostringstream os;
        os << "invalid configuration:";
        for (const auto& e : errors) os << "\n  " << e.key << ": " << e.message;
        return os.str();
      }()),
      errors_(std::move(errors)) {}

std::vector<std::string> known_keys() { return kKeys; }

RawConfig parse_config_text(const std::string& text) {
  RawConfig raw;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  std::vector<FieldError> errors;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      errors.push_back({"line " + std::to_string(lineno), "expected key = value, got '" + line + "'"});
      continue;
    }
    raw[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  if (!errors.empty()) throw ConfigLoadError(std::move(errors));
  return raw;
}

RunConfig build_config(const RawConfig& raw) {
  RunConfig c;
  std::vector<FieldError> errors;
  auto fail = [&](const std::string& key, const std::string& msg) { errors.push_back({key, msg}); };

  for (const auto& [key, value] : raw) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) fail(key, "unknown key");
  }
  for (const auto& key : kRequired) {
    if (!raw.contains(key)) fail(key, "missing required key");
  }

  auto get = [&](const std::string& key) -> const std::string* {
    const auto it = raw.find(key);
    return it == raw.end() ? nullptr : &it->second;
  };
  auto number = [&](const std::string& key, auto& out) {
    if (const auto* v = get(key); v && !parse_number(*v, out)) fail(key, "not a number: '" + *v + "'");
  };
  auto number_list = [&](const std::string& key, std::vector<double>& out) {
    const auto* v = get(key);
    if (!v) return;
    std::vector<double> vals;
    for (const auto& part : split(*v, ',')) {
      double d = 0.0;
      if (!parse_number(part, d)) {
        fail(key, "not a number list: '" + *v + "'");
        return;
      }
      vals.push_back(d);
    }
    if (vals.empty()) fail(key, "empty list");
    out = std::move(vals);
  };

  number("dimension", c.dimension);
  if (const auto* v = get("offspring")) {
    c.offspring.clear();
    for (const auto& part : split(*v, ',')) {
      const auto colon = part.find(':');
      OffspringEntry e{};
      if (colon == std::string::npos || !parse_number(part.substr(0, colon), e.count) ||
          !parse_number(part.substr(colon + 1), e.prob)) {
        fail("offspring", "expected count:prob pairs, got '" + part + "'");
        c.offspring.clear();
        break;
      }
      c.offspring.push_back(e);
    }
  }
  if (const auto* v = get("jump")) c.jump = *v;
  number("sigma", c.sigma);
  number_list("x", c.x);
  number("t", c.t);
  number("chat1_factor", c.chat1_factor);
  number("omega", c.omega);
  number_list("omega_grid", c.omega_grid);
  if (const auto* v = get("samples")) {
    if (trim(*v) == "auto") {
      c.plan_samples = true;
    } else {
      number("samples", c.samples);
    }
  }
  number("epsilon", c.epsilon);
  number("delta", c.delta);
  number("seed", c.seed);
  number("threads", c.threads);
  number("K", c.K);
  c.r = c.dimension / 2.0 + 1.0;
  number("r", c.r);
  number("horizon", c.horizon);
  number("cap", c.cap);
  if (const auto* v = get("timing"); v && !parse_bool(*v, c.timing)) fail("timing", "not a boolean: '" + *v + "'");
  if (const auto* v = get("bone_sum_check")) {
    if (trim(*v) == "record") {
      c.bone_sum_check = BoneSumCheck::record;
    } else if (trim(*v) == "gate") {
      c.bone_sum_check = BoneSumCheck::gate;
    } else {
      fail("bone_sum_check", "expected 'record' or 'gate', got '" + *v + "'");
    }
  }
  if (const auto* v = get("input")) c.input = *v;
  if (const auto* v = get("output")) c.output = *v;

  // Invariants.
  if (c.dimension < 1) fail("dimension", "must be a positive integer");
  if (raw.contains("offspring") && !c.offspring.empty()) {
    try {
      OffspringLaw law(c.offspring);
    } catch (const ConfigError& e) {
      fail("offspring", e.what());
    }
  }
  if (c.jump != "gaussian") fail("jump", "unsupported jump law '" + c.jump + "' (config files support 'gaussian')");
  if (!(c.sigma > 0.0)) fail("sigma", "must be positive");
  for (double x : c.x) {
    if (!(x > 1.0)) fail("x", "target distances must exceed 1");
  }
  if (c.t < 0) fail("t", "must be nonnegative");
  if (!(c.chat1_factor > 0.0)) fail("chat1_factor", "must be positive");
  if (!(c.omega >= 1.0)) fail("omega", "must be at least 1");
  for (double w : c.omega_grid) {
    if (!(w >= 1.0)) fail("omega_grid", "every omega must be at least 1");
  }
  if (!c.plan_samples && c.samples < 1) fail("samples", "must be at least 1 (or 'auto')");
  if (!(c.epsilon > 0.0 && c.epsilon <= 1.0)) fail("epsilon", "must be in (0, 1]");
  if (!(c.delta > 0.0 && c.delta < 1.0)) fail("delta", "must be in (0, 1)");
  if (c.threads < 0) fail("threads", "must be nonnegative (0 = all hardware threads)");
  if (c.K < 1) fail("K", "must be at least 1");
  if (!(c.r >= 0.0)) fail("r", "must be nonnegative");
  if (c.horizon < 0) fail("horizon", "must be nonnegative");
  if (c.cap < 1) fail("cap", "must be at least 1");

  if (!errors.empty()) throw ConfigLoadError(std::move(errors));
  return c;
}

RunConfig load_config(const std::string& text) { return build_config(parse_config_text(text)); }

BrwModel make_model(const RunConfig& config) {
  return BrwModel(config.dimension, OffspringLaw(config.offspring), IsotropicGaussian{config.sigma, config.dimension});
}

}  // namespace brwfpt::cli
