#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "brwfpt/errors.hpp"
#include "brwfpt/estimator.hpp"
#include "brwfpt/model.hpp"
#include "brwfpt/ratefn.hpp"

namespace brwfpt::cli {

/// Run configuration. Keys in config files and --flags use these field names
/// (flags spell underscores as dashes).
struct RunConfig {
  int dimension = 3;
  std::vector<OffspringEntry> offspring;
  std::string jump = "gaussian";
  double sigma = 1.0;
  std::vector<double> x{100.0};
  int t = 0;
  double chat1_factor = 1.2;
  double omega = 1.5;
  std::vector<double> omega_grid{1.0, 1.25, 1.5, 1.75, 2.0};
  std::uint64_t samples = 100000;  ///< 0 in a file means "plan from epsilon/delta/r"
  bool plan_samples = false;
  double epsilon = 0.1;
  double delta = 0.05;
  std::uint64_t seed = 1;
  int threads = 0;
  int K = 1;
  double r = 2.5;  ///< planner exponent; defaults to d/2 + 1
  int horizon = 60;
  std::uint64_t cap = 10'000'000;
  bool timing = true;
  BoneSumCheck bone_sum_check = BoneSumCheck::record;
  std::string input;
  std::string output = "-";
};

struct FieldError {
  std::string key;
  std::string message;
};

class ConfigLoadError : public ConfigError {
 public:
  explicit ConfigLoadError(std::vector<FieldError> errors);
  const std::vector<FieldError>& errors() const { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

using RawConfig = std::map<std::string, std::string>;

/// Parses `key = value` lines. '#' starts a comment; `[section]` lines only
/// group keys and are ignored. Later duplicates override earlier ones.
RawConfig parse_config_text(const std::string& text);

/// Validates raw key/value pairs into a RunConfig. Reports every bad field.
RunConfig build_config(const RawConfig& raw);

RunConfig load_config(const std::string& text);

std::vector<std::string> known_keys();

BrwModel make_model(const RunConfig& config);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double beta = 0.0;
  double residual_rms = 0.0;
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t points = 0;
};

struct FitPoint {
  double x;
  int n;
  double estimate;
};

/// OLS of ln(estimate) + (x/chat1)(I(chat1) - log rho) on ln n. The slope
/// estimates -d/2 and exp(intercept) the prefactor beta. Points with a
/// nonpositive estimate are skipped.
FitResult fit_power_law(const std::vector<FitPoint>& points, const CramerProfile& profile);

/// Reads rows with at least `x` and `estimate` columns (optional `n`, `omega`)
/// from a CSV whose '#' lines are metadata.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(const std::string& name) const;
};
CsvTable read_csv(std::istream& in);

void cmd_estimate(const RunConfig& config, std::ostream& out);
void cmd_cdf(const RunConfig& config, std::ostream& out);
void cmd_brute(const RunConfig& config, std::ostream& out);
void cmd_omega_scan(const RunConfig& config, std::ostream& out);
std::vector<FitResult> cmd_fit(const RunConfig& config, std::istream& in, std::ostream& out);
void cmd_upper_rate(const RunConfig& config, std::ostream& out);
void cmd_rate_info(const RunConfig& config, std::ostream& out);

/// Dispatches a subcommand by name; returns the process exit status
/// (0 success, 1 configuration error, 2 numeric or truncation failure).
int run_subcommand(const std::string& name, const RunConfig& config, std::ostream& err);

}  // namespace brwfpt::cli
