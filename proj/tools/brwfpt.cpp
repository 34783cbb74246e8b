// Command-line driver for the branching-random-walk first-passage estimator.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "brwfpt/cli.hpp"

namespace {

struct FlagSpec {
  const char* flag;
  const char* key;
  const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"--dimension", "dimension", "spatial dimension d"},
    {"--offspring", "offspring", "offspring pmf as count:prob pairs, e.g. 1:0.9144,3:0.0856"},
    {"--sigma", "sigma", "per-coordinate standard deviation of Gaussian jumps"},
    {"--x", "x", "target distance(s), comma separated"},
    {"--t", "t", "offset: estimate P(tau_x = floor(x/chat1) - t)"},
    {"--chat1-factor", "chat1_factor", "chat1 / c1 (> 1 lower tail, < 1 upper-rate)"},
    {"--omega", "omega", "window scale omega >= 1"},
    {"--omega-grid", "omega_grid", "omega values for omega-scan"},
    {"--samples", "samples", "replicates per estimate (or 'auto' to plan from epsilon/delta/r)"},
    {"--epsilon", "epsilon", "planner relative error"},
    {"--delta", "delta", "planner failure probability"},
    {"--seed", "seed", "base seed"},
    {"--threads", "threads", "worker threads (0 = all)"},
    {"--K", "K", "cdf truncation depth"},
    {"--r", "r", "planner complexity exponent"},
    {"--horizon", "horizon", "brute-force generation horizon"},
    {"--cap", "cap", "population cap per tree"},
    {"--timing", "timing", "record runtime_seconds (false writes 0 for byte-stable output)"},
    {"--bone-sum-check", "bone_sum_check", "E11 handling: record (report only) or gate (reject)"},
    {"--input", "input", "fit input CSV"},
    {"--out", "output", "output path ('-' for stdout)"},
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw brwfpt::ConfigError("cannot open config file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rare-event first-passage estimation for branching random walks"};
  app.require_subcommand(1);

  const char* commands[][2] = {
      {"estimate", "importance-sampling estimate of P(tau_x = n) per x"},
      {"cdf", "sum of K pmf estimates, P(n - K < tau_x <= n)"},
      {"brute", "empirical FPT pmf from direct simulation"},
      {"omega-scan", "estimates over the omega grid and x list"},
      {"fit", "log-log fit of estimates against the asymptotic law"},
      {"upper-rate", "upper-deviation rate T for chat1 < c1"},
      {"rate-info", "branching and rate-function constants"},
  };

  std::map<std::string, std::string> values;
  std::string config_path;
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", config_path, "key=value configuration file");
    for (const FlagSpec& f : kFlags) sub->add_option(f.flag, values[f.key], f.help);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    brwfpt::cli::RawConfig raw;
    if (!config_path.empty()) raw = brwfpt::cli::parse_config_text(read_file(config_path));
    for (const auto& [key, value] : values) {
      if (!value.empty()) raw[key] = value;
    }
    const brwfpt::cli::RunConfig config = brwfpt::cli::build_config(raw);
    return brwfpt::cli::run_subcommand(app.get_subcommands().front()->get_name(), config, std::cerr);
  } catch (const brwfpt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  }
}
