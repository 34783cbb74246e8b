#include <fstream>
#include <iostream>
#include <sstream>

#include "brwfpt/cli.hpp"

namespace brwfpt::cli {

namespace {

using Command = void (*)(const RunConfig&, std::ostream&);

Command find_command(const std::string& name) {
  if (name == "estimate") return cmd_estimate;
  if (name == "cdf") return cmd_cdf;
  if (name == "brute") return cmd_brute;
  if (name == "omega-scan") return cmd_omega_scan;
  if (name == "upper-rate") return cmd_upper_rate;
  if (name == "rate-info") return cmd_rate_info;
  return nullptr;
}

}  // namespace

int run_subcommand(const std::string& name, const RunConfig& config, std::ostream& err) {
  try {
    // Rows are buffered so a failed run leaves no partial file behind.
    std::ostringstream buffer;
    if (name == "fit") {
      if (config.input.empty() || config.input == "-") {
        cmd_fit(config, std::cin, buffer);
      } else {
        std::ifstream in(config.input);
        if (!in) {
          err << "error: cannot open input '" << config.input << "'\n";
          return 2;
        }
        cmd_fit(config, in, buffer);
      }
    } else if (const Command cmd = find_command(name)) {
      cmd(config, buffer);
    } else {
      err << "error: unknown subcommand '" << name << "'\n";
      return 1;
    }
    if (config.output.empty() || config.output == "-") {
      std::cout << buffer.str();
      std::cout.flush();
    } else {
      std::ofstream out(config.output, std::ios::binary);
      out << buffer.str();
      if (!out) {
        err << "error: cannot write output '" << config.output << "'\n";
        return 2;
      }
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace brwfpt::cli
