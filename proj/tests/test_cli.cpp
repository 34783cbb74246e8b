#include <doctest.h>

#include <cmath>
#include <iomanip>
#include <sstream>

#include "brwfpt/cli.hpp"
#include "support.hpp"

using namespace brwfpt;
using namespace brwfpt::cli;

namespace {

const char* kReferenceConfig = R"(# reference experiment
[model]
dimension = 3
offspring = 1:0.9144, 3:0.0856
sigma = 1

[run]
x = 20
samples = 2000
seed = 5
threads = 1
timing = false
)";

bool names_key(const ConfigLoadError& e, const std::string& key) {
  for (const auto& f : e.errors()) {
    if (f.key == key) return true;
  }
  return false;
}

std::vector<std::vector<std::string>> data_rows(const std::string& csv) {
  std::istringstream in(csv);
  return read_csv(in).rows;
}

RunConfig with(const std::string& extra) { return load_config(std::string(kReferenceConfig) + extra); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("reference configuration loads") {
    const RunConfig c = load_config(kReferenceConfig);
    CHECK(c.dimension == 3);
    REQUIRE(c.offspring.size() == 2);
    CHECK(c.offspring[0].count == 1);
    CHECK(c.offspring[0].prob == 0.9144);
    CHECK(c.offspring[1].count == 3);
    CHECK(c.offspring[1].prob == 0.0856);
    CHECK(c.sigma == 1.0);
    CHECK(c.x == std::vector<double>{20.0});
    CHECK(c.samples == 2000);
    CHECK(c.r == 2.5);
    CHECK_FALSE(c.timing);
    CHECK(c.bone_sum_check == BoneSumCheck::record);
  }

  TEST_CASE("field errors name the offending key") {
    auto expect_error = [](const std::string& text, const std::string& key) {
      try {
        load_config(text);
        FAIL("expected a configuration error for " << key);
      } catch (const ConfigLoadError& e) {
        CHECK_MESSAGE(names_key(e, key), std::string(e.what()));
      }
    };
    expect_error(std::string(kReferenceConfig) + "omega = 0.9\n", "omega");
    expect_error("dimension = 3\noffspring = 1:0.9,3:0.09\n", "offspring");
    expect_error("dimension = 3\n", "offspring");
    expect_error(std::string(kReferenceConfig) + "colour = red\n", "colour");
    expect_error(std::string(kReferenceConfig) + "samples = 0\n", "samples");
    expect_error(std::string(kReferenceConfig) + "x = 20, abc\n", "x");
    expect_error(std::string(kReferenceConfig) + "x = 0.5\n", "x");
    expect_error(std::string(kReferenceConfig) + "sigma = -1\n", "sigma");
    expect_error(std::string(kReferenceConfig) + "delta = 1\n", "delta");
    expect_error(std::string(kReferenceConfig) + "bone_sum_check = maybe\n", "bone_sum_check");
    expect_error(std::string(kReferenceConfig) + "just words\n", "line 13");
  }

  TEST_CASE("several bad fields are reported together") {
    try {
      load_config("dimension = 0\noffspring = 1:1\nomega = 0.5\nK = 0\n");
      FAIL("expected errors");
    } catch (const ConfigLoadError& e) {
      CHECK(names_key(e, "dimension"));
      CHECK(names_key(e, "omega"));
      CHECK(names_key(e, "K"));
    }
  }

  TEST_CASE("value forms") {
    const RunConfig c = with("samples = 1e4\nx = 15, 20,25\nomega_grid = 1,2\nsamples = auto\nbone_sum_check = gate\n");
    CHECK(c.plan_samples);
    CHECK(c.x == std::vector<double>{15, 20, 25});
    CHECK(c.omega_grid == std::vector<double>{1, 2});
    CHECK(c.bone_sum_check == BoneSumCheck::gate);
    CHECK(with("samples = 1e4\n").samples == 10000);
    CHECK_THROWS_AS(with("samples = 1.5\n"), ConfigLoadError);
  }

  TEST_CASE("fit recovers an exact power law") {
    const RunConfig c = load_config(kReferenceConfig);
    const CramerProfile p = derive_profile(make_model(c), c.chat1_factor);
    std::ostringstream csv;
    csv << "# synthetic\nx,n,estimate\n";
    for (double x : {50.0, 75.0, 100.0, 150.0, 200.0, 400.0}) {
      const int n = static_cast<int>(std::floor(x / p.chat1));
      const double est = 1.25 * std::pow(n, -1.5) * std::exp(-(x / p.chat1) * (p.I_chat1 - p.log_rho));
      csv << x << ',' << n << ',' << std::setprecision(17) << est << '\n';
    }
    std::istringstream in(csv.str());
    std::ostringstream out;
    const auto fits = cmd_fit(c, in, out);
    REQUIRE(fits.size() == 1);
    CHECK(std::abs(fits[0].slope + 1.5) <= 1e-9);
    CHECK(std::abs(fits[0].beta - 1.25) <= 1e-9);
    CHECK(fits[0].residual_rms <= 1e-9);
    CHECK(fits[0].points == 6);
    CHECK(fits[0].x_min == 50.0);
    CHECK(fits[0].x_max == 400.0);
  }

  TEST_CASE("fit groups by omega and skips zero estimates") {
    const RunConfig c = load_config(kReferenceConfig);
    std::istringstream in("x,n,estimate,omega\n50,74,1e-6,1.5\n100,148,1e-9,1.5\n150,222,0,1.5\n50,74,2e-6,2\n100,148,3e-9,2\n");
    std::ostringstream out;
    const auto fits = cmd_fit(c, in, out);
    REQUIRE(fits.size() == 2);
    CHECK(fits[0].points == 2);
    CHECK(data_rows(out.str()).size() == 2);
  }

  TEST_CASE("estimate rows and determinism") {
    const RunConfig c = load_config(kReferenceConfig);
    std::ostringstream a, b;
    cmd_estimate(c, a);
    cmd_estimate(c, b);
    CHECK(a.str() == b.str());
    std::istringstream in(a.str());
    const CsvTable t = read_csv(in);
    REQUIRE(t.rows.size() == 1);
    for (const char* col : {"x", "n", "t", "chat1", "estimate", "stderr", "N", "acceptance_rate", "truncations",
                            "runtime_seconds", "seed"}) {
      CHECK_MESSAGE(t.column(col).has_value(), col);
    }
    CHECK(t.rows[0][*t.column("n")] == "29");
    CHECK(t.rows[0][*t.column("runtime_seconds")] == "0");
    CHECK(t.rows[0][*t.column("seed")] == "5");
    CHECK(a.str().find("# bone_sum_check=record") != std::string::npos);
  }

  TEST_CASE("omega scan covers the grid") {
    const RunConfig c = with("samples = 200\nx = 100\n");
    std::ostringstream out;
    cmd_omega_scan(c, out);
    std::istringstream in(out.str());
    const CsvTable t = read_csv(in);
    REQUIRE(t.rows.size() == 5);
    const CramerProfile p = derive_profile(make_model(c), 1.2);
    const double r4 = 3 / (2 * p.chat2);
    for (std::size_t i = 0; i < 5; ++i) {
      const double omega = std::stod(t.rows[i][*t.column("omega")]);
      CHECK(omega == c.omega_grid[i]);
      CHECK(std::stod(t.rows[i][*t.column("R1")]) == doctest::Approx(omega * omega * omega * r4));
      CHECK(std::stod(t.rows[i][*t.column("R5")]) == doctest::Approx(omega * r4));
      CHECK(std::stoi(t.rows[i][*t.column("w5")]) == static_cast<int>(std::floor(omega * r4 * std::log(100.0))));
    }
  }

  TEST_CASE("cdf, brute, upper-rate and rate-info outputs") {
    std::ostringstream cdf;
    cmd_cdf(with("K = 3\nsamples = 500\n"), cdf);
    const auto cdf_rows = data_rows(cdf.str());
    REQUIRE(cdf_rows.size() == 3);

    std::ostringstream brute;
    cmd_brute(with("x = 5\nhorizon = 8\nsamples = 300\n"), brute);
    CHECK(data_rows(brute.str()).size() == 9);

    std::ostringstream upper;
    cmd_upper_rate(with("chat1_factor = 0.5\n"), upper);
    const auto up = data_rows(upper.str());
    REQUIRE(up.size() == 1);
    CHECK(std::stod(up[0][1]) > 0.0);

    std::ostringstream info;
    cmd_rate_info(load_config(kReferenceConfig), info);
    CHECK(info.str().find("eps1,") != std::string::npos);
  }

  TEST_CASE("exit statuses") {
    std::ostringstream err;
    RunConfig c = load_config(kReferenceConfig);
    c.output = "/dev/null";
    CHECK(run_subcommand("estimate", c, err) == 0);
    CHECK(run_subcommand("no-such-command", c, err) == 1);
    RunConfig lower = c;
    lower.chat1_factor = 0.8;
    CHECK(run_subcommand("estimate", lower, err) == 1);
    RunConfig tight = c;
    tight.cap = 1;
    CHECK(run_subcommand("estimate", tight, err) == 2);
    RunConfig missing = c;
    missing.input = "/nonexistent/file.csv";
    CHECK(run_subcommand("fit", missing, err) == 2);
  }
}
