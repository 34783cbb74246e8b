#include <doctest.h>

#include <cmath>
#include <limits>

#include "brwfpt/errors.hpp"
#include "brwfpt/model.hpp"
#include "brwfpt/rng.hpp"
#include "support.hpp"

using namespace brwfpt;
using brwfpt::testing::moments;

TEST_SUITE("model") {
  TEST_CASE("mean offspring of finite pmfs") {
    CHECK(mean_offspring(OffspringLaw({{1, 0.9144}, {3, 0.0856}})) == doctest::Approx(1.1712).epsilon(1e-14));
    CHECK(mean_offspring(OffspringLaw({{1, 1.0}})) == 1.0);
    CHECK(mean_offspring(OffspringLaw({{0, 0.25}, {2, 0.75}})) == doctest::Approx(1.5).epsilon(1e-14));
  }

  TEST_CASE("offspring pmf validation") {
    CHECK_THROWS_AS(OffspringLaw({{1, 0.5}, {3, 0.49}}), ConfigError);
    CHECK_THROWS_AS(OffspringLaw({{-1, 0.5}, {3, 0.5}}), ConfigError);
    CHECK_THROWS_AS(OffspringLaw({{1, 1.2}, {3, -0.2}}), ConfigError);
    CHECK_THROWS_AS(OffspringLaw({{1, 0.5}, {1, 0.5}}), ConfigError);
    CHECK_THROWS_AS(OffspringLaw({}), ConfigError);
    // Order of entries does not matter.
    const OffspringLaw law({{3, 0.0856}, {1, 0.9144}});
    CHECK(law.prob(1) == 0.9144);
    CHECK(law.prob(2) == 0.0);
  }

  TEST_CASE("extinction probability is the smallest pgf fixed point") {
    CHECK(extinction_prob(OffspringLaw({{1, 0.9144}, {3, 0.0856}})) == 0.0);
    CHECK(extinction_prob(OffspringLaw({{0, 1.0}})) == 1.0);
    const OffspringLaw law({{0, 0.25}, {2, 0.75}});
    const double q = extinction_prob(law);
    CHECK(q == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(std::abs(law.pgf(q) - q) <= 1e-12);
    CHECK(q < 1.0);
  }

  TEST_CASE("pgf fixed-point residual on assorted supercritical laws") {
    const std::vector<std::vector<OffspringEntry>> laws = {
        {{0, 0.1}, {1, 0.3}, {2, 0.6}}, {{0, 0.4}, {5, 0.6}}, {{0, 0.05}, {1, 0.9}, {4, 0.05}}, {{0, 0.3}, {2, 0.7}}};
    for (const auto& pmf : laws) {
      const OffspringLaw law(pmf);
      REQUIRE(law.mean() > 1.0);
      const double q = extinction_prob(law);
      CHECK(std::abs(law.pgf(q) - q) <= 1e-12);
      CHECK(q > 0.0);
      CHECK(q < 1.0);
      // Any fixed point below q would be caught by the pgf dipping under the diagonal.
      for (int i = 1; i < 100; ++i) {
        const double s = q * i / 100.0;
        CHECK(law.pgf(s) > s);
      }
    }
  }

  TEST_CASE("gamma rate") {
    CHECK(gamma_rate(OffspringLaw({{1, 0.9144}, {3, 0.0856}})) == doctest::Approx(-std::log(0.9144)).epsilon(1e-13));
    CHECK(gamma_rate(OffspringLaw({{1, 0.9144}, {3, 0.0856}})) == doctest::Approx(0.089489).epsilon(1e-5));
    CHECK(gamma_rate(OffspringLaw({{2, 1.0}})) == std::numeric_limits<double>::infinity());
    CHECK(gamma_rate(OffspringLaw({{0, 0.25}, {2, 0.75}})) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  }

  TEST_CASE("gamma equals -log p1 whenever p0 = 0 and p1 > 0") {
    for (double p1 : {0.05, 0.3, 0.5, 0.9}) {
      const OffspringLaw law({{1, p1}, {2, (1 - p1) / 2}, {4, (1 - p1) / 2}});
      CHECK(gamma_rate(law) == doctest::Approx(-std::log(p1)).epsilon(1e-13));
    }
  }

  TEST_CASE("offspring sampling") {
    Rng rng = make_stream(7, 0);
    const OffspringLaw one({{1, 1.0}});
    for (int i = 0; i < 100; ++i) CHECK(sample_offspring(one, rng) == 1);

    const OffspringLaw ref({{1, 0.9144}, {3, 0.0856}});
    int threes = 0;
    for (int i = 0; i < 100000; ++i) threes += sample_offspring(ref, rng) == 3;
    CHECK(std::abs(threes / 1e5 - 0.0856) <= 0.005);

    const OffspringLaw two({{0, 0.25}, {2, 0.75}});
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) sum += sample_offspring(two, rng);
    CHECK(std::abs(sum / 1e5 - 1.5) <= 0.02);
  }

  TEST_CASE("Gaussian jump moments") {
    Rng rng = make_stream(11, 0);
    const JumpLaw g3 = IsotropicGaussian{1.0, 3};
    std::vector<std::vector<double>> cols(3);
    for (int i = 0; i < 100000; ++i) {
      const auto v = sample_jump(g3, rng);
      REQUIRE(v.size() == 3);
      for (int c = 0; c < 3; ++c) cols[c].push_back(v[c]);
    }
    for (int c = 0; c < 3; ++c) CHECK(std::abs(moments(cols[c]).mean) <= 0.013);
    for (int a = 0; a < 3; ++a) {
      for (int b = a + 1; b < 3; ++b) {
        double cov = 0.0;
        for (std::size_t i = 0; i < cols[a].size(); ++i) cov += cols[a][i] * cols[b][i];
        CHECK(std::abs(cov / 1e5) <= 0.013);
      }
    }

    const JumpLaw g1 = IsotropicGaussian{2.0, 1};
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i) xs.push_back(sample_jump(g1, rng)[0]);
    CHECK(std::abs(moments(xs).var - 4.0) <= 0.1);
  }

  TEST_CASE("draws are reproducible from identical stream state") {
    const auto model = brwfpt::testing::reference_model();
    Rng a = make_stream(3, 9);
    Rng b = make_stream(3, 9);
    for (int i = 0; i < 1000; ++i) {
      CHECK(sample_offspring(model.offspring, a) == sample_offspring(model.offspring, b));
      CHECK(sample_jump(model.jump, a) == sample_jump(model.jump, b));
    }
  }

  TEST_CASE("model construction checks") {
    CHECK_THROWS_AS(BrwModel(2, OffspringLaw({{2, 1.0}}), IsotropicGaussian{1.0, 3}), ConfigError);
    CHECK_THROWS_AS(BrwModel(3, OffspringLaw({{2, 1.0}}), IsotropicGaussian{0.0, 3}), ConfigError);
    PluggableJump bad{1, nullptr, nullptr, {}};
    CHECK_THROWS_AS(BrwModel(1, OffspringLaw({{2, 1.0}}), bad), ConfigError);
  }

  TEST_CASE("pluggable sampler of the wrong size is rejected") {
    PluggableJump p{2, [](Rng&) { return std::vector<double>{0.0}; }, nullptr,
                    {[](double l) { return l * l / 2; }, [](double l) { return l; }, [](double) { return 1.0; },
                     -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()}};
    const JumpLaw law = p;
    Rng rng = make_stream(1, 1);
    std::vector<double> out(2, 0.0);
    CHECK_THROWS_AS(add_jump(law, rng, out), ConfigError);
  }
}
