#include <doctest.h>

#include <cmath>
#include <limits>

#include "brwfpt/brw.hpp"
#include "brwfpt/rng.hpp"
#include "support.hpp"

using namespace brwfpt;
using brwfpt::testing::moments;
using brwfpt::testing::reference_model;

namespace {

// Independent first-passage oracle for a single Gaussian walk.
std::vector<std::uint64_t> single_walk_hits(int dim, double x, int horizon, std::uint64_t runs, std::uint64_t seed) {
  std::vector<std::uint64_t> hits(static_cast<std::size_t>(horizon) + 1, 0);
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> z;
  for (std::uint64_t r = 0; r < runs; ++r) {
    std::vector<double> p(static_cast<std::size_t>(dim), 0.0);
    for (int t = 0; t <= horizon; ++t) {
      if (t > 0) {
        for (double& c : p) c += z(eng);
      }
      double d2 = (p[0] - x) * (p[0] - x);
      for (int c = 1; c < dim; ++c) d2 += p[c] * p[c];
      if (d2 <= 1.0) {
        ++hits[static_cast<std::size_t>(t)];
        break;
      }
    }
  }
  return hits;
}

}  // namespace

TEST_SUITE("brw") {
  TEST_CASE("zero-generation tree holds only the root") {
    const auto model = reference_model();
    Rng rng = make_stream(41, 0);
    const std::vector<double> root{1.0, 2.0, 3.0};
    const TreeHistory h = simulate_tree(model, root, 0, 100, rng);
    CHECK(h.max_age() == 0);
    CHECK(h.total_particles() == 1);
    CHECK(h.root()[1] == 2.0);
  }

  TEST_CASE("certain death empties every later generation") {
    const auto model = brwfpt::testing::gaussian_model(3, {{0, 1.0}});
    Rng rng = make_stream(42, 0);
    const std::vector<double> root(3, 0.0);
    const TreeHistory h = simulate_tree(model, root, 5, 100, rng);
    for (int a = 1; a <= h.max_age(); ++a) CHECK(h.generation_size(a) == 0);
    CHECK(h.generation_size(0) == 1);
  }

  TEST_CASE("generation sizes follow Galton-Watson moments") {
    const auto model = reference_model();
    Rng rng = make_stream(43, 0);
    const std::vector<double> root(3, 0.0);
    std::vector<double> sizes;
    for (int i = 0; i < 10000; ++i) sizes.push_back(static_cast<double>(simulate_tree(model, root, 37, 1'000'000, rng).generation_size(37)));
    const double expected = std::pow(1.1712, 37);
    CHECK(expected == doctest::Approx(347).epsilon(0.01));
    CHECK(std::abs(moments(sizes).mean / expected - 1.0) <= 0.10);
  }

  TEST_CASE("positions at age m are sums of m nominal jumps") {
    const auto model = reference_model();
    Rng rng = make_stream(44, 0);
    const std::vector<double> root(3, 0.0);
    std::vector<double> coord;
    for (int i = 0; i < 4000; ++i) {
      const TreeHistory h = simulate_tree(model, root, 6, 1'000'000, rng);
      // One particle per tree keeps samples independent.
      coord.push_back(h.generation(6)[1]);
    }
    const auto m = moments(coord);
    CHECK(std::abs(m.mean) <= 4 * std::sqrt(6.0 / 4000));
    CHECK(std::abs(m.var - 6.0) <= 4 * 6.0 * std::sqrt(2.0 / 4000));
  }

  TEST_CASE("population cap marks truncation") {
    const auto model = brwfpt::testing::gaussian_model(1, {{3, 1.0}});
    Rng rng = make_stream(45, 0);
    const std::vector<double> root{0.0};
    const TreeHistory h = simulate_tree(model, root, 10, 100, rng);
    CHECK(h.truncated());
    CHECK(h.max_age() < 10);
  }

  TEST_CASE("minimum distance to a target") {
    const auto model = reference_model();
    const std::vector<double> origin(3, 0.0);
    const std::vector<double> center{2.0, 0.0, 0.0};
    Rng rng = make_stream(46, 0);
    const TreeHistory single = simulate_tree(model, origin, 0, 10, rng);
    CHECK(min_distance_to_target(single, center, 0) == doctest::Approx(2.0));

    const TreeHistory dead = simulate_tree(brwfpt::testing::gaussian_model(3, {{0, 1.0}}), origin, 3, 10, rng);
    CHECK(min_distance_to_target(dead, center, 3) == doctest::Approx(2.0));

    for (int trial = 0; trial < 50; ++trial) {
      const TreeHistory h = simulate_tree(model, origin, 12, 100000, rng);
      const int upto = trial % 13;
      double best = std::numeric_limits<double>::infinity();
      for (int a = 0; a <= std::min(upto, h.max_age()); ++a) {
        const auto g = h.generation(a);
        for (std::size_t i = 0; i < g.size(); i += 3) {
          best = std::min(best, std::hypot(g[i] - 2.0, g[i + 1], g[i + 2]));
        }
      }
      CHECK(min_distance_to_target(h, center, upto) == doctest::Approx(best).epsilon(1e-12));
    }
  }

  TEST_CASE("first passage at generation zero iff the origin is in the target") {
    const auto model = reference_model();
    Rng rng = make_stream(47, 0);
    for (int i = 0; i < 100; ++i) CHECK(brute_force_fpt(model, 0.5, 10, 1000, rng).hit == std::optional<int>(0));
    CHECK(brute_force_fpt(model, 1.0, 0, 1000, rng).hit == std::optional<int>(0));
    CHECK_FALSE(brute_force_fpt(model, 1.0001, 0, 1000, rng).hit.has_value());
    CHECK_FALSE(brute_force_fpt(model, 5.0, 0, 1000, rng).hit.has_value());
  }

  TEST_CASE("single-child branching matches a plain random walk") {
    const auto model = brwfpt::testing::gaussian_model(2, {{1, 1.0}});
    const std::uint64_t runs = 40000;
    const FptHistogram h = brute_force_histogram(model, 3.0, 20, 1000, runs, 48);
    const auto oracle = single_walk_hits(2, 3.0, 20, runs, 4848);
    CHECK(h.truncated == 0);
    for (int n = 0; n <= 20; ++n) {
      const double p = h.pmf(n);
      const double q = static_cast<double>(oracle[n]) / runs;
      const double se = std::sqrt(p * (1 - p) / runs + q * (1 - q) / runs);
      CHECK(std::abs(p - q) <= 4 * se + 1e-12);
    }
  }

  TEST_CASE("histogram bookkeeping and thread independence") {
    const auto model = reference_model();
    const FptHistogram a = brute_force_histogram(model, 6.0, 15, 100000, 5000, 49, 1);
    const FptHistogram b = brute_force_histogram(model, 6.0, 15, 100000, 5000, 49, 4);
    CHECK(a.hits == b.hits);
    std::uint64_t total = a.no_hit;
    for (auto c : a.hits) total += c;
    CHECK(total == a.runs);
    CHECK(a.runs + a.truncated == 5000);
    CHECK(a.range_prob(-1, 15) == doctest::Approx(1.0 - static_cast<double>(a.no_hit) / a.runs));
    CHECK(a.range_prob(3, 7) == doctest::Approx(a.pmf(4) + a.pmf(5) + a.pmf(6) + a.pmf(7)));
  }
}
