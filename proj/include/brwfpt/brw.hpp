#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "brwfpt/model.hpp"

namespace brwfpt {

inline constexpr std::size_t kDefaultPopulationCap = 10'000'000;

/// Positions of every particle of a nominal BRW, generation by generation.
/// Generation j holds the particles of age j as a flat row-major block.
class TreeHistory {
 public:
  TreeHistory(int dim, std::span<const double> root);

  int dim() const { return dim_; }
  /// Last simulated age m.
  int max_age() const { return static_cast<int>(offsets_.size()) - 2; }
  std::span<const double> root() const { return generation(0).first(static_cast<std::size_t>(dim_)); }
  std::span<const double> generation(int age) const;
  std::size_t generation_size(int age) const { return generation(age).size() / static_cast<std::size_t>(dim_); }
  std::size_t total_particles() const { return positions_.size() / static_cast<std::size_t>(dim_); }
  bool truncated() const { return truncated_; }

  void append_generation(std::span<const double> positions);
  void mark_truncated() { truncated_ = true; }

 private:
  int dim_;
  std::vector<double> positions_;
  std::vector<std::size_t> offsets_;  ///< in doubles, size max_age + 2
  bool truncated_ = false;
};

struct FptResult {
  std::optional<int> hit;  ///< first generation with a particle in the target ball
  int horizon = 0;
  bool truncated = false;  ///< population cap reached before a hit
  bool extinct = false;
};

/// Replaces each parent by its offspring, each displaced by one nominal jump.
/// `children` is overwritten.
void branch_generation(const BrwModel& model, std::span<const double> parents, std::vector<double>& children,
                       Rng& rng);

/// Squared distance from a point to (x, 0, ..., 0).
inline double squared_distance_to_axis_point(std::span<const double> p, double x) {
  double s = (p[0] - x) * (p[0] - x);
  for (std::size_t i = 1; i < p.size(); ++i) s += p[i] * p[i];
  return s;
}

/// True when some particle in the flat block lies in the unit ball at (x, 0, ..., 0).
bool any_in_unit_ball(std::span<const double> positions, int dim, double x);

/// Full m-generation history from `root`. Stops early and flags truncation if a
/// generation would hold more than `cap` particles.
TreeHistory simulate_tree(const BrwModel& model, std::span<const double> root, int generations, std::size_t cap,
                          Rng& rng);

/// Minimum Euclidean distance from `center` to any particle of age <= up_to_age;
/// +infinity when no particle is in range.
double min_distance_to_target(const TreeHistory& history, std::span<const double> center, int up_to_age);

/// Nominal BRW from the origin, stopped at the first generation with a
/// particle in the unit ball at (x, 0, ..., 0), at the horizon, at extinction,
/// or when a generation exceeds `cap` particles.
FptResult brute_force_fpt(const BrwModel& model, double x, int horizon, std::size_t cap, Rng& rng);

/// Empirical first-passage-time distribution from independent brute-force runs.
struct FptHistogram {
  double x = 0.0;
  int horizon = 0;
  std::uint64_t runs = 0;           ///< non-truncated runs
  std::uint64_t truncated = 0;
  std::uint64_t no_hit = 0;         ///< survived to the horizon or died out without hitting
  std::vector<std::uint64_t> hits;  ///< hits[n] = runs with tau_x = n, size horizon+1

  double pmf(int n) const { return runs ? static_cast<double>(hits[static_cast<std::size_t>(n)]) / runs : 0.0; }
  /// Binomial standard error of pmf(n).
  double pmf_stderr(int n) const;
  /// Empirical P(lo < tau_x <= hi) and its standard error.
  double range_prob(int lo, int hi) const;
  double range_stderr(int lo, int hi) const;
};

/// Run j uses make_stream(seed, j), so results do not depend on `threads`.
FptHistogram brute_force_histogram(const BrwModel& model, double x, int horizon, std::size_t cap,
                                   std::uint64_t runs, std::uint64_t seed, int threads = 1);

}  // namespace brwfpt
