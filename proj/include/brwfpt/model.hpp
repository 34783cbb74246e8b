#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "brwfpt/rng.hpp"

namespace brwfpt {

struct OffspringEntry {
  int count;
  double prob;
};

/// Finite-support offspring distribution. Entries are validated and kept
/// sorted by count; zero-probability entries are dropped.
class OffspringLaw {
 public:
  explicit OffspringLaw(std::vector<OffspringEntry> entries);

  std::span<const OffspringEntry> entries() const { return entries_; }
  double mean() const { return mean_; }
  int max_count() const { return entries_.back().count; }
  double prob(int count) const;

  /// Probability generating function f(s) = sum_k p_k s^k.
  double pgf(double s) const;
  double pgf_derivative(double s) const;

  /// The law {k p_k / rho}; requires mean() > 0.
  OffspringLaw size_biased() const;

  /// CDF inversion over the sorted support.
  int sample(Rng& rng) const;

 private:
  std::vector<OffspringEntry> entries_;
  std::vector<double> cdf_;
  double mean_ = 0.0;
};

/// Analytic one-dimensional log-MGF with derivatives, finite on (lo, hi).
struct LogMgf1d {
  std::function<double(double)> value;
  std::function<double(double)> first;
  std::function<double(double)> second;
  double lo;
  double hi;
};

/// Isotropic Gaussian jumps: d independent N(0, sigma^2) coordinates.
struct IsotropicGaussian {
  double sigma;
  int dim;
};

/// User-supplied isotropic jump law. The tilted sampler draws from the law
/// reweighted by exp(tilt * first coordinate).
struct PluggableJump {
  int dim;
  std::function<std::vector<double>(Rng&)> sampler;
  std::function<std::vector<double>(Rng&, double tilt)> tilted_sampler;
  LogMgf1d log_mgf;
};

using JumpLaw = std::variant<IsotropicGaussian, PluggableJump>;

int jump_dim(const JumpLaw& jump);

/// Nominal branching random walk.
struct BrwModel {
  BrwModel(int dim, OffspringLaw offspring, JumpLaw jump);

  int dim;
  OffspringLaw offspring;
  JumpLaw jump;
};

double mean_offspring(const OffspringLaw& law);

/// Smallest fixed point of the pgf on [0,1].
double extinction_prob(const OffspringLaw& law);

/// -log E[zeta q^(zeta-1)] with 0^0 = 1; +infinity when the expectation is 0.
double gamma_rate(const OffspringLaw& law);

int sample_offspring(const OffspringLaw& law, Rng& rng);

std::vector<double> sample_jump(const JumpLaw& jump, Rng& rng);

/// Adds one nominal jump to `out` in place (out.size() == dim).
void add_jump(const JumpLaw& jump, Rng& rng, std::span<double> out);

}  // namespace brwfpt
