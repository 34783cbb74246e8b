#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "brwfpt/brw.hpp"
#include "brwfpt/model.hpp"
#include "brwfpt/ratefn.hpp"
#include "brwfpt/spine.hpp"

namespace brwfpt {

/// Horizon, window radii and integer window lengths for one target x.
///
/// R4 = d / (2 chat2), R5 = omega R4, R2 = R3 = omega^2 R4, R1 = omega^3 R4.
/// Window lengths use the natural log: w2 = ceil(R2 ln x), w3 = ceil(R3 ln x),
/// w5 = floor(R5 ln x). The horizon is n = floor(x / chat1) - t.
struct AlgoParams {
  double x = 0.0;
  int t = 0;
  int n = 0;
  double omega = 0.0;
  double log_x = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  double R3 = 0.0;
  double R4 = 0.0;
  double R5 = 0.0;
  int w2 = 0;
  int w3 = 0;
  int w5 = 0;
};

/// Throws ConfigError unless x > 1, t >= 0, omega >= 1 and n >= w2.
AlgoParams make_params(const CramerProfile& profile, int dim, double x, int t, double omega);

/// How the bone-sum event E11 enters the estimator.
///
/// gate rejects a skeleton that fails it. record evaluates and reports it but
/// scores the replicate on E7-E10 and E8 alone: with the admissible eps1 the
/// threshold exp(eps1 chat2 (n - k)) sits below the spine bone's own typical
/// weight for every practical x, so the gated estimator is identically zero.
enum class BoneSumCheck { record, gate };

const char* bone_sum_check_name(BoneSumCheck mode);

struct SkeletonFlags {
  bool e7 = false;  ///< |S_n - x e| <= R1 ln x
  bool e9 = false;  ///< S_n <= x + R4 ln x (first coordinate)
  bool e10 = false;
  bool e11 = false;

  bool all() const { return e7 && e9 && e10 && e11; }
  /// The events that reject under `mode`.
  bool passes(BoneSumCheck mode) const { return e7 && e9 && e10 && (e11 || mode == BoneSumCheck::record); }
};

struct EventFlags {
  bool e7 = false;
  bool e8 = false;
  bool e9 = false;
  bool e10 = false;
  bool e11 = false;

  bool all() const { return e7 && e8 && e9 && e10 && e11; }
  bool passes(BoneSumCheck mode) const { return e7 && e8 && e9 && e10 && (e11 || mode == BoneSumCheck::record); }
};

enum class Stage { rejected_at_skeleton, rejected_at_e8, accepted, truncated };

const char* stage_name(Stage s);

SkeletonFlags check_skeleton_events(const SpinePath& path, const AlgoParams& params, const CramerProfile& profile);

struct DecorationOutcome {
  bool e8 = false;
  bool truncated = false;
  /// First coordinates of the time-n particles that left the spine in the last
  /// w3 steps, followed by the spine endpoint.
  std::vector<double> wn_first_coords;
  std::uint64_t decorations = 0;
  std::uint64_t particles = 0;
};

/// Grows the off-spine trees rooted at the bone tips of spine times
/// n - w2, ..., n - 1 and evaluates the first-passage event at time n. Stops
/// as soon as any particle at a time <= n - 1 enters the target ball.
DecorationOutcome run_decorations_and_check_e8(const SpinePath& path, const AlgoParams& params,
                                               const BrwModel& model, const CramerProfile& profile, Rng& rng,
                                               std::size_t cap = kDefaultPopulationCap);

/// -log sum_v exp(chat2 eta_v - n psi(chat2)), evaluated with the max factored out.
double compute_log_z(std::span<const double> wn_first_coords, const AlgoParams& params,
                     const CramerProfile& profile);
double compute_z(std::span<const double> wn_first_coords, const AlgoParams& params, const CramerProfile& profile);

/// log of the a.s. ceiling exp(-n(I(chat1) - log rho) + chat2 (1 + R4 ln x)) on accepted z.
double log_z_upper_bound(const AlgoParams& params, const CramerProfile& profile);

struct ReplicateOutcome {
  double z = 0.0;
  double log_z = 0.0;  ///< -infinity when z == 0
  EventFlags flags;
  Stage stage = Stage::rejected_at_skeleton;
  std::uint64_t decorations = 0;
  std::uint64_t particles = 0;
  bool spine_near_miss = false;  ///< S_k in the ball for some k < n - 1
  std::vector<double> wn_first_coords;
};

/// Reusable per-thread buffers for run_replicate.
struct ReplicateWorkspace {
  SpinePath path;
};

ReplicateOutcome run_replicate(const BrwModel& model, const CramerProfile& profile, const AlgoParams& params, Rng& rng,
                               std::size_t cap = kDefaultPopulationCap, BoneSumCheck mode = BoneSumCheck::record);
ReplicateOutcome run_replicate(const SpineSampler& sampler, const AlgoParams& params, Rng& rng,
                               ReplicateWorkspace& ws, std::size_t cap = kDefaultPopulationCap,
                               BoneSumCheck mode = BoneSumCheck::record);

/// Streaming mean/variance (Welford) of replicate values.
///
/// Values are held as z * exp(log_scale). log_scale is n (I(chat1) - log rho)
/// when that exceeds 600 and 0 otherwise, so deep tails do not underflow.
struct BatchStats {
  std::uint64_t count = 0;  ///< replicates scored (truncated ones excluded)
  double mean_scaled = 0.0;
  double m2_scaled = 0.0;
  double log_scale = 0.0;
  std::uint64_t accepted = 0;
  std::uint64_t rejected_skeleton = 0;
  std::uint64_t rejected_e8 = 0;
  std::uint64_t truncated = 0;
  std::uint64_t spine_near_misses = 0;
  std::uint64_t bone_sum_violations = 0;  ///< accepted replicates with E11 false
  std::uint64_t decorations = 0;
  std::uint64_t particles = 0;

  void add(double scaled_value);

  double mean() const;
  /// Standard error of the mean; NaN when count < 2.
  double stderr_mean() const;
  bool stderr_defined() const { return count >= 2; }
  double log_mean() const;
  double acceptance_rate() const { return count ? static_cast<double>(accepted) / static_cast<double>(count) : 0.0; }
  double relative_variance() const;
};

inline constexpr double kLogScaleThreshold = 600.0;
/// Fraction of truncated replicates above which a batch fails.
inline constexpr double kMaxTruncatedFraction = 1e-3;

struct BatchOptions {
  int threads = 1;
  std::size_t cap = kDefaultPopulationCap;
  BoneSumCheck bone_sum = BoneSumCheck::record;
};

/// N replicates; replicate j draws from make_stream(seed, j). Values are
/// reduced in replicate order, so the result is identical for any thread count.
BatchStats run_batch(const BrwModel& model, const CramerProfile& profile, const AlgoParams& params,
                     std::uint64_t replicates, std::uint64_t seed, const BatchOptions& options = {});

/// ceil(10 x^r (-ln delta) / eps^2).
std::uint64_t plan_sample_size(double epsilon, double delta, double x, double r);

struct CdfTerm {
  int t;
  AlgoParams params;
  BatchStats stats;
  std::uint64_t seed;
};

struct CdfEstimate {
  double value = 0.0;
  double stderr_value = 0.0;
  std::vector<CdfTerm> terms;
};

/// Estimates P(floor(x/chat1) - K < tau_x <= floor(x/chat1)) as the sum of K
/// independent pmf batches; term t uses seed derive_seed(seed, t).
CdfEstimate estimate_cdf(const BrwModel& model, const CramerProfile& profile, double x, int K, double omega,
                         std::uint64_t replicates_per_term, std::uint64_t seed, const BatchOptions& options = {});

}  // namespace brwfpt
