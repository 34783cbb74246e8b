#include "brwfpt/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "brwfpt/errors.hpp"
#include "brwfpt/parallel.hpp"

namespace brwfpt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp_scaled(std::span<const double> values, double scale) {
  double m = kNegInf;
  for (double v : values) m = std::max(m, scale * v);
  double s = 0.0;
  for (double v : values) s += std::exp(scale * v - m);
  return m + std::log(s);
}

double scale_for(const AlgoParams& params, const CramerProfile& profile) {
  const double decay = params.n * (profile.I_chat1 - profile.log_rho);
  return decay > kLogScaleThreshold ? decay : 0.0;
}

}  // namespace

const char* stage_name(Stage s) {
  switch (s) {
    case Stage::rejected_at_skeleton:
      return "rejected_at_skeleton";
    case Stage::rejected_at_e8:
      return "rejected_at_e8";
    case Stage::accepted:
      return "accepted";
    case Stage::truncated:
      return "truncated";
  }
  return "unknown";
}

const char* bone_sum_check_name(BoneSumCheck mode) {
  return mode == BoneSumCheck::gate ? "gate" : "record";
}

AlgoParams make_params(const CramerProfile& profile, int dim, double x, int t, double omega) {
  std::ostringstream err;
  if (!(x > 1.0)) err << "x = " << x << " must exceed 1; ";
  if (t < 0) err << "t = " << t << " must be nonnegative; ";
  if (!(omega >= 1.0)) err << "omega = " << omega << " must be at least 1; ";
  if (!err.str().empty()) throw ConfigError(err.str());

  AlgoParams p;
  p.x = x;
  p.t = t;
  p.omega = omega;
  p.log_x = std::log(x);
  p.n = static_cast<int>(std::floor(x / profile.chat1)) - t;
  p.R4 = dim / (2.0 * profile.chat2);
  p.R5 = omega * p.R4;
  p.R2 = omega * omega * p.R4;
  p.R3 = p.R2;
  p.R1 = omega * omega * omega * p.R4;
  p.w2 = static_cast<int>(std::ceil(p.R2 * p.log_x));
  p.w3 = static_cast<int>(std::ceil(p.R3 * p.log_x));
  p.w5 = static_cast<int>(std::floor(p.R5 * p.log_x));
  if (p.n < p.w2) {
    std::ostringstream os;
    os << "horizon n = " << p.n << " is shorter than the decoration window w2 = " << p.w2
       << " (increase x or decrease t/omega)";
    throw ConfigError(os.str());
  }
  return p;
}

SkeletonFlags check_skeleton_events(const SpinePath& path, const AlgoParams& params, const CramerProfile& profile) {
  SkeletonFlags f;
  const int n = params.n;
  const auto end = path.position(n);
  const double ceiling = params.x + params.R4 * params.log_x;

  const double r1 = params.R1 * params.log_x;
  f.e7 = squared_distance_to_axis_point(end, params.x) <= r1 * r1;
  f.e9 = end[0] <= ceiling;

  const int last = std::min(n - params.w5, n - 1);
  f.e10 = true;
  for (int k = 1; k <= n - params.w5 && f.e10; ++k) {
    f.e10 = path.first_coord(k) < ceiling - profile.cbar1 * (n - k);
  }

  // Sum over the bone set of step k+1, compared in log space.
  f.e11 = true;
  const int dim = path.dim();
  std::vector<double> firsts;
  for (int k = 1; k <= last && f.e11; ++k) {
    const BoneView b = path.bones(k + 1);
    firsts.resize(static_cast<std::size_t>(b.count));
    for (int i = 0; i < b.count; ++i) firsts[static_cast<std::size_t>(i)] = b.bone(i, dim)[0];
    f.e11 = log_sum_exp_scaled(firsts, profile.chat2) < profile.eps1 * profile.chat2 * (n - k);
  }
  return f;
}

DecorationOutcome run_decorations_and_check_e8(const SpinePath& path, const AlgoParams& params,
                                               const BrwModel& model, const CramerProfile& /*profile*/, Rng& rng,
                                               std::size_t cap) {
  DecorationOutcome out;
  const int n = params.n;
  const int dim = model.dim;
  const auto d = static_cast<std::size_t>(dim);
  const double x = params.x;

  // D-bar_{n-1,n-1} is the spine particle at time n-1.
  if (squared_distance_to_axis_point(path.position(n - 1), x) <= 1.0) return out;

  bool hit_at_n = squared_distance_to_axis_point(path.position(n), x) <= 1.0;
  const int first_k = std::max(0, n - params.w2);
  const int first_wn_k = std::max(0, n - params.w3);

  std::vector<double> current;
  std::vector<double> next;
  for (int k = first_k; k <= n - 1; ++k) {
    const BoneView bones = path.bones(k + 1);
    const auto spine_pos = path.position(k);
    const int generations = n - k - 1;
    for (int i = 0; i < bones.count; ++i) {
      if (i == bones.spine_index) continue;
      ++out.decorations;
      const auto b = bones.bone(i, dim);
      current.resize(d);
      for (std::size_t c = 0; c < d; ++c) current[c] = spine_pos[c] + b[c];
      out.particles += 1;
      // Age a sits at global time k + 1 + a; ages below `generations` are history.
      for (int age = 0; age < generations; ++age) {
        if (any_in_unit_ball(current, dim, x)) return out;
        branch_generation(model, current, next, rng);
        if (next.size() / d > cap) {
          out.truncated = true;
          return out;
        }
        out.particles += next.size() / d;
        std::swap(current, next);
        if (current.empty()) break;
      }
      if (current.empty()) continue;
      if (any_in_unit_ball(current, dim, x)) hit_at_n = true;
      if (k >= first_wn_k) {
        for (std::size_t at = 0; at < current.size(); at += d) out.wn_first_coords.push_back(current[at]);
      }
    }
  }
  out.wn_first_coords.push_back(path.first_coord(n));
  out.e8 = hit_at_n;
  return out;
}

double compute_log_z(std::span<const double> wn_first_coords, const AlgoParams& params,
                     const CramerProfile& profile) {
  if (wn_first_coords.empty()) throw NumericError("compute_z: empty W_n on an accepted replicate");
  return params.n * profile.psi_chat2 - log_sum_exp_scaled(wn_first_coords, profile.chat2);
}

double compute_z(std::span<const double> wn_first_coords, const AlgoParams& params, const CramerProfile& profile) {
  return std::exp(compute_log_z(wn_first_coords, params, profile));
}

double log_z_upper_bound(const AlgoParams& params, const CramerProfile& profile) {
  return -params.n * (profile.I_chat1 - profile.log_rho) + profile.chat2 * (1.0 + params.R4 * params.log_x);
}

ReplicateOutcome run_replicate(const SpineSampler& sampler, const AlgoParams& params, Rng& rng,
                               ReplicateWorkspace& ws, std::size_t cap, BoneSumCheck mode) {
  ReplicateOutcome out;
  out.log_z = kNegInf;
  const CramerProfile& profile = sampler.profile();
  sampler.sample_path(params.n, rng, ws.path);

  const SkeletonFlags sk = check_skeleton_events(ws.path, params, profile);
  out.flags.e7 = sk.e7;
  out.flags.e9 = sk.e9;
  out.flags.e10 = sk.e10;
  out.flags.e11 = sk.e11;
  if (!sk.passes(mode)) {
    out.stage = Stage::rejected_at_skeleton;
    return out;
  }

  DecorationOutcome dec = run_decorations_and_check_e8(ws.path, params, sampler.model(), profile, rng, cap);
  out.decorations = dec.decorations;
  out.particles = dec.particles;
  if (dec.truncated) {
    out.stage = Stage::truncated;
    return out;
  }
  out.flags.e8 = dec.e8;
  if (!dec.e8) {
    out.stage = Stage::rejected_at_e8;
    return out;
  }

  out.stage = Stage::accepted;
  out.log_z = compute_log_z(dec.wn_first_coords, params, profile);
  out.z = std::exp(out.log_z);
  out.wn_first_coords = std::move(dec.wn_first_coords);
  for (int k = 0; k < params.n - 1 && !out.spine_near_miss; ++k) {
    out.spine_near_miss = squared_distance_to_axis_point(ws.path.position(k), params.x) <= 1.0;
  }
  return out;
}

ReplicateOutcome run_replicate(const BrwModel& model, const CramerProfile& profile, const AlgoParams& params, Rng& rng,
                               std::size_t cap, BoneSumCheck mode) {
  const SpineSampler sampler(model, profile);
  ReplicateWorkspace ws;
  return run_replicate(sampler, params, rng, ws, cap, mode);
}

void BatchStats::add(double scaled_value) {
  ++count;
  const double delta = scaled_value - mean_scaled;
  mean_scaled += delta / static_cast<double>(count);
  m2_scaled += delta * (scaled_value - mean_scaled);
}

double BatchStats::mean() const { return mean_scaled * std::exp(-log_scale); }

double BatchStats::stderr_mean() const {
  if (count < 2) return std::numeric_limits<double>::quiet_NaN();
  const double c = static_cast<double>(count);
  return std::sqrt(m2_scaled / c) / std::sqrt(c) * std::exp(-log_scale);
}

double BatchStats::log_mean() const { return std::log(mean_scaled) - log_scale; }

double BatchStats::relative_variance() const {
  if (count < 2 || mean_scaled == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (m2_scaled / static_cast<double>(count)) / (mean_scaled * mean_scaled);
}

BatchStats run_batch(const BrwModel& model, const CramerProfile& profile, const AlgoParams& params,
                     std::uint64_t replicates, std::uint64_t seed, const BatchOptions& options) {
  if (replicates < 1) throw ConfigError("run_batch: need at least one replicate");
  const SpineSampler sampler(model, profile);
  const int workers = resolve_threads(options.threads);
  const double log_scale = scale_for(params, profile);

  struct Slot {
    double scaled;
    Stage stage;
    bool near_miss;
    bool bone_sum_ok;
    std::uint64_t decorations;
    std::uint64_t particles;
  };
  std::vector<Slot> slots(replicates);
  std::vector<ReplicateWorkspace> workspaces(static_cast<std::size_t>(workers));

  parallel_for(replicates, workers, [&](std::uint64_t j, int w) {
    Rng rng = make_stream(seed, j);
    const ReplicateOutcome r = run_replicate(sampler, params, rng, workspaces[static_cast<std::size_t>(w)], options.cap,
                                               options.bone_sum);
    const double scaled = r.stage == Stage::accepted ? std::exp(r.log_z + log_scale) : 0.0;
    slots[j] = {scaled, r.stage, r.spine_near_miss, r.flags.e11, r.decorations, r.particles};
  });

  BatchStats stats;
  stats.log_scale = log_scale;
  for (const Slot& s : slots) {
    stats.decorations += s.decorations;
    stats.particles += s.particles;
    switch (s.stage) {
      case Stage::truncated:
        ++stats.truncated;
        continue;
      case Stage::accepted:
        ++stats.accepted;
        if (s.near_miss) ++stats.spine_near_misses;
        if (!s.bone_sum_ok) ++stats.bone_sum_violations;
        break;
      case Stage::rejected_at_skeleton:
        ++stats.rejected_skeleton;
        break;
      case Stage::rejected_at_e8:
        ++stats.rejected_e8;
        break;
    }
    stats.add(s.scaled);
  }
  if (static_cast<double>(stats.truncated) > kMaxTruncatedFraction * static_cast<double>(replicates)) {
    std::ostringstream os;
    os << "run_batch: " << stats.truncated << " of " << replicates
       << " replicates hit the population cap (limit 0.1%)";
    throw TruncationError(os.str());
  }
  return stats;
}

std::uint64_t plan_sample_size(double epsilon, double delta, double x, double r) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw ConfigError("plan_sample_size: epsilon must be in (0,1]");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("plan_sample_size: delta must be in (0,1)");
  if (!(x > 0.0) || !(r >= 0.0)) throw ConfigError("plan_sample_size: need x > 0 and r >= 0");
  const double raw = 10.0 * std::pow(x, r) * (-std::log(delta)) / (epsilon * epsilon);
  // Absorb rounding in the last few ulps so exact integers do not round up.
  const double nearest = std::round(raw);
  if (std::abs(raw - nearest) <= 1e-12 * std::max(1.0, raw)) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(raw));
}

CdfEstimate estimate_cdf(const BrwModel& model, const CramerProfile& profile, double x, int K, double omega,
                         std::uint64_t replicates_per_term, std::uint64_t seed, const BatchOptions& options) {
  if (K < 1) throw ConfigError("estimate_cdf: K must be at least 1");
  CdfEstimate est;
  double var = 0.0;
  for (int t = 0; t < K; ++t) {
    CdfTerm term{t, make_params(profile, model.dim, x, t, omega), {}, derive_seed(seed, static_cast<std::uint64_t>(t))};
    term.stats = run_batch(model, profile, term.params, replicates_per_term, term.seed, options);
    est.value += term.stats.mean();
    if (term.stats.stderr_defined()) var += term.stats.stderr_mean() * term.stats.stderr_mean();
    est.terms.push_back(std::move(term));
  }
  est.stderr_value = std::sqrt(var);
  return est;
}

}  // namespace brwfpt
