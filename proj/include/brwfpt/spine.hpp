#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "brwfpt/model.hpp"
#include "brwfpt/ratefn.hpp"

namespace brwfpt {

/// Children of one spine particle: N displacements, one of which (the spine
/// index, 0-based) continues the spine.
struct BoneView {
  int count;
  int spine_index;
  std::span<const double> displacements;  ///< count * dim, row-major

  std::span<const double> bone(int i, int dim) const {
    return displacements.subspan(static_cast<std::size_t>(i) * dim, static_cast<std::size_t>(dim));
  }
};

/// Owning bone set.
struct BoneSet {
  int count = 0;
  int spine_index = 0;
  std::vector<double> displacements;

  BoneView view() const { return {count, spine_index, displacements}; }
};

/// Spine positions S_0..S_n and the bone set of every step, stored flat.
/// Bone set k (1-based step) holds the children of the spine particle at
/// time k-1; its spine member is S_k - S_{k-1}.
class SpinePath {
 public:
  SpinePath() = default;
  SpinePath(int dim, int steps);

  int dim() const { return dim_; }
  int steps() const { return steps_; }

  std::span<const double> position(int k) const {
    return {positions_.data() + static_cast<std::size_t>(k) * dim_, static_cast<std::size_t>(dim_)};
  }
  double first_coord(int k) const { return positions_[static_cast<std::size_t>(k) * dim_]; }

  /// Bone set of step k, 1 <= k <= steps().
  BoneView bones(int k) const;

  /// Clears to n steps at the origin with no bones; keeps capacity.
  void reset(int dim, int steps);
  /// Appends the bone set of the next step and advances the spine.
  void push_step(int count, int spine_index, std::span<const double> displacements);

  std::size_t total_bones() const { return bone_counts_.empty() ? 0 : bone_offsets_.back(); }

 private:
  int dim_ = 0;
  int steps_ = 0;
  std::vector<double> positions_;
  std::vector<int> bone_counts_;
  std::vector<int> spine_indices_;
  std::vector<std::size_t> bone_offsets_;  ///< prefix sums of counts, size steps+1
  std::vector<double> bone_displacements_;
};

/// Draw from {k p_k / rho}. Pass law.size_biased() in hot loops to avoid
/// rebuilding the table.
int sample_size_biased_count(const OffspringLaw& law, Rng& rng);

/// Adds one draw of the jump law tilted by exp(chat2 * first coordinate).
void add_tilted_jump(const JumpLaw& jump, double chat2, Rng& rng, std::span<double> out);
std::vector<double> sample_tilted_jump(const JumpLaw& jump, double chat2, Rng& rng);

/// Precomputed spine sampler for one (model, profile).
class SpineSampler {
 public:
  SpineSampler(const BrwModel& model, const CramerProfile& profile);

  BoneSet sample_bone_set(Rng& rng) const;
  void sample_path(int steps, Rng& rng, SpinePath& out) const;

  const BrwModel& model() const { return *model_; }
  const CramerProfile& profile() const { return profile_; }

 private:
  void fill_bones(int count, int spine_index, Rng& rng, std::vector<double>& out) const;

  const BrwModel* model_;
  CramerProfile profile_;
  OffspringLaw biased_;
};

BoneSet sample_bone_set(const BrwModel& model, const CramerProfile& profile, Rng& rng);
SpinePath sample_spine_path(const BrwModel& model, const CramerProfile& profile, int steps, Rng& rng);

}  // namespace brwfpt
