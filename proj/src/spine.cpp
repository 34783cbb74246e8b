#include "brwfpt/spine.hpp"

#include <algorithm>
#include <string>
#include <random>

#include "brwfpt/errors.hpp"

namespace brwfpt {

namespace {

int uniform_index(int count, Rng& rng) {
  return count == 1 ? 0 : std::uniform_int_distribution<int>(0, count - 1)(rng);
}

}  // namespace

SpinePath::SpinePath(int dim, int steps) { reset(dim, steps); }

void SpinePath::reset(int dim, int steps) {
  dim_ = dim;
  steps_ = 0;
  positions_.assign(static_cast<std::size_t>(dim), 0.0);
  positions_.reserve(static_cast<std::size_t>(steps + 1) * dim);
  bone_counts_.clear();
  spine_indices_.clear();
  bone_offsets_.assign(1, 0);
  bone_displacements_.clear();
}

void SpinePath::push_step(int count, int spine_index, std::span<const double> displacements) {
  const std::size_t d = static_cast<std::size_t>(dim_);
  bone_counts_.push_back(count);
  spine_indices_.push_back(spine_index);
  bone_offsets_.push_back(bone_offsets_.back() + static_cast<std::size_t>(count));
  bone_displacements_.insert(bone_displacements_.end(), displacements.begin(), displacements.end());

  const std::size_t prev = static_cast<std::size_t>(steps_) * d;
  positions_.resize(prev + 2 * d);
  const double* spine_bone = displacements.data() + static_cast<std::size_t>(spine_index) * d;
  for (std::size_t i = 0; i < d; ++i) positions_[prev + d + i] = positions_[prev + i] + spine_bone[i];
  ++steps_;
}

BoneView SpinePath::bones(int k) const {
  const auto idx = static_cast<std::size_t>(k - 1);
  const std::size_t d = static_cast<std::size_t>(dim_);
  return {bone_counts_[idx], spine_indices_[idx],
          std::span<const double>(bone_displacements_).subspan(bone_offsets_[idx] * d,
                                                               static_cast<std::size_t>(bone_counts_[idx]) * d)};
}

int sample_size_biased_count(const OffspringLaw& law, Rng& rng) { return law.size_biased().sample(rng); }

void add_tilted_jump(const JumpLaw& jump, double chat2, Rng& rng, std::span<double> out) {
  if (const auto* g = std::get_if<IsotropicGaussian>(&jump)) {
    // Tilting N(0, s^2) by exp(t x) gives N(s^2 t, s^2).
    out[0] += g->sigma * g->sigma * chat2 + g->sigma * standard_normal(rng);
    for (std::size_t i = 1; i < out.size(); ++i) out[i] += g->sigma * standard_normal(rng);
    return;
  }
  const auto& p = std::get<PluggableJump>(jump);
  if (chat2 == 0.0) {
    add_jump(jump, rng, out);
    return;
  }
  if (!p.tilted_sampler) throw ConfigError("pluggable jump law has no tilted sampler");
  const std::vector<double> step = p.tilted_sampler(rng, chat2);
  if (step.size() != out.size()) {
    throw ConfigError("tilted sampler returned " + std::to_string(step.size()) + " coordinates, expected " +
                      std::to_string(out.size()));
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += step[i];
}

std::vector<double> sample_tilted_jump(const JumpLaw& jump, double chat2, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(jump_dim(jump)), 0.0);
  add_tilted_jump(jump, chat2, rng, v);
  return v;
}

SpineSampler::SpineSampler(const BrwModel& model, const CramerProfile& profile)
    : model_(&model), profile_(profile), biased_(model.offspring.size_biased()) {}

void SpineSampler::fill_bones(int count, int spine_index, Rng& rng, std::vector<double>& out) const {
  const auto d = static_cast<std::size_t>(model_->dim);
  out.assign(static_cast<std::size_t>(count) * d, 0.0);
  for (int i = 0; i < count; ++i) {
    std::span<double> slot(out.data() + static_cast<std::size_t>(i) * d, d);
    if (i == spine_index) {
      add_tilted_jump(model_->jump, profile_.chat2, rng, slot);
    } else {
      add_jump(model_->jump, rng, slot);
    }
  }
}

BoneSet SpineSampler::sample_bone_set(Rng& rng) const {
  BoneSet b;
  b.count = biased_.sample(rng);
  b.spine_index = uniform_index(b.count, rng);
  fill_bones(b.count, b.spine_index, rng, b.displacements);
  return b;
}

void SpineSampler::sample_path(int steps, Rng& rng, SpinePath& out) const {
  out.reset(model_->dim, steps);
  std::vector<double> scratch;
  for (int k = 0; k < steps; ++k) {
    const int count = biased_.sample(rng);
    const int spine_index = uniform_index(count, rng);
    fill_bones(count, spine_index, rng, scratch);
    out.push_step(count, spine_index, scratch);
  }
}

BoneSet sample_bone_set(const BrwModel& model, const CramerProfile& profile, Rng& rng) {
  return SpineSampler(model, profile).sample_bone_set(rng);
}

SpinePath sample_spine_path(const BrwModel& model, const CramerProfile& profile, int steps, Rng& rng) {
  SpinePath path;
  SpineSampler(model, profile).sample_path(steps, rng, path);
  return path;
}

}  // namespace brwfpt
