#include "brwfpt/brw.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "brwfpt/errors.hpp"
#include "brwfpt/parallel.hpp"

namespace brwfpt {

TreeHistory::TreeHistory(int dim, std::span<const double> root) : dim_(dim) {
  if (root.size() != static_cast<std::size_t>(dim)) throw ConfigError("tree root has wrong dimension");
  offsets_.push_back(0);
  append_generation(root);
}

std::span<const double> TreeHistory::generation(int age) const {
  if (age < 0 || age > max_age()) return {};
  const auto a = static_cast<std::size_t>(age);
  return std::span<const double>(positions_).subspan(offsets_[a], offsets_[a + 1] - offsets_[a]);
}

void TreeHistory::append_generation(std::span<const double> positions) {
  positions_.insert(positions_.end(), positions.begin(), positions.end());
  offsets_.push_back(positions_.size());
}

void branch_generation(const BrwModel& model, std::span<const double> parents, std::vector<double>& children,
                       Rng& rng) {
  const auto d = static_cast<std::size_t>(model.dim);
  const std::size_t n_parents = parents.size() / d;
  children.clear();
  const auto* gauss = std::get_if<IsotropicGaussian>(&model.jump);
  for (std::size_t p = 0; p < n_parents; ++p) {
    const double* parent = parents.data() + p * d;
    const int k = model.offspring.sample(rng);
    for (int c = 0; c < k; ++c) {
      const std::size_t at = children.size();
      children.insert(children.end(), parent, parent + d);
      if (gauss) {
        for (std::size_t i = 0; i < d; ++i) children[at + i] += gauss->sigma * standard_normal(rng);
      } else {
        add_jump(model.jump, rng, std::span<double>(children.data() + at, d));
      }
    }
  }
}

bool any_in_unit_ball(std::span<const double> positions, int dim, double x) {
  const auto d = static_cast<std::size_t>(dim);
  for (std::size_t at = 0; at < positions.size(); at += d) {
    if (squared_distance_to_axis_point(positions.subspan(at, d), x) <= 1.0) return true;
  }
  return false;
}

TreeHistory simulate_tree(const BrwModel& model, std::span<const double> root, int generations, std::size_t cap,
                          Rng& rng) {
  if (generations < 0) throw ConfigError("simulate_tree: negative generation count");
  if (cap < 1) throw ConfigError("simulate_tree: population cap must be at least 1");
  TreeHistory history(model.dim, root);
  std::vector<double> current(root.begin(), root.end());
  std::vector<double> next;
  const auto d = static_cast<std::size_t>(model.dim);
  for (int g = 1; g <= generations; ++g) {
    branch_generation(model, current, next, rng);
    if (next.size() / d > cap) {
      history.mark_truncated();
      break;
    }
    history.append_generation(next);
    std::swap(current, next);
  }
  return history;
}

double min_distance_to_target(const TreeHistory& history, std::span<const double> center, int up_to_age) {
  const auto d = static_cast<std::size_t>(history.dim());
  double best = std::numeric_limits<double>::infinity();
  const int last = std::min(up_to_age, history.max_age());
  for (int age = 0; age <= last; ++age) {
    const auto gen = history.generation(age);
    for (std::size_t at = 0; at < gen.size(); at += d) {
      double s = 0.0;
      for (std::size_t i = 0; i < d; ++i) s += (gen[at + i] - center[i]) * (gen[at + i] - center[i]);
      best = std::min(best, s);
    }
  }
  return std::sqrt(best);
}

FptResult brute_force_fpt(const BrwModel& model, double x, int horizon, std::size_t cap, Rng& rng) {
  if (!(x > 0.0)) throw ConfigError("brute_force_fpt: target distance must be positive");
  FptResult result;
  result.horizon = horizon;
  const auto d = static_cast<std::size_t>(model.dim);
  std::vector<double> current(d, 0.0);
  std::vector<double> next;
  if (any_in_unit_ball(current, model.dim, x)) {
    result.hit = 0;
    return result;
  }
  for (int g = 1; g <= horizon; ++g) {
    branch_generation(model, current, next, rng);
    if (next.empty()) {
      result.extinct = true;
      return result;
    }
    if (any_in_unit_ball(next, model.dim, x)) {
      result.hit = g;
      return result;
    }
    if (next.size() / d > cap) {
      result.truncated = true;
      return result;
    }
    std::swap(current, next);
  }
  return result;
}

double FptHistogram::pmf_stderr(int n) const {
  if (runs == 0) return 0.0;
  const double p = pmf(n);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(runs));
}

double FptHistogram::range_prob(int lo, int hi) const {
  if (runs == 0) return 0.0;
  std::uint64_t c = 0;
  for (int n = std::max(lo + 1, 0); n <= std::min(hi, horizon); ++n) c += hits[static_cast<std::size_t>(n)];
  return static_cast<double>(c) / static_cast<double>(runs);
}

double FptHistogram::range_stderr(int lo, int hi) const {
  if (runs == 0) return 0.0;
  const double p = range_prob(lo, hi);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(runs));
}

FptHistogram brute_force_histogram(const BrwModel& model, double x, int horizon, std::size_t cap,
                                   std::uint64_t runs, std::uint64_t seed, int threads) {
  const int workers = resolve_threads(threads);
  struct Partial {
    std::vector<std::uint64_t> hits;
    std::uint64_t truncated = 0;
    std::uint64_t no_hit = 0;
  };
  std::vector<Partial> partials(static_cast<std::size_t>(workers));
  for (auto& p : partials) p.hits.assign(static_cast<std::size_t>(horizon) + 1, 0);

  parallel_for(runs, workers, [&](std::uint64_t j, int w) {
    Rng rng = make_stream(seed, j);
    const FptResult r = brute_force_fpt(model, x, horizon, cap, rng);
    Partial& p = partials[static_cast<std::size_t>(w)];
    if (r.hit) {
      ++p.hits[static_cast<std::size_t>(*r.hit)];
    } else if (r.truncated) {
      ++p.truncated;
    } else {
      ++p.no_hit;
    }
  });

  FptHistogram h;
  h.x = x;
  h.horizon = horizon;
  h.hits.assign(static_cast<std::size_t>(horizon) + 1, 0);
  for (const auto& p : partials) {
    for (std::size_t n = 0; n < h.hits.size(); ++n) h.hits[n] += p.hits[n];
    h.truncated += p.truncated;
    h.no_hit += p.no_hit;
  }
  h.runs = runs - h.truncated;
  return h;
}

}  // namespace brwfpt
