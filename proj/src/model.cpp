#include "brwfpt/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "brwfpt/errors.hpp"

namespace brwfpt {

namespace {

constexpr double kPmfSumTol = 1e-12;
constexpr double kFixedPointTol = 1e-12;

}  // namespace

OffspringLaw::OffspringLaw(std::vector<OffspringEntry> entries) {
  if (entries.empty()) throw ConfigError("offspring: empty pmf");
  double total = 0.0;
  for (const auto& e : entries) {
    if (e.count < 0) throw ConfigError("offspring: negative count " + std::to_string(e.count));
    if (!(e.prob >= 0.0 && e.prob <= 1.0)) {
      std::ostringstream os;
      os << "offspring: probability " << e.prob << " for count " << e.count << " outside [0,1]";
      throw ConfigError(os.str());
    }
    total += e.prob;
  }
  std::sort(entries.begin(), entries.end(),
            [](const OffspringEntry& a, const OffspringEntry& b) { return a.count < b.count; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].count == entries[i - 1].count) {
      throw ConfigError("offspring: duplicate count " + std::to_string(entries[i].count));
    }
  }
  if (std::abs(total - 1.0) > kPmfSumTol) {
    std::ostringstream os;
    os.precision(17);
    os << "offspring: probabilities sum to " << total << ", expected 1";
    throw ConfigError(os.str());
  }
  std::erase_if(entries, [](const OffspringEntry& e) { return e.prob == 0.0; });
  entries_ = std::move(entries);

  double acc = 0.0;
  cdf_.reserve(entries_.size());
  for (const auto& e : entries_) {
    acc += e.prob;
    cdf_.push_back(acc);
    mean_ += e.count * e.prob;
  }
  cdf_.back() = 1.0;
}

double OffspringLaw::prob(int count) const {
  for (const auto& e : entries_) {
    if (e.count == count) return e.prob;
  }
  return 0.0;
}

double OffspringLaw::pgf(double s) const {
  double v = 0.0;
  for (const auto& e : entries_) v += e.prob * std::pow(s, e.count);
  return v;
}

double OffspringLaw::pgf_derivative(double s) const {
  double v = 0.0;
  for (const auto& e : entries_) {
    if (e.count > 0) v += e.count * e.prob * std::pow(s, e.count - 1);
  }
  return v;
}

OffspringLaw OffspringLaw::size_biased() const {
  if (mean_ <= 0.0) throw ConfigError("offspring: size-biasing needs a positive mean");
  std::vector<OffspringEntry> biased;
  for (const auto& e : entries_) {
    if (e.count > 0) biased.push_back({e.count, e.count * e.prob / mean_});
  }
  // Renormalize away rounding so the constructor's sum check cannot trip.
  double total = 0.0;
  for (const auto& e : biased) total += e.prob;
  for (auto& e : biased) e.prob /= total;
  return OffspringLaw(std::move(biased));
}

int OffspringLaw::sample(Rng& rng) const {
  if (entries_.size() == 1) return entries_.front().count;
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const auto idx = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), entries_.size() - 1);
  return entries_[idx].count;
}

int jump_dim(const JumpLaw& jump) {
  return std::visit([](const auto& j) { return j.dim; }, jump);
}

BrwModel::BrwModel(int dim_, OffspringLaw offspring_, JumpLaw jump_)
    : dim(dim_), offspring(std::move(offspring_)), jump(std::move(jump_)) {
  if (dim < 1) throw ConfigError("dimension must be positive");
  if (jump_dim(jump) != dim) {
    throw ConfigError("jump dimension " + std::to_string(jump_dim(jump)) +
                      " does not match model dimension " + std::to_string(dim));
  }
  if (const auto* g = std::get_if<IsotropicGaussian>(&jump); g && !(g->sigma > 0.0)) {
    throw ConfigError("sigma must be positive");
  }
  if (const auto* p = std::get_if<PluggableJump>(&jump)) {
    if (!p->sampler) throw ConfigError("pluggable jump law needs a sampler");
    if (!p->log_mgf.value || !p->log_mgf.first || !p->log_mgf.second) {
      throw ConfigError("pluggable jump law needs an analytic log-MGF with two derivatives");
    }
    if (!(p->log_mgf.lo < 0.0 && p->log_mgf.hi > 0.0)) {
      throw ConfigError("pluggable log-MGF domain must contain 0 in its interior");
    }
  }
}

double mean_offspring(const OffspringLaw& law) { return law.mean(); }

double extinction_prob(const OffspringLaw& law) {
  // Subcritical and critical laws die out surely unless the law is the
  // deterministic single child, whose smallest fixed point is 0.
  if (law.mean() <= 1.0 && law.prob(1) < 1.0) return 1.0;

  // Monotone iteration from 0 increases to the smallest root.
  double s = 0.0;
  for (int iter = 0; iter < 100000 && std::abs(law.pgf(s) - s) > 1e-6; ++iter) s = law.pgf(s);

  // Newton polish on g(s) = f(s) - s. Below the smallest root g is convex and
  // decreasing, so the iterates stay below it.
  for (int iter = 0; iter < 100; ++iter) {
    const double g = law.pgf(s) - s;
    const double dg = law.pgf_derivative(s) - 1.0;
    if (g == 0.0 || dg >= 0.0) break;
    const double next = std::clamp(s - g / dg, 0.0, 1.0);
    if (next == s) break;
    s = next;
  }
  if (std::abs(law.pgf(s) - s) > kFixedPointTol) {
    std::ostringstream os;
    os.precision(17);
    os << "extinction_prob: fixed point not reached, s=" << s << " residual=" << law.pgf(s) - s;
    throw NumericError(os.str());
  }
  return s;
}

double gamma_rate(const OffspringLaw& law) {
  const double q = extinction_prob(law);
  double sum = 0.0;
  for (const auto& e : law.entries()) {
    if (e.count == 0) continue;
    const double qpow = e.count == 1 ? 1.0 : std::pow(q, e.count - 1);
    sum += e.count * e.prob * qpow;
  }
  if (sum <= 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(sum);
}

int sample_offspring(const OffspringLaw& law, Rng& rng) { return law.sample(rng); }

void add_jump(const JumpLaw& jump, Rng& rng, std::span<double> out) {
  if (const auto* g = std::get_if<IsotropicGaussian>(&jump)) {
    for (double& v : out) v += g->sigma * standard_normal(rng);
    return;
  }
  const auto& p = std::get<PluggableJump>(jump);
  const std::vector<double> step = p.sampler(rng);
  if (step.size() != out.size()) {
    throw ConfigError("pluggable sampler returned " + std::to_string(step.size()) +
                      " coordinates, expected " + std::to_string(out.size()));
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += step[i];
}

std::vector<double> sample_jump(const JumpLaw& jump, Rng& rng) {
  std::vector<double> v(static_cast<std::size_t>(jump_dim(jump)), 0.0);
  add_jump(jump, rng, v);
  return v;
}

}  // namespace brwfpt
