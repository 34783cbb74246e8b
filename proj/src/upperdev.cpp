#include "brwfpt/upperdev.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "brwfpt/errors.hpp"
#include "brwfpt/ratefn.hpp"

namespace brwfpt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kGridPoints = 10000;
constexpr double kAlphaTol = 1e-10;

double rate_or_inf(const JumpLaw& jump, double c) {
  if (!in_rate_domain(jump, c)) return kInf;
  // A law with bounded support can have an unbounded MGF domain; the Legendre
  // solver then reports the missing root as a domain error.
  try {
    return rate_1d(jump, c);
  } catch (const DomainError&) {
    return kInf;
  }
}

}  // namespace

UpperDevProblem make_upper_problem(const BrwModel& model, double chat1_factor) {
  if (!(chat1_factor > 0.0 && chat1_factor < 1.0)) {
    std::ostringstream os;
    os << "upper deviation needs chat1_factor in (0, 1), got " << chat1_factor;
    throw ConfigError(os.str());
  }
  const double log_rho = std::log(mean_offspring(model.offspring));
  const double c1 = solve_c1(model.jump, log_rho);
  return {chat1_factor * c1, c1, gamma_rate(model.offspring), log_rho, model.jump};
}

double upper_rate_argument(const UpperDevProblem& p, double alpha) {
  return (1.0 - (1.0 / p.chat1 - alpha) * p.c1) / alpha;
}

double isotropic_objective(const UpperDevProblem& p, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0 / p.chat1)) {
    std::ostringstream os;
    os << "isotropic_objective: alpha = " << alpha << " outside (0, " << 1.0 / p.chat1 << ")";
    throw DomainError(os.str());
  }
  if (std::isinf(p.gamma)) return kInf;
  return p.gamma * alpha + alpha * rate_or_inf(p.jump, upper_rate_argument(p, alpha));
}

double max_displacement_objective(const UpperDevProblem& p, double t) {
  if (std::isinf(p.gamma)) return kInf;
  const double s = t * p.chat1;
  const double arg = (p.chat1 - (1.0 - s) * p.c1) / s;
  return (s * p.gamma + s * rate_or_inf(p.jump, arg)) / p.chat1;
}

UpperDevSolution solve_T(const UpperDevProblem& p) {
  if (!(p.chat1 > 0.0 && p.chat1 < p.c1)) {
    std::ostringstream os;
    os << "solve_T: chat1 = " << p.chat1 << " must lie in (0, c1 = " << p.c1 << ")";
    throw ConfigError(os.str());
  }
  const UpperDevSolution infeasible{kInf, std::numeric_limits<double>::quiet_NaN(), false, false};
  if (std::isinf(p.gamma)) return infeasible;

  const double upper = 1.0 / p.chat1;
  const double h = upper / (kGridPoints + 1);
  int best_i = -1;
  double best = kInf;
  for (int i = 1; i <= kGridPoints; ++i) {
    const double v = isotropic_objective(p, i * h);
    if (v < best) {
      best = v;
      best_i = i;
    }
  }
  if (best_i < 0) return infeasible;

  // The objective is convex in alpha, so the bracketing grid neighbours
  // contain the minimizer.
  double a = (best_i - 1) * h;
  double b = (best_i + 1) * h;
  if (a <= 0.0) a = 0.5 * h;
  if (b >= upper) b = upper - 0.5 * h;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = isotropic_objective(p, c);
  double fd = isotropic_objective(p, d);
  while (b - a > kAlphaTol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = isotropic_objective(p, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = isotropic_objective(p, d);
    }
  }
  double alpha = 0.5 * (a + b);
  double value = isotropic_objective(p, alpha);
  if (best < value) {
    alpha = best_i * h;
    value = best;
  }
  const bool active = std::abs(upper_rate_argument(p, alpha)) > 1e-9;
  return {value, alpha, active, true};
}

}  // namespace brwfpt
