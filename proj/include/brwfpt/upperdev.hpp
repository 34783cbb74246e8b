#pragma once

#include "brwfpt/model.hpp"

namespace brwfpt {

/// Upper-tail rate problem for an isotropic model and speed chat1 < c1:
/// minimize gamma*alpha + alpha*I(y/alpha) over alpha in (0, 1/chat1) with the
/// lone surviving particle at y = 1 - (1/chat1 - alpha) c1 on the first axis.
struct UpperDevProblem {
  double chat1;
  double c1;
  double gamma;  ///< may be +infinity
  double log_rho;
  JumpLaw jump;
};

/// Builds the problem from a model; chat1 = factor * c1 with factor in (0, 1).
UpperDevProblem make_upper_problem(const BrwModel& model, double chat1_factor);

/// Argument of the rate function at alpha: (1 - (1/chat1 - alpha) c1) / alpha.
double upper_rate_argument(const UpperDevProblem& problem, double alpha);

/// gamma*alpha + alpha*I(argument); +infinity outside the rate domain or for
/// infinite gamma.
double isotropic_objective(const UpperDevProblem& problem, double alpha);

/// The d = 1 maximum-displacement form, evaluated in its native variables:
/// (1/chat1) * (s*gamma + s*I((chat1 - (1 - s) c1) / s)) with s = t*chat1.
double max_displacement_objective(const UpperDevProblem& problem, double t);

struct UpperDevSolution {
  double value;       ///< T; +infinity when infeasible
  double alpha_star;  ///< NaN when infeasible
  /// True when the optimal lone particle sits off the origin (y != 0), i.e.
  /// the rate constraint binds. False at the corner alpha = 1/chat1 - 1/c1.
  bool active_constraint;
  bool feasible;
};

/// 1e4-point grid over (0, 1/chat1) followed by golden-section refinement to
/// 1e-10 in alpha.
UpperDevSolution solve_T(const UpperDevProblem& problem);

}  // namespace brwfpt
