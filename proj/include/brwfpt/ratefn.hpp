#pragma once

#include "brwfpt/model.hpp"

namespace brwfpt {

/// Tilt constants of the lower-tail importance sampler, derived once per run.
struct CramerProfile {
  double rho;
  double log_rho;
  double c1;         ///< Front speed: I(c1) = log rho.
  double chat1;      ///< Target lower-tail speed, > c1.
  double chat2;      ///< Tilt I'(chat1).
  double I_chat1;    ///< I(chat1).
  double psi_chat2;  ///< log rho + log MGF(chat2).
  double cbar1;      ///< In (c1, chat1).
  double eps1;       ///< > 0.
};

/// Log-MGF of the first coordinate at lambda, with its first two derivatives.
struct LogMgfValue {
  double value;
  double first;
  double second;
};

LogMgfValue log_mgf_1d_derivs(const JumpLaw& jump, double lambda);
double log_mgf_1d(const JumpLaw& jump, double lambda);

/// Maximizer of lambda*c - log MGF(lambda) and the resulting rate.
struct LegendrePoint {
  double lambda;
  double rate;
  int iterations;
};

/// Newton solve of (log MGF)'(lambda) = c from lambda = 0, bisection fallback.
/// Never takes the closed-form shortcut, so it can be checked against one.
LegendrePoint legendre_numeric(const JumpLaw& jump, double c);

/// Rate function of the first coordinate. Closed form for Gaussian jumps.
double rate_1d(const JumpLaw& jump, double c);

/// I'(c), which equals the Legendre maximizer lambda*(c).
double rate_1d_derivative(const JumpLaw& jump, double c);

/// True when c lies in the open range of the log-MGF derivative.
bool in_rate_domain(const JumpLaw& jump, double c);

/// Positive root of I(c) = log_rho.
double solve_c1(const JumpLaw& jump, double log_rho);

/// Fills every profile field with chat1 = chat1_factor * c1. The (cbar1, eps1)
/// pair uses g = (I(chat1) - log rho) / chat2, cbar1 = chat1 - g/2, eps1 = g/8.
CramerProfile derive_profile(const BrwModel& model, double chat1_factor);

}  // namespace brwfpt
