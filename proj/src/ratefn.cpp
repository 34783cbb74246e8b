#include "brwfpt/ratefn.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "brwfpt/errors.hpp"

namespace brwfpt {

namespace {

constexpr double kStationarityTol = 1e-12;
constexpr int kMaxNewton = 100;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct MgfDomain {
  double lo;
  double hi;
};

MgfDomain mgf_domain(const JumpLaw& jump) {
  if (std::holds_alternative<IsotropicGaussian>(jump)) return {-kInf, kInf};
  const auto& m = std::get<PluggableJump>(jump).log_mgf;
  return {m.lo, m.hi};
}

// Next trial point moving from `from` toward `edge`: doubling the distance
// when the edge is infinite, halving the gap to it otherwise.
double step_toward(double from, double step, double edge) {
  if (std::isinf(edge)) return from + step;
  return from + 0.5 * (edge - from);
}

}  // namespace

LogMgfValue log_mgf_1d_derivs(const JumpLaw& jump, double lambda) {
  if (const auto* g = std::get_if<IsotropicGaussian>(&jump)) {
    const double s2 = g->sigma * g->sigma;
    return {0.5 * s2 * lambda * lambda, s2 * lambda, s2};
  }
  const auto& m = std::get<PluggableJump>(jump).log_mgf;
  if (!(lambda > m.lo && lambda < m.hi)) {
    std::ostringstream os;
    os << "log-MGF evaluated at " << lambda << " outside its domain (" << m.lo << ", " << m.hi << ")";
    throw DomainError(os.str());
  }
  return {m.value(lambda), m.first(lambda), m.second(lambda)};
}

double log_mgf_1d(const JumpLaw& jump, double lambda) { return log_mgf_1d_derivs(jump, lambda).value; }

bool in_rate_domain(const JumpLaw& jump, double c) {
  if (!std::isfinite(c)) return false;
  const MgfDomain dom = mgf_domain(jump);
  const double lo = std::isinf(dom.lo) ? -kInf : log_mgf_1d_derivs(jump, std::nextafter(dom.lo, 0.0)).first;
  const double hi = std::isinf(dom.hi) ? kInf : log_mgf_1d_derivs(jump, std::nextafter(dom.hi, 0.0)).first;
  return c > lo && c < hi;
}

LegendrePoint legendre_numeric(const JumpLaw& jump, double c) {
  const MgfDomain dom = mgf_domain(jump);
  auto residual = [&](double lam) { return log_mgf_1d_derivs(jump, lam).first - c; };

  // Bracket the root of the increasing residual.
  double a = 0.0;
  double b = 0.0;
  const double r0 = residual(0.0);
  if (r0 == 0.0) return {0.0, 0.0 * c - log_mgf_1d(jump, 0.0), 0};
  const double scale = 1.0 / std::sqrt(log_mgf_1d_derivs(jump, 0.0).second);
  double step = scale;
  bool bracketed = false;
  for (int k = 0; k < 200; ++k) {
    if (r0 < 0.0) {
      const double next = step_toward(a, step, dom.hi);
      if (residual(next) >= 0.0) {
        b = next;
        bracketed = true;
        break;
      }
      a = next;
    } else {
      const double next = -step_toward(-b, step, -dom.lo);
      if (residual(next) <= 0.0) {
        a = next;
        bracketed = true;
        break;
      }
      b = next;
    }
    step *= 2.0;
  }
  if (!bracketed) {
    std::ostringstream os;
    os << "rate: c=" << c << " is outside the range of the log-MGF derivative";
    throw DomainError(os.str());
  }

  // Safeguarded Newton from lambda = 0 (or the bracket midpoint if 0 is an endpoint).
  double lam = (0.0 > a && 0.0 < b) ? 0.0 : 0.5 * (a + b);
  for (int it = 1; it <= kMaxNewton; ++it) {
    const LogMgfValue m = log_mgf_1d_derivs(jump, lam);
    const double r = m.first - c;
    if (std::abs(r) <= kStationarityTol * std::max(1.0, std::abs(c))) {
      return {lam, lam * c - m.value, it};
    }
    if (r < 0.0) {
      a = lam;
    } else {
      b = lam;
    }
    double next = lam - r / m.second;
    if (!(next > a && next < b) || !std::isfinite(next)) next = 0.5 * (a + b);
    if (next == lam) return {lam, lam * c - m.value, it};
    lam = next;
  }
  std::ostringstream os;
  os.precision(17);
  os << "rate: Newton did not converge for c=" << c << " after " << kMaxNewton
     << " iterations; last lambda=" << lam << " bracket=[" << a << ", " << b << "]";
  throw NumericError(os.str());
}

double rate_1d(const JumpLaw& jump, double c) {
  if (const auto* g = std::get_if<IsotropicGaussian>(&jump)) return c * c / (2.0 * g->sigma * g->sigma);
  return legendre_numeric(jump, c).rate;
}

double rate_1d_derivative(const JumpLaw& jump, double c) {
  if (const auto* g = std::get_if<IsotropicGaussian>(&jump)) return c / (g->sigma * g->sigma);
  return legendre_numeric(jump, c).lambda;
}

double solve_c1(const JumpLaw& jump, double log_rho) {
  if (!(log_rho > 0.0)) {
    std::ostringstream os;
    os << "solve_c1: log rho = " << log_rho << " must be positive (supercritical branching)";
    throw InfeasibleError(os.str());
  }
  const MgfDomain dom = mgf_domain(jump);
  const double c_max = std::isinf(dom.hi) ? kInf : log_mgf_1d_derivs(jump, std::nextafter(dom.hi, 0.0)).first;
  auto h = [&](double c) { return rate_1d(jump, c) - log_rho; };

  double lo = 0.0;
  double hi = std::sqrt(log_mgf_1d_derivs(jump, 0.0).second);
  bool bracketed = false;
  for (int k = 0; k < 200; ++k) {
    if (hi >= c_max) hi = lo + 0.5 * (c_max - lo);
    if (h(hi) > 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
    hi *= 2.0;
  }
  if (!bracketed) {
    std::ostringstream os;
    os << "solve_c1: log rho = " << log_rho
       << " is not in the interior of the range of the rate function on c > 0";
    throw InfeasibleError(os.str());
  }

  double c = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double v = h(c);
    if (std::abs(v) <= 1e-14 * std::max(1.0, log_rho)) return c;
    if (v < 0.0) {
      lo = c;
    } else {
      hi = c;
    }
    double next = c - v / rate_1d_derivative(jump, c);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == c) return c;
    c = next;
  }
  throw NumericError("solve_c1: no convergence");
}

CramerProfile derive_profile(const BrwModel& model, double chat1_factor) {
  if (!(chat1_factor > 1.0)) {
    std::ostringstream os;
    os << "chat1_factor = " << chat1_factor << " must exceed 1 for the lower tail";
    throw ConfigError(os.str());
  }
  CramerProfile p{};
  p.rho = mean_offspring(model.offspring);
  p.log_rho = std::log(p.rho);
  p.c1 = solve_c1(model.jump, p.log_rho);
  p.chat1 = chat1_factor * p.c1;
  if (!in_rate_domain(model.jump, p.chat1)) {
    throw DomainError("chat1 lies outside the range of the log-MGF derivative");
  }
  p.chat2 = rate_1d_derivative(model.jump, p.chat1);
  p.I_chat1 = rate_1d(model.jump, p.chat1);
  p.psi_chat2 = p.log_rho + log_mgf_1d(model.jump, p.chat2);

  const double g = (p.I_chat1 - p.log_rho) / p.chat2;
  if (!(g > 0.0)) throw NumericError("derive_profile: I(chat1) must exceed log rho");
  p.cbar1 = p.chat1 - 0.5 * g;
  p.eps1 = 0.125 * g;
  return p;
}

}  // namespace brwfpt
