#pragma once

#include <cmath>
#include <vector>

#include "brwfpt/model.hpp"
#include "brwfpt/ratefn.hpp"

namespace brwfpt::testing {

// Reference model used throughout: d = 3, p1 = 0.9144, p3 = 0.0856, standard Gaussian jumps.
inline BrwModel reference_model() {
  return BrwModel(3, OffspringLaw({{1, 0.9144}, {3, 0.0856}}), IsotropicGaussian{1.0, 3});
}

inline BrwModel gaussian_model(int dim, std::vector<OffspringEntry> pmf, double sigma = 1.0) {
  return BrwModel(dim, OffspringLaw(std::move(pmf)), IsotropicGaussian{sigma, dim});
}

struct Moments {
  double mean = 0.0;
  double var = 0.0;
};

inline Moments moments(const std::vector<double>& v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  for (double x : v) m.var += (x - m.mean) * (x - m.mean);
  m.var /= static_cast<double>(v.size() - 1);
  return m;
}

}  // namespace brwfpt::testing
