#pragma once

#include <cmath>
#include <limits>

#include "mbal/types.hpp"

namespace mbal {

// log(sum_i exp(v_i)) with max-subtraction.
inline double log_sum_exp(VectorRef v) {
  const double m = v.maxCoeff();
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i) s += std::exp(v[i] - m);
  return m + std::log(s);
}

// exp(v_i) / sum_j exp(v_j), computed with max-subtraction.
inline Vector softmax(VectorRef v) {
  const double m = v.maxCoeff();
  Vector w = (v.array() - m).exp();
  w /= w.sum();
  return w;
}

}  // namespace mbal
