#pragma once

#include <functional>
#include <string>

#include "mbal/types.hpp"

namespace mbal {

// Evaluates the objective at x, writes the gradient, returns the value.
using Objective = std::function<double(VectorRef x, Vector& grad)>;

struct ObjectiveCallback {
  Index dimension = 0;
  Objective eval;
};

enum class SolveStatus { Converged, MaxIterations, LineSearchFailed };

std::string to_string(SolveStatus status);

struct SolverOptions {
  double tol = 1e-8;  // on the gradient infinity-norm
  int max_iter = 500;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search = 60;
};

struct SolveResult {
  Vector argmin;
  double value = 0.0;
  double grad_norm = 0.0;  // infinity-norm at argmin
  int iterations = 0;
  SolveStatus status = SolveStatus::MaxIterations;
};

// Dense BFGS on the inverse Hessian with a strong-Wolfe line search.
// Deterministic: identical inputs produce an identical iterate sequence.
// Throws NumericalFailure if the callback returns NaN/Inf at an accepted
// point.
SolveResult minimize(const ObjectiveCallback& objective, VectorRef x0,
                     const SolverOptions& options = {});

SolveResult minimize(const Objective& objective, VectorRef x0,
                     const SolverOptions& options = {});

}  // namespace mbal
