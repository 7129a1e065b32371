#include "mbal/solver.hpp"

#include <cmath>
#include <limits>

#include "mbal/errors.hpp"

namespace mbal {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::LineSearchFailed: return "line_search_failed";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LineSearchResult {
  bool ok = false;
  double alpha = 0.0;
  double value = 0.0;
  Vector x;
  Vector grad;
  // Best strictly-finite point seen, whether or not Wolfe held; lets the
  // caller salvage progress when value differences drown in rounding noise.
  bool has_best = false;
  double best_value = 0.0;
  Vector best_x;
  Vector best_grad;
};

// phi(a) = f(x + a*p).  Evaluations that come back non-finite are treated as
// overshoots: they fail the sufficient-decrease test and the search backs off
// toward the last finite point.
class PhiEval {
 public:
  PhiEval(const Objective& f, VectorRef x, VectorRef p, LineSearchResult* res)
      : f_(f), x_(x), p_(p), grad_(x.size()), res_(res) {}

  void at(double a) {
    xa_ = x_ + a * p_;
    value_ = f_(xa_, grad_);
    if (!std::isfinite(value_) || !grad_.allFinite()) {
      value_ = kInf;
      deriv_ = kInf;
    } else {
      deriv_ = grad_.dot(p_);
      if (!res_->has_best || value_ < res_->best_value) {
        res_->has_best = true;
        res_->best_value = value_;
        res_->best_x = xa_;
        res_->best_grad = grad_;
      }
    }
  }

  double value() const { return value_; }
  double deriv() const { return deriv_; }
  const Vector& x() const { return xa_; }
  const Vector& grad() const { return grad_; }

 private:
  const Objective& f_;
  Vector x_;
  Vector p_;
  Vector xa_, grad_;
  double value_ = 0.0, deriv_ = 0.0;
  LineSearchResult* res_;
};

double interpolate(double lo, double f_lo, double d_lo, double hi, double f_hi) {
  // Quadratic fit through (lo, f_lo, d_lo) and (hi, f_hi), safeguarded to
  // stay inside the bracket.
  const double span = hi - lo;
  double denom = 2.0 * (f_hi - f_lo - d_lo * span);
  double a = std::abs(denom) > 1e-300 ? lo - d_lo * span * span / denom
                                      : lo + 0.5 * span;
  const double lo_b = std::min(lo, hi), hi_b = std::max(lo, hi);
  const double margin = 0.1 * (hi_b - lo_b);
  if (!(a > lo_b + margin) || !(a < hi_b - margin)) a = lo + 0.5 * span;
  return a;
}

void zoom(LineSearchResult& res, PhiEval& phi, double phi0, double dphi0,
          double a_lo, double f_lo, double d_lo, double a_hi, double f_hi,
          const SolverOptions& opt) {
  for (int it = 0; it < opt.max_line_search; ++it) {
    const double a = interpolate(a_lo, f_lo, d_lo, a_hi, f_hi);
    phi.at(a);
    if (phi.value() > phi0 + opt.wolfe_c1 * a * dphi0 || phi.value() >= f_lo) {
      a_hi = a;
      f_hi = phi.value();
    } else {
      if (std::abs(phi.deriv()) <= -opt.wolfe_c2 * dphi0) {
        res.ok = true;
        res.alpha = a;
        res.value = phi.value();
        res.x = phi.x();
        res.grad = phi.grad();
        return;
      }
      if (phi.deriv() * (a_hi - a_lo) >= 0.0) {
        a_hi = a_lo;
        f_hi = f_lo;
      }
      a_lo = a;
      f_lo = phi.value();
      d_lo = phi.deriv();
    }
    if (std::abs(a_hi - a_lo) < 1e-16 * std::max(1.0, std::abs(a_lo))) break;
  }
}

// Strong-Wolfe line search (bracket then zoom).
LineSearchResult line_search(const Objective& f, VectorRef x, double fx,
                             VectorRef g, VectorRef p,
                             const SolverOptions& opt) {
  LineSearchResult res;
  const double dphi0 = g.dot(p);
  if (dphi0 >= 0.0) return res;

  PhiEval phi(f, x, p, &res);
  double a_prev = 0.0, f_prev = fx, d_prev = dphi0;
  double a = 1.0;
  for (int it = 0; it < opt.max_line_search; ++it) {
    phi.at(a);
    if (phi.value() > fx + opt.wolfe_c1 * a * dphi0 ||
        (it > 0 && phi.value() >= f_prev)) {
      zoom(res, phi, fx, dphi0, a_prev, f_prev, d_prev, a, phi.value(), opt);
      return res;
    }
    if (std::abs(phi.deriv()) <= -opt.wolfe_c2 * dphi0) {
      res.ok = true;
      res.alpha = a;
      res.value = phi.value();
      res.x = phi.x();
      res.grad = phi.grad();
      return res;
    }
    if (phi.deriv() >= 0.0) {
      zoom(res, phi, fx, dphi0, a, phi.value(), phi.deriv(), a_prev, f_prev,
           opt);
      return res;
    }
    a_prev = a;
    f_prev = phi.value();
    d_prev = phi.deriv();
    a *= 2.0;
    if (a > 1e12) break;
  }
  return res;
}

}  // namespace

SolveResult minimize(const Objective& f, VectorRef x0,
                     const SolverOptions& opt) {
  const Index n = x0.size();
  Vector x = x0;
  Vector g(n);
  double fx = f(x, g);
  if (!std::isfinite(fx) || !g.allFinite())
    throw NumericalFailure("objective is non-finite at the starting point");

  Matrix H = Matrix::Identity(n, n);
  SolveResult res;

  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    const double ginf = g.lpNorm<Eigen::Infinity>();
    if (ginf <= opt.tol) {
      res.argmin = x;
      res.value = fx;
      res.grad_norm = ginf;
      res.iterations = iter;
      res.status = SolveStatus::Converged;
      return res;
    }
    if (iter == opt.max_iter) break;

    Vector p = -(H * g);
    if (g.dot(p) >= 0.0) {  // H lost positive-definiteness; restart
      H = Matrix::Identity(n, n);
      p = -g;
    }

    LineSearchResult ls = line_search(f, x, fx, g, p, opt);
    if (!ls.ok) {
      // Near the optimum the Wolfe tests can drown in rounding noise; keep
      // going from the best strictly-decreasing point if one was found.
      if (ls.has_best && ls.best_value < fx) {
        ls.x = ls.best_x;
        ls.value = ls.best_value;
        ls.grad = ls.best_grad;
      } else {
        res.argmin = x;
        res.value = fx;
        res.grad_norm = ginf;
        res.iterations = iter;
        res.status = SolveStatus::LineSearchFailed;
        return res;
      }
    }

    Vector s = ls.x - x;
    Vector y = ls.grad - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      Vector Hy = H * y;
      const double yHy = y.dot(Hy);
      H += ((sy + yHy) / (sy * sy)) * (s * s.transpose());
      Matrix correction = (Hy * s.transpose()) / sy;
      H -= correction + correction.transpose();
    }

    x = ls.x;
    fx = ls.value;
    g = ls.grad;
  }

  res.argmin = x;
  res.value = fx;
  res.grad_norm = g.lpNorm<Eigen::Infinity>();
  res.iterations = opt.max_iter;
  res.status = SolveStatus::MaxIterations;
  return res;
}

SolveResult minimize(const ObjectiveCallback& objective, VectorRef x0,
                     const SolverOptions& options) {
  if (objective.dimension != 0 && objective.dimension != x0.size())
    throw DimensionMismatch("starting point does not match objective dimension");
  return minimize(objective.eval, x0, options);
}

}  // namespace mbal
