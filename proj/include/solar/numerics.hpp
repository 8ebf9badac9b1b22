#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "solar/errors.hpp"

namespace solar::numerics {

struct BisectionResult {
  double root = 0.0;  // last point at which the predicate held
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Bisection for the supremum of a predicate that holds on an initial segment
/// of [lo, hi]. The caller guarantees pred(lo); hi is treated as failing.
/// Flat regions of the underlying monotone function are resolved toward the
/// right, which is what the sup-based inverses need.
template <class Pred>
BisectionResult bisect_sup(Pred&& pred, double lo, double hi, double rel_tol, double abs_tol,
                           int max_iterations) {
  BisectionResult out{lo, lo, hi, 0, false};
  while (out.iterations < max_iterations) {
    if (out.hi - out.lo <= rel_tol * std::abs(out.hi) || out.hi - out.lo <= abs_tol) {
      out.converged = true;
      break;
    }
    const double mid = out.lo + 0.5 * (out.hi - out.lo);
    if (mid <= out.lo || mid >= out.hi) {  // interval at machine resolution
      out.converged = true;
      break;
    }
    if (pred(mid)) {
      out.lo = mid;
    } else {
      out.hi = mid;
    }
    ++out.iterations;
  }
  if (!out.converged) {
    out.converged = out.hi - out.lo <= rel_tol * std::abs(out.hi) || out.hi - out.lo <= abs_tol;
  }
  out.root = out.lo;
  return out;
}

/// Adaptive Gauss-Kronrod (15/31) integral of f over [a, b]; returns 0 for
/// empty intervals.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12);

/// Fixed 10-point Gauss-Legendre rule, exact for polynomials up to degree 19.
double integrate_fixed(const std::function<double(double)>& f, double a, double b);

inline void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw InvalidArgument(std::string(what) + " must be finite");
  }
}

}  // namespace solar::numerics
