#include "solar/numerics.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace solar::numerics {

double integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (!(b > a)) {
    return 0.0;
  }
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, rel_tol,
                                                                       &error);
}

double integrate_fixed(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) {
    return 0.0;
  }
  return boost::math::quadrature::gauss<double, 10>::integrate(f, a, b);
}

}  // namespace solar::numerics
