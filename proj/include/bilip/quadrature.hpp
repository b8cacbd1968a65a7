#pragma once

#include <functional>
#include <span>

namespace bilip::quadrature {

struct Result {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
};

/// Adaptive 15-point Gauss-Kronrod integration of f over [a, b] with local
/// bisection until the Kronrod/Gauss difference is below the share of
/// `abs_tol` allotted to each subinterval.
Result integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 int max_depth = 48);

/// Integrates panel by panel over consecutive points of the sorted list
/// `breaks`, so discontinuities placed on breakpoints never straddle a rule.
Result integrate_panels(const std::function<double(double)>& f, std::span<const double> breaks,
                        double abs_tol, int max_depth = 48);

}  // namespace bilip::quadrature
