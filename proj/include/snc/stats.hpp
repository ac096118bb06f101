#pragma once

#include <cstddef>
#include <span>

namespace snc {

/// Ordinary least squares fit y = intercept + slope * x with a two-sided
/// t-test on the slope (n - 2 degrees of freedom).
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double std_error = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Requires at least 3 points and non-constant x. A perfect fit with nonzero
/// slope has p = 0; a perfectly flat response has p = 1.
LinearFit ols_fit(std::span<const double> x, std::span<const double> y);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

double mean(std::span<const double> v);
/// Sample standard deviation (n - 1); 0 for fewer than two values.
double sample_sd(std::span<const double> v);

}  // namespace snc
