#pragma once

namespace sparsefw {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation
// (modified Lentz), relative tolerance 1e-12. Throws std::invalid_argument
// for a <= 0, b <= 0 or x outside [0, 1].
double reg_inc_beta(double a, double b, double x);

// P(Z >= x) for a standard normal.
double gauss_upper_tail(double x);

}  // namespace sparsefw
