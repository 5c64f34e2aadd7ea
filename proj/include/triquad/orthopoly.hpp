#pragma once

namespace triquad {

/// Classical Jacobi polynomial P_n^(alpha,beta)(x) by forward three-term
/// recurrence. Throws std::invalid_argument if n < 0 or alpha, beta <= -1.
double jacobi(int n, double alpha, double beta, double x);

/// d/dx P_n^(alpha,beta)(x) = (n + alpha + beta + 1)/2 * P_{n-1}^(alpha+1,beta+1)(x).
double jacobi_derivative(int n, double alpha, double beta, double x);

/// sqrt(2n + alpha + 1) * P_n^(alpha,0)(x)
double scaled_jacobi(int n, double alpha, double x);

}  // namespace triquad
