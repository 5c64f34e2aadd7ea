#include "triquad/orthopoly.hpp"

#include <cmath>
#include <stdexcept>

namespace triquad {

namespace {

void check(int n, double alpha, double beta) {
    if (n < 0) throw std::invalid_argument("jacobi: negative degree");
    if (!(alpha > -1.0) || !(beta > -1.0)) {
        throw std::invalid_argument("jacobi: alpha and beta must exceed -1");
    }
}

}  // namespace

double jacobi(int n, double alpha, double beta, double x) {
    check(n, alpha, beta);
    if (n == 0) return 1.0;
    const double ab = alpha + beta;
    double prev = 1.0;
    double cur = (alpha + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0;
    for (int k = 2; k <= n; ++k) {
        const double c = 2.0 * k + ab;
        const double a1 = 2.0 * k * (k + ab) * (c - 2.0);
        const double a2 = (c - 1.0) * (alpha * alpha - beta * beta);
        const double a3 = (c - 2.0) * (c - 1.0) * c;
        const double a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c;
        const double next = ((a2 + a3 * x) * cur - a4 * prev) / a1;
        prev = cur;
        cur = next;
    }
    return cur;
}

double jacobi_derivative(int n, double alpha, double beta, double x) {
    check(n, alpha, beta);
    if (n == 0) return 0.0;
    return 0.5 * (n + alpha + beta + 1.0) * jacobi(n - 1, alpha + 1.0, beta + 1.0, x);
}

double scaled_jacobi(int n, double alpha, double x) {
    check(n, alpha, 0.0);
    return std::sqrt(2.0 * n + alpha + 1.0) * jacobi(n, alpha, 0.0, x);
}

}  // namespace triquad
