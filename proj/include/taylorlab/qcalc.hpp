#pragma once

#include <functional>
#include <vector>

namespace taylorlab::qcalc {

/// [n]_q = (q^n - 1)/(q - 1); equals n in the q -> 1 limit.
double q_bracket(int n, double q);

/// [n]_q! = prod_{k=1..n} [k]_q; empty product is 1.
double q_factorial(int n, double q);

/// Gaussian binomial coefficient, computed as a running product of bracket
/// ratios so that intermediate factors stay bounded for q > 1.
double q_binomial(int n, int k, double q);

/// (a; q)_n = prod_{k=0..n-1} (1 - a q^k); empty product is 1.
double q_pochhammer(double a, double q, int n);

/// Coefficients c_0..c_n with (x; q)_n = sum_k c_k x^k.
std::vector<double> q_pochhammer_expand(double q, int n);

/// (q; q)_inf for 0 <= q < 1, via the pentagonal-number series truncated as
/// soon as the tail bound drops below tol. Guarantees |result - phi(q)| <= tol.
double euler_phi(double q, double tol);

/// Tail bound 2 q^{(n+1)(3n+2)/2} for the pentagonal partial sum with terms
/// m = 1..n included.
double euler_phi_error_bound(double q, int n);

/// (f(qx) - f(x)) / (qx - x); rejects q = 1 and x = 0.
double q_derivative(const std::function<double(double)>& f, double q, double x);

}  // namespace taylorlab::qcalc
