#include "taylorlab/qcalc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace taylorlab::qcalc {

namespace {

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw std::overflow_error(std::string(what) + ": result overflows double range");
}

// [a]_q / [b]_q without forming the possibly huge brackets themselves.
double bracket_ratio(int a, int b, double q) {
    if (q == 1.0) return static_cast<double>(a) / static_cast<double>(b);
    if (q > 1.0) return std::pow(q, a - b) * (1.0 - std::pow(q, -a)) / (1.0 - std::pow(q, -b));
    return (1.0 - std::pow(q, a)) / (1.0 - std::pow(q, b));
}

}  // namespace

double q_bracket(int n, double q) {
    if (n < 0) throw std::invalid_argument("q_bracket: n must be nonnegative");
    if (q == 1.0) return static_cast<double>(n);
    double v = (std::pow(q, n) - 1.0) / (q - 1.0);
    check_finite(v, "q_bracket");
    return v;
}

double q_factorial(int n, double q) {
    if (n < 0) throw std::invalid_argument("q_factorial: n must be nonnegative");
    double v = 1.0;
    for (int k = 1; k <= n; ++k) v *= q_bracket(k, q);
    check_finite(v, "q_factorial");
    return v;
}

double q_binomial(int n, int k, double q) {
    if (n < 0 || k < 0) throw std::invalid_argument("q_binomial: arguments must be nonnegative");
    if (k > n) throw std::invalid_argument("q_binomial: k exceeds n");
    k = std::min(k, n - k);  // symmetry
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v *= bracket_ratio(n + 1 - i, i, q);
    check_finite(v, "q_binomial");
    return v;
}

double q_pochhammer(double a, double q, int n) {
    if (n < 0) throw std::invalid_argument("q_pochhammer: n must be nonnegative");
    double v = 1.0;
    double qk = 1.0;
    for (int k = 0; k < n; ++k) {
        v *= 1.0 - a * qk;
        qk *= q;
    }
    return v;
}

std::vector<double> q_pochhammer_expand(double q, int n) {
    if (n < 0) throw std::invalid_argument("q_pochhammer_expand: n must be nonnegative");
    std::vector<double> c(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        double binom = q_binomial(n, k, q);
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        c[static_cast<std::size_t>(k)] = sign * binom * std::pow(q, 0.5 * k * (k - 1));
    }
    return c;
}

double euler_phi(double q, double tol) {
    if (q < 0.0 || q >= 1.0) throw std::invalid_argument("euler_phi: q must lie in [0, 1)");
    if (tol <= 0.0) throw std::invalid_argument("euler_phi: tol must be positive");
    double sum = 1.0;
    int n = 0;
    while (euler_phi_error_bound(q, n) > tol) {
        ++n;
        double sign = (n % 2 == 0) ? 1.0 : -1.0;
        sum += sign * (std::pow(q, 0.5 * n * (3 * n - 1)) + std::pow(q, 0.5 * n * (3 * n + 1)));
        if (n > 100000) throw std::runtime_error("euler_phi: series failed to reach tolerance");
    }
    return sum;
}

double euler_phi_error_bound(double q, int n) {
    if (q < 0.0 || q >= 1.0) throw std::invalid_argument("euler_phi_error_bound: q must lie in [0, 1)");
    if (n < 0) throw std::invalid_argument("euler_phi_error_bound: n must be nonnegative");
    return 2.0 * std::pow(q, 0.5 * (n + 1) * (3 * n + 2));
}

double q_derivative(const std::function<double(double)>& f, double q, double x) {
    if (q == 1.0) throw std::invalid_argument("q_derivative: q = 1 divides by zero");
    if (x == 0.0) throw std::invalid_argument("q_derivative: x = 0 divides by zero");
    return (f(q * x) - f(x)) / (q * x - x);
}

}  // namespace taylorlab::qcalc
