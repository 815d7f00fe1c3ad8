#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace taylorlab {

/// Dense univariate polynomial with double coefficients, ascending order.
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}
    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_.push_back(0.0);
    }

    const std::vector<double>& coeffs() const { return coeffs_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    double operator()(double x) const {
        double acc = 0.0;
        for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + coeffs_[i];
        return acc;
    }

    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return Polynomial{};
        std::vector<double> d(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * static_cast<double>(k);
        return Polynomial(std::move(d));
    }

    /// Antiderivative with zero constant term.
    Polynomial antiderivative() const {
        std::vector<double> a(coeffs_.size() + 1, 0.0);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) a[k + 1] = coeffs_[k] / static_cast<double>(k + 1);
        return Polynomial(std::move(a));
    }

    /// p(x) -> p(x / c)
    Polynomial scale_argument(double c) const {
        std::vector<double> s(coeffs_);
        double inv = 1.0;
        for (std::size_t k = 0; k < s.size(); ++k) {
            s[k] *= inv;
            inv /= c;
        }
        return Polynomial(std::move(s));
    }

    /// p(x) -> x^m * p(x)
    Polynomial times_monomial(int m) const {
        std::vector<double> s(coeffs_.size() + static_cast<std::size_t>(m), 0.0);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) s[k + static_cast<std::size_t>(m)] = coeffs_[k];
        return Polynomial(std::move(s));
    }

    Polynomial operator*(double c) const {
        std::vector<double> s(coeffs_);
        for (double& v : s) v *= c;
        return Polynomial(std::move(s));
    }

    Polynomial operator+(const Polynomial& other) const {
        std::vector<double> s(std::max(coeffs_.size(), other.coeffs_.size()), 0.0);
        for (std::size_t k = 0; k < coeffs_.size(); ++k) s[k] += coeffs_[k];
        for (std::size_t k = 0; k < other.coeffs_.size(); ++k) s[k] += other.coeffs_[k];
        return Polynomial(std::move(s));
    }

    Polynomial operator*(const Polynomial& other) const {
        std::vector<double> s(coeffs_.size() + other.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i)
            for (std::size_t j = 0; j < other.coeffs_.size(); ++j) s[i + j] += coeffs_[i] * other.coeffs_[j];
        return Polynomial(std::move(s));
    }

    /// Definite integral over [a, b].
    double integral(double a, double b) const {
        Polynomial anti = antiderivative();
        return anti(b) - anti(a);
    }

private:
    std::vector<double> coeffs_;
};

}  // namespace taylorlab
