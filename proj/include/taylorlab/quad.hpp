#pragma once

#include <functional>
#include <vector>

namespace taylorlab::quad {

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;  // absolute
    long evaluations = 0;
    bool converged = false;
};

struct QuadOptions {
    int max_intervals = 10000;
    /// Points of reduced smoothness inside (a, b); used as initial
    /// subdivision so piecewise integrands do not force deep bisection.
    std::vector<double> breakpoints;
};

/// Adaptive Gauss-Kronrod 7-15 integration of f over [a, b]. Bisects the
/// interval with the largest error estimate until the total estimate meets
/// max(abs_tol, rel_tol * |value|) or the interval budget is exhausted, in
/// which case the best estimate is returned with converged = false.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double rel_tol, const QuadOptions& opts = {});

/// Integration over [-R, R] for an f supported in that interval.
QuadResult integrate_compact(const std::function<double(double)>& f, double support_radius,
                             double abs_tol, double rel_tol, const QuadOptions& opts = {});

/// Integration of an f with Gaussian-type decay around `center` with the
/// given scale: the window [center - width*scale, center + width*scale] is
/// used, width chosen so the neglected tail mass stays below abs_tol/10 for
/// the Gaussian family (default 9).
QuadResult integrate_decaying(const std::function<double(double)>& f, double center, double scale,
                              double abs_tol, double rel_tol, double width = 9.0,
                              const QuadOptions& opts = {});

}  // namespace taylorlab::quad
