#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "taylorlab/kernel.hpp"

namespace taylorlab::transform {

/// Tensor-product analyzing function: a restrictive x1-profile with higher
/// order vanishing moments times a window in x2 with nonzero integral.
struct Taylorlet {
    kernel::RootKernel g;
    kernel::TailMomentTable tables;
    std::function<double(double)> window;  // h; default exp(-x^2)
    double window_width = 9.0;             // integration half-width in units of a^alpha
    int order = 2;                         // n
    int moments = 5;                       // M
};

/// Builds the default taylorlet for a kernel spec: shifted root kernel,
/// tail-moment tables up to `table_exponent`, Gaussian window.
Taylorlet make_taylorlet(const kernel::KernelSpec& spec, int table_exponent = 0,
                         double table_tol = 1e-9);
Taylorlet make_taylorlet(kernel::RootKernel g, kernel::TailMomentTable tables, int order, int moments);

enum class SignalKind { HalfSpace, Band, Custom };

/// Analyzed distribution. Half-space: f = [x1-q(x2)]^j * 1_{R+-}(x1-q(x2));
/// band: indicator of q_lo(x2) <= x1 <= q_hi(x2) on a bounded x2 interval.
/// Custom signals carry an arbitrary 2-D density and are accepted only by
/// code paths that can afford 2-D quadrature (none in this library).
struct SignalModel {
    SignalKind kind = SignalKind::HalfSpace;
    std::function<double(double)> boundary;        // q; lower boundary for bands
    std::function<double(double)> upper_boundary;  // bands only
    int side = +1;                                 // +1: x1 >= q, -1: x1 <= q
    int exponent = 0;                              // j
    double domain_lo = -std::numeric_limits<double>::infinity();
    double domain_hi = std::numeric_limits<double>::infinity();
    std::function<double(double, double)> density;  // custom only
};

SignalModel half_space_signal(std::function<double(double)> boundary, int side = +1, int exponent = 0);
SignalModel band_signal(std::function<double(double)> lower, std::function<double(double)> upper,
                        double domain_lo, double domain_hi);
/// Named signals: "sin", "exp" (half-spaces) and "ball" (unit-disc band).
SignalModel builtin_signal(const std::string& name);

struct ShearPoint {
    double a = 0.5;       // scale, > 0
    double alpha = 1.01;  // anisotropy exponent, > 0
    Eigen::VectorXd s;    // shear parameters s_0..s_n
    double t = 0.0;       // translation
};

/// sum_k s_k / k! * (x2 - t)^k
double shear_poly(const Eigen::VectorXd& s, double t, double x2);

struct TransformError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Taylorlet transform at one parameter point, via the 1-D boundary-curve
/// reduction: a^{j+1} * int bracket((q(u)-shear)/a) * h((u-t)/a^alpha) du,
/// where the bracket combines the cumulative tail-moment tables of g.
double transform_point(const Taylorlet& tau, const SignalModel& f, const ShearPoint& p, double tol);

struct AxisSpec {
    double min = -2.0, max = 2.0;
    int count = 64;
    std::vector<double> values() const;
};

/// Scales a = 2^{-e} for count exponents e spaced evenly in [e_min, e_max];
/// produced in descending a order (coarse first).
struct ScaleSpec {
    double e_min = 1.0, e_max = 8.0;
    int count = 64;
    std::vector<double> scales() const;
};

struct TransformField {
    std::vector<double> a_axis;  // descending
    std::vector<double> s_axis;
    int swept_index = 0;
    Eigen::VectorXd fixed_s;  // full shear vector; the swept slot is ignored
    double alpha = 1.01;
    double t = 0.0;
    bool normalized = false;
    Eigen::MatrixXd values;  // rows follow a_axis, columns follow s_axis
};

struct GridOptions {
    double tol = 1e-9;
    int threads = 0;  // 0: hardware concurrency
};

/// |T| over the scale x shear grid; rows are evaluated independently and in
/// parallel over read-only kernel tables.
TransformField transform_grid(const Taylorlet& tau, const SignalModel& f, double alpha,
                              int swept_index, const AxisSpec& sweep, const ScaleSpec& scales,
                              const Eigen::VectorXd& fixed_s, double t, const GridOptions& opts = {});

}  // namespace taylorlab::transform
