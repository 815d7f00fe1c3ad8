#include "taylorlab/transform.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>

#include "taylorlab/quad.hpp"

namespace taylorlab::transform {

Taylorlet make_taylorlet(const kernel::KernelSpec& spec, int table_exponent, double table_tol) {
    kernel::RootKernel g = kernel::restrictive_kernel(spec);
    kernel::TailMomentTable tables =
        kernel::tabulate_tail_moments(g.base(), g.vn(), g.t0(), table_exponent, table_tol);
    return make_taylorlet(std::move(g), std::move(tables), spec.order, spec.moments);
}

Taylorlet make_taylorlet(kernel::RootKernel g, kernel::TailMomentTable tables, int order, int moments) {
    if (g.t0() == 0.0)
        throw std::invalid_argument("make_taylorlet: restrictiveness requires a nonzero shift");
    Taylorlet tau{std::move(g), std::move(tables), [](double x) { return std::exp(-x * x); }, 9.0,
                  order, moments};
    return tau;
}

SignalModel half_space_signal(std::function<double(double)> boundary, int side, int exponent) {
    if (side != +1 && side != -1) throw std::invalid_argument("half_space_signal: side must be +1 or -1");
    if (exponent < 0) throw std::invalid_argument("half_space_signal: exponent must be nonnegative");
    SignalModel f;
    f.kind = SignalKind::HalfSpace;
    f.boundary = std::move(boundary);
    f.side = side;
    f.exponent = exponent;
    return f;
}

SignalModel band_signal(std::function<double(double)> lower, std::function<double(double)> upper,
                        double domain_lo, double domain_hi) {
    SignalModel f;
    f.kind = SignalKind::Band;
    f.boundary = std::move(lower);
    f.upper_boundary = std::move(upper);
    f.domain_lo = domain_lo;
    f.domain_hi = domain_hi;
    return f;
}

SignalModel builtin_signal(const std::string& name) {
    if (name == "sin") return half_space_signal([](double u) { return std::sin(u); });
    if (name == "exp") return half_space_signal([](double u) { return std::exp(u); });
    if (name == "ball")
        return band_signal([](double u) { return -std::sqrt(std::max(0.0, 1.0 - u * u)); },
                           [](double u) { return std::sqrt(std::max(0.0, 1.0 - u * u)); }, -1.0, 1.0);
    throw std::invalid_argument("builtin_signal: unknown signal '" + name + "'");
}

double shear_poly(const Eigen::VectorXd& s, double t, double x2) {
    const double d = x2 - t;
    double acc = 0.0;
    double invfact = 1.0;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (k > 0) invfact /= static_cast<double>(k);
        acc += s[k] * invfact * std::pow(d, static_cast<double>(k));
    }
    return acc;
}

namespace {

double binom(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v *= static_cast<double>(n - k + i) / static_cast<double>(i);
    return v;
}

// int_W^inf (t - W)^j g(t) dt expanded over the cumulative moment tables.
double upper_bracket(const kernel::TailMomentTable& tables, int j, double w) {
    double acc = 0.0;
    for (int k = 0; k <= j; ++k)
        acc += binom(j, k) * std::pow(-w, static_cast<double>(j - k)) * tables.moment_integral(k, w);
    return acc;
}

double lower_bracket(const kernel::TailMomentTable& tables, int j, double w) {
    double acc = 0.0;
    for (int k = 0; k <= j; ++k)
        acc += binom(j, k) * std::pow(-w, static_cast<double>(j - k)) * tables.moment_below(k, w);
    return acc;
}

}  // namespace

double transform_point(const Taylorlet& tau, const SignalModel& f, const ShearPoint& p, double tol) {
    if (f.kind == SignalKind::Custom)
        throw std::invalid_argument("transform_point: custom signals need 2-D quadrature, not supported");
    if (!(p.a > 0.0) || !(p.alpha > 0.0))
        throw std::invalid_argument("transform_point: scale and alpha must be positive");
    if (p.s.size() != tau.order + 1)
        throw std::invalid_argument("transform_point: shear vector must have order+1 entries");
    if (f.exponent > tau.tables.max_exponent())
        throw std::invalid_argument("transform_point: signal exponent exceeds tabulated moments");
    if (f.kind == SignalKind::Band && f.exponent != 0)
        throw std::invalid_argument("transform_point: band signals support exponent 0 only");

    const double a = p.a;
    const double a_alpha = std::pow(a, p.alpha);
    const int j = f.exponent;

    auto integrand = [&](double u) -> double {
        double bracket;
        if (f.kind == SignalKind::Band) {
            if (u <= f.domain_lo || u >= f.domain_hi) return 0.0;
            const double shear = shear_poly(p.s, p.t, u);
            const double w_lo = (f.boundary(u) - shear) / a;
            const double w_hi = (f.upper_boundary(u) - shear) / a;
            bracket = tau.tables.moment_integral(0, w_lo) - tau.tables.moment_integral(0, w_hi);
        } else {
            const double shear = shear_poly(p.s, p.t, u);
            const double w = (f.boundary(u) - shear) / a;
            bracket = f.side > 0 ? upper_bracket(tau.tables, j, w) : lower_bracket(tau.tables, j, w);
        }
        if (bracket == 0.0) return 0.0;
        const double v = (u - p.t) / a_alpha;
        return bracket * tau.window(v);
    };

    quad::QuadOptions qopts;
    if (f.kind == SignalKind::Band) {
        qopts.breakpoints.push_back(f.domain_lo);
        qopts.breakpoints.push_back(f.domain_hi);
    }
    quad::QuadResult r =
        quad::integrate_decaying(integrand, p.t, a_alpha, tol, tol, tau.window_width, qopts);
    if (!r.converged) {
        std::ostringstream msg;
        msg << "transform_point: quadrature did not converge at a=" << p.a << ", t=" << p.t
            << " (error estimate " << r.error_estimate << ")";
        throw TransformError(msg.str());
    }
    return std::pow(a, static_cast<double>(j + 1)) * r.value;
}

std::vector<double> AxisSpec::values() const {
    if (count < 1) throw std::invalid_argument("AxisSpec: count must be positive");
    std::vector<double> v(static_cast<std::size_t>(count));
    if (count == 1) {
        v[0] = min;
        return v;
    }
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = min + (max - min) * i / (count - 1);
    return v;
}

std::vector<double> ScaleSpec::scales() const {
    if (count < 1) throw std::invalid_argument("ScaleSpec: count must be positive");
    std::vector<double> v(static_cast<std::size_t>(count));
    if (count == 1) {
        v[0] = std::exp2(-e_min);
        return v;
    }
    for (int i = 0; i < count; ++i) {
        const double e = e_min + (e_max - e_min) * i / (count - 1);
        v[static_cast<std::size_t>(i)] = std::exp2(-e);
    }
    return v;
}

TransformField transform_grid(const Taylorlet& tau, const SignalModel& f, double alpha,
                              int swept_index, const AxisSpec& sweep, const ScaleSpec& scales,
                              const Eigen::VectorXd& fixed_s, double t, const GridOptions& opts) {
    if (swept_index < 0 || swept_index > tau.order)
        throw std::invalid_argument("transform_grid: swept index out of range");
    if (fixed_s.size() != tau.order + 1)
        throw std::invalid_argument("transform_grid: fixed shear vector must have order+1 entries");

    TransformField field;
    field.a_axis = scales.scales();
    field.s_axis = sweep.values();
    field.swept_index = swept_index;
    field.fixed_s = fixed_s;
    field.alpha = alpha;
    field.t = t;
    field.values.resize(static_cast<Eigen::Index>(field.a_axis.size()),
                        static_cast<Eigen::Index>(field.s_axis.size()));

    const int rows = static_cast<int>(field.a_axis.size());
    const int cols = static_cast<int>(field.s_axis.size());
    int n_threads = opts.threads > 0 ? opts.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min(n_threads, rows));

    std::atomic<int> next_row{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const int row = next_row.fetch_add(1);
            if (row >= rows) return;
            try {
                ShearPoint p;
                p.a = field.a_axis[static_cast<std::size_t>(row)];
                p.alpha = alpha;
                p.t = t;
                p.s = fixed_s;
                for (int col = 0; col < cols; ++col) {
                    p.s[swept_index] = field.s_axis[static_cast<std::size_t>(col)];
                    double v;
                    try {
                        v = transform_point(tau, f, p, opts.tol);
                    } catch (const TransformError& e) {
                        std::ostringstream msg;
                        msg << e.what() << " [grid cell a=" << p.a << ", s" << swept_index << "="
                            << p.s[swept_index] << "]";
                        throw TransformError(msg.str());
                    }
                    field.values(row, col) = std::abs(v);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);
    return field;
}

}  // namespace taylorlab::transform
