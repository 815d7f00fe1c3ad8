#include "taylorlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "taylorlab/qcalc.hpp"

namespace taylorlab::kernel {

namespace {

double binom(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v *= static_cast<double>(n - k + i) / static_cast<double>(i);
    return v;
}

double int_pow(double base, int e) {
    double v = 1.0;
    for (int i = 0; i < e; ++i) v *= base;
    return v;
}

// Fritsch-Carlson shape-preserving slopes.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> m(n, 0.0);
    if (n == 1) return m;
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    if (n == 2) {
        m[0] = m[1] = delta[0];
        return m;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] == 0.0 || delta[i] == 0.0 || (delta[i - 1] > 0) != (delta[i] > 0)) {
            m[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0)
            s = 0.0;
        else if ((d0 > 0) != (d1 > 0) && std::abs(s) > 3.0 * std::abs(d0))
            s = 3.0 * d0;
        return s;
    };
    m[0] = endpoint(h[0], h[1], delta[0], delta[1]);
    m[n - 1] = endpoint(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    return m;
}

double hermite_eval(const InterpSegment& seg, std::size_t i, double r) {
    const double h = seg.x[i + 1] - seg.x[i];
    const double t = (r - seg.x[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * seg.y[i] + (t3 - 2 * t2 + t) * h * seg.d[i] +
           (-2 * t3 + 3 * t2) * seg.y[i + 1] + (t3 - t2) * h * seg.d[i + 1];
}

double segment_eval(const InterpSegment& seg, double r) {
    auto it = std::upper_bound(seg.x.begin(), seg.x.end(), r);
    std::size_t i = it == seg.x.begin() ? 0 : static_cast<std::size_t>(std::distance(seg.x.begin(), it)) - 1;
    i = std::min(i, seg.x.size() - 2);
    return hermite_eval(seg, i, r);
}

}  // namespace

void KernelSpec::validate() const {
    if (!(q > 1.0)) throw std::invalid_argument("KernelSpec: q must exceed 1");
    if (!(eps > 0.0)) throw std::invalid_argument("KernelSpec: eps must be positive");
    if (smoothness < 0) throw std::invalid_argument("KernelSpec: smoothness must be nonnegative");
    if (steps < 0) throw std::invalid_argument("KernelSpec: steps must be nonnegative");
    if (order < 1) throw std::invalid_argument("KernelSpec: order must be positive");
    if (moments < 1) throw std::invalid_argument("KernelSpec: moments must be positive");
    const double bound = std::pow(eps, static_cast<double>(root_exponent(order)));
    if (!(std::abs(t0) < bound))
        throw std::invalid_argument("KernelSpec: |t0| must be below eps^{v_n} so the shifted plateau covers 0");
}

long long root_exponent(int order) {
    if (order < 1) throw std::invalid_argument("root_exponent: order must be positive");
    if (order > 42) throw std::invalid_argument("root_exponent: lcm{1..order} overflows 64-bit range");
    long long v = 1;
    for (int k = 2; k <= order; ++k) v = std::lcm(v, static_cast<long long>(k));
    return v;
}

Polynomial hermite_bridge(double q, double eps, int smoothness) {
    if (!(q > 1.0) || !(eps > 0.0)) throw std::invalid_argument("hermite_bridge: requires q > 1 and eps > 0");
    if (smoothness < 0 || smoothness > 60)
        throw std::invalid_argument("hermite_bridge: no bridge of the configured degree exists");
    // eta(t) = 1 - I(t)/I(q*eps) with I(t) = int_eps^t (s-eps)^k (q*eps-s)^k ds;
    // the integrand's k-fold zeros at both ends supply the derivative matching.
    const int k = smoothness;
    Polynomial left({-eps, 1.0});      // s - eps
    Polynomial right({q * eps, -1.0});  // q*eps - s
    Polynomial prod({1.0});
    for (int i = 0; i < k; ++i) prod = prod * left;
    for (int i = 0; i < k; ++i) prod = prod * right;
    Polynomial F = prod.antiderivative();
    const double denom = F(q * eps) - F(eps);
    return F * (-1.0 / denom) + Polynomial({1.0 + F(eps) / denom});
}

MomentKernel::MomentKernel(double q, double eps, int smoothness, Polynomial bridge,
                           std::vector<double> dilate_coeffs, int level, bool is_limit, double plateau)
    : q_(q),
      eps_(eps),
      smoothness_(smoothness),
      bridge_(std::move(bridge)),
      coeffs_(std::move(dilate_coeffs)),
      level_(level),
      is_limit_(is_limit),
      plateau_(plateau) {
    if (!(q_ > 1.0)) throw std::invalid_argument("MomentKernel: q must exceed 1");
    if (coeffs_.empty()) throw std::invalid_argument("MomentKernel: empty dilate series");

    const std::size_t L = coeffs_.size() - 1;
    bounds_.resize(L + 2);
    powq_.resize(L + 1);
    double b = eps_, p = 1.0;
    for (std::size_t k = 0; k <= L + 1; ++k) {
        bounds_[k] = b;
        if (k <= L) powq_[k] = p;
        b *= q_;
        p *= q_;
    }
    if (!std::isfinite(bounds_.back())) throw std::overflow_error("MomentKernel: support radius overflows");

    suffix_.assign(L + 1, 0.0);
    if (is_limit_) {
        double prefix = 0.0;
        for (std::size_t l = 0; l <= L; ++l) {
            prefix += coeffs_[l];
            suffix_[l] = plateau_ - prefix;
        }
    } else {
        double tail = 0.0;
        for (std::size_t l = L + 1; l-- > 0;) {
            suffix_[l] = tail;
            tail += coeffs_[l];
        }
    }
}

double MomentKernel::operator()(double x) const {
    const double r = std::abs(x);
    if (r <= bounds_.front()) return plateau_;
    if (r > bounds_.back()) return 0.0;
    const auto it = std::lower_bound(bounds_.begin(), bounds_.end(), r);
    const std::size_t l = static_cast<std::size_t>(std::distance(bounds_.begin(), it)) - 1;
    return coeffs_[l] * bridge_(r / powq_[l]) + suffix_[l];
}

Polynomial MomentKernel::segment_polynomial(int s) const {
    if (s < 0 || s >= num_segments()) throw std::out_of_range("MomentKernel: segment index");
    if (s == 0) return Polynomial({plateau_});
    const std::size_t l = static_cast<std::size_t>(s) - 1;
    return bridge_.scale_argument(powq_[l]) * coeffs_[l] + Polynomial({suffix_[l]});
}

MomentKernel build_bump(double q, double eps, int smoothness) {
    return MomentKernel(q, eps, smoothness, hermite_bridge(q, eps, smoothness), {1.0}, 0, false, 1.0);
}

namespace {

double plateau_product(double q, int level) {
    double v = 1.0, qk = 1.0;
    for (int k = 1; k <= level; ++k) {
        qk /= q;
        v *= 1.0 - qk;
    }
    return v;
}

}  // namespace

MomentKernel recurse(const MomentKernel& k, int target_level) {
    if (k.is_limit()) throw std::invalid_argument("recurse: limit kernel has no further levels");
    if (target_level < k.level()) throw std::invalid_argument("recurse: target level below current level");
    std::vector<double> c = k.dilate_coeffs();
    const double q = k.q();
    for (int m = k.level(); m < target_level; ++m) {
        const double factor = std::pow(q, -(m + 1));
        c.push_back(0.0);
        for (std::size_t i = c.size() - 1; i > 0; --i) c[i] -= factor * c[i - 1];
    }
    return MomentKernel(q, k.eps(), k.smoothness(), k.bridge(), std::move(c), target_level, false,
                        plateau_product(q, target_level));
}

MomentKernel explicit_kernel(const KernelSpec& spec, int level) {
    if (level < 0) throw std::invalid_argument("explicit_kernel: level must be nonnegative");
    if (!(spec.q > 1.0)) throw std::invalid_argument("explicit_kernel: q must exceed 1");
    // c_k = (q^{-level}; q)_k / (q; q)_k, as a running product of ratios.
    std::vector<double> c(static_cast<std::size_t>(level) + 1);
    c[0] = 1.0;
    for (int k = 1; k <= level; ++k)
        c[static_cast<std::size_t>(k)] = c[static_cast<std::size_t>(k) - 1] *
                                         (1.0 - std::pow(spec.q, k - 1 - level)) / (1.0 - std::pow(spec.q, k));
    return MomentKernel(spec.q, spec.eps, spec.smoothness, hermite_bridge(spec.q, spec.eps, spec.smoothness),
                        std::move(c), level, false, plateau_product(spec.q, level));
}

MomentKernel limit_kernel(const KernelSpec& spec, double tol) {
    if (!(spec.q > 1.0)) throw std::invalid_argument("limit_kernel: q must exceed 1");
    if (!(tol > 0.0)) throw std::invalid_argument("limit_kernel: tol must be positive");
    const double plateau = qcalc::euler_phi(1.0 / spec.q, tol);
    // Shell coefficients 1/(q;q)_l. The value on a dropped shell l is bounded
    // by |c_l| plus the remaining tail; the tail is majorized geometrically by
    // |c_{l}| * rho / (1 - rho) with rho = 1/(q^{l+1} - 1) once rho < 1.
    std::vector<double> c{1.0};
    double next = 1.0 / (1.0 - spec.q);
    int l = 1;
    while (true) {
        const double rho = 1.0 / (std::pow(spec.q, l + 1) - 1.0);
        if (rho < 1.0 && std::abs(next) * (1.0 + rho / (1.0 - rho)) < tol) break;
        c.push_back(next);
        ++l;
        next /= 1.0 - std::pow(spec.q, l);
        if (l > 4000) throw std::runtime_error("limit_kernel: truncation failed to converge");
    }
    return MomentKernel(spec.q, spec.eps, spec.smoothness, hermite_bridge(spec.q, spec.eps, spec.smoothness),
                        std::move(c), -1, true, plateau);
}

RootKernel::RootKernel(MomentKernel base, long long vn, double t0)
    : base_(std::move(base)), vn_(vn), t0_(t0) {
    if (vn_ < 1) throw std::invalid_argument("RootKernel: root exponent must be positive");
    reach_ = std::pow(base_.support_radius(), static_cast<double>(vn_));
    if (!std::isfinite(reach_)) throw std::overflow_error("RootKernel: support overflows");
}

double RootKernel::operator()(double t) const {
    const double d = std::abs(t - t0_);
    const double u = vn_ == 1 ? d : std::pow(d, 1.0 / static_cast<double>(vn_));
    return base_(u);
}

RootKernel compose_root(const MomentKernel& k, int order) {
    const long long vn = root_exponent(order);
    if (!k.is_limit() && k.level() % vn != 0)
        throw std::invalid_argument("compose_root: kernel level must be divisible by the root exponent");
    return RootKernel(k, vn, 0.0);
}

RootKernel restrictive_kernel(const KernelSpec& spec) {
    spec.validate();
    if (spec.t0 == 0.0) throw std::invalid_argument("restrictive_kernel: shift t0 must be nonzero");
    const long long vn = root_exponent(spec.order);
    const long long level = vn * static_cast<long long>(spec.moments);
    if (level > 1000000) throw std::invalid_argument("restrictive_kernel: moments * v_n too large");
    if (spec.steps != level)
        throw std::invalid_argument("restrictive_kernel: steps must equal moments * v_n");
    return RootKernel(explicit_kernel(spec, static_cast<int>(level)), vn, spec.t0);
}

TailMomentTable::TailMomentTable(long long vn, double t0, double support_w,
                                 std::vector<std::vector<InterpSegment>> tables, int exact_zero_moments)
    : vn_(vn),
      t0_(t0),
      support_w_(support_w),
      tables_(std::move(tables)),
      exact_zero_moments_(exact_zero_moments) {
    if (tables_.empty()) throw std::invalid_argument("TailMomentTable: no tables");
}

double TailMomentTable::partial_at_zero(int i) const {
    return i < exact_zero_moments_ ? 0.0 : partial(i, 0.0);
}

double TailMomentTable::partial(int i, double r) const {
    if (i < 0 || i > max_exponent()) throw std::out_of_range("TailMomentTable: table index");
    if (r >= support_w_) return 0.0;
    if (r < 0.0) r = 0.0;
    const auto& segs = tables_[static_cast<std::size_t>(i)];
    // Locate the segment whose r-range contains r (segments are contiguous).
    std::size_t lo = 0, hi = segs.size() - 1;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (segs[mid].x.back() < r)
            lo = mid + 1;
        else
            hi = mid;
    }
    return segment_eval(segs[lo], r);
}

double TailMomentTable::moment_integral(int k, double w) const {
    if (k < 0 || k > max_exponent()) throw std::out_of_range("TailMomentTable: moment exponent");
    const double delta = w - t0_;
    double acc = 0.0;
    if (delta >= 0.0) {
        for (int i = 0; i <= k; ++i)
            acc += binom(k, i) * int_pow(t0_, k - i) * partial(i, delta);
    } else {
        for (int i = 0; i <= k; ++i) {
            const double n0 = partial_at_zero(i);
            const double sign = (i % 2 == 0) ? 1.0 : -1.0;
            acc += binom(k, i) * int_pow(t0_, k - i) * (n0 + sign * (n0 - partial(i, -delta)));
        }
    }
    return acc;
}

double TailMomentTable::full_moment(int k) const {
    if (k < 0 || k > max_exponent()) throw std::out_of_range("TailMomentTable: moment exponent");
    double acc = 0.0;
    for (int i = 0; i <= k; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        acc += binom(k, i) * int_pow(t0_, k - i) * (1.0 + sign) * partial_at_zero(i);
    }
    return acc;
}

TailMomentTable tabulate_tail_moments(const MomentKernel& base, long long vn, double t0,
                                      int max_exponent, double tol) {
    if (base.is_limit())
        throw std::invalid_argument("tabulate_tail_moments: requires a finite kernel");
    if (vn < 1) throw std::invalid_argument("tabulate_tail_moments: root exponent must be positive");
    if (max_exponent < 0) throw std::invalid_argument("tabulate_tail_moments: exponent must be nonnegative");
    if (!(tol > 0.0)) throw std::invalid_argument("tabulate_tail_moments: tol must be positive");

    const int n_seg = base.num_segments();
    const double vnd = static_cast<double>(vn);
    const double support_w = std::pow(base.support_radius(), vnd);

    std::vector<std::vector<InterpSegment>> tables;
    for (int i = 0; i <= max_exponent; ++i) {
        const int p = static_cast<int>((i + 1) * vn - 1);

        // Exact antiderivatives of base(u) * u^p per segment, accumulated
        // from the outermost shell inward.
        std::vector<Polynomial> anti(static_cast<std::size_t>(n_seg));
        std::vector<double> tail_beyond(static_cast<std::size_t>(n_seg) + 1, 0.0);
        for (int s = n_seg - 1; s >= 0; --s) {
            anti[static_cast<std::size_t>(s)] = base.segment_polynomial(s).times_monomial(p).antiderivative();
            const Polynomial& A = anti[static_cast<std::size_t>(s)];
            tail_beyond[static_cast<std::size_t>(s)] =
                tail_beyond[static_cast<std::size_t>(s) + 1] + A(base.segment_hi(s)) - A(base.segment_lo(s));
        }
        auto exact = [&](int s, double u) {
            const Polynomial& A = anti[static_cast<std::size_t>(s)];
            return vnd * (A(base.segment_hi(s)) - A(u) + tail_beyond[static_cast<std::size_t>(s) + 1]);
        };

        std::vector<InterpSegment> segs;
        for (int s = 0; s < n_seg; ++s) {
            const double r_lo = s == 0 ? 0.0 : std::pow(base.segment_lo(s), vnd);
            const double r_hi = std::pow(base.segment_hi(s), vnd);
            int n_intervals = 8;
            InterpSegment seg;
            while (true) {
                seg.x.assign(static_cast<std::size_t>(n_intervals) + 1, 0.0);
                seg.y.assign(static_cast<std::size_t>(n_intervals) + 1, 0.0);
                for (int j = 0; j <= n_intervals; ++j) {
                    const double r = r_lo + (r_hi - r_lo) * j / n_intervals;
                    seg.x[static_cast<std::size_t>(j)] = r;
                    seg.y[static_cast<std::size_t>(j)] = exact(s, std::pow(r, 1.0 / vnd));
                }
                seg.d = pchip_slopes(seg.x, seg.y);
                double err = 0.0;
                for (int j = 0; j < n_intervals; ++j) {
                    const double rm = 0.5 * (seg.x[static_cast<std::size_t>(j)] + seg.x[static_cast<std::size_t>(j) + 1]);
                    err = std::max(err, std::abs(hermite_eval(seg, static_cast<std::size_t>(j), rm) -
                                                 exact(s, std::pow(rm, 1.0 / vnd))));
                }
                if (err < tol || n_intervals >= 2048) break;
                n_intervals *= 2;
            }
            segs.push_back(std::move(seg));
        }
        tables.push_back(std::move(segs));
    }
    const int exact_zeros =
        base.level() >= 0 && base.level() % vn == 0 ? static_cast<int>(base.level() / vn) : 0;
    return TailMomentTable(vn, t0, support_w, std::move(tables), exact_zeros);
}

}  // namespace taylorlab::kernel
