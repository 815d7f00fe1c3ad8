#pragma once

#include <vector>

#include "taylorlab/polynomial.hpp"

namespace taylorlab::kernel {

// Moment kernels are finite (or truncated) series of dilates of one bump
// phi_0: k(x) = sum_l c_l * phi_0(x / q^l). Every dilate is 1 on the shells
// it covers entirely, a bridge polynomial on its outermost shell and 0
// beyond, so on the shell eps*q^l < |x| <= eps*q^{l+1} the series collapses
// to c_l * bridge(|x|/q^l) + sum_{k>l} c_k. Evaluation is therefore exact
// piecewise-polynomial arithmetic; no sampling is involved.

struct KernelSpec {
    double q = 2.0;       // dilation base, > 1
    double eps = 0.25;    // plateau half-width
    int smoothness = 1;   // derivatives matched by the bridge at both ends
    int steps = 10;       // recursion depth = vanishing moments of the base kernel
    int order = 2;        // moment order n served by the root composition
    int moments = 5;      // M; steps = moments * root_exponent(order) for taylorlet use
    double t0 = 0.03125;  // restrictive shift, |t0| < eps^{v_n}

    void validate() const;  // throws std::invalid_argument on violation
};

/// lcm{1..order}; the root exponent that lets one kernel serve every
/// moment order k <= order at once.
long long root_exponent(int order);

/// Minimal-degree polynomial bridge on [eps, q*eps]: value 1 and `smoothness`
/// vanishing derivatives at eps, value 0 and the same derivative count at
/// q*eps (degree 2*smoothness + 1).
Polynomial hermite_bridge(double q, double eps, int smoothness);

class MomentKernel {
public:
    MomentKernel(double q, double eps, int smoothness, Polynomial bridge,
                 std::vector<double> dilate_coeffs, int level, bool is_limit, double plateau);

    double operator()(double x) const;

    double q() const { return q_; }
    double eps() const { return eps_; }
    int smoothness() const { return smoothness_; }
    const Polynomial& bridge() const { return bridge_; }
    const std::vector<double>& dilate_coeffs() const { return coeffs_; }

    /// Recursion depth for finite kernels; -1 for the truncated limit kernel.
    int level() const { return level_; }
    bool is_limit() const { return is_limit_; }

    double plateau_value() const { return plateau_; }
    double support_radius() const { return bounds_.back(); }

    // Piecewise description in the physical coordinate u >= 0. Segment 0 is
    // the plateau [0, eps]; segment s >= 1 is the shell
    // (eps*q^{s-1}, eps*q^s]. Beyond the last segment the kernel is 0.
    int num_segments() const { return static_cast<int>(bounds_.size()); }
    double segment_lo(int s) const { return s == 0 ? 0.0 : bounds_[static_cast<std::size_t>(s) - 1]; }
    double segment_hi(int s) const { return bounds_[static_cast<std::size_t>(s)]; }
    Polynomial segment_polynomial(int s) const;

private:
    double q_;
    double eps_;
    int smoothness_;
    Polynomial bridge_;
    std::vector<double> coeffs_;   // dilate series c_0..c_L
    int level_;
    bool is_limit_;
    double plateau_;
    std::vector<double> bounds_;   // eps * q^k for k = 0..L+1
    std::vector<double> suffix_;   // sum_{k > l} c_k (true tail for limit kernels)
    std::vector<double> powq_;     // q^l
};

/// phi_0: 1 on [-eps, eps], bridge on the first shell, 0 beyond.
MomentKernel build_bump(double q, double eps, int smoothness);

/// Applies the dilation recursion until the kernel has `target_level`
/// vanishing moments on each half-line.
MomentKernel recurse(const MomentKernel& k, int target_level);

/// Same kernel as recurse(build_bump(...), level), but with the dilate
/// coefficients produced directly from q-Pochhammer ratios.
MomentKernel explicit_kernel(const KernelSpec& spec, int level);

/// Truncated limit of the recursion: plateau equals the Euler function at
/// 1/q, shell coefficients are 1/(q;q)_l, and shells whose contribution is
/// below tol are dropped.
MomentKernel limit_kernel(const KernelSpec& spec, double tol);

/// x1-profile obtained by root composition: g(t) = base(|t - t0|^{1/vn}).
class RootKernel {
public:
    RootKernel(MomentKernel base, long long vn, double t0);

    double operator()(double t) const;

    const MomentKernel& base() const { return base_; }
    long long vn() const { return vn_; }
    double t0() const { return t0_; }
    double plateau_value() const { return base_.plateau_value(); }
    /// Support is [t0 - reach, t0 + reach] with reach = support_radius^vn.
    double reach() const { return reach_; }

private:
    MomentKernel base_;
    long long vn_;
    double t0_;
    double reach_;
};

/// Unshifted root composition; requires level divisible by root_exponent(order)
/// for finite kernels.
RootKernel compose_root(const MomentKernel& k, int order);

/// Shifted root composition g(t) = base(|t - t0|^{1/vn}) with the kernel at
/// level moments * vn. The shift moves the even plateau across 0, which turns
/// the vanishing half-line moments into int_0^inf g(t) t^m dt =
/// plateau * t0^{m+1} / (m+1) for m < moments.
RootKernel restrictive_kernel(const KernelSpec& spec);

/// One cubic-Hermite table per segment; x strictly increasing.
struct InterpSegment {
    std::vector<double> x, y, d;
};

/// Family of cumulative tail-moment tables
///   N_i(r) = vn * int_{r^{1/vn}}^inf base(u) * u^{(i+1)*vn - 1} du,
/// i = 0..max_exponent, tabulated on r in [0, support_radius^vn]. These are
/// even in w - t0 by construction; the signed cumulative moments of the
/// shifted root kernel are recovered by moment_integral.
class TailMomentTable {
public:
    /// exact_zero_moments: number of leading indices i for which N_i(0)
    /// vanishes analytically (i < M for a base kernel with M*vn moments);
    /// those are snapped to exact zeros so the far field stays exactly 0.
    TailMomentTable(long long vn, double t0, double support_w,
                    std::vector<std::vector<InterpSegment>> tables, int exact_zero_moments);

    long long vn() const { return vn_; }
    double t0() const { return t0_; }
    int max_exponent() const { return static_cast<int>(tables_.size()) - 1; }
    double support_w() const { return support_w_; }
    int exact_zero_moments() const { return exact_zero_moments_; }
    const std::vector<std::vector<InterpSegment>>& tables() const { return tables_; }

    /// N_i at offset r = |w - t0|; exactly 0 for r >= support_w.
    double partial(int i, double r) const;

    /// M_k(w) = int_w^inf t^k g(t) dt for the shifted root kernel.
    double moment_integral(int k, double w) const;

    /// int_R t^k g(t) dt (vanishes up to rounding for k < moments).
    double full_moment(int k) const;

    /// int_{-inf}^w t^k g(t) dt.
    double moment_below(int k, double w) const { return full_moment(k) - moment_integral(k, w); }

private:
    double partial_at_zero(int i) const;

    long long vn_;
    double t0_;
    double support_w_;
    std::vector<std::vector<InterpSegment>> tables_;
    int exact_zero_moments_;
};

/// Tabulates N_0..N_max_exponent for the given base kernel with interpolation
/// error below tol (estimated against the exact per-segment antiderivatives
/// on the halved grid).
TailMomentTable tabulate_tail_moments(const MomentKernel& base, long long vn, double t0,
                                      int max_exponent, double tol);

}  // namespace taylorlab::kernel
