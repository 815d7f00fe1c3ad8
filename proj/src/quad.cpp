#include "taylorlab/quad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace taylorlab::quad {

namespace {

// Gauss-Kronrod 7-15 pair; abscissae and weights as in QUADPACK's dqk15.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
    double a, b;
    double value;
    double error;
    bool operator<(const Interval& o) const { return error < o.error; }
};

Interval gk15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(center - half * kXgk[i]);
        fv[14 - i] = f(center + half * kXgk[i]);
    }
    fv[7] = f(center);

    double resk = kWgk[7] * fv[7];
    double resg = kWg[3] * fv[7];
    double resabs = kWgk[7] * std::abs(fv[7]);
    for (int i = 0; i < 7; ++i) {
        const double pair = fv[i] + fv[14 - i];
        resk += kWgk[i] * pair;
        resabs += kWgk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
        if (i % 2 == 1) resg += kWg[i / 2] * pair;
    }
    const double mean = 0.5 * resk;
    double resasc = kWgk[7] * std::abs(fv[7] - mean);
    for (int i = 0; i < 7; ++i)
        resasc += kWgk[i] * (std::abs(fv[i] - mean) + std::abs(fv[14 - i] - mean));

    resk *= half;
    resg *= half;
    resabs *= half;
    resasc *= half;
    double err = std::abs(resk - resg);
    if (resasc != 0.0 && err != 0.0)
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    const double eps50 = 50.0 * std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / eps50) err = std::max(err, eps50 * resabs);
    return Interval{a, b, resk, err};
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, double rel_tol, const QuadOptions& opts) {
    if (!(a < b)) throw std::invalid_argument("integrate: requires a < b");
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
        throw std::invalid_argument("integrate: tolerances must be positive");

    std::vector<double> edges{a};
    for (double p : opts.breakpoints)
        if (p > a && p < b) edges.push_back(p);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::priority_queue<Interval> heap;
    QuadResult res;
    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        Interval iv = gk15(f, edges[i], edges[i + 1]);
        res.evaluations += 15;
        total += iv.value;
        total_err += iv.error;
        heap.push(iv);
    }

    int n_intervals = static_cast<int>(edges.size()) - 1;
    auto tolerance = [&] { return std::max(abs_tol, rel_tol * std::abs(total)); };
    while (total_err > tolerance() && n_intervals < opts.max_intervals) {
        Interval worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {  // interval at rounding limit
            heap.push(Interval{worst.a, worst.b, worst.value, 0.0});
            total_err -= worst.error;
            continue;
        }
        Interval left = gk15(f, worst.a, mid);
        Interval right = gk15(f, mid, worst.b);
        res.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++n_intervals;
    }

    res.value = total;
    res.error_estimate = total_err;
    res.converged = total_err <= tolerance();
    return res;
}

QuadResult integrate_compact(const std::function<double(double)>& f, double support_radius,
                             double abs_tol, double rel_tol, const QuadOptions& opts) {
    if (!(support_radius > 0.0)) throw std::invalid_argument("integrate_compact: support radius must be positive");
    return integrate(f, -support_radius, support_radius, abs_tol, rel_tol, opts);
}

QuadResult integrate_decaying(const std::function<double(double)>& f, double center, double scale,
                              double abs_tol, double rel_tol, double width, const QuadOptions& opts) {
    if (!(scale > 0.0)) throw std::invalid_argument("integrate_decaying: scale must be positive");
    if (!(width > 0.0)) throw std::invalid_argument("integrate_decaying: width must be positive");
    return integrate(f, center - width * scale, center + width * scale, abs_tol, rel_tol, opts);
}

}  // namespace taylorlab::quad
