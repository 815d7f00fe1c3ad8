#include "taylorlab/detect.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace taylorlab::detect {

std::vector<Maximum> find_maxima(const std::vector<double>& row, const std::vector<double>& s_axis) {
    if (row.size() != s_axis.size())
        throw std::invalid_argument("find_maxima: row and axis sizes differ");
    if (row.size() < 3) throw std::invalid_argument("find_maxima: need at least 3 samples");

    std::vector<Maximum> out;
    const int n = static_cast<int>(row.size());
    int i = 1;
    while (i < n - 1) {
        // Plateau run [i, j] of equal values.
        int j = i;
        while (j + 1 < n - 1 && row[static_cast<std::size_t>(j + 1)] == row[static_cast<std::size_t>(i)]) ++j;
        const double left = row[static_cast<std::size_t>(i - 1)];
        const double right = row[static_cast<std::size_t>(j + 1)];
        const double v = row[static_cast<std::size_t>(i)];
        if (v > left && v > right) {
            Maximum m;
            m.magnitude = v;
            if (j > i) {
                m.index = (i + j) / 2;
                m.s = 0.5 * (s_axis[static_cast<std::size_t>(i)] + s_axis[static_cast<std::size_t>(j)]);
            } else {
                m.index = i;
                // Parabola through the three samples; the offset stays below
                // half a cell because the center strictly dominates.
                const double denom = left - 2.0 * v + right;
                double offset = 0.0;
                if (denom < 0.0) offset = 0.5 * (left - right) / denom;
                const double h = i + 1 < n ? s_axis[static_cast<std::size_t>(i + 1)] - s_axis[static_cast<std::size_t>(i)]
                                           : s_axis[static_cast<std::size_t>(i)] - s_axis[static_cast<std::size_t>(i - 1)];
                m.s = s_axis[static_cast<std::size_t>(i)] + offset * h;
            }
            out.push_back(m);
        }
        i = j + 1;
    }
    std::sort(out.begin(), out.end(),
              [](const Maximum& a, const Maximum& b) { return a.magnitude > b.magnitude; });
    return out;
}

transform::TransformField normalize_per_scale(const transform::TransformField& field) {
    if (field.normalized) throw std::invalid_argument("normalize_per_scale: field already normalized");
    transform::TransformField out = field;
    for (Eigen::Index r = 0; r < out.values.rows(); ++r) {
        const double m = out.values.row(r).cwiseAbs().maxCoeff();
        if (m > 0.0) out.values.row(r) /= m;
    }
    out.normalized = true;
    return out;
}

std::vector<MaximaPath> track_paths(const transform::TransformField& field, double match_radius,
                                    double quality_lambda) {
    if (!field.normalized) throw std::invalid_argument("track_paths: field must be normalized");
    if (!(match_radius > 0.0)) throw std::invalid_argument("track_paths: match radius must be positive");

    struct OpenPath {
        std::vector<PathEntry> entries;
        int last_row = -1;
    };
    std::vector<OpenPath> open;

    const int rows = static_cast<int>(field.values.rows());
    for (int r = 0; r < rows; ++r) {
        std::vector<double> row(field.s_axis.size());
        for (std::size_t c = 0; c < row.size(); ++c)
            row[c] = field.values(r, static_cast<Eigen::Index>(c));
        std::vector<Maximum> maxima;
        if (row.size() >= 3) maxima = find_maxima(row, field.s_axis);

        std::vector<bool> extended(open.size(), false);
        for (const Maximum& m : maxima) {
            int best = -1;
            double best_dist = match_radius;
            for (std::size_t p = 0; p < open.size(); ++p) {
                if (extended[p] || open[p].last_row != r - 1) continue;
                const double dist = std::abs(open[p].entries.back().s - m.s);
                if (dist <= best_dist) {
                    best_dist = dist;
                    best = static_cast<int>(p);
                }
            }
            PathEntry entry{field.a_axis[static_cast<std::size_t>(r)], m.s, m.magnitude, r, m.index};
            if (best >= 0) {
                open[static_cast<std::size_t>(best)].entries.push_back(entry);
                open[static_cast<std::size_t>(best)].last_row = r;
                extended[static_cast<std::size_t>(best)] = true;
            } else {
                open.push_back(OpenPath{{entry}, r});
                extended.push_back(true);
            }
        }
    }

    std::vector<MaximaPath> paths;
    for (auto& p : open) {
        if (p.entries.size() < 3) continue;
        MaximaPath path;
        path.entries = std::move(p.entries);
        path.terminal_estimate = path.entries.back().s;
        double variation = 0.0;
        for (std::size_t k = 1; k < path.entries.size(); ++k)
            variation += std::abs(path.entries[k].s - path.entries[k - 1].s);
        const double cell = field.s_axis.size() > 1
                                ? std::abs(field.s_axis[1] - field.s_axis[0])
                                : 1.0;
        path.quality = static_cast<double>(path.entries.size()) - quality_lambda * variation / cell;
        paths.push_back(std::move(path));
    }
    std::sort(paths.begin(), paths.end(),
              [](const MaximaPath& a, const MaximaPath& b) { return a.quality > b.quality; });
    return paths;
}

DecayEstimate estimate_decay(const std::vector<double>& a_values,
                             const std::vector<double>& magnitudes, int k_finest) {
    if (a_values.size() != magnitudes.size())
        throw std::invalid_argument("estimate_decay: size mismatch");
    const int n_total = static_cast<int>(a_values.size());
    const int n = std::min(k_finest, n_total);
    if (n < 4) throw std::invalid_argument("estimate_decay: need at least 4 scale samples");

    // a values arrive coarse-to-fine; use the finest n.
    Eigen::MatrixXd X(n, 2);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        const std::size_t idx = static_cast<std::size_t>(n_total - n + i);
        X(i, 0) = std::log2(a_values[idx]);
        X(i, 1) = 1.0;
        y(i) = std::log2(std::max(std::abs(magnitudes[idx]), 1e-300));
    }
    const Eigen::Vector2d beta = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    DecayEstimate d;
    d.slope = beta(0);
    d.intercept = beta(1);
    d.residual = std::sqrt((X * beta - y).squaredNorm() / n);
    d.points_used = n;
    return d;
}

DecayEstimate estimate_decay(const transform::TransformField& field, int column, int k_finest) {
    if (column < 0 || column >= field.values.cols())
        throw std::invalid_argument("estimate_decay: column out of range");
    std::vector<double> mags(static_cast<std::size_t>(field.values.rows()));
    for (Eigen::Index r = 0; r < field.values.rows(); ++r)
        mags[static_cast<std::size_t>(r)] = field.values(r, column);
    return estimate_decay(field.a_axis, mags, k_finest);
}

namespace {

// Mirror partner of the winning path's terminal maximum within its own row:
// the strongest other maximum of comparable magnitude within the separation
// window. Returns the refined midpoint, or nullopt when no partner qualifies.
std::optional<double> twin_midpoint(const transform::TransformField& normalized,
                                    const PathEntry& terminal, double cell,
                                    const DetectOptions& opts) {
    std::vector<double> row(normalized.s_axis.size());
    for (std::size_t c = 0; c < row.size(); ++c)
        row[c] = normalized.values(terminal.row, static_cast<Eigen::Index>(c));
    if (row.size() < 3) return std::nullopt;
    const std::vector<Maximum> maxima = find_maxima(row, normalized.s_axis);
    const Maximum* self = nullptr;
    for (const Maximum& m : maxima)
        if (m.index == terminal.col) self = &m;
    if (!self || self->magnitude <= 0.0) return std::nullopt;
    for (const Maximum& m : maxima) {  // sorted by descending magnitude
        if (m.index == self->index) continue;
        const double sep = std::abs(m.s - self->s);
        if (sep < 0.5 * cell || sep > opts.twin_max_separation_cells * cell) continue;
        if (m.magnitude <= 0.0) continue;
        const double ratio = self->magnitude / m.magnitude;
        if (ratio > opts.twin_mag_ratio || ratio < 1.0 / opts.twin_mag_ratio) continue;
        return 0.5 * (self->s + m.s);
    }
    return std::nullopt;
}

}  // namespace

CoefficientReport detect_coefficients(const transform::Taylorlet& tau,
                                      const transform::SignalModel& f, double t, int order,
                                      const std::vector<double>& alpha_schedule,
                                      const DetectOptions& opts) {
    if (order != tau.order)
        throw std::invalid_argument("detect_coefficients: order must match the taylorlet order");
    if (alpha_schedule.size() != static_cast<std::size_t>(order) + 1)
        throw std::invalid_argument("detect_coefficients: alpha schedule needs order+1 entries");

    CoefficientReport report;
    report.order = order;
    report.alpha_schedule = alpha_schedule;

    Eigen::VectorXd s = Eigen::VectorXd::Zero(order + 1);
    const double cell = opts.sweep.count > 1
                            ? (opts.sweep.max - opts.sweep.min) / (opts.sweep.count - 1)
                            : 1.0;

    for (int stage = 0; stage <= order; ++stage) {
        const double alpha = alpha_schedule[static_cast<std::size_t>(stage)];
        if (stage == 0) {
            if (!(alpha > 1.0))
                report.warnings.push_back("stage 0 alpha outside (1, inf): " + std::to_string(alpha));
        } else {
            const double lo = 1.0 / (stage + 1), hi = 1.0 / stage;
            if (!(alpha > lo && alpha < hi))
                report.warnings.push_back("stage " + std::to_string(stage) + " alpha outside (" +
                                          std::to_string(lo) + ", " + std::to_string(hi) +
                                          "): " + std::to_string(alpha));
        }

        transform::GridOptions gopts;
        gopts.tol = opts.tol;
        gopts.threads = opts.threads;
        transform::TransformField raw =
            transform_grid(tau, f, alpha, stage, opts.sweep, opts.scales, s, t, gopts);
        transform::TransformField normalized = normalize_per_scale(raw);
        std::vector<MaximaPath> paths = track_paths(normalized, opts.match_radius_cells * cell,
                                                    opts.quality_lambda);
        if (paths.empty()) {
            report.failed_stage = stage;
            report.failure_field = std::move(raw);
            return report;
        }
        // Prefer the best-quality path that survives to the finest scale with
        // a dominant terminal maximum; a stale terminal from a coarser scale
        // carries the full ridge offset, and a long-lived but faint sidelobe
        // must not outrank the modulus ridge.
        const int final_row = static_cast<int>(raw.values.rows()) - 1;
        const MaximaPath* chosen = nullptr;
        for (const MaximaPath& p : paths) {
            if (p.entries.back().row == final_row && p.entries.back().magnitude >= 0.2) {
                chosen = &p;
                break;
            }
        }
        if (!chosen) {
            for (const MaximaPath& p : paths) {
                if (p.entries.back().row == final_row) {
                    chosen = &p;
                    break;
                }
            }
        }
        const MaximaPath& best = chosen ? *chosen : paths.front();

        StageResult sr;
        sr.stage = stage;
        sr.alpha = alpha;
        sr.estimate = best.terminal_estimate;
        sr.path_quality = best.quality;
        sr.paths_found = static_cast<int>(paths.size());
        if (auto mid = twin_midpoint(normalized, best.entries.back(), cell, opts)) {
            sr.estimate = *mid;
            sr.twin_paired = true;
        }
        {
            std::vector<double> as, mags;
            for (const PathEntry& e : best.entries) {
                as.push_back(e.a);
                mags.push_back(raw.values(e.row, e.col));
            }
            if (static_cast<int>(as.size()) >= 4)
                sr.decay = estimate_decay(as, mags, opts.k_finest);
        }
        s[stage] = sr.estimate;
        report.estimates.push_back(sr.estimate);
        report.stages.push_back(sr);
    }
    return report;
}

void write_report_kv(std::ostream& os, const CoefficientReport& report) {
    os << std::setprecision(12);
    os << "order " << report.order << "\n";
    for (const StageResult& sr : report.stages) {
        os << "s" << sr.stage << " " << sr.estimate << "\n";
        os << "s" << sr.stage << ".alpha " << sr.alpha << "\n";
        os << "s" << sr.stage << ".slope " << sr.decay.slope << "\n";
        os << "s" << sr.stage << ".excess_slope " << excess_decay(sr.decay, sr.alpha) << "\n";
        os << "s" << sr.stage << ".residual " << sr.decay.residual << "\n";
        os << "s" << sr.stage << ".quality " << sr.path_quality << "\n";
        os << "s" << sr.stage << ".paths " << sr.paths_found << "\n";
        os << "s" << sr.stage << ".twin_paired " << (sr.twin_paired ? 1 : 0) << "\n";
    }
    for (const std::string& w : report.warnings) os << "warning " << w << "\n";
    if (report.failed_stage) os << "failed_stage " << *report.failed_stage << "\n";
}

void write_report_csv(std::ostream& os, const CoefficientReport& report) {
    os << std::setprecision(17);
    os << "stage,alpha,estimate,slope,excess_slope,residual,quality\n";
    for (const StageResult& sr : report.stages)
        os << sr.stage << ',' << sr.alpha << ',' << sr.estimate << ',' << sr.decay.slope << ','
           << excess_decay(sr.decay, sr.alpha) << ',' << sr.decay.residual << ',' << sr.path_quality
           << "\n";
}

}  // namespace taylorlab::detect
