#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "taylorlab/transform.hpp"

namespace taylorlab::detect {

struct Maximum {
    double s = 0.0;          // sub-grid refined location
    double magnitude = 0.0;  // row value at the discrete argmax
    int index = 0;           // discrete argmax column
};

/// Interior strict local maxima of a row with 3-point parabolic refinement;
/// plateaus report their center. Sorted by descending magnitude.
std::vector<Maximum> find_maxima(const std::vector<double>& row, const std::vector<double>& s_axis);

/// Each row divided by its maximum magnitude; all-zero rows stay zero.
transform::TransformField normalize_per_scale(const transform::TransformField& field);

struct PathEntry {
    double a = 0.0;
    double s = 0.0;
    double magnitude = 0.0;  // normalized row value
    int row = 0;
    int col = 0;
};

struct MaximaPath {
    std::vector<PathEntry> entries;  // sorted by descending a
    double terminal_estimate = 0.0;  // s at the finest scale reached
    double quality = 0.0;            // length minus penalized total s variation
};

/// Greedy nearest-neighbor linkage of per-scale maxima across consecutive
/// scales within match_radius (in s units); unmatched maxima start new paths;
/// paths shorter than 3 scales are dropped.
std::vector<MaximaPath> track_paths(const transform::TransformField& field, double match_radius,
                                    double quality_lambda = 0.1);

struct DecayEstimate {
    double slope = 0.0;      // d log2|T| / d log2 a over the finest scales
    double intercept = 0.0;
    double residual = 0.0;   // root-mean-square fit residual
    int points_used = 0;
};

/// Least-squares slope of log2 magnitude against log2 a over the finest
/// k_finest scales; requires at least 4 usable points. Magnitudes are floored
/// at 1e-300 before taking logs.
DecayEstimate estimate_decay(const std::vector<double>& a_values,
                             const std::vector<double>& magnitudes, int k_finest);
DecayEstimate estimate_decay(const transform::TransformField& field, int column, int k_finest);

/// Slope in excess of the kinematic envelope a^{1+alpha} that window volume
/// and boundary-layer thickness contribute at every parameter point; the
/// moment structure of the kernel is what drives this part.
inline double excess_decay(const DecayEstimate& d, double alpha) { return d.slope - (1.0 + alpha); }

struct StageResult {
    int stage = 0;
    double alpha = 0.0;
    double estimate = 0.0;
    DecayEstimate decay;       // raw magnitudes along the winning path
    double path_quality = 0.0;
    int paths_found = 0;
    bool twin_paired = false;  // estimate is the midpoint of a mirror pair
};

struct CoefficientReport {
    int order = 0;
    std::vector<double> estimates;  // s_0..s_n as far as stages succeeded
    std::vector<StageResult> stages;
    std::vector<double> alpha_schedule;
    std::vector<std::string> warnings;
    std::optional<int> failed_stage;
    std::optional<transform::TransformField> failure_field;
};

struct DetectOptions {
    transform::AxisSpec sweep{-2.0, 2.0, 64};
    transform::ScaleSpec scales{1.0, 8.0, 64};
    double tol = 1e-9;
    double match_radius_cells = 3.0;
    int k_finest = 6;
    double quality_lambda = 0.1;
    int threads = 0;
    // Mirror-twin pairing: the transform modulus is extremal on a symmetric
    // ridge pair straddling the true coefficient (the signed response changes
    // sign there), so the stage estimate pairs the winning terminal maximum
    // with a comparable mirror maximum in the same row and reports the
    // midpoint. Guards keep genuinely distinct singularities apart.
    double twin_mag_ratio = 2.5;             // magnitude ratio allowed within a pair
    double twin_max_separation_cells = 16.0;
};

/// Sequential Taylor-coefficient search: stage k sweeps s_k with s_0..s_{k-1}
/// fixed at earlier estimates and the higher shears at 0, normalizes the
/// field per scale, tracks maxima paths and adopts the best path's terminal
/// location. Stage k expects alpha_schedule[k] in the regime (1, inf) for
/// k = 0 and (1/(k+1), 1/k) beyond; violations are recorded as warnings.
CoefficientReport detect_coefficients(const transform::Taylorlet& tau,
                                      const transform::SignalModel& f, double t, int order,
                                      const std::vector<double>& alpha_schedule,
                                      const DetectOptions& opts = {});

/// Flat key-value block (stdout friendly).
void write_report_kv(std::ostream& os, const CoefficientReport& report);
/// CSV rows: stage, alpha, estimate, slope, excess_slope, residual, quality.
void write_report_csv(std::ostream& os, const CoefficientReport& report);

}  // namespace taylorlab::detect
