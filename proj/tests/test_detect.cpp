#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "taylorlab/detect.hpp"
#include "taylorlab/kernel.hpp"

using namespace taylorlab;
using detect::MaximaPath;

namespace {

transform::TransformField synthetic_field(int rows, int cols, double s_min, double s_max,
                                          const std::function<double(double, double)>& value) {
    transform::TransformField field;
    field.s_axis = transform::AxisSpec{s_min, s_max, cols}.values();
    field.a_axis = transform::ScaleSpec{1.0, 8.0, rows}.scales();
    field.swept_index = 0;
    field.fixed_s = Eigen::VectorXd::Zero(3);
    field.values.resize(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            field.values(r, c) = value(field.a_axis[static_cast<std::size_t>(r)],
                                       field.s_axis[static_cast<std::size_t>(c)]);
    return field;
}

}  // namespace

TEST_CASE("per-scale normalization") {
    auto field = synthetic_field(3, 3, -1, 1, [](double, double) { return 0.0; });
    field.values << 2, 4, 8, 0, 0, 0, 0.25, 1.0, 0.5;
    auto n = detect::normalize_per_scale(field);
    CHECK(n.values(0, 0) == doctest::Approx(0.25));
    CHECK(n.values(0, 1) == doctest::Approx(0.5));
    CHECK(n.values(0, 2) == doctest::Approx(1.0));
    CHECK(n.values.row(1).cwiseAbs().maxCoeff() == 0.0);  // all-zero row unchanged
    CHECK(n.values(2, 1) == doctest::Approx(1.0));        // already-max-1 row identical
    CHECK(n.values(2, 0) == doctest::Approx(0.25));
    CHECK(n.normalized);
    CHECK_THROWS_AS(detect::normalize_per_scale(n), std::invalid_argument);
    // argmax locations survive normalization
    for (int r = 0; r < 3; ++r) {
        Eigen::Index before, after;
        field.values.row(r).maxCoeff(&before);
        n.values.row(r).maxCoeff(&after);
        CHECK(before == after);
    }
}

TEST_CASE("find_maxima") {
    const std::vector<double> axis{0, 1, 2, 3, 4, 5, 6};
    SUBCASE("single bump") {
        auto m = detect::find_maxima({0, 1, 4, 9, 4, 1, 0}, axis);
        REQUIRE(m.size() == 1);
        CHECK(m[0].index == 3);
        CHECK(m[0].s == doctest::Approx(3.0));
    }
    SUBCASE("double bump sorted by magnitude") {
        auto m = detect::find_maxima({0, 5, 0, 0, 7, 0, 0}, axis);
        REQUIRE(m.size() == 2);
        CHECK(m[0].index == 4);
        CHECK(m[1].index == 1);
    }
    SUBCASE("monotone row has no interior maxima") {
        CHECK(detect::find_maxima({0, 1, 2, 3, 4, 5, 6}, axis).empty());
    }
    SUBCASE("plateau reports its center") {
        auto m = detect::find_maxima({0, 1, 3, 3, 3, 1, 0}, axis);
        REQUIRE(m.size() == 1);
        CHECK(m[0].s == doctest::Approx(3.0));
    }
    SUBCASE("parabolic refinement stays within one cell and nails parabolas") {
        // samples of -(s - 2.3)^2: refined location should be ~exact
        std::vector<double> row;
        for (double s : axis) row.push_back(10.0 - (s - 2.3) * (s - 2.3));
        auto m = detect::find_maxima(row, axis);
        REQUIRE(m.size() == 1);
        CHECK(m[0].s == doctest::Approx(2.3).epsilon(1e-12));
        CHECK(std::abs(m[0].s - axis[static_cast<std::size_t>(m[0].index)]) <= 0.5);
    }
    CHECK_THROWS_AS(detect::find_maxima({1, 2}, {0, 1}), std::invalid_argument);
}

TEST_CASE("track_paths") {
    SUBCASE("single stable ridge") {
        auto field = synthetic_field(12, 21, -2, 2, [](double, double s) {
            return std::exp(-20.0 * (s - 0.4) * (s - 0.4));
        });
        field.normalized = true;
        auto paths = detect::track_paths(field, 0.6);
        REQUIRE(paths.size() == 1);
        CHECK(paths[0].entries.size() == 12);
        CHECK(paths[0].terminal_estimate == doctest::Approx(0.4).epsilon(0.01));
    }
    SUBCASE("empty field yields no paths") {
        auto field = synthetic_field(6, 9, -1, 1, [](double, double) { return 0.0; });
        field.normalized = true;
        CHECK(detect::track_paths(field, 0.5).empty());
    }
    SUBCASE("two separated ridges stay disjoint") {
        auto field = synthetic_field(10, 41, -2, 2, [](double, double s) {
            return std::exp(-30.0 * (s - 1.0) * (s - 1.0)) + std::exp(-30.0 * (s + 1.0) * (s + 1.0));
        });
        field.normalized = true;
        auto paths = detect::track_paths(field, 0.3);
        REQUIRE(paths.size() == 2);
        const double t0 = paths[0].terminal_estimate, t1 = paths[1].terminal_estimate;
        CHECK(std::abs(std::abs(t0) - 1.0) < 0.05);
        CHECK(std::abs(std::abs(t1) - 1.0) < 0.05);
        CHECK(t0 * t1 < 0.0);
    }
    SUBCASE("requires a normalized field") {
        auto field = synthetic_field(6, 9, -1, 1, [](double, double) { return 1.0; });
        CHECK_THROWS_AS(detect::track_paths(field, 0.5), std::invalid_argument);
    }
}

TEST_CASE("estimate_decay") {
    std::vector<double> a, mags;
    for (int e = 1; e <= 8; ++e) {
        const double av = std::exp2(-e);
        a.push_back(av);
        mags.push_back(3.0 * av * av);
    }
    SUBCASE("exact power law") {
        auto d = detect::estimate_decay(a, mags, 6);
        CHECK(d.slope == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(d.residual < 1e-9);
        CHECK(d.points_used == 6);
    }
    SUBCASE("constant magnitudes") {
        std::vector<double> flat(a.size(), 0.7);
        auto d = detect::estimate_decay(a, flat, 6);
        CHECK(d.slope == doctest::Approx(0.0).scale(1.0));
    }
    SUBCASE("too few points") {
        CHECK_THROWS_AS(detect::estimate_decay({0.5, 0.25, 0.125}, {1, 1, 1}, 6),
                        std::invalid_argument);
    }
    SUBCASE("zeros are floored, not fatal") {
        std::vector<double> zeros(a.size(), 0.0);
        auto d = detect::estimate_decay(a, zeros, 6);
        CHECK(d.slope == doctest::Approx(0.0).scale(1.0));
    }
}

TEST_CASE("synthetic power-law field recovery") {
    const double s_true = 0.37, p = 1.6;
    auto field = synthetic_field(16, 33, -2, 2, [&](double a, double s) {
        return 2.0 * std::pow(a, p) * std::exp(-8.0 * (s - s_true) * (s - s_true));
    });
    auto normalized = detect::normalize_per_scale(field);
    auto paths = detect::track_paths(normalized, 3.0 * 0.125);
    REQUIRE_FALSE(paths.empty());
    const double cell = field.s_axis[1] - field.s_axis[0];
    CHECK(std::abs(paths[0].terminal_estimate - s_true) <= 0.5 * cell);

    // decay read off the raw field along the ridge
    std::vector<double> as, mags;
    for (const auto& e : paths[0].entries) {
        as.push_back(e.a);
        mags.push_back(field.values(e.row, e.col));
    }
    auto d = detect::estimate_decay(as, mags, 6);
    CHECK(d.slope == doctest::Approx(p).epsilon(1e-6));
}

TEST_CASE("coefficient detection on a constant boundary") {
    kernel::KernelSpec spec;  // defaults: steps 10, order 2, M 5
    const auto tau = transform::make_taylorlet(spec, 0, 1e-9);
    detect::DetectOptions opts;
    opts.sweep = {-2.0, 2.0, 64};
    opts.scales = {1.0, 8.0, 32};
    opts.threads = 0;
    const double cell = (opts.sweep.max - opts.sweep.min) / (opts.sweep.count - 1);

    SUBCASE("recovers the boundary location and zero slope") {
        auto f = transform::half_space_signal([](double) { return 0.5; });
        auto report = detect::detect_coefficients(tau, f, 0.0, 2, {1.01, 0.51, 0.34}, opts);
        REQUIRE_FALSE(report.failed_stage.has_value());
        REQUIRE(report.estimates.size() == 3);
        CHECK(std::abs(report.estimates[0] - 0.5) <= 1.5 * cell);
        CHECK(std::abs(report.estimates[1]) <= 2.0 * cell);
        CHECK(report.warnings.empty());
        CHECK(report.stages[0].decay.points_used >= 4);
    }
    SUBCASE("boundary outside every kernel reach fails at stage 0") {
        auto f = transform::half_space_signal([](double) { return 1e7; });
        auto report = detect::detect_coefficients(tau, f, 0.0, 2, {1.01, 0.51, 0.34}, opts);
        REQUIRE(report.failed_stage.has_value());
        CHECK(*report.failed_stage == 0);
        CHECK(report.failure_field.has_value());
        CHECK(report.failure_field->values.maxCoeff() == 0.0);
    }
    SUBCASE("out-of-regime alpha produces a warning, not an error") {
        auto f = transform::half_space_signal([](double) { return 0.5; });
        detect::DetectOptions quick = opts;
        quick.scales = {1.0, 6.0, 12};
        auto report = detect::detect_coefficients(tau, f, 0.0, 2, {0.9, 0.51, 0.34}, quick);
        CHECK_FALSE(report.warnings.empty());
    }
    SUBCASE("schedule length must match the order") {
        auto f = transform::half_space_signal([](double) { return 0.5; });
        CHECK_THROWS_AS(detect::detect_coefficients(tau, f, 0.0, 2, {1.01, 0.51}, opts),
                        std::invalid_argument);
    }
}

TEST_CASE("report serialization") {
    detect::CoefficientReport report;
    report.order = 1;
    report.estimates = {0.5, 1.0};
    detect::StageResult s0;
    s0.stage = 0;
    s0.alpha = 1.01;
    s0.estimate = 0.5;
    s0.decay.slope = 2.0;
    report.stages.push_back(s0);
    std::ostringstream kv, csv;
    detect::write_report_kv(kv, report);
    detect::write_report_csv(csv, report);
    CHECK(kv.str().find("s0 0.5") != std::string::npos);
    CHECK(kv.str().find("s0.slope 2") != std::string::npos);
    CHECK(csv.str().find("stage,alpha,estimate") != std::string::npos);
}
