// taylorlab: build moment kernels, check their vanishing moments, evaluate
// the taylorlet transform over scale/shear grids, run coefficient detection
// and render field heatmaps.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "taylorlab/detect.hpp"
#include "taylorlab/field_io.hpp"
#include "taylorlab/kernel_io.hpp"
#include "taylorlab/qcalc.hpp"
#include "taylorlab/quad.hpp"
#include "taylorlab/transform.hpp"

namespace {

using namespace taylorlab;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct KernelFlags {
    double q = 2.0;
    double eps = 0.25;
    int steps = 10;
    int order = 2;
    int moments = 5;
    double t0 = 0.03125;
    int smoothness = 1;
    int table_exponent = 0;
    bool steps_set = false;
    bool moments_set = false;
};

void add_kernel_flags(CLI::App* cmd, KernelFlags& kf) {
    cmd->add_option("--q", kf.q, "dilation base q (> 1)");
    cmd->add_option("--eps", kf.eps, "plateau half-width");
    auto* steps = cmd->add_option("--steps", kf.steps, "recursion depth (vanishing moments of the base kernel)");
    cmd->add_option("--order", kf.order, "moment order n");
    auto* moments = cmd->add_option("--moments", kf.moments, "moment count M (steps = M * lcm{1..n})");
    cmd->add_option("--t0", kf.t0, "restrictive shift (|t0| < eps^{v_n})");
    cmd->add_option("--smoothness", kf.smoothness, "bridge smoothness (derivatives matched at both ends)");
    cmd->add_option("--jmax", kf.table_exponent, "highest signal exponent the tail tables support");
    steps->each([&kf](const std::string&) { kf.steps_set = true; });
    moments->each([&kf](const std::string&) { kf.moments_set = true; });
}

kernel::KernelSpec spec_from_flags(const KernelFlags& kf) {
    kernel::KernelSpec spec;
    spec.q = kf.q;
    spec.eps = kf.eps;
    spec.order = kf.order;
    spec.smoothness = kf.smoothness;
    spec.t0 = kf.t0;
    const long long vn = kernel::root_exponent(kf.order);
    if (kf.moments_set && kf.steps_set) {
        if (static_cast<long long>(kf.steps) != vn * kf.moments)
            throw std::invalid_argument("--steps and --moments disagree: steps must equal moments * lcm{1..order}");
        spec.steps = kf.steps;
        spec.moments = kf.moments;
    } else if (kf.steps_set) {
        if (kf.steps % vn != 0)
            throw std::invalid_argument("--steps must be divisible by lcm{1..order} for taylorlet kernels");
        spec.steps = kf.steps;
        spec.moments = static_cast<int>(kf.steps / vn);
    } else if (kf.moments_set) {
        spec.moments = kf.moments;
        spec.steps = static_cast<int>(vn * kf.moments);
    } else {
        spec.steps = kf.steps;
        spec.moments = kf.moments;
    }
    return spec;
}

int env_threads() {
    if (const char* env = std::getenv("TAYLORLAB_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 0;
}

transform::AxisSpec parse_axis(const std::string& text) {
    transform::AxisSpec axis;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &axis.min, &axis.max, &axis.count) != 3)
        throw std::invalid_argument("axis spec must be min:max:count, got '" + text + "'");
    if (axis.count < 1) throw std::invalid_argument("axis count must be positive");
    return axis;
}

transform::ScaleSpec parse_scales(const std::string& text) {
    transform::ScaleSpec scales;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &scales.e_min, &scales.e_max, &scales.count) != 3)
        throw std::invalid_argument("scale spec must be e1:e2:count (a = 2^-e), got '" + text + "'");
    if (scales.count < 1) throw std::invalid_argument("scale count must be positive");
    return scales;
}

int parse_shear_index(const std::string& text, int order) {
    std::string t = text;
    if (!t.empty() && (t[0] == 's' || t[0] == 'S')) t = t.substr(1);
    try {
        const int idx = std::stoi(t);
        if (idx < 0 || idx > order) throw std::out_of_range("");
        return idx;
    } catch (...) {
        throw std::invalid_argument("sweep index must be s0..s" + std::to_string(order) + ", got '" + text + "'");
    }
}

Eigen::VectorXd parse_fixed_shears(const std::vector<std::string>& fixes, int order) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(order + 1);
    for (const std::string& fix : fixes) {
        const auto eq = fix.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--fix expects sK=value, got '" + fix + "'");
        const int idx = parse_shear_index(fix.substr(0, eq), order);
        s[idx] = std::stod(fix.substr(eq + 1));
    }
    return s;
}

transform::SignalModel parse_signal(const std::string& name, int side, int exponent) {
    if (name == "sin" || name == "exp" || name == "ball") {
        transform::SignalModel f = transform::builtin_signal(name);
        if (f.kind == transform::SignalKind::HalfSpace) {
            f.side = side;
            f.exponent = exponent;
        }
        return f;
    }
    if (name.rfind("const:", 0) == 0) {
        const double c = std::stod(name.substr(6));
        return transform::half_space_signal([c](double) { return c; }, side, exponent);
    }
    if (name.rfind("poly:", 0) == 0) {
        std::vector<double> coeffs;
        std::stringstream ss(name.substr(5));
        std::string item;
        while (std::getline(ss, item, ',')) coeffs.push_back(std::stod(item));
        if (coeffs.empty()) throw std::invalid_argument("poly: needs at least one coefficient");
        return transform::half_space_signal(
            [coeffs](double u) {
                double acc = 0.0;
                for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * u + coeffs[k];
                return acc;
            },
            side, exponent);
    }
    throw std::invalid_argument("unknown signal '" + name + "' (use sin, exp, ball, const:<v>, poly:<c0,c1,...>)");
}

kernel::KernelBundle obtain_bundle(const std::string& kernel_path, const KernelFlags& kf,
                                   int needed_exponent, double table_tol) {
    if (!kernel_path.empty()) {
        kernel::KernelBundle b = kernel::load_bundle_file(kernel_path);
        if (b.tables.max_exponent() < needed_exponent)
            throw std::invalid_argument("kernel file tables support exponents up to " +
                                        std::to_string(b.tables.max_exponent()) +
                                        "; rebuild with --jmax >= " + std::to_string(needed_exponent));
        return b;
    }
    kernel::KernelSpec spec = spec_from_flags(kf);
    return kernel::build_bundle(spec, std::max(kf.table_exponent, needed_exponent), table_tol);
}

transform::Taylorlet taylorlet_from_bundle(kernel::KernelBundle bundle) {
    return transform::make_taylorlet(std::move(bundle.g), std::move(bundle.tables),
                                     bundle.spec.order, bundle.spec.moments);
}

int cmd_kernel_build(const KernelFlags& kf, const std::string& out, double tol) {
    kernel::KernelSpec spec = spec_from_flags(kf);
    spec.validate();
    kernel::KernelBundle bundle = kernel::build_bundle(spec, kf.table_exponent, tol);
    kernel::save_bundle_file(out, bundle);
    std::cout << "kernel written to " << out << "\n"
              << "plateau value   " << bundle.base.plateau_value() << "\n"
              << "support radius  " << bundle.base.support_radius() << "\n"
              << "moment count    " << spec.steps << " (order " << spec.order << ", M = "
              << spec.moments << ")\n"
              << "t0              " << spec.t0 << "\n";
    return kExitOk;
}

int cmd_kernel_check(const std::string& kernel_path, int lmax, double tol) {
    kernel::KernelBundle bundle = kernel::load_bundle_file(kernel_path);
    const kernel::MomentKernel& base = bundle.base;
    const int level = base.level();
    if (lmax < 0) lmax = level;

    quad::QuadOptions opts;
    for (int s = 0; s < base.num_segments(); ++s) opts.breakpoints.push_back(base.segment_hi(s));

    std::cout << "moment check (base kernel, level " << level << ")\n";
    std::cout << "  l   half-line moment      relative      status\n";
    bool all_ok = true;
    for (int l = 0; l <= lmax; ++l) {
        auto mom = quad::integrate([&](double x) { return base(x) * std::pow(x, l); }, 0.0,
                                   base.support_radius(), 1e-300, 1e-11, opts);
        auto mass = quad::integrate([&](double x) { return std::abs(base(x)) * std::pow(x, l); },
                                    0.0, base.support_radius(), 1e-300, 1e-9, opts);
        const double rel = mass.value > 0.0 ? std::abs(mom.value) / mass.value : 0.0;
        const bool should_vanish = l < level;
        const bool ok = should_vanish ? rel <= tol : rel > 1e-6;
        all_ok = all_ok && ok;
        std::cout << "  " << l << "   " << mom.value << "   " << rel << "   "
                  << (should_vanish ? (ok ? "vanishes" : "FAIL") : (ok ? "nonzero (expected)" : "FAIL"))
                  << "\n";
    }

    kernel::KernelSpec spec = bundle.spec;
    const auto psi = kernel::limit_kernel(spec, 1e-12);
    double worst = 0.0;
    const double R = std::min(base.support_radius(), psi.support_radius());
    for (int i = 0; i <= 20000; ++i) {
        const double x = R * i / 20000.0;
        worst = std::max(worst, std::abs(psi(x) - base(x)));
    }
    const double bound = 5.0 * std::pow(spec.q, -(level + 1));
    std::cout << "limit approximation: max |psi - phi| = " << worst << ", bound " << bound << " -> "
              << (worst <= bound ? "PASS" : "FAIL") << "\n";
    all_ok = all_ok && worst <= bound;

    // restrictive half-line moment of the shifted kernel
    const auto& g = bundle.g;
    quad::QuadOptions gopts;
    for (int s = 0; s < base.num_segments(); ++s) {
        const double r = std::pow(base.segment_hi(s), static_cast<double>(g.vn()));
        gopts.breakpoints.push_back(g.t0() + r);
        gopts.breakpoints.push_back(g.t0() - r);
    }
    gopts.breakpoints.push_back(g.t0());
    auto m0 = quad::integrate([&](double t) { return g(t); }, 0.0, g.t0() + g.reach(), 1e-14, 1e-11,
                              gopts);
    const double expected = g.plateau_value() * g.t0();
    std::cout << "restrictive half-line moment m=0: " << m0.value << " vs c*t0 = " << expected
              << " -> "
              << (std::abs(m0.value - expected) <= 1e-7 * std::abs(expected) ? "PASS" : "FAIL")
              << "\n";
    all_ok = all_ok && std::abs(m0.value - expected) <= 1e-7 * std::abs(expected);

    return all_ok ? kExitOk : kExitNumeric;
}

int cmd_transform(const KernelFlags& kf, const std::string& kernel_path, const std::string& signal,
                  int side, int exponent, double alpha, const std::string& sweep,
                  const std::string& s_range, const std::string& a_range,
                  const std::vector<std::string>& fixes, double t, double tol, bool normalize,
                  const std::string& out, int threads) {
    kernel::KernelBundle bundle = obtain_bundle(kernel_path, kf, exponent, 1e-9);
    const int order = bundle.spec.order;
    transform::Taylorlet tau = taylorlet_from_bundle(std::move(bundle));
    transform::SignalModel f = parse_signal(signal, side, exponent);
    const int swept = parse_shear_index(sweep, order);
    transform::AxisSpec axis = parse_axis(s_range);
    transform::ScaleSpec scales = parse_scales(a_range);
    Eigen::VectorXd fixed = parse_fixed_shears(fixes, order);

    transform::GridOptions gopts;
    gopts.tol = tol;
    gopts.threads = threads > 0 ? threads : env_threads();
    transform::TransformField field =
        transform::transform_grid(tau, f, alpha, swept, axis, scales, fixed, t, gopts);
    if (normalize) field = detect::normalize_per_scale(field);

    if (out.empty() || out == "-") {
        if (field.values.size() == 1)
            std::cout << field.values(0, 0) << "\n";
        else
            transform::write_field_csv(std::cout, field);
    } else {
        transform::write_field_csv_file(out, field);
        std::cout << "field written to " << out << " (" << field.values.rows() << " x "
                  << field.values.cols() << ")\n";
        if (field.values.size() == 1) std::cout << field.values(0, 0) << "\n";
    }
    return kExitOk;
}

int cmd_detect(const KernelFlags& kf, const std::string& kernel_path, const std::string& signal,
               int side, int exponent, const std::string& alpha_schedule, const std::string& s_range,
               const std::string& a_range, double t, double tol, const std::string& out,
               int threads, double match_radius, int k_finest) {
    kernel::KernelBundle bundle = obtain_bundle(kernel_path, kf, exponent, 1e-9);
    const int order = bundle.spec.order;
    transform::Taylorlet tau = taylorlet_from_bundle(std::move(bundle));
    transform::SignalModel f = parse_signal(signal, side, exponent);

    std::vector<double> schedule;
    {
        std::stringstream ss(alpha_schedule);
        std::string item;
        while (std::getline(ss, item, ',')) schedule.push_back(std::stod(item));
    }
    if (schedule.size() != static_cast<std::size_t>(order) + 1)
        throw std::invalid_argument("--alpha-schedule needs order+1 comma-separated values");

    detect::DetectOptions opts;
    opts.sweep = parse_axis(s_range);
    opts.scales = parse_scales(a_range);
    opts.tol = tol;
    opts.threads = threads > 0 ? threads : env_threads();
    opts.match_radius_cells = match_radius;
    opts.k_finest = k_finest;

    detect::CoefficientReport report = detect::detect_coefficients(tau, f, t, order, schedule, opts);
    detect::write_report_kv(std::cout, report);
    if (!out.empty()) {
        std::ofstream os(out);
        if (!os) throw std::runtime_error("cannot open for writing: " + out);
        detect::write_report_csv(os, report);
    }
    if (report.failed_stage) {
        std::cerr << "detection failed at stage " << *report.failed_stage << "\n";
        return kExitNumeric;
    }
    return kExitOk;
}

int cmd_plot(const std::string& input, const std::string& out, std::optional<double> marker) {
    transform::TransformField field = transform::read_field_csv_file(input);
    transform::write_field_pgm_file(out, field, marker);
    std::cout << "heatmap written to " << out << " (" << field.values.cols() << " x "
              << field.values.rows() << ")\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"taylorlab: moment kernels with many generalized vanishing moments and the "
                 "taylorlet transform for singularity-curve analysis"};
    app.require_subcommand(1);

    KernelFlags kf;
    std::string kernel_path, out, signal = "sin", sweep = "s0";
    std::string s_range = "-2:2:64", a_range = "1:8:64";
    std::string alpha_schedule = "1.01,0.51,0.34";
    std::vector<std::string> fixes;
    double alpha = 1.01, t = 0.0, tol = 1e-9;
    double match_radius = 3.0;
    int side = +1, exponent = 0, lmax = -1, threads = 0, k_finest = 6;
    bool normalize = false;
    std::optional<double> marker;
    std::string plot_input;

    auto* build = app.add_subcommand("kernel-build", "construct a kernel and write it to a file");
    add_kernel_flags(build, kf);
    build->add_option("--tol", tol, "tail-table interpolation tolerance");
    build->add_option("--out", out, "output kernel file")->required();

    auto* check = app.add_subcommand("kernel-check", "verify vanishing moments of a kernel file");
    check->add_option("--kernel", kernel_path, "kernel file")->required();
    check->add_option("--lmax", lmax, "highest moment exponent to check (default: kernel level)");
    check->add_option("--tol", tol, "relative tolerance for vanishing moments")->default_val(1e-8);

    auto* trans = app.add_subcommand("transform", "evaluate |T f| over a scale/shear grid");
    add_kernel_flags(trans, kf);
    trans->add_option("--kernel", kernel_path, "kernel file (otherwise built from flags)");
    trans->add_option("--signal", signal, "sin | exp | ball | const:<v> | poly:<c0,c1,...>");
    trans->add_option("--side", side, "half-space side (+1 or -1)");
    trans->add_option("--exponent", exponent, "signal exponent j");
    trans->add_option("--alpha", alpha, "anisotropy exponent");
    trans->add_option("--sweep", sweep, "swept shear (s0..sn)");
    trans->add_option("--s-range", s_range, "shear axis min:max:count");
    trans->add_option("--a-range", a_range, "scale axis e1:e2:count (a = 2^-e)");
    trans->add_option("--fix", fixes, "fixed shear, e.g. s1=1 (repeatable)");
    trans->add_option("--t", t, "translation");
    trans->add_option("--tol", tol, "quadrature tolerance");
    trans->add_flag("--normalize", normalize, "normalize each scale row to max 1");
    trans->add_option("--out", out, "output CSV path ('-' for stdout)");
    trans->add_option("--threads", threads, "worker threads (default: TAYLORLAB_THREADS or all cores)");

    auto* det = app.add_subcommand("detect", "sequential Taylor-coefficient search");
    add_kernel_flags(det, kf);
    det->add_option("--kernel", kernel_path, "kernel file (otherwise built from flags)");
    det->add_option("--signal", signal, "sin | exp | ball | const:<v> | poly:<c0,c1,...>");
    det->add_option("--side", side, "half-space side (+1 or -1)");
    det->add_option("--exponent", exponent, "signal exponent j");
    det->add_option("--alpha-schedule", alpha_schedule, "comma-separated alpha per stage");
    det->add_option("--s-range", s_range, "shear axis min:max:count");
    det->add_option("--a-range", a_range, "scale axis e1:e2:count (a = 2^-e)");
    det->add_option("--t", t, "translation");
    det->add_option("--tol", tol, "quadrature tolerance");
    det->add_option("--out", out, "CSV report path");
    det->add_option("--threads", threads, "worker threads (default: TAYLORLAB_THREADS or all cores)");
    det->add_option("--match-radius", match_radius, "path linkage radius in grid cells");
    det->add_option("--k-finest", k_finest, "scales used for decay slopes");

    auto* plot = app.add_subcommand("plot", "render a field CSV as a PGM heatmap");
    plot->add_option("input", plot_input, "field CSV path")->required();
    plot->add_option("--out", out, "output PGM path")->required();
    plot->add_option("--marker", marker, "invert the column nearest to this shear value");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (build->parsed()) return cmd_kernel_build(kf, out, tol);
        if (check->parsed()) return cmd_kernel_check(kernel_path, lmax, tol);
        if (trans->parsed())
            return cmd_transform(kf, kernel_path, signal, side, exponent, alpha, sweep, s_range,
                                 a_range, fixes, t, tol, normalize, out, threads);
        if (det->parsed())
            return cmd_detect(kf, kernel_path, signal, side, exponent, alpha_schedule, s_range,
                              a_range, t, tol, out, threads, match_radius, k_finest);
        if (plot->parsed()) return cmd_plot(plot_input, out, marker);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitConfig;
}
