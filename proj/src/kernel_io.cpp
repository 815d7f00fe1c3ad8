#include "taylorlab/kernel_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace taylorlab::kernel {

using nlohmann::json;

KernelBundle build_bundle(const KernelSpec& spec, int table_exponent, double table_tol) {
    RootKernel g = restrictive_kernel(spec);
    TailMomentTable tables = tabulate_tail_moments(g.base(), g.vn(), g.t0(), table_exponent, table_tol);
    return KernelBundle{spec, g.base(), g, std::move(tables)};
}

namespace {

json segment_to_json(const InterpSegment& seg) {
    return json{{"x", seg.x}, {"y", seg.y}, {"d", seg.d}};
}

InterpSegment segment_from_json(const json& j) {
    InterpSegment seg;
    seg.x = j.at("x").get<std::vector<double>>();
    seg.y = j.at("y").get<std::vector<double>>();
    seg.d = j.at("d").get<std::vector<double>>();
    if (seg.x.size() != seg.y.size() || seg.x.size() != seg.d.size() || seg.x.size() < 2)
        throw std::runtime_error("kernel file: malformed interpolation segment");
    return seg;
}

}  // namespace

void save_bundle(std::ostream& os, const KernelBundle& b) {
    json j;
    j["format"] = "taylorlab-kernel";
    j["version"] = 1;
    j["spec"] = {{"q", b.spec.q},         {"eps", b.spec.eps},   {"smoothness", b.spec.smoothness},
                 {"steps", b.spec.steps}, {"order", b.spec.order}, {"moments", b.spec.moments},
                 {"t0", b.spec.t0}};
    j["base"] = {{"level", b.base.level()},
                 {"is_limit", b.base.is_limit()},
                 {"plateau", b.base.plateau_value()},
                 {"bridge", b.base.bridge().coeffs()},
                 {"dilate_coeffs", b.base.dilate_coeffs()}};
    json tables = json::array();
    for (const auto& segs : b.tables.tables()) {
        json jsegs = json::array();
        for (const auto& seg : segs) jsegs.push_back(segment_to_json(seg));
        tables.push_back(jsegs);
    }
    j["tables"] = {{"vn", b.tables.vn()},
                   {"t0", b.tables.t0()},
                   {"support_w", b.tables.support_w()},
                   {"exact_zero_moments", b.tables.exact_zero_moments()},
                   {"partials", tables}};
    os << j.dump(1) << '\n';
}

void save_bundle_file(const std::string& path, const KernelBundle& bundle) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    save_bundle(os, bundle);
}

KernelBundle load_bundle(std::istream& is) {
    json j = json::parse(is);
    if (j.value("format", "") != "taylorlab-kernel")
        throw std::runtime_error("kernel file: unrecognized format");

    KernelSpec spec;
    const json& js = j.at("spec");
    spec.q = js.at("q").get<double>();
    spec.eps = js.at("eps").get<double>();
    spec.smoothness = js.at("smoothness").get<int>();
    spec.steps = js.at("steps").get<int>();
    spec.order = js.at("order").get<int>();
    spec.moments = js.at("moments").get<int>();
    spec.t0 = js.at("t0").get<double>();

    const json& jb = j.at("base");
    MomentKernel base(spec.q, spec.eps, spec.smoothness,
                      Polynomial(jb.at("bridge").get<std::vector<double>>()),
                      jb.at("dilate_coeffs").get<std::vector<double>>(), jb.at("level").get<int>(),
                      jb.at("is_limit").get<bool>(), jb.at("plateau").get<double>());

    const json& jt = j.at("tables");
    std::vector<std::vector<InterpSegment>> partials;
    for (const json& jsegs : jt.at("partials")) {
        std::vector<InterpSegment> segs;
        for (const json& jseg : jsegs) segs.push_back(segment_from_json(jseg));
        partials.push_back(std::move(segs));
    }
    TailMomentTable tables(jt.at("vn").get<long long>(), jt.at("t0").get<double>(),
                           jt.at("support_w").get<double>(), std::move(partials),
                           jt.at("exact_zero_moments").get<int>());

    RootKernel g(base, tables.vn(), tables.t0());
    return KernelBundle{spec, std::move(base), std::move(g), std::move(tables)};
}

KernelBundle load_bundle_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open kernel file: " + path);
    return load_bundle(is);
}

}  // namespace taylorlab::kernel
