#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "taylorlab/field_io.hpp"
#include "taylorlab/kernel_io.hpp"

using namespace taylorlab;

TEST_CASE("kernel bundle round trip is bit-exact") {
    kernel::KernelSpec spec;
    spec.steps = 4;
    spec.moments = 2;
    spec.t0 = 0.03125;
    auto bundle = kernel::build_bundle(spec, 1, 1e-9);

    std::stringstream buffer;
    kernel::save_bundle(buffer, bundle);
    auto loaded = kernel::load_bundle(buffer);

    REQUIRE(loaded.base.dilate_coeffs().size() == bundle.base.dilate_coeffs().size());
    for (std::size_t i = 0; i < bundle.base.dilate_coeffs().size(); ++i)
        CHECK(loaded.base.dilate_coeffs()[i] == bundle.base.dilate_coeffs()[i]);
    for (std::size_t i = 0; i < bundle.base.bridge().coeffs().size(); ++i)
        CHECK(loaded.base.bridge().coeffs()[i] == bundle.base.bridge().coeffs()[i]);
    CHECK(loaded.base.plateau_value() == bundle.base.plateau_value());

    REQUIRE(loaded.tables.tables().size() == bundle.tables.tables().size());
    for (std::size_t i = 0; i < bundle.tables.tables().size(); ++i) {
        const auto& a = bundle.tables.tables()[i];
        const auto& b = loaded.tables.tables()[i];
        REQUIRE(a.size() == b.size());
        for (std::size_t s = 0; s < a.size(); ++s) {
            REQUIRE(a[s].x.size() == b[s].x.size());
            for (std::size_t j = 0; j < a[s].x.size(); ++j) {
                CHECK(a[s].x[j] == b[s].x[j]);
                CHECK(a[s].y[j] == b[s].y[j]);
                CHECK(a[s].d[j] == b[s].d[j]);
            }
        }
    }

    // identical evaluations everywhere we look
    for (double x : {0.0, 0.1, 0.3, 0.9, 2.7, 7.9}) CHECK(loaded.base(x) == bundle.base(x));
    for (double w : {-1.0, 0.0, 0.04, 0.5, 3.0}) {
        CHECK(loaded.tables.moment_integral(0, w) == bundle.tables.moment_integral(0, w));
        CHECK(loaded.tables.moment_integral(1, w) == bundle.tables.moment_integral(1, w));
    }
    CHECK(loaded.g(0.2) == bundle.g(0.2));
}

TEST_CASE("malformed kernel files are rejected") {
    std::stringstream buffer("{\"format\": \"something-else\"}");
    CHECK_THROWS(kernel::load_bundle(buffer));
}

TEST_CASE("field CSV round trip") {
    transform::TransformField field;
    field.a_axis = {0.5, 0.25, 0.125};
    field.s_axis = {-1.0, 0.0, 1.0, 2.0};
    field.swept_index = 1;
    field.alpha = 0.51;
    field.t = 0.25;
    field.fixed_s = Eigen::VectorXd::Zero(3);
    field.fixed_s << 0.1, 0.0, -0.3;
    field.values.resize(3, 4);
    field.values << 0.0, 1.0, 2.0, 3.0, 1e-17, 0.123456789012345678, 5.0, 6.0, 7.0, 8.0, 9.0, 10.5;

    std::stringstream buffer;
    transform::write_field_csv(buffer, field);
    auto loaded = transform::read_field_csv(buffer);

    CHECK(loaded.alpha == field.alpha);
    CHECK(loaded.t == field.t);
    CHECK(loaded.swept_index == 1);
    CHECK(loaded.normalized == field.normalized);
    REQUIRE(loaded.s_axis.size() == 4);
    REQUIRE(loaded.a_axis.size() == 3);
    CHECK((loaded.values - field.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK(loaded.fixed_s == field.fixed_s);
}

TEST_CASE("PGM heatmap") {
    transform::TransformField field;
    field.a_axis = {0.5, 0.25};
    field.s_axis = {0.0, 1.0};
    field.fixed_s = Eigen::VectorXd::Zero(3);
    field.values.resize(2, 2);
    field.values << 0.0, 1.0, 1.0, 0.0;

    const std::string path = "test_field.pgm";
    transform::write_field_pgm_file(path, field);
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::string magic;
    int w, h, maxval;
    is >> magic >> w >> h >> maxval;
    CHECK(magic == "P5");
    CHECK(w == 2);
    CHECK(h == 2);
    CHECK(maxval == 255);
    is.get();  // single whitespace after header
    unsigned char px[4];
    is.read(reinterpret_cast<char*>(px), 4);
    CHECK(static_cast<int>(px[0]) == 0);
    CHECK(static_cast<int>(px[1]) == 255);
    CHECK(static_cast<int>(px[2]) == 255);
    CHECK(static_cast<int>(px[3]) == 0);
    std::remove(path.c_str());

    SUBCASE("all-zero field maps to black") {
        field.values.setZero();
        transform::write_field_pgm_file(path, field);
        std::ifstream is2(path, std::ios::binary);
        std::string m2;
        int w2, h2, mv2;
        is2 >> m2 >> w2 >> h2 >> mv2;
        is2.get();
        unsigned char p2[4];
        is2.read(reinterpret_cast<char*>(p2), 4);
        for (unsigned char c : p2) CHECK(static_cast<int>(c) == 0);
        std::remove(path.c_str());
    }
}
