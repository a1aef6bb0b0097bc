#include "emgvalid/mech.hpp"
#include "emgvalid/synth.hpp"

#include "doctest.h"

using namespace emgvalid;
using namespace emgvalid::mech;

TEST_CASE("engineering stress and strain") {
    const auto log = synth::linear_force_log(98.0, 50, true);
    const auto c = build_curve(log);
    CHECK(format_fixed(c.max_stress_mpa, 2) == "0.15");
    CHECK(c.max_force_n == 98.0);
    CHECK(c.has_unloading());
    CHECK(c.points[c.peak_index].strain == doctest::Approx(c.max_strain));
    for (std::size_t i = 0; i < log.points.size(); ++i) {
        CHECK(c.points[i].stress_mpa == doctest::Approx(log.points[i].force_n / log.area_mm2));
        CHECK(c.points[i].strain == doctest::Approx(log.points[i].displacement_mm / log.height_mm));
    }
}

TEST_CASE("elastic fit and safety factor") {
    const auto c = build_curve(synth::linear_force_log());
    const auto a = assess_elasticity(c, {});
    CHECK(a.linear_r2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.verdict_elastic);
    CHECK_FALSE(a.plastic_deformation_flag);
    CHECK(format_fixed(a.safety_factor, 1) == "266.7");
    CHECK(a.verdict() == VerdictLevel::Pass);

    ElasticityOptions anchored;
    anchored.fit = FitMode::AnchorOrigin;
    const auto b = assess_elasticity(c, {}, anchored);
    CHECK(b.intercept_mpa == 0.0);
    CHECK(b.modulus_estimate_mpa == doctest::Approx(a.modulus_estimate_mpa));
}

TEST_CASE("knee curve is not elastic") {
    const auto a = assess_elasticity(build_curve(synth::knee_force_log()), {});
    CHECK(a.linear_r2 < 0.98);
    CHECK_FALSE(a.verdict_elastic);
    CHECK(a.verdict() == VerdictLevel::Fail);
}

TEST_CASE("residual strain flags plastic deformation") {
    ingest::ForceDisplacementLog log{{{0, 0}, {10, 0.1}, {20, 0.2}, {30, 0.3}, {0, 0.2}}, 100, 10};
    const auto a = assess_elasticity(build_curve(log), {});
    REQUIRE(a.residual_strain);
    CHECK(*a.residual_strain == doctest::Approx(0.02));
    CHECK(a.plastic_deformation_flag);
    CHECK(a.verdict() == VerdictLevel::Fail);
}

TEST_CASE("degenerate curves are rejected") {
    ingest::ForceDisplacementLog two{{{0, 0}, {1, 1}}, 1, 1};
    CHECK_THROWS_AS(assess_elasticity(build_curve(two), {}), Error);
    ingest::ForceDisplacementLog flat{{{0, 1}, {1, 1}, {2, 1}}, 1, 1};
    CHECK_THROWS_AS(assess_elasticity(build_curve(flat), {}), Error);
}
