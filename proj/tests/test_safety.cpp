#include "emgvalid/safety.hpp"
#include "emgvalid/synth.hpp"

#include "doctest.h"

#include <cmath>
#include <numeric>

using namespace emgvalid;
using namespace emgvalid::safety;

TEST_CASE("ohm's law across the sense resistor") {
    CHECK(current_from_voltage(15.36, 1000) == doctest::Approx(15.36));
    CHECK(current_from_voltage(0, 1000) == 0.0);
    CHECK(current_from_voltage(10, 500) == doctest::Approx(20.0));
    CHECK_THROWS_AS(current_from_voltage(1, 0), Error);
    CHECK_THROWS_AS(current_from_voltage(1, -5), Error);
    for (double v : {0.5, 3.0, 17.0})
        for (double r : {250.0, 1000.0, 4700.0}) {
            CHECK(current_from_voltage(2 * v, r) == doctest::Approx(2 * current_from_voltage(v, r)));
            CHECK(current_from_voltage(v, 2 * r) == doctest::Approx(current_from_voltage(v, r) / 2));
        }
}

TEST_CASE("leakage assessment on the published table") {
    const auto a = assess_leakage(synth::leakage_table(), {});
    REQUIRE(a.per_sensor.size() == 8);
    CHECK(format_fixed(a.per_sensor[0].stats.mean, 2) == "17.08");
    CHECK(format_fixed(a.per_sensor[0].stats.sd, 2) == "2.15");
    CHECK(a.per_sensor[0].verdict.level == VerdictLevel::Marginal);
    CHECK(format_fixed(a.per_sensor[7].stats.mean, 2) == "20.46");
    CHECK(format_fixed(a.per_sensor[6].stats.mean, 2) == "20.12");
    CHECK(a.per_sensor[3].max_ua == 26.68);
}

TEST_CASE("leakage verdict basis and unit conversion") {
    const ingest::RepetitionTable flat{{"s"}, {{5, 5, 5, 5}}};
    const auto a = assess_leakage(flat, {});
    CHECK(a.per_sensor[0].verdict.level == VerdictLevel::Pass);
    CHECK(a.per_sensor[0].stats.sd == 0.0);

    const ingest::RepetitionTable spiky{{"s"}, {{5, 5, 5, 25}}};
    CHECK(assess_leakage(spiky, {}).per_sensor[0].verdict.level == VerdictLevel::Pass);
    CHECK(assess_leakage(spiky, {}, VerdictBasis::WorstRepetition).per_sensor[0].verdict.level == VerdictLevel::Fail);

    ComplianceThresholds t;
    t.body_resistance_ohm = 500;
    const ingest::RepetitionTable mv{{"s"}, {{4, 4}}};
    CHECK(assess_leakage(mv, t, VerdictBasis::Mean, TableUnit::MilliVolt).per_sensor[0].stats.mean == doctest::Approx(8.0));

    const ingest::RepetitionTable empty_row{{"s"}, {{}}};
    CHECK_THROWS_AS(assess_leakage(empty_row, {}), Error);
}

TEST_CASE("auxiliary current") {
    const auto v = synth::auxiliary_currents();
    const auto a = assess_auxiliary(v, {});
    CHECK(format_fixed(a.mean_ua, 2) == "101.03");
    CHECK(a.count_over_limit == 4);
    CHECK(a.verdict.level == VerdictLevel::Marginal);
    // Sample SD computed independently.
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double ss = 0;
    for (double x : v) ss += (x - m) * (x - m);
    CHECK(*a.sd_ua == doctest::Approx(std::sqrt(ss / (v.size() - 1))));

    const auto two = assess_auxiliary(std::vector<double>{50, 50}, {});
    CHECK(two.mean_ua == 50.0);
    CHECK(two.verdict.level == VerdictLevel::Pass);
    CHECK(two.count_over_limit == 0);
    CHECK_FALSE(assess_auxiliary(std::vector<double>{42}, {}).sd_ua.has_value());
    CHECK_THROWS_AS(assess_auxiliary(std::vector<double>{}, {}), Error);
}

TEST_CASE("raising a sensor mean never improves its verdict") {
    int prev = 0;
    for (double bump = 0; bump < 20; bump += 0.25) {
        const ingest::RepetitionTable t{{"s"}, {{5 + bump, 6 + bump, 7 + bump}}};
        const int r = static_cast<int>(assess_leakage(t, {}).per_sensor[0].verdict.level);
        CHECK(r >= prev);
        prev = r;
    }
}
