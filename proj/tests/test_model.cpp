#include "emgvalid/model.hpp"
#include "emgvalid/random.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>

using namespace emgvalid;

TEST_CASE("descriptive stats on a textbook sample") {
    const std::vector<double> x{2, 4, 4, 4, 5, 5, 7, 9};
    const auto s = descriptive_stats(x);
    CHECK(s.n == 8);
    CHECK(s.mean == doctest::Approx(5.0));
    CHECK(s.sd == doctest::Approx(2.0));
    CHECK(*s.cv_percent == doctest::Approx(40.0));
    // mean |dx| = (2+0+0+1+0+2+2)/7
    CHECK(*s.mean_variation_percent == doctest::Approx(100.0 * (7.0 / 7.0) / 5.0));
    CHECK(sample_sd(x) == doctest::Approx(std::sqrt(32.0 / 7.0)));
}

TEST_CASE("constant input has zero dispersion") {
    const std::vector<double> x(17, 3.3);
    const auto s = descriptive_stats(x);
    CHECK(s.sd == 0.0);
    CHECK(*s.cv_percent == 0.0);
    CHECK(*s.mean_variation_percent == 0.0);
}

TEST_CASE("zero mean leaves cv undefined") {
    const std::vector<double> x{-1, 1};
    CHECK_FALSE(descriptive_stats(x).cv_percent.has_value());
    CHECK_THROWS_AS(descriptive_stats(std::vector<double>{}), Error);
}

TEST_CASE("stats are permutation invariant and shift/scale equivariant") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(static_cast<std::size_t>(rng.uniform_int(2, 200)));
        for (double& v : x) v = rng.gaussian(5, 2);
        const auto base = descriptive_stats(x);
        auto perm = x;
        std::reverse(perm.begin(), perm.end());
        std::rotate(perm.begin(), perm.begin() + static_cast<long>(perm.size() / 3), perm.end());
        const auto p = descriptive_stats(perm);
        CHECK(p.mean == doctest::Approx(base.mean).epsilon(1e-12));
        CHECK(p.sd == doctest::Approx(base.sd).epsilon(1e-12));

        const double c = rng.uniform(-10, 10), k = rng.uniform(0.1, 5);
        std::vector<double> shifted, scaled;
        for (double v : x) {
            shifted.push_back(v + c);
            scaled.push_back(k * v);
        }
        CHECK(descriptive_stats(shifted).sd == doctest::Approx(base.sd).epsilon(1e-9));
        CHECK(descriptive_stats(scaled).sd == doctest::Approx(k * base.sd).epsilon(1e-12));
        CHECK(descriptive_stats(scaled).mean == doctest::Approx(k * base.mean).epsilon(1e-12));
    }
}

TEST_CASE("decimal rounding is half away from zero") {
    CHECK(round_to(20.115, 2) == 20.12);
    CHECK(round_to(2.675, 2) == 2.68);
    CHECK(round_to(-1.005, 2) == -1.01);
    CHECK(round_to(0.125, 2) == 0.13);
    CHECK(round_to(266.6663, 1) == 266.7);
    CHECK(round_to(1.2344, 3) == 1.234);
    CHECK(format_fixed(20.115, 2) == "20.12");
    CHECK(format_fixed(0.15000, 4) == "0.1500");
    CHECK(format_fixed(-0.0001, 2) == "0.00");
}

TEST_CASE("verdict bands") {
    CHECK(verdict(10.0, 10.0, 2.0).level == VerdictLevel::Pass);
    CHECK(verdict(10.01, 10.0, 2.0).level == VerdictLevel::Marginal);
    CHECK(verdict(20.0, 10.0, 2.0).level == VerdictLevel::Marginal);
    CHECK(verdict(20.01, 10.0, 2.0).level == VerdictLevel::Fail);
    const auto v = verdict(17.08, 10.0, 2.0);
    CHECK(v.value == 17.08);
    CHECK(v.limit == 10.0);
}

TEST_CASE("verdict is monotone in the measured value") {
    auto rank = [](VerdictLevel l) { return static_cast<int>(l); };
    int prev = 0;
    for (double x = 0; x < 40; x += 0.01) {
        const int r = rank(verdict(x, 10.0, 2.0).level);
        CHECK(r >= prev);
        prev = r;
    }
}

TEST_CASE("worst-of and verdict text") {
    CHECK(worst(VerdictLevel::Pass, VerdictLevel::Marginal) == VerdictLevel::Marginal);
    CHECK(worst(VerdictLevel::Fail, VerdictLevel::Marginal) == VerdictLevel::Fail);
    CHECK(parse_verdict("MARGINAL") == VerdictLevel::Marginal);
    CHECK(to_string(VerdictLevel::Fail) == "FAIL");
    CHECK_THROWS_AS(parse_verdict("maybe"), Error);
}

TEST_CASE("recording invariants") {
    CHECK_NOTHROW(Recording({{1, {1, 2}}, {2, {3, 4}}}, 800));
    CHECK_THROWS_AS(Recording({{1, {1, 2}}}, 0), Error);
    CHECK_THROWS_AS(Recording({{1, {1, 2}}, {1, {3, 4}}}, 800), Error);
    CHECK_THROWS_AS(Recording({{1, {1, 2}}, {2, {3}}}, 800), Error);
    CHECK_THROWS_AS(Recording({{9, {1, 2}}}, 800), Error);
    CHECK_THROWS_AS(Recording({{1, {std::numeric_limits<double>::quiet_NaN()}}}, 800), Error);
    CHECK_THROWS_AS(Recording({{1, {}}}, 800), Error);

    const Recording r({{2, {1, 2, 3, 4}}, {5, {5, 6, 7, 8}}}, 1000);
    CHECK(r.duration_s() == doctest::Approx(0.004));
    CHECK(r.sample_interval_ms() == 1.0);
    CHECK(r.channel(5).samples[0] == 5);
    CHECK_THROWS_AS(r.channel(3), Error);
    const std::vector<int> ids{5};
    CHECK(r.select(ids).channel_count() == 1);
}

TEST_CASE("threshold validation") {
    ComplianceThresholds t;
    CHECK_NOTHROW(t.validate());
    t.marginal_multiplier = 0.5;
    CHECK_THROWS_AS(t.validate(), Error);
    t = {};
    t.petg_yield_mpa = {50, 40};
    CHECK_THROWS_AS(t.validate(), Error);
    t = {};
    t.leakage_limit_ua = 0;
    CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("units parse") {
    CHECK(parse_units("mV") == Units::MilliVolt);
    CHECK(to_string(parse_units(to_string(Units::RawCounts))) == to_string(Units::RawCounts));
    CHECK_THROWS_AS(parse_units("furlongs"), Error);
}
