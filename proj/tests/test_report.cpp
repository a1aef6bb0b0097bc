#include "emgvalid/report.hpp"
#include "emgvalid/synth.hpp"

#include "doctest.h"

using namespace emgvalid;
using namespace emgvalid::report;

namespace {

json section(const char* name, const char* verdict) { return {{"section", name}, {"verdict", verdict}}; }

Checklist inspected() {
    Checklist c;
    c.insulation_enclosed = true;
    c.electrodes_housed = true;
    return c;
}

}  // namespace

TEST_CASE("single marginal sensor gives a marginal report") {
    ingest::RepetitionTable t{{"1", "2"}, {{17.08, 17.08}, {5, 5}}};
    const auto leak = safety::assess_leakage(t, {});
    const auto s = safety_section(leak, std::nullopt, {});
    CHECK(s.at("verdict") == "MARGINAL");
    const auto r = build_report({{"safety", s}}, inspected(), {});
    CHECK(r.overall == VerdictLevel::Marginal);
    CHECK_FALSE(r.notes.empty());
}

TEST_CASE("worst-of aggregation") {
    auto r = build_report({{"safety", section("safety", "PASS")}, {"stability", section("stability", "INFO")},
                           {"comms", section("comms", "PASS")}},
                          inspected(), {});
    CHECK(r.overall == VerdictLevel::Pass);

    r = build_report({{"safety", section("safety", "PASS")}, {"mechanical", section("mechanical", "FAIL")},
                      {"comms", section("comms", "MARGINAL")}},
                     inspected(), {});
    CHECK(r.overall == VerdictLevel::Fail);
    CHECK(r.section_verdicts.at("mechanical") == "FAIL");
}

TEST_CASE("report construction errors and checklist rules") {
    CHECK_THROWS_AS(build_report({}, inspected(), {}), Error);
    CHECK_THROWS_AS(build_report({{"bogus", section("bogus", "PASS")}}, inspected(), {}), Error);

    Checklist bad = inspected();
    bad.electrodes_housed = false;
    CHECK(build_report({{"safety", section("safety", "PASS")}}, bad, {}).overall == VerdictLevel::Fail);

    const auto unrecorded = build_report({{"safety", section("safety", "PASS")}}, {}, {});
    CHECK(unrecorded.overall == VerdictLevel::Pass);
    CHECK_FALSE(unrecorded.notes.empty());

    CHECK_THROWS_AS(checklist_from_json(json{{"unknown", true}}), Error);
    const auto c = checklist_from_json(json::parse(R"({"insulation_enclosed":true,"comfort":{"notes":"ok"}})"));
    CHECK(*c.insulation_enclosed);
    CHECK(c.comfort_notes == "ok");
    CHECK_FALSE(c.electrodes_housed);
}

TEST_CASE("json round trip and canonical form") {
    Metadata m{"proto-1", "2024-01-02", "op", json::object()};
    const auto r = build_report({{"safety", section("safety", "MARGINAL")}, {"stability", section("stability", "INFO")}},
                                inspected(), m);
    const auto j = to_json(r);
    CHECK(j.at("schema_version") == kSchemaVersion);
    const auto back = report_from_json(j);
    CHECK(dump_canonical(to_json(back)) == dump_canonical(j));

    const auto text = dump_canonical(json{{"b", 1}, {"a", 2}});
    CHECK(text.find("\"a\"") < text.find("\"b\""));
    CHECK(text.back() == '\n');

    json wrong = j;
    wrong["schema_version"] = 2;
    CHECK_THROWS_AS(report_from_json(wrong), Error);
}

TEST_CASE("markdown summary") {
    const auto leak = safety::assess_leakage(synth::leakage_table(), {});
    const auto s = safety_section(leak, std::nullopt, {});
    const auto md = render_markdown(build_report({{"safety", s}}, inspected(), {"proto-1", "", "", json::object()}));
    CHECK(md.find("proto-1") != std::string::npos);
    CHECK(md.find("17.08 ± 2.15") != std::string::npos);
    CHECK(md.find("not a certification document") != std::string::npos);
}

TEST_CASE("section encoders round numbers") {
    const auto a = mech::assess_elasticity(mech::build_curve(synth::linear_force_log()), {});
    const auto log = synth::linear_force_log();
    const auto j = mech_section(log, mech::build_curve(log), a, {}, {});
    CHECK(j.at("verdict") == "PASS");
    CHECK(j.dump().find("266.7") != std::string::npos);

    operation::ErrorMatrix m({1}, {10.0});
    CHECK(freqresp_section(m, {}).at("verdict") == "INFO");
}
