#include "emgvalid/cli.hpp"
#include "emgvalid/config.hpp"
#include "emgvalid/ingest.hpp"
#include "emgvalid/synth.hpp"

#include "doctest.h"

#include <filesystem>
#include <sstream>

using namespace emgvalid;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const char* name) {
    const auto d = fs::temp_directory_path() / "emgvalid_cli_test" / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("exit codes") {
    CHECK(cli::exit_code(VerdictLevel::Pass) == 0);
    CHECK(cli::exit_code(std::nullopt) == 0);
    CHECK(cli::exit_code(VerdictLevel::Fail) == 2);
    CHECK(cli::exit_code(VerdictLevel::Marginal) == 3);
    CHECK(invoke({"nonsense"}).code == 1);
    CHECK(invoke({"safety", "--bogus"}).code == 1);
    CHECK(invoke({}).code == 1);
    const auto v = invoke({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find("emgvalid") != std::string::npos);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("safety subcommand") {
    const auto d = scratch("safety");
    ingest::write_text_file(d / "aux.csv", synth::auxiliary_csv());
    const auto r = invoke({"safety", "--auxiliary", (d / "aux.csv").string(), "--out", (d / "o").string(), "--json"});
    CHECK(r.code == 3);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("verdict") == "MARGINAL");
    CHECK(fs::exists(d / "o" / "safety.json"));

    ingest::write_text_file(d / "ok.csv", "s;1;2\nA;5;5\n");
    CHECK(invoke({"safety", "--leakage", (d / "ok.csv").string()}).code == 0);
    CHECK(invoke({"safety", "--leakage", (d / "missing.csv").string()}).code == 1);
    ingest::write_text_file(d / "bad.csv", "s;1;2\nA;5;x\n");
    const auto bad = invoke({"safety", "--leakage", (d / "bad.csv").string()});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("error:") != std::string::npos);
}

TEST_CASE("comms emulate and analyze") {
    const auto d = scratch("comms");
    const auto dump = (d / "clean.bin").string();
    CHECK(invoke({"comms", "emulate", "--frames", "8000", "--out", dump}).code == 0);
    CHECK(invoke({"comms", "analyze", dump}).code == 0);
    CHECK(invoke({"comms", "emulate", "--frames", "8000", "--drop", "0.01", "--seed", "2", "--out", dump, "--ledger",
               (d / "ledger.json").string()})
              .code == 0);
    CHECK(fs::exists(d / "ledger.json"));
    CHECK(invoke({"comms", "analyze", dump}).code == 2);
    CHECK(invoke({"comms", "emulate", "--drop", "2", "--out", dump}).code == 1);
}

TEST_CASE("config files") {
    const auto d = scratch("config");
    ingest::write_text_file(d / "bad.json", R"({"no_such_key": 1})");
    ingest::write_text_file(d / "ok.json", R"({"leakage_limit_ua": 30})");
    ingest::write_text_file(d / "leak.csv", "s;1;2\nA;17;17\n");
    CHECK(invoke({"safety", "--leakage", (d / "leak.csv").string()}).code == 3);
    CHECK(invoke({"safety", "--leakage", (d / "leak.csv").string(), "--config", (d / "ok.json").string()}).code == 0);
    const auto bad = invoke({"safety", "--leakage", (d / "leak.csv").string(), "--config", (d / "bad.json").string()});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("unknown config key 'no_such_key'") != std::string::npos);
}

TEST_CASE("config merge") {
    auto c = merge_config({}, nlohmann::json::parse(R"({"thresholds":{"petg_yield_mpa":[30,35]},"window_ms":100})"));
    CHECK(c.thresholds.petg_yield_mpa.low_mpa == 30);
    CHECK(c.window_ms == 100);
    CHECK(c.overlap == 0.5);
    CHECK_THROWS_AS(merge_config({}, nlohmann::json::parse(R"({"overlap":1.5})")), Error);
    CHECK_THROWS_AS(merge_config({}, nlohmann::json::parse(R"({"window_ms":"x"})")), Error);
    const auto round = merge_config({}, to_json(c));
    CHECK(to_json(round) == to_json(c));
}

TEST_CASE("synth writes the fixture tree") {
    const auto d = scratch("synth");
    CHECK(invoke({"synth", "--seed", "3", "--out", d.string()}).code == 0);
    CHECK(fs::exists(d / "manifest.json"));
    CHECK(fs::exists(d / "mech" / "linear_fd.csv"));
    const auto m = invoke({"mech", (d / "mech" / "linear_fd.csv").string(), "--out", (d / "m").string()});
    CHECK(m.code == 0);
    CHECK(invoke({"mech", (d / "mech" / "knee_fd.csv").string()}).code == 2);
    CHECK(invoke({"synth"}).code == 1);
}
