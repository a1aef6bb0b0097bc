#include "emgvalid/comms.hpp"

#include "doctest.h"

using namespace emgvalid;
using namespace emgvalid::comms;

namespace {

std::vector<std::uint8_t> clean_stream(std::uint64_t n, std::uint16_t start_seq = 0) {
    FaultPlan p;
    p.start_seq = start_seq;
    return emulate(n, default_signal_source(1), p).bytes;
}

}  // namespace

TEST_CASE("frame codec round trip") {
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
        Frame f;
        f.seq = static_cast<std::uint16_t>(rng.uniform_int(0, 65535));
        f.t_ms = static_cast<std::uint32_t>(rng.uniform_int(0, 4000000000LL));
        for (auto& s : f.samples) s = static_cast<std::uint16_t>(rng.uniform_int(0, 4095));
        const auto bytes = encode_frame(f);
        CHECK(bytes[0] == kSync0);
        CHECK(bytes[1] == kSync1);
        const auto d = decode_frame(bytes);
        REQUIRE(d.ok());
        CHECK(*d.frame == f);
    }
}

TEST_CASE("every single-bit flip is detected") {
    Frame f{513, 123456, {1, 2, 3, 4, 4095, 6, 7, 8}};
    const auto good = encode_frame(f);
    for (std::size_t byte = 0; byte < kFrameSize; ++byte)
        for (int bit = 0; bit < 8; ++bit) {
            auto b = good;
            b[byte] ^= static_cast<std::uint8_t>(1u << bit);
            CHECK_FALSE(decode_frame(b).ok());
        }
    CHECK(decode_frame(std::span(good.data(), 24)).status == DecodeStatus::Truncated);
    auto nosync = good;
    nosync[0] = 0;
    CHECK(decode_frame(nosync).status == DecodeStatus::NoSync);
}

TEST_CASE("clean stream across the sequence wrap") {
    const auto bytes = clean_stream(4000, 65000);
    AnalyzerOptions o;
    const auto r = analyze_stream(bytes, o);
    CHECK(r.received_ok == 4000);
    CHECK(r.lost == 0);
    CHECK(r.corrupted == 0);
    CHECK(r.continuity_ok);
    CHECK(r.count_matches_expected);
    CHECK(r.verdict() == VerdictLevel::Pass);
}

TEST_CASE("analysis does not depend on chunking") {
    FaultPlan p;
    p.drop_probability = 0.02;
    p.corrupt_probability = 0.02;
    p.rng_seed = 8;
    const auto em = emulate(6000, default_signal_source(2), p);
    const auto whole = analyze_stream(em.bytes, {});
    for (std::size_t chunk : {1u, 7u, 25u, 26u, 1000u}) {
        StreamAnalyzer a({});
        for (std::size_t i = 0; i < em.bytes.size(); i += chunk)
            a.feed(std::span(em.bytes).subspan(i, std::min(chunk, em.bytes.size() - i)));
        const auto r = a.finish();
        CHECK(r.received_ok == whole.received_ok);
        CHECK(r.lost == whole.lost);
        CHECK(r.corrupted == whole.corrupted);
        CHECK(r.resyncs == whole.resyncs);
    }
    CHECK(whole.lost == em.ledger.interior_dropped());
    CHECK(whole.corrupted == em.ledger.corrupted());
    CHECK(whole.resyncs == em.ledger.expected_resyncs);
}

TEST_CASE("emulator is deterministic in its seed") {
    FaultPlan p;
    p.drop_probability = 0.05;
    p.corrupt_probability = 0.05;
    p.jitter_ms = 0.4;
    p.rng_seed = 99;
    const auto a = emulate(2000, default_signal_source(1), p);
    const auto b = emulate(2000, default_signal_source(1), p);
    CHECK(a.bytes == b.bytes);
    CHECK(a.ledger.faults.size() == b.ledger.faults.size());
    p.rng_seed = 100;
    CHECK(emulate(2000, default_signal_source(1), p).bytes != a.bytes);
}

TEST_CASE("burst drops are reported as one gap") {
    FaultPlan p;
    p.burst_drop = BurstDrop{1000, 300};
    const auto em = emulate(3000, default_signal_source(1), p);
    CHECK(em.ledger.count(FaultType::BurstDrop) == 300);
    const auto r = analyze_stream(em.bytes, {});
    CHECK(r.lost == 300);
    REQUIRE(r.gaps.size() == 1);
    CHECK(r.gaps[0].missing == 300);
    CHECK(r.verdict() == VerdictLevel::Fail);
}

TEST_CASE("fault plan validation") {
    FaultPlan p;
    p.drop_probability = 1.5;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.corrupt_probability = -0.1;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.rate_hz = 0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = {};
    p.jitter_ms = -1;
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("non-frame input is rejected") {
    const std::vector<std::uint8_t> junk(500, 0x42);
    CHECK_THROWS_AS(analyze_stream(junk, {}), Error);
}

TEST_CASE("pipelined run matches the batch analysis") {
    FaultPlan p;
    p.drop_probability = 0.01;
    p.corrupt_probability = 0.01;
    p.rng_seed = 5;
    const auto pipe = run_pipelined(20000, default_signal_source(3), p, {});
    const auto batch = emulate(20000, default_signal_source(3), p);
    const auto r = analyze_stream(batch.bytes, {});
    CHECK(pipe.report.received_ok == r.received_ok);
    CHECK(pipe.report.lost == r.lost);
    CHECK(pipe.report.corrupted == r.corrupted);
    CHECK(pipe.ledger.faults.size() == batch.ledger.faults.size());
}
