// Acceptance gate: one PASS/FAIL line per criterion.
// Usage: emgvalid_acceptance [criterion-number]

#include "emgvalid/agreement.hpp"
#include "emgvalid/cli.hpp"
#include "emgvalid/comms.hpp"
#include "emgvalid/ingest.hpp"
#include "emgvalid/mech.hpp"
#include "emgvalid/operation.hpp"
#include "emgvalid/random.hpp"
#include "emgvalid/safety.hpp"
#include "emgvalid/synth.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace emgvalid;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> details;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            details.push_back(what);
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string cell(double mean, double sd) { return format_fixed(mean, 2) + " ± " + format_fixed(sd, 2); }

// Published leakage table, typed as printed: semicolons and decimal commas.
const char* kLeakageCsv =
    "Sensor;1;2;3;4;Mean ± std\n"
    "1;15,36;15,36;16,98;20,62;17,08 ± 2,15\n"
    "2;15,77;15,77;19,98;20,39;17,98 ± 2,21\n"
    "3;15,77;15,77;16,98;18,76;16,82 ± 1,22\n"
    "4;15,04;15,04;26,68;17,95;18,68 ± 4,77\n"
    "5;16,01;16,01;24,66;17,95;18,66 ± 3,56\n"
    "6;17,71;17,71;20,62;17,95;18,50 ± 1,23\n"
    "7;17,63;21,83;20,38;20,62;20,12 ± 1,54\n"
    "8;21,83;17,63;24,42;17,95;20,46 ± 2,83\n";

const char* kAuxiliaryCsv =
    "Repetition;Patient auxiliary current\n"
    "1;135,12\n2;135,12\n3;170,70\n4;152,18\n5;73,320\n"
    "6;63,470\n7;59,760\n8;59,660\n9;93,300\n10;67,690\nMean;101,030\n";

const std::vector<std::string> kLeakageCells{"17.08 ± 2.15", "17.98 ± 2.21", "16.82 ± 1.22", "18.68 ± 4.77",
                                             "18.66 ± 3.56", "18.50 ± 1.23", "20.12 ± 1.54", "20.46 ± 2.83"};

Outcome c01_table1() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto a = safety::assess_leakage(ingest::parse_repetition_table(kLeakageCsv), {});
    const double elapsed = seconds_since(t0);
    o.check(a.per_sensor.size() == 8, "expected 8 sensors");
    for (std::size_t i = 0; i < a.per_sensor.size() && i < kLeakageCells.size(); ++i) {
        const auto got = cell(a.per_sensor[i].stats.mean, a.per_sensor[i].stats.sd);
        o.check(got == kLeakageCells[i],
                "sensor " + a.per_sensor[i].sensor_id + ": got " + got + ", published " + kLeakageCells[i]);
    }
    o.check(elapsed < 1.0, "runtime " + std::to_string(elapsed) + " s");
    return o;
}

Outcome c02_table2() {
    Outcome o;
    const auto table = ingest::parse_repetition_table(kAuxiliaryCsv);
    o.check(table.rows.size() == 1 && table.rows[0].size() == 10, "expected one row of 10 repetitions");
    const auto a = safety::assess_auxiliary(table.rows.at(0), {});
    o.check(format_fixed(a.mean_ua, 2) == "101.03", "mean " + format_fixed(a.mean_ua, 2));
    o.check(a.count_over_limit == 4, "count_over_limit " + std::to_string(a.count_over_limit));
    return o;
}

Outcome c03_safety_verdicts() {
    Outcome o;
    const ComplianceThresholds t;
    const auto leak = safety::assess_leakage(ingest::parse_repetition_table(kLeakageCsv), t);
    for (const auto& s : leak.per_sensor)
        o.check(s.verdict.level == VerdictLevel::Marginal,
                "sensor " + s.sensor_id + " is " + std::string(to_string(s.verdict.level)));
    const auto table = ingest::parse_repetition_table(kAuxiliaryCsv);
    const auto aux = safety::assess_auxiliary(table.rows.at(0), t);
    o.check(aux.verdict.level == VerdictLevel::Marginal,
            "auxiliary is " + std::string(to_string(aux.verdict.level)));
    return o;
}

Outcome c04_latency() {
    Outcome o;
    // Published crossing times (ms) for channels 2, 4, 8 and the two deltas.
    const std::vector<std::array<int, 5>> expected{
        {5318, 5318, 5318, 0, 0},     {10291, 10291, 10291, 0, 0}, {15809, 15809, 15809, 0, 0},
        {20700, 20691, 20691, 9, 0},  {25500, 25491, 25491, 9, 0}, {31164, 31164, 31164, 0, 0},
        {36609, 36609, 36609, 0, 0},  {44818, 44818, 44818, 0, 0}, {52809, 52800, 52800, 9, 0},
        {54164, 54164, 54164, 0, 0},  {55864, 55864, 55864, 0, 0}};
    agreement::LatencyOptions opts;
    opts.pairs = agreement::parse_pairs("2:4,4:8");
    const auto t = agreement::detect_latency(synth::latency_steps(), opts);
    o.check(t.events.size() == expected.size(), "events " + std::to_string(t.events.size()));
    for (std::size_t e = 0; e < std::min(t.events.size(), expected.size()); ++e) {
        const auto& ev = t.events[e];
        const std::array<int, 3> chans{2, 4, 8};
        for (std::size_t c = 0; c < 3; ++c) {
            const auto v = ev.crossing_ms.at(chans[c]);
            o.check(v && *v == expected[e][c],
                    "event " + std::to_string(e + 1) + " ch" + std::to_string(chans[c]) + " mismatch");
        }
        for (std::size_t d = 0; d < 2; ++d) {
            const auto v = ev.deltas.at(d).delta_ms;
            o.check(v && *v == expected[e][3 + d], "event " + std::to_string(e + 1) + " delta mismatch");
        }
    }
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto rec = synth::sequential_steps(seed, 8, 800.0, 10);
        const auto lt = agreement::detect_latency(rec, {});
        o.check(lt.events.size() == 10 && lt.missing_crossings() == 0 && lt.within_one_interval(),
                "sequential-sampling trial " + std::to_string(seed) + " exceeded one interval");
    }
    return o;
}

bool rel_close(double got, double want, double rel) {
    return std::abs(got - want) <= rel * std::max(std::abs(want), 1e-300);
}

Outcome c05_features() {
    Outcome o;
    Rng rng(2024);
    for (int w = 0; w < 1000; ++w) {
        const auto n = static_cast<std::size_t>(rng.uniform_int(2, 512));
        std::vector<double> x(n);
        for (double& v : x) v = rng.gaussian(rng.uniform(-1, 1), rng.uniform(0.01, 3));
        // Direct textbook definitions.
        double sq = 0, abs_sum = 0, sum = 0, wl = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sq += x[i] * x[i];
            abs_sum += std::fabs(x[i]);
            sum += x[i];
            if (i) wl += std::fabs(x[i] - x[i - 1]);
        }
        const double mean = sum / n;
        double dev = 0;
        for (double v : x) dev += (v - mean) * (v - mean);
        const auto f = agreement::window_features(x);
        const std::string tag = "window " + std::to_string(w);
        o.check(rel_close(f.rms, std::sqrt(sq / n), 1e-12), tag + " RMS");
        o.check(rel_close(f.mav, abs_sum / n, 1e-12), tag + " MAV");
        o.check(rel_close(f.iemg, abs_sum, 1e-12), tag + " IEMG");
        o.check(rel_close(f.var, dev / (n - 1), 1e-12), tag + " VAR");
        o.check(rel_close(f.wl, wl, 1e-12), tag + " WL");
    }
    // IEMG and MAV differ by the constant window length, so they must agree
    // identically on MAPE and Pearson.
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng r(seed);
        std::vector<double> a(8192), b(8192);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = r.gaussian();
            b[i] = 0.8 * a[i] + 0.3 * r.gaussian();
        }
        const agreement::WindowPlan plan{128, 0.5, agreement::TrailingWindow::Drop};
        const auto fa = agreement::extract_features(a, plan);
        const auto fb = agreement::extract_features(b, plan);
        using agreement::Feature;
        const auto& ia = fa.at(Feature::Iemg).values;
        const auto& ib = fb.at(Feature::Iemg).values;
        const auto& ma = fa.at(Feature::Mav).values;
        const auto& mb = fb.at(Feature::Mav).values;
        o.check(agreement::mape(ia, ib) == agreement::mape(ma, mb), "IEMG/MAV MAPE differ, seed " + std::to_string(seed));
        o.check(agreement::pearson(ia, ib) == agreement::pearson(ma, mb),
                "IEMG/MAV Pearson differ, seed " + std::to_string(seed));
    }
    return o;
}

Outcome c06_bland_altman() {
    Outcome o;
    Rng rng(6);
    std::vector<double> b(500), a(500);
    for (std::size_t i = 0; i < b.size(); ++i) {
        b[i] = static_cast<double>(rng.uniform_int(-1000, 1000));
        a[i] = b[i] + 3.0;
    }
    const auto ba = agreement::bland_altman(a, b);
    o.check(ba.bias == 3.0, "constant offset bias " + std::to_string(ba.bias));
    o.check(ba.loa_high - ba.loa_low == 0.0, "constant offset LoA width nonzero");

    std::vector<double> x(1000), y(1000);
    Rng g(42);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = g.gaussian(10.0, 2.0);
        y[i] = x[i] + g.gaussian(0.5, 1.0);
    }
    const auto bg = agreement::bland_altman(y, x);
    o.check(std::abs(bg.fraction_within_loa - 0.95) <= 0.02,
            "within-LoA fraction " + std::to_string(bg.fraction_within_loa));

    const auto pair = synth::semg_pair(11, 10.0);
    const auto self = agreement::compare_devices(pair.reference, pair.reference);
    for (const auto& [f, fa] : self.features) {
        o.check(fa.one_minus_mape_percent == 100.0,
                "self-comparison 1-MAPE for " + std::string(agreement::to_string(f)));
        o.check(fa.pearson_r && std::abs(*fa.pearson_r - 1.0) <= 1e-12,
                "self-comparison r for " + std::string(agreement::to_string(f)));
    }
    return o;
}

Outcome c07_comms() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    Rng plan_rng(77);
    for (int k = 0; k < 20; ++k) {
        comms::FaultPlan plan;
        plan.rng_seed = 1000 + k;
        plan.drop_probability = plan_rng.uniform(0.0, 0.05);
        plan.corrupt_probability = plan_rng.uniform(0.0, 0.02);
        plan.jitter_ms = k % 3 == 0 ? 1.0 : 0.0;
        std::uint64_t frames = 20000;
        if (k % 4 == 1) plan.burst_drop = comms::BurstDrop{5000 + 100 * static_cast<std::uint64_t>(k), 50 + 10 * static_cast<std::uint64_t>(k)};
        if (k % 5 == 2) plan.start_seq = static_cast<std::uint16_t>(65536 - 7000 - k);
        if (k == 19) {
            // A burst longer than the sequence space: only timestamps reveal it.
            frames = 90000;
            plan.burst_drop = comms::BurstDrop{10000, 70000};
        }
        comms::AnalyzerOptions opts;
        comms::StreamIntegrityReport r;
        comms::FaultLedger ledger;
        if (k % 2 == 0) {
            const auto em = comms::emulate(frames, comms::default_signal_source(plan.rng_seed), plan);
            r = comms::analyze_stream(em.bytes, opts);
            ledger = em.ledger;
        } else {
            const auto res = comms::run_pipelined(frames, comms::default_signal_source(plan.rng_seed), plan, opts);
            r = res.report;
            ledger = res.ledger;
        }
        const std::string tag = "plan " + std::to_string(k) + ": ";
        o.check(r.corrupted == ledger.corrupted(),
                tag + "corrupted " + std::to_string(r.corrupted) + " vs " + std::to_string(ledger.corrupted()));
        o.check(r.lost == ledger.interior_dropped(),
                tag + "lost " + std::to_string(r.lost) + " vs " + std::to_string(ledger.interior_dropped()));
        o.check(r.received_ok == ledger.frames_emitted - ledger.corrupted(), tag + "received count");
        o.check(r.resyncs == ledger.expected_resyncs,
                tag + "resyncs " + std::to_string(r.resyncs) + " vs " + std::to_string(ledger.expected_resyncs));
        o.check(r.out_of_order == 0 && r.garbage_bytes == 0, tag + "spurious out-of-order or garbage");
    }
    comms::FaultPlan clean;
    clean.rng_seed = 7;
    const auto em = comms::emulate(48000, comms::default_signal_source(7), clean);
    comms::AnalyzerOptions opts;
    opts.nominal_rate_hz = 800.0;
    opts.duration_s = 60.0;
    const auto r = comms::analyze_stream(em.bytes, opts);
    o.check(r.expected_frames == 48000 && r.received_ok == 48000,
            "clean stream expected " + std::to_string(r.expected_frames) + ", received " + std::to_string(r.received_ok));
    o.check(r.verdict() == VerdictLevel::Pass, "clean stream verdict");
    const double elapsed = seconds_since(t0);
    o.check(elapsed < 10.0, "runtime " + std::to_string(elapsed) + " s");
    return o;
}

Outcome c08_freqresp() {
    Outcome o;
    const auto identity = operation::build_error_matrix(synth::frequency_sweep(3, true));
    for (std::size_t s = 0; s < identity.stages().size(); ++s)
        for (std::size_t f = 0; f < identity.frequencies_hz().size(); ++f)
            o.check(identity.at(s, f) && *identity.at(s, f) == 0.0, "identity sweep has a nonzero cell");
    const double pe = operation::percentage_error(1.0, 10.11);
    o.check(format_fixed(pe, 0) == "911" && round_to(pe, 2) == 911.0, "extreme cell " + format_fixed(pe, 6));
    const auto m = operation::build_error_matrix(synth::frequency_sweep(3, false));
    const auto cell4 = m.lookup(4, 10.0);
    o.check(cell4 && round_to(*cell4, 2) == 911.0, "stage 4 cell in the synthetic sweep");
    return o;
}

Outcome c09_mech() {
    Outcome o;
    ingest::ForceDisplacementLog log{{{0.0, 0.0}, {49.0, 0.0245}, {98.0, 0.049}}, 653.33, 12.0};
    const auto curve = mech::build_curve(log);
    const auto a = mech::assess_elasticity(curve, {});
    o.check(format_fixed(curve.max_stress_mpa, 2) == "0.15", "stress " + format_fixed(curve.max_stress_mpa, 6));
    o.check(format_fixed(a.safety_factor, 1) == "266.7", "safety factor " + format_fixed(a.safety_factor, 4));

    const auto lin = mech::assess_elasticity(mech::build_curve(synth::linear_force_log()), {});
    o.check(round_to(lin.linear_r2, 12) == 1.0, "linear r2 " + format_fixed(lin.linear_r2, 15));
    o.check(lin.verdict_elastic, "linear curve not elastic");
    const auto knee = mech::assess_elasticity(mech::build_curve(synth::knee_force_log()), {});
    o.check(!knee.verdict_elastic, "knee curve judged elastic, r2 " + format_fixed(knee.linear_r2, 4));
    return o;
}

int cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    return cli::run(args, out, err);
}

std::string run_pipeline(const fs::path& fixtures, const fs::path& out) {
    const auto f = [&](const char* rel) { return (fixtures / rel).string(); };
    const auto o = [&](const char* rel) { return (out / rel).string(); };
    cli({"safety", "--leakage", f("safety/leakage.csv"), "--auxiliary", f("safety/auxiliary.csv"), "--out", o("safety")});
    cli({"stability", f("stability/rep1.csv"), f("stability/rep2.csv"), f("stability/rep3.csv"), "--rate", "800",
         "--out", o("stability")});
    cli({"freqresp", f("freqresp/sweep.csv"), "--out", o("freqresp")});
    cli({"compare", "--prototype", f("agreement/prototype.csv"), "--reference", f("agreement/reference.csv"),
         "--prototype-rate", "800", "--reference-rate", "1000", "--out", o("compare")});
    cli({"latency", f("agreement/latency_steps.csv"), "--rate", "1000", "--pairs", "2:4,4:8", "--out", o("latency")});
    cli({"crosstalk", f("agreement/crosstalk"), "--rate", "800", "--out", o("crosstalk")});
    cli({"comms", "analyze", f("comms/clean.bin"), "--rate", "800", "--duration", "60", "--out", o("comms")});
    cli({"mech", f("mech/linear_fd.csv"), "--area-mm2", "653.33", "--height-mm", "12", "--out", o("mech")});
    cli({"report", "--safety", o("safety/safety.json"), "--stability", o("stability/stability.json"), "--freqresp",
         o("freqresp/matrix.json"), "--agreement", o("compare/compare.json"), "--agreement", o("latency/latency.json"),
         "--agreement", o("crosstalk/crosstalk.json"), "--comms", o("comms/comms.json"), "--mech", o("mech/mech.json"),
         "--checklist", f("checklist.json"), "--device", "prototype armband", "--out", o("report")});
    return ingest::read_text_file(out / "report" / "report.json");
}

Outcome c10_determinism() {
    Outcome o;
    const fs::path work = fs::current_path() / "acceptance_work";
    fs::remove_all(work);
    o.check(cli({"synth", "--out", (work / "fixtures").string(), "--seed", "7"}) == 0, "synth failed");
    std::string first, second;
    try {
        first = run_pipeline(work / "fixtures", work / "run1");
        second = run_pipeline(work / "fixtures", work / "run2");
    } catch (const std::exception& e) {
        o.check(false, std::string("pipeline: ") + e.what());
    }
    o.check(!first.empty(), "report.json missing");
    o.check(first == second, "report.json differs between runs");
    return o;
}

struct Criterion {
    const char* id;
    const char* title;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {"c01", "leakage table mean ± std cells", c01_table1},
        {"c02", "auxiliary current mean and count over limit", c02_table2},
        {"c03", "safety verdicts MARGINAL", c03_safety_verdicts},
        {"c04", "latency deltas and one-interval property", c04_latency},
        {"c05", "feature oracle and IEMG/MAV equivalence", c05_features},
        {"c06", "Bland-Altman properties and self-comparison", c06_bland_altman},
        {"c07", "comms analyzer matches emulator ledger", c07_comms},
        {"c08", "frequency-response error matrix", c08_freqresp},
        {"c09", "mechanical stress, safety factor, elasticity", c09_mech},
        {"c10", "report.json byte-identical across runs", c10_determinism},
    };
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::cerr << "usage: emgvalid_acceptance [1-" << criteria.size() << "]\n";
        return 2;
    }
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only && static_cast<int>(i + 1) != only) continue;
        Outcome r;
        try {
            r = criteria[i].run();
        } catch (const std::exception& e) {
            r.check(false, std::string("exception: ") + e.what());
        }
        std::cout << (r.pass ? "PASS " : "FAIL ") << criteria[i].id << " " << criteria[i].title << "\n";
        for (const auto& d : r.details) std::cout << "    " << d << "\n";
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
