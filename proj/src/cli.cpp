#include "emgvalid/cli.hpp"

#include "emgvalid/agreement.hpp"
#include "emgvalid/comms.hpp"
#include "emgvalid/config.hpp"
#include "emgvalid/ingest.hpp"
#include "emgvalid/mech.hpp"
#include "emgvalid/operation.hpp"
#include "emgvalid/report.hpp"
#include "emgvalid/safety.hpp"
#include "emgvalid/synth.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cctype>
#include <iostream>
#include <sstream>

namespace emgvalid::cli {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code(std::optional<VerdictLevel> v) {
    if (!v) return kExitPass;
    switch (*v) {
    case VerdictLevel::Pass: return kExitPass;
    case VerdictLevel::Marginal: return kExitMarginal;
    case VerdictLevel::Fail: return kExitFail;
    }
    return kExitFail;
}

namespace {

struct Common {
    std::string config_path;
    std::string out;
    bool json_stdout = false;
};

struct SafetyArgs {
    std::string leakage, auxiliary;
    bool worst_case = false;
    std::string leakage_unit = "ua";
};

struct StabilityArgs {
    std::vector<std::string> files;
    double rate_hz = 800.0;
    int channel = 0;
};

struct FreqArgs {
    std::string sweep;
    bool db = false;
};

struct CompareArgs {
    std::string prototype, reference;
    double prototype_rate = 800.0, reference_rate = 1000.0;
    std::optional<double> window_ms, overlap;
    int prototype_channel = 0, reference_channel = 0;
    bool detrend = false, keep_trailing = false, zero_mean_var = false;
};

struct LatencyArgs {
    std::string file;
    double rate_hz = 1000.0;
    std::string pairs;
    std::optional<double> threshold, refractory_ms;
};

struct CrosstalkArgs {
    std::string dir;
    double rate_hz = 800.0;
};

struct AnalyzeArgs {
    std::string dump;
    double rate_hz = 800.0;
    double duration_s = 0.0;
    std::uint64_t tolerance = 1;
};

struct EmulateArgs {
    std::uint64_t frames = 48000;
    double drop = 0.0, corrupt = 0.0, jitter_ms = 0.0, rate_hz = 800.0;
    std::optional<std::uint64_t> burst_start;
    std::uint64_t burst_length = 0;
    unsigned start_seq = 0;
    std::uint64_t seed = 1;
    std::string out, ledger;
};

struct MechArgs {
    std::string file;
    double area_mm2 = synth::kEnclosureAreaMm2;
    double height_mm = synth::kEnclosureHeightMm;
    bool anchor_origin = false;
};

struct ReportArgs {
    std::string safety, stability, freqresp, comms, mech, checklist;
    std::vector<std::string> agreement;
    std::string device, date, operator_name;
};

struct SynthArgs {
    std::uint64_t seed = 7;
};

std::string version_text() {
    return std::string("emgvalid ") + report::kToolkitVersion + " (report schema " +
           std::to_string(report::kSchemaVersion) + ")";
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string fmt_opt(const std::optional<double>& v, int decimals) {
    return v ? format_fixed(*v, decimals) : std::string("-");
}

/// Writes `text` under the --out directory when one was given.
class Output {
public:
    explicit Output(std::string dir) : dir_(std::move(dir)) {}
    bool enabled() const { return !dir_.empty(); }
    void write(const std::string& rel, std::string_view text) {
        if (enabled()) ingest::write_text_file(fs::path(dir_) / rel, text);
    }

private:
    std::string dir_;
};

/// Emits the section: JSON to stdout when asked, else the human summary; the
/// JSON always goes to --out as `name`.
void finish_section(const Common& c, std::ostream& out, Output& files, const std::string& name,
                    const json& section, const std::string& summary) {
    files.write(name, report::dump_canonical(section));
    if (c.json_stdout)
        out << report::dump_canonical(section);
    else
        out << summary;
}

std::string verdict_line(const json& section) {
    return "verdict: " + section.at("verdict").get<std::string>() + "\n";
}

// ── Subcommand bodies ────────────────────────────────────────────────────

int do_safety(const Common& c, const ToolkitConfig& cfg, const SafetyArgs& a, std::ostream& out) {
    if (a.leakage.empty() && a.auxiliary.empty()) throw Error("safety needs --leakage and/or --auxiliary");
    const auto basis = a.worst_case ? safety::VerdictBasis::WorstRepetition : safety::VerdictBasis::Mean;
    std::optional<safety::LeakageAssessment> leak;
    std::optional<safety::AuxiliaryAssessment> aux;
    std::ostringstream s;
    if (!a.leakage.empty()) {
        const auto unit = a.leakage_unit == "mv" ? safety::TableUnit::MilliVolt : safety::TableUnit::MicroAmp;
        leak = safety::assess_leakage(ingest::load_repetition_table(a.leakage), cfg.thresholds, basis, unit);
        s << "Leakage current (uA), limit " << format_fixed(leak->limit_ua, 2) << "\n"
          << pad("sensor", 8) << pad("mean ± sd", 18) << pad("max", 8) << "verdict\n";
        for (const auto& sl : leak->per_sensor)
            s << pad(sl.sensor_id, 8)
              << pad(format_fixed(round_to(sl.stats.mean, 2), 2) + " ± " + format_fixed(round_to(sl.stats.sd, 2), 2), 17)
              << pad(format_fixed(sl.max_ua, 2), 8) << to_string(sl.verdict.level) << "\n";
    }
    if (!a.auxiliary.empty()) {
        const auto table = ingest::load_repetition_table(a.auxiliary);
        std::vector<double> values;
        for (const auto& row : table.rows) values.insert(values.end(), row.begin(), row.end());
        aux = safety::assess_auxiliary(values, cfg.thresholds, basis);
        s << "Patient auxiliary current (uA), limit " << format_fixed(cfg.thresholds.auxiliary_limit_ua, 2)
          << ": mean " << format_fixed(round_to(aux->mean_ua, 2), 2) << " ± " << fmt_opt(aux->sd_ua, 2) << ", "
          << aux->count_over_limit << " over limit, " << to_string(aux->verdict.level) << "\n";
    }
    const json section = report::safety_section(leak, aux, cfg.thresholds);
    s << verdict_line(section);
    Output files(c.out);
    finish_section(c, out, files, "safety.json", section, s.str());
    return exit_code(report::section_verdict(section));
}

int do_stability(const Common& c, const StabilityArgs& a, std::ostream& out) {
    std::vector<Recording> reps;
    for (const auto& f : a.files) reps.push_back(ingest::load_recording(f, a.rate_hz, Units::MilliVolt));
    const auto r = operation::assess_stability(reps, a.channel > 0 ? std::optional<int>(a.channel) : std::nullopt);
    const json section = report::stability_section(r);
    std::ostringstream s;
    s << pad("repetition", 12) << pad("mean", 10) << pad("sd", 10) << pad("cv%", 10) << "mean var%\n";
    for (std::size_t i = 0; i < r.per_repetition.size(); ++i) {
        const auto& st = r.per_repetition[i];
        s << pad(std::to_string(i + 1), 12) << pad(format_fixed(st.mean, 4), 10) << pad(format_fixed(st.sd, 4), 10)
          << pad(fmt_opt(st.cv_percent, 4), 10) << fmt_opt(st.mean_variation_percent, 4) << "\n";
    }
    for (const auto& w : r.warnings) s << "warning: " << w << "\n";
    s << verdict_line(section);
    Output files(c.out);
    finish_section(c, out, files, "stability.json", section, s.str());
    return kExitPass;
}

int do_freqresp(const Common& c, const ToolkitConfig& cfg, const FreqArgs& a, std::ostream& out) {
    const auto sweep = ingest::load_frequency_sweep(a.sweep, a.db ? ingest::GainScale::Decibel : ingest::GainScale::Linear);
    const auto m = operation::build_error_matrix(sweep);
    json section = report::freqresp_section(m, cfg.stage_labels);

    // --out is a directory, or a .csv path naming the matrix file with siblings beside it.
    fs::path dir = c.out, stem = "matrix";
    if (!c.out.empty() && fs::path(c.out).extension() == ".csv") {
        dir = fs::path(c.out).parent_path();
        stem = fs::path(c.out).stem();
    }
    const std::string base = stem.string();
    section["artifacts"] = {{"matrix", base + ".csv"}, {"heatmap_long", base + "_long.csv"}, {"heatmap_svg", base + ".svg"}};
    Output files(c.out.empty() ? "" : (dir.empty() ? std::string(".") : dir.string()));
    files.write(base + ".csv", operation::error_matrix_to_csv(m));
    files.write(base + "_long.csv", operation::error_matrix_to_long_csv(m));
    files.write(base + ".svg", operation::error_matrix_to_svg(m, cfg.stage_labels));

    std::ostringstream s;
    s << "Percentage error (%), " << m.stages().size() << " stages × " << m.frequencies_hz().size()
      << " frequencies, " << m.missing_count() << " missing\n";
    s << pad("stage", 8);
    for (double f : m.frequencies_hz()) s << pad(ingest::format_number(f) + " Hz", 11);
    s << "\n";
    for (std::size_t i = 0; i < m.stages().size(); ++i) {
        s << pad(std::to_string(m.stages()[i]), 8);
        for (std::size_t j = 0; j < m.frequencies_hz().size(); ++j) s << pad(fmt_opt(m.at(i, j), 2), 11);
        s << "\n";
    }
    s << verdict_line(section);
    finish_section(c, out, files, base + ".json", section, s.str());
    return kExitPass;
}

int do_compare(const Common& c, ToolkitConfig cfg, const CompareArgs& a, std::ostream& out) {
    if (a.window_ms) cfg.window_ms = *a.window_ms;
    if (a.overlap) cfg.overlap = *a.overlap;
    if (a.detrend) cfg.detrend = true;
    if (a.keep_trailing) cfg.keep_trailing = true;
    if (a.zero_mean_var) cfg.zero_mean_var = true;
    auto opts = cfg.compare_options();
    opts.prototype_channel = a.prototype_channel;
    opts.reference_channel = a.reference_channel;
    const auto proto = ingest::load_recording(a.prototype, a.prototype_rate, Units::MilliVolt);
    const auto ref = ingest::load_recording(a.reference, a.reference_rate, Units::MilliVolt);
    const auto r = agreement::compare_devices(proto, ref, opts);
    json section = report::compare_section(r);
    section["artifacts"] = {{"bland_altman_points", "bland_altman_points.csv"},
                            {"bland_altman_lines", "bland_altman_lines.csv"}};
    Output files(c.out);
    files.write("bland_altman_points.csv", report::bland_altman_points_csv(r.bland_altman_rms));
    files.write("bland_altman_lines.csv", report::bland_altman_lines_csv(r.bland_altman_rms));

    std::ostringstream s;
    s << "Aligned at lag " << r.lag_samples << " samples (r = " << format_fixed(r.alignment_correlation, 4)
      << "), " << r.aligned_samples << " samples at " << ingest::format_number(r.common_rate_hz) << " Hz\n"
      << pad("feature", 10) << pad("1-MAPE %", 12) << "pearson r\n";
    for (auto f : agreement::kAllFeatures) {
        const auto& fa = r.features.at(f);
        s << pad(std::string(agreement::to_string(f)), 10) << pad(format_fixed(fa.one_minus_mape_percent, 2), 12)
          << fmt_opt(fa.pearson_r, 4) << "\n";
    }
    const auto& ba = r.bland_altman_rms;
    s << "Bland-Altman (RMS): bias " << format_fixed(ba.bias, 4) << ", LoA [" << format_fixed(ba.loa_low, 4) << ", "
      << format_fixed(ba.loa_high, 4) << "]\n"
      << verdict_line(section);
    finish_section(c, out, files, "compare.json", section, s.str());
    return kExitPass;
}

int do_latency(const Common& c, ToolkitConfig cfg, const LatencyArgs& a, std::ostream& out) {
    if (!a.pairs.empty()) cfg.latency_pairs = a.pairs;
    if (a.threshold) cfg.latency_threshold_fraction = *a.threshold;
    if (a.refractory_ms) cfg.latency_refractory_ms = *a.refractory_ms;
    const auto rec = ingest::load_recording(a.file, a.rate_hz, Units::MilliVolt);
    const auto t = agreement::detect_latency(rec, cfg.latency_options());
    json section = report::latency_section(t);
    section["artifacts"] = {{"latency_table", "latency.csv"}};
    Output files(c.out);
    files.write("latency.csv", report::latency_csv(t));

    std::ostringstream s;
    s << pad("event", 7);
    for (int ch : t.channels) s << pad("ch" + std::to_string(ch), 10);
    for (const auto& [x, y] : t.pairs) s << pad("d" + std::to_string(x) + ":" + std::to_string(y), 9);
    s << "\n";
    for (const auto& e : t.events) {
        s << pad(std::to_string(e.event_id), 7);
        for (int ch : t.channels) s << pad(fmt_opt(e.crossing_ms.at(ch), 0), 10);
        for (const auto& d : e.deltas) s << pad(fmt_opt(d.delta_ms, 0), 9);
        s << "\n";
    }
    s << "sampling interval " << format_fixed(t.sample_interval_ms, 4) << " ms, max delta "
      << fmt_opt(t.max_delta_ms(), 3) << " ms\n"
      << verdict_line(section);
    finish_section(c, out, files, "latency.json", section, s.str());
    return exit_code(report::section_verdict(section));
}

int do_crosstalk(const Common& c, const CrosstalkArgs& a, std::ostream& out) {
    std::vector<fs::path> paths;
    for (const auto& e : fs::directory_iterator(a.dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    std::vector<agreement::StimulusRecording> recs;
    for (const auto& p : paths) {
        const std::string stem = p.stem().string();
        std::size_t i = stem.size();
        while (i > 0 && std::isdigit(static_cast<unsigned char>(stem[i - 1]))) --i;
        if (i == stem.size()) throw Error(p.string() + ": file name must end in the stimulated channel number");
        recs.push_back({std::stoi(stem.substr(i)), ingest::load_recording(p, a.rate_hz, Units::MilliVolt)});
    }
    if (recs.empty()) throw Error("no stimulus CSV files in " + a.dir);
    const auto m = agreement::assess_crosstalk(recs);
    const json section = report::crosstalk_section(m);
    std::ostringstream s;
    s << "Crosstalk (dB)\n" << pad("stim", 6);
    for (int ch : m.channels) s << pad("ch" + std::to_string(ch), 9);
    s << "\n";
    for (std::size_t r = 0; r < m.stimulated.size(); ++r) {
        s << pad(std::to_string(m.stimulated[r]), 6);
        for (const auto& v : m.db[r]) s << pad(fmt_opt(v, 2), 9);
        s << "\n";
    }
    s << "worst " << fmt_opt(m.worst_db(), 2) << " dB\n" << verdict_line(section);
    Output files(c.out);
    finish_section(c, out, files, "crosstalk.json", section, s.str());
    return kExitPass;
}

std::string comms_summary(const comms::StreamIntegrityReport& r) {
    std::ostringstream s;
    s << "expected " << r.expected_frames << ", received " << r.received_ok << ", lost " << r.lost
      << ", corrupted " << r.corrupted << ", resyncs " << r.resyncs << ", out of order " << r.out_of_order << "\n"
      << "max inter-frame gap " << fmt_opt(r.max_inter_frame_gap_ms, 0) << " ms, continuity "
      << (r.continuity_ok ? "ok" : "broken") << ", count " << (r.count_matches_expected ? "matches" : "mismatch")
      << "\n";
    return s.str();
}

int do_comms_analyze(const Common& c, const AnalyzeArgs& a, std::ostream& out) {
    const std::string bytes = ingest::read_text_file(a.dump);
    comms::AnalyzerOptions opts;
    opts.nominal_rate_hz = a.rate_hz;
    opts.duration_s = a.duration_s;
    opts.count_tolerance_frames = a.tolerance;
    const auto r = comms::analyze_stream(
        std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()), opts);
    const json section = report::comms_section(r);
    Output files(c.out);
    finish_section(c, out, files, "comms.json", section, comms_summary(r) + verdict_line(section));
    return exit_code(report::section_verdict(section));
}

int do_comms_emulate(const Common& c, const EmulateArgs& a, std::ostream& out) {
    if (a.out.empty()) throw Error("comms emulate needs --out <dump.bin>");
    if (a.start_seq > 0xFFFF) throw Error("--start-seq must be below 65536");
    comms::FaultPlan plan;
    plan.drop_probability = a.drop;
    plan.corrupt_probability = a.corrupt;
    plan.jitter_ms = a.jitter_ms;
    plan.rate_hz = a.rate_hz;
    plan.rng_seed = a.seed;
    plan.start_seq = static_cast<std::uint16_t>(a.start_seq);
    if (a.burst_start) plan.burst_drop = comms::BurstDrop{*a.burst_start, a.burst_length};
    const auto em = comms::emulate(a.frames, comms::default_signal_source(a.seed), plan);
    ingest::write_text_file(a.out, std::string_view(reinterpret_cast<const char*>(em.bytes.data()), em.bytes.size()));
    const json ledger = report::ledger_json(em.ledger, plan);
    if (!a.ledger.empty()) ingest::write_text_file(a.ledger, report::dump_canonical(ledger));
    if (c.json_stdout)
        out << report::dump_canonical(ledger);
    else
        out << "generated " << em.ledger.frames_generated << " frames, emitted " << em.ledger.frames_emitted
            << " (" << em.bytes.size() << " bytes); dropped " << em.ledger.dropped() << ", corrupted "
            << em.ledger.corrupted() << "\n";
    return kExitPass;
}

int do_mech(const Common& c, const ToolkitConfig& cfg, const MechArgs& a, std::ostream& out) {
    auto opts = cfg.elasticity_options();
    if (a.anchor_origin) opts.fit = mech::FitMode::AnchorOrigin;
    const auto log = ingest::load_force_displacement(a.file, a.area_mm2, a.height_mm);
    const auto curve = mech::build_curve(log);
    const auto as = mech::assess_elasticity(curve, cfg.thresholds, opts);
    json section = report::mech_section(log, curve, as, opts, cfg.thresholds);
    section["artifacts"] = {{"stress_strain", "stress_strain.csv"}};
    Output files(c.out);
    files.write("stress_strain.csv", report::stress_strain_csv(curve));
    std::ostringstream s;
    s << "max force " << format_fixed(curve.max_force_n, 2) << " N, max stress "
      << format_fixed(round_to(curve.max_stress_mpa, 4), 4) << " MPa, r2 " << format_fixed(as.linear_r2, 4)
      << ", safety factor " << format_fixed(round_to(as.safety_factor, 1), 1) << ", elastic "
      << (as.verdict_elastic ? "yes" : "no") << "\n"
      << verdict_line(section);
    finish_section(c, out, files, "mech.json", section, s.str());
    return exit_code(report::section_verdict(section));
}

json load_json(const std::string& path) {
    try {
        return json::parse(ingest::read_text_file(path));
    } catch (const json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

/// Rebases a section's artifact paths from its own directory onto the report directory.
void rebase_artifacts(json& section, const fs::path& section_file, const fs::path& report_dir) {
    if (!section.contains("artifacts") || !section.at("artifacts").is_object()) return;
    const fs::path from = fs::absolute(section_file).parent_path();
    const fs::path to = fs::absolute(report_dir.empty() ? fs::path(".") : report_dir);
    for (auto& [k, v] : section["artifacts"].items())
        v = (from / v.get<std::string>()).lexically_normal().lexically_relative(to.lexically_normal()).generic_string();
}

json load_section(const std::string& path, const std::string& expected, const fs::path& report_dir) {
    json s = load_json(path);
    if (!s.is_object() || s.value("section", "") != expected)
        throw Error(path + ": not a '" + expected + "' section");
    rebase_artifacts(s, path, report_dir);
    return s;
}

int do_report(const Common& c, const ToolkitConfig& cfg, const ReportArgs& a, std::ostream& out) {
    std::map<std::string, json> sections;
    const fs::path dir = c.out;
    if (!a.safety.empty()) sections["safety"] = load_section(a.safety, "safety", dir);
    if (!a.stability.empty()) sections["stability"] = load_section(a.stability, "stability", dir);
    if (!a.freqresp.empty()) sections["freq_response"] = load_section(a.freqresp, "freq_response", dir);
    if (!a.comms.empty()) sections["comms"] = load_section(a.comms, "comms", dir);
    if (!a.mech.empty()) sections["mechanical"] = load_section(a.mech, "mechanical", dir);
    if (!a.agreement.empty()) {
        json ag = {{"section", "agreement"}};
        std::optional<VerdictLevel> v;
        for (const auto& p : a.agreement) {
            json s = load_json(p);
            const std::string kind = s.is_object() ? s.value("section", "") : "";
            if (kind.rfind("agreement_", 0) != 0) throw Error(p + ": not an agreement section");
            const std::string key = kind.substr(10);
            if (ag.contains(key)) throw Error(p + ": duplicate agreement " + key + " section");
            rebase_artifacts(s, p, dir);
            if (auto sv = report::section_verdict(s)) v = v ? worst(*v, *sv) : *sv;
            ag[key] = std::move(s);
        }
        ag["verdict"] = v ? std::string(to_string(*v)) : "INFO";
        sections["agreement"] = std::move(ag);
    }
    const auto checklist = a.checklist.empty() ? report::Checklist{} : report::checklist_from_json(load_json(a.checklist));
    report::Metadata md{a.device, a.date, a.operator_name, to_json(cfg)};
    const auto r = report::build_report(std::move(sections), checklist, std::move(md));
    const std::string text = report::dump_canonical(report::to_json(r));
    const std::string markdown = report::render_markdown(r);
    Output files(c.out);
    files.write("report.json", text);
    files.write("report.md", markdown);
    if (c.json_stdout) {
        out << text;
    } else {
        for (const auto& [name, v] : r.section_verdicts) out << pad(name, 15) << v << "\n";
        out << "overall: " << to_string(r.overall) << "\n";
    }
    return exit_code(r.overall);
}

int do_synth(const Common& c, const SynthArgs& a, std::ostream& out) {
    if (c.out.empty()) throw Error("synth needs --out <dir>");
    for (const auto& f : synth::write_fixtures(c.out, a.seed)) out << f << "\n";
    return kExitPass;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"sEMG acquisition device validation toolkit", "emgvalid"};
    app.set_version_flag("--version", version_text());
    app.require_subcommand(1);

    Common common;
    app.add_option("--config", common.config_path, "JSON config merged over the defaults")->check(CLI::ExistingFile);
    app.add_flag("--json", common.json_stdout, "Print the JSON result instead of the text summary");

    auto add_out = [&](CLI::App* sub, const char* help) { return sub->add_option("--out", common.out, help); };
    auto add_globals = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "JSON config merged over the defaults")
            ->check(CLI::ExistingFile);
        sub->add_flag("--json", common.json_stdout, "Print the JSON result instead of the text summary");
    };

    SafetyArgs safety_args;
    auto* safety_cmd = app.add_subcommand("safety", "Leakage and patient auxiliary current compliance");
    safety_cmd->add_option("--leakage", safety_args.leakage, "Sensor × repetition leakage table (CSV)")
        ->check(CLI::ExistingFile);
    safety_cmd->add_option("--auxiliary", safety_args.auxiliary, "Auxiliary current repetitions (CSV)")
        ->check(CLI::ExistingFile);
    safety_cmd->add_flag("--worst-case", safety_args.worst_case, "Judge the worst repetition instead of the mean");
    safety_cmd->add_option("--leakage-unit", safety_args.leakage_unit, "Unit of the leakage table")
        ->check(CLI::IsMember({"ua", "mv"}));
    add_out(safety_cmd, "Output directory");
    add_globals(safety_cmd);

    StabilityArgs stab_args;
    auto* stab_cmd = app.add_subcommand("stability", "Baseline stability over no-load repetitions");
    stab_cmd->add_option("files", stab_args.files, "One recording CSV per repetition")
        ->required()
        ->check(CLI::ExistingFile);
    stab_cmd->add_option("--rate", stab_args.rate_hz, "Sampling rate (Hz)");
    stab_cmd->add_option("--channel", stab_args.channel, "Channel id to analyse");
    add_out(stab_cmd, "Output directory");
    add_globals(stab_cmd);

    FreqArgs freq_args;
    auto* freq_cmd = app.add_subcommand("freqresp", "Stage × frequency percentage error against simulation");
    freq_cmd->add_option("sweep", freq_args.sweep, "Sweep CSV (stage, frequency_hz, simulated, measured)")
        ->required()
        ->check(CLI::ExistingFile);
    freq_cmd->add_flag("--db", freq_args.db, "Gains are in dB");
    add_out(freq_cmd, "Output directory, or the matrix CSV path");
    add_globals(freq_cmd);

    CompareArgs cmp_args;
    auto* cmp_cmd = app.add_subcommand("compare", "Window-by-window agreement with a reference device");
    cmp_cmd->add_option("--prototype", cmp_args.prototype, "Prototype recording CSV")->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("--reference", cmp_args.reference, "Reference recording CSV")->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("--prototype-rate", cmp_args.prototype_rate, "Prototype sampling rate (Hz)");
    cmp_cmd->add_option("--reference-rate", cmp_args.reference_rate, "Reference sampling rate (Hz)");
    cmp_cmd->add_option("--prototype-channel", cmp_args.prototype_channel, "Prototype channel id (0: first)");
    cmp_cmd->add_option("--reference-channel", cmp_args.reference_channel, "Reference channel id (0: first)");
    cmp_cmd->add_option("--window-ms", cmp_args.window_ms, "Window length (ms)");
    cmp_cmd->add_option("--overlap", cmp_args.overlap, "Window overlap fraction");
    cmp_cmd->add_flag("--detrend", cmp_args.detrend, "Remove linear trends before alignment");
    cmp_cmd->add_flag("--keep-trailing", cmp_args.keep_trailing, "Keep a short trailing window");
    cmp_cmd->add_flag("--zero-mean-var", cmp_args.zero_mean_var, "VAR as mean of squares");
    add_out(cmp_cmd, "Output directory");
    add_globals(cmp_cmd);

    LatencyArgs lat_args;
    auto* lat_cmd = app.add_subcommand("latency", "Inter-channel threshold-crossing latency");
    lat_cmd->add_option("recording", lat_args.file, "Multichannel step recording CSV")->required()->check(CLI::ExistingFile);
    lat_cmd->add_option("--rate", lat_args.rate_hz, "Sampling rate (Hz)");
    lat_cmd->add_option("--pairs", lat_args.pairs, "Channel pairs, e.g. 2:4,4:8");
    lat_cmd->add_option("--threshold", lat_args.threshold, "Threshold as a fraction of peak-to-peak");
    lat_cmd->add_option("--refractory-ms", lat_args.refractory_ms, "Minimum spacing between events (ms)");
    add_out(lat_cmd, "Output directory");
    add_globals(lat_cmd);

    CrosstalkArgs xt_args;
    auto* xt_cmd = app.add_subcommand("crosstalk", "Crosstalk matrix from per-channel stimulus recordings");
    xt_cmd->add_option("dir", xt_args.dir, "Directory of stim_<channel>.csv files")->required()->check(CLI::ExistingDirectory);
    xt_cmd->add_option("--rate", xt_args.rate_hz, "Sampling rate (Hz)");
    add_out(xt_cmd, "Output directory");
    add_globals(xt_cmd);

    auto* comms_cmd = app.add_subcommand("comms", "Frame stream integrity");
    comms_cmd->require_subcommand(1);
    AnalyzeArgs an_args;
    auto* an_cmd = comms_cmd->add_subcommand("analyze", "Analyse a raw wire dump");
    an_cmd->add_option("dump", an_args.dump, "Concatenated wire bytes")->required()->check(CLI::ExistingFile);
    an_cmd->add_option("--rate", an_args.rate_hz, "Nominal frame rate (Hz)");
    an_cmd->add_option("--duration", an_args.duration_s, "Session length (s); 0 infers it");
    an_cmd->add_option("--tolerance", an_args.tolerance, "Allowed frame-count slack at session boundaries");
    add_out(an_cmd, "Output directory");
    add_globals(an_cmd);

    EmulateArgs em_args;
    auto* em_cmd = comms_cmd->add_subcommand("emulate", "Generate a fault-injected wire dump");
    em_cmd->add_option("--frames", em_args.frames, "Frames to generate");
    em_cmd->add_option("--drop", em_args.drop, "Per-frame drop probability")->check(CLI::Range(0.0, 1.0));
    em_cmd->add_option("--corrupt", em_args.corrupt, "Per-frame bit-flip probability")->check(CLI::Range(0.0, 1.0));
    em_cmd->add_option("--jitter-ms", em_args.jitter_ms, "Maximum timestamp jitter (ms)");
    em_cmd->add_option("--burst-start", em_args.burst_start, "First frame of a dropped burst");
    em_cmd->add_option("--burst-length", em_args.burst_length, "Frames in the dropped burst");
    em_cmd->add_option("--start-seq", em_args.start_seq, "Sequence number of the first frame");
    em_cmd->add_option("--rate", em_args.rate_hz, "Frame rate (Hz)");
    em_cmd->add_option("--seed", em_args.seed, "RNG seed");
    em_cmd->add_option("--out", em_args.out, "Dump file to write")->required();
    em_cmd->add_option("--ledger", em_args.ledger, "Fault ledger JSON to write");
    add_globals(em_cmd);

    MechArgs mech_args;
    auto* mech_cmd = app.add_subcommand("mech", "Compression stress-strain assessment");
    mech_cmd->add_option("log", mech_args.file, "Force-displacement CSV")->required()->check(CLI::ExistingFile);
    mech_cmd->add_option("--area-mm2", mech_args.area_mm2, "Loaded cross-section (mm^2)");
    mech_cmd->add_option("--height-mm", mech_args.height_mm, "Specimen height (mm)");
    mech_cmd->add_flag("--anchor-origin", mech_args.anchor_origin, "Fit through the origin");
    add_out(mech_cmd, "Output directory");
    add_globals(mech_cmd);

    ReportArgs rep_args;
    auto* rep_cmd = app.add_subcommand("report", "Consolidate section results into one report");
    rep_cmd->add_option("--safety", rep_args.safety, "safety.json")->check(CLI::ExistingFile);
    rep_cmd->add_option("--stability", rep_args.stability, "stability.json")->check(CLI::ExistingFile);
    rep_cmd->add_option("--freqresp", rep_args.freqresp, "Frequency-response JSON")->check(CLI::ExistingFile);
    rep_cmd->add_option("--agreement", rep_args.agreement, "compare/latency/crosstalk JSON (repeatable)")
        ->check(CLI::ExistingFile);
    rep_cmd->add_option("--comms", rep_args.comms, "comms.json")->check(CLI::ExistingFile);
    rep_cmd->add_option("--mech", rep_args.mech, "mech.json")->check(CLI::ExistingFile);
    rep_cmd->add_option("--checklist", rep_args.checklist, "Inspection checklist JSON")->check(CLI::ExistingFile);
    rep_cmd->add_option("--device", rep_args.device, "Device name");
    rep_cmd->add_option("--date", rep_args.date, "Test date");
    rep_cmd->add_option("--operator", rep_args.operator_name, "Operator name");
    add_out(rep_cmd, "Output directory for report.json and report.md");
    add_globals(rep_cmd);

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "Write the synthetic fixture set");
    synth_cmd->add_option("--seed", synth_args.seed, "RNG seed");
    add_out(synth_cmd, "Fixture directory")->required();
    add_globals(synth_cmd);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitPass : kExitUsage;
    }

    try {
        ToolkitConfig cfg = common.config_path.empty() ? ToolkitConfig{} : load_config(common.config_path);
        if (safety_cmd->parsed()) return do_safety(common, cfg, safety_args, out);
        if (stab_cmd->parsed()) return do_stability(common, stab_args, out);
        if (freq_cmd->parsed()) return do_freqresp(common, cfg, freq_args, out);
        if (cmp_cmd->parsed()) return do_compare(common, cfg, cmp_args, out);
        if (lat_cmd->parsed()) return do_latency(common, cfg, lat_args, out);
        if (xt_cmd->parsed()) return do_crosstalk(common, xt_args, out);
        if (an_cmd->parsed()) return do_comms_analyze(common, an_args, out);
        if (em_cmd->parsed()) return do_comms_emulate(common, em_args, out);
        if (mech_cmd->parsed()) return do_mech(common, cfg, mech_args, out);
        if (rep_cmd->parsed()) return do_report(common, cfg, rep_args, out);
        if (synth_cmd->parsed()) return do_synth(common, synth_args, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    err << app.help();
    return kExitUsage;
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace emgvalid::cli
