#include "emgvalid/report.hpp"

#include "emgvalid/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace emgvalid::report {

namespace {

json num(double x, int decimals) {
    if (!std::isfinite(x)) return nullptr;
    return round_to(x, decimals);
}

json num(const std::optional<double>& x, int decimals) {
    return x ? num(*x, decimals) : json(nullptr);
}

json opt_bool(const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); }

std::string verdict_text(const std::optional<VerdictLevel>& v) {
    return v ? std::string(to_string(*v)) : "INFO";
}

std::string yes_no(const json& v) {
    if (v.is_null()) return "not recorded";
    return v.get<bool>() ? "yes" : "no";
}

/// Fixed-decimal text of a JSON number, "–" for null.
std::string fmt(const json& v, int decimals) {
    if (v.is_null()) return "–";
    return format_fixed(v.get<double>(), decimals);
}

std::string pair_name(int a, int b) { return std::to_string(a) + ":" + std::to_string(b); }

}  // namespace

// ── Section encoders ──────────────────────────────────────────────────────

json stats_json(const DescriptiveStats& s, int decimals) {
    return {{"n", s.n},
            {"mean", num(s.mean, decimals)},
            {"sd", num(s.sd, decimals)},
            {"cv_percent", num(s.cv_percent, 4)},
            {"mean_variation_percent", num(s.mean_variation_percent, 4)}};
}

json leakage_json(const safety::LeakageAssessment& a) {
    json sensors = json::array();
    for (const auto& s : a.per_sensor) {
        json reps = json::array();
        for (double v : s.currents_ua) reps.push_back(num(v, 2));
        sensors.push_back({{"sensor", s.sensor_id},
                           {"repetitions_ua", reps},
                           {"mean_ua", num(s.stats.mean, 2)},
                           {"sd_ua", num(s.stats.sd, 2)},
                           {"max_ua", num(s.max_ua, 2)},
                           {"verdict", to_string(s.verdict.level)}});
    }
    return {{"limit_ua", num(a.limit_ua, 2)},
            {"marginal_multiplier", num(a.marginal_multiplier, 2)},
            {"basis", a.basis == safety::VerdictBasis::Mean ? "mean" : "worst-repetition"},
            {"sd_convention", "population"},
            {"sensors", sensors},
            {"verdict", to_string(a.overall())}};
}

json auxiliary_json(const safety::AuxiliaryAssessment& a, const ComplianceThresholds& t) {
    json reps = json::array();
    for (double v : a.repetitions) reps.push_back(num(v, 2));
    return {{"limit_ua", num(t.auxiliary_limit_ua, 2)},
            {"repetitions_ua", reps},
            {"mean_ua", num(a.mean_ua, 2)},
            {"sd_ua", num(a.sd_ua, 2)},
            {"sd_convention", "sample"},
            {"count_over_limit", a.count_over_limit},
            {"verdict", to_string(a.verdict.level)}};
}

json safety_section(const std::optional<safety::LeakageAssessment>& leakage,
                    const std::optional<safety::AuxiliaryAssessment>& auxiliary,
                    const ComplianceThresholds& t) {
    if (!leakage && !auxiliary) throw Error("safety section needs leakage or auxiliary data");
    json j = {{"section", "safety"}};
    VerdictLevel v = VerdictLevel::Pass;
    if (leakage) {
        j["leakage"] = leakage_json(*leakage);
        v = worst(v, leakage->overall());
    }
    if (auxiliary) {
        j["auxiliary"] = auxiliary_json(*auxiliary, t);
        v = worst(v, auxiliary->verdict.level);
    }
    j["verdict"] = to_string(v);
    return j;
}

json stability_section(const operation::StabilityReport& r) {
    json reps = json::array();
    for (std::size_t i = 0; i < r.per_repetition.size(); ++i) {
        json s = stats_json(r.per_repetition[i], 4);
        s["repetition"] = i + 1;
        reps.push_back(s);
    }
    return {{"section", "stability"},
            {"unit", "mV"},
            {"repetitions", reps},
            {"overall", stats_json(r.overall, 4)},
            {"column_means",
             {{"mean", num(r.column_means.mean, 4)},
              {"sd", num(r.column_means.sd, 4)},
              {"cv_percent", num(r.column_means.cv_percent, 4)},
              {"mean_variation_percent", num(r.column_means.mean_variation_percent, 4)}}},
            {"warnings", r.warnings},
            {"verdict", "INFO"}};
}

json freqresp_section(const operation::ErrorMatrix& m, const std::map<int, std::string>& labels) {
    json freqs = json::array();
    for (double f : m.frequencies_hz()) freqs.push_back(f);
    json rows = json::array();
    json stage_labels = json::object();
    std::optional<std::tuple<int, double, double>> extreme;
    for (std::size_t s = 0; s < m.stages().size(); ++s) {
        const int stage = m.stages()[s];
        if (auto it = labels.find(stage); it != labels.end()) stage_labels[std::to_string(stage)] = it->second;
        json row = json::array();
        for (std::size_t f = 0; f < m.frequencies_hz().size(); ++f) {
            const auto& c = m.at(s, f);
            row.push_back(num(c, 2));
            if (c && (!extreme || std::abs(*c) > std::abs(std::get<2>(*extreme))))
                extreme = std::tuple{stage, m.frequencies_hz()[f], *c};
        }
        rows.push_back(row);
    }
    json j = {{"section", "freq_response"},
              {"stages", m.stages()},
              {"stage_labels", stage_labels},
              {"frequencies_hz", freqs},
              {"pe_percent", rows},
              {"missing_cells", m.missing_count()},
              {"verdict", "INFO"}};
    if (extreme)
        j["max_abs_pe"] = {{"stage", std::get<0>(*extreme)},
                           {"frequency_hz", std::get<1>(*extreme)},
                           {"pe_percent", num(std::get<2>(*extreme), 2)}};
    else
        j["max_abs_pe"] = nullptr;
    return j;
}

json compare_section(const agreement::AgreementReport& r) {
    json feats = json::array();
    for (auto f : agreement::kAllFeatures) {
        const auto& fa = r.features.at(f);
        feats.push_back({{"feature", agreement::to_string(f)},
                         {"name", agreement::long_name(f)},
                         {"mape_percent", num(fa.mape_percent, 2)},
                         {"one_minus_mape_percent", num(fa.one_minus_mape_percent, 2)},
                         {"pearson_r", num(fa.pearson_r, 4)}});
    }
    const auto& ba = r.bland_altman_rms;
    return {{"section", "agreement_compare"},
            {"common_rate_hz", num(r.common_rate_hz, 4)},
            {"lag_samples", r.lag_samples},
            {"alignment_correlation", num(r.alignment_correlation, 4)},
            {"aligned_samples", r.aligned_samples},
            {"window",
             {{"length_samples", r.plan.length_samples},
              {"overlap_fraction", num(r.plan.overlap_fraction, 4)},
              {"step_samples", r.plan.step()},
              {"trailing", r.plan.trailing == agreement::TrailingWindow::Drop ? "drop" : "keep"}}},
            {"windows", r.reference_features.at(agreement::Feature::Rms).values.size()},
            {"features", feats},
            {"bland_altman_rms",
             {{"n", ba.points.size()},
              {"bias", num(ba.bias, 4)},
              {"sd_diff", num(ba.sd_diff, 4)},
              {"loa_low", num(ba.loa_low, 4)},
              {"loa_high", num(ba.loa_high, 4)},
              {"fraction_within_loa", num(ba.fraction_within_loa, 4)}}},
            {"verdict", "INFO"}};
}

json latency_section(const agreement::LatencyTable& t) {
    json events = json::array();
    for (const auto& e : t.events) {
        json crossing = json::object();
        for (const auto& [ch, ms] : e.crossing_ms) crossing[std::to_string(ch)] = num(ms, 3);
        json deltas = json::array();
        for (const auto& d : e.deltas)
            deltas.push_back({{"pair", pair_name(d.channel_a, d.channel_b)}, {"delta_ms", num(d.delta_ms, 3)}});
        events.push_back({{"event", e.event_id}, {"crossing_ms", crossing}, {"deltas", deltas}});
    }
    json pairs = json::array();
    for (const auto& [a, b] : t.pairs) pairs.push_back(pair_name(a, b));
    const bool ok = t.within_one_interval() && t.missing_crossings() == 0 && !t.events.empty();
    return {{"section", "agreement_latency"},
            {"sample_interval_ms", num(t.sample_interval_ms, 4)},
            {"channels", t.channels},
            {"pairs", pairs},
            {"events", events},
            {"max_delta_ms", num(t.max_delta_ms(), 3)},
            {"missing_crossings", t.missing_crossings()},
            {"within_one_interval", t.within_one_interval()},
            {"verdict", ok ? "PASS" : "FAIL"}};
}

json crosstalk_section(const agreement::CrosstalkMatrix& m) {
    json rows = json::array();
    for (const auto& row : m.db) {
        json r = json::array();
        for (const auto& c : row) r.push_back(num(c, 2));
        rows.push_back(r);
    }
    return {{"section", "agreement_crosstalk"},
            {"stimulated", m.stimulated},
            {"channels", m.channels},
            {"db", rows},
            {"worst_db", num(m.worst_db(), 2)},
            {"verdict", "INFO"}};
}

json comms_section(const comms::StreamIntegrityReport& r) {
    json gaps = json::array();
    for (const auto& g : r.gaps)
        gaps.push_back({{"after_seq", g.after_seq},
                        {"resume_seq", g.resume_seq},
                        {"missing", g.missing},
                        {"byte_offset", g.byte_offset}});
    return {{"section", "comms"},
            {"bytes", r.bytes},
            {"nominal_rate_hz", num(r.nominal_rate_hz, 4)},
            {"duration_s", num(r.duration_s, 4)},
            {"expected_frames", r.expected_frames},
            {"received_ok", r.received_ok},
            {"lost", r.lost},
            {"corrupted", r.corrupted},
            {"resyncs", r.resyncs},
            {"garbage_bytes", r.garbage_bytes},
            {"out_of_order", r.out_of_order},
            {"count_tolerance_frames", r.count_tolerance_frames},
            {"count_matches_expected", r.count_matches_expected},
            {"continuity_ok", r.continuity_ok},
            {"max_inter_frame_gap_ms", num(r.max_inter_frame_gap_ms, 3)},
            {"gaps", gaps},
            {"verdict", to_string(r.verdict())}};
}

json ledger_json(const comms::FaultLedger& l, const comms::FaultPlan& plan) {
    json faults = json::array();
    for (const auto& f : l.faults) {
        json e = {{"type", comms::to_string(f.type)}, {"frame", f.frame_index}, {"seq", f.seq}};
        if (f.type == comms::FaultType::Corrupt) {
            e["byte"] = f.byte;
            e["bit"] = f.bit;
        }
        faults.push_back(e);
    }
    json p = {{"drop_probability", plan.drop_probability},
              {"corrupt_probability", plan.corrupt_probability},
              {"jitter_ms", plan.jitter_ms},
              {"seed", plan.rng_seed},
              {"rate_hz", plan.rate_hz},
              {"start_seq", plan.start_seq}};
    p["burst_drop"] = plan.burst_drop ? json{{"start_frame", plan.burst_drop->start_frame},
                                             {"length", plan.burst_drop->length}}
                                      : json(nullptr);
    return {{"plan", p},
            {"frames_generated", l.frames_generated},
            {"frames_emitted", l.frames_emitted},
            {"counts",
             {{"drop", l.count(comms::FaultType::Drop)},
              {"burst_drop", l.count(comms::FaultType::BurstDrop)},
              {"corrupt", l.corrupted()},
              {"interior_dropped", l.interior_dropped()},
              {"expected_resyncs", l.expected_resyncs}}},
            {"faults", faults}};
}

json mech_section(const ingest::ForceDisplacementLog& log, const mech::StressStrainCurve& c,
                  const mech::ElasticAssessment& a, const mech::ElasticityOptions& opts,
                  const ComplianceThresholds& t) {
    return {{"section", "mechanical"},
            {"area_mm2", num(log.area_mm2, 4)},
            {"height_mm", num(log.height_mm, 4)},
            {"points", c.points.size()},
            {"points_fitted", a.points_fitted},
            {"max_force_n", num(c.max_force_n, 2)},
            {"max_stress_mpa", num(c.max_stress_mpa, 4)},
            {"max_strain", num(c.max_strain, 4)},
            {"fit", opts.fit == mech::FitMode::FreeIntercept ? "free-intercept" : "anchor-origin"},
            {"linear_r2", num(a.linear_r2, 4)},
            {"min_r2", num(opts.min_r2, 4)},
            {"modulus_estimate_mpa", num(a.modulus_estimate_mpa, 2)},
            {"intercept_mpa", num(a.intercept_mpa, 4)},
            {"yield_low_mpa", num(t.petg_yield_mpa.low_mpa, 2)},
            {"yield_high_mpa", num(t.petg_yield_mpa.high_mpa, 2)},
            {"safety_factor", num(a.safety_factor, 1)},
            {"verdict_elastic", a.verdict_elastic},
            {"residual_strain", num(a.residual_strain, 4)},
            {"plastic_deformation_flag", a.plastic_deformation_flag},
            {"verdict", to_string(a.verdict())}};
}

std::string bland_altman_points_csv(const agreement::BlandAltman& ba) {
    std::string out = "mean,diff\n";
    for (const auto& p : ba.points)
        out += ingest::format_number(p.mean) + "," + ingest::format_number(p.diff) + "\n";
    return out;
}

std::string bland_altman_lines_csv(const agreement::BlandAltman& ba) {
    return "bias,loa_low,loa_high\n" + ingest::format_number(ba.bias) + "," +
           ingest::format_number(ba.loa_low) + "," + ingest::format_number(ba.loa_high) + "\n";
}

std::string stress_strain_csv(const mech::StressStrainCurve& c) {
    std::string out = "strain,stress_mpa\n";
    for (const auto& p : c.points)
        out += ingest::format_number(p.strain) + "," + ingest::format_number(p.stress_mpa) + "\n";
    return out;
}

std::string latency_csv(const agreement::LatencyTable& t) {
    std::string out = "event";
    for (int ch : t.channels) out += ",ch" + std::to_string(ch) + "_ms";
    for (const auto& [a, b] : t.pairs) out += ",delta_" + std::to_string(a) + "_" + std::to_string(b) + "_ms";
    out += '\n';
    for (const auto& e : t.events) {
        out += std::to_string(e.event_id);
        for (int ch : t.channels) {
            out += ',';
            if (const auto& v = e.crossing_ms.at(ch)) out += ingest::format_number(*v);
        }
        for (const auto& d : e.deltas) {
            out += ',';
            if (d.delta_ms) out += ingest::format_number(*d.delta_ms);
        }
        out += '\n';
    }
    return out;
}

// ── Consolidated report ──────────────────────────────────────────────────

Checklist checklist_from_json(const json& j) {
    if (!j.is_object()) throw Error("checklist must be a JSON object");
    Checklist c;
    auto get_bool = [&](const json& obj, const char* key) -> std::optional<bool> {
        if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
        if (!obj.at(key).is_boolean()) throw Error(std::string("checklist entry '") + key + "' must be boolean");
        return obj.at(key).get<bool>();
    };
    for (const auto& [k, v] : j.items())
        if (k != "insulation_enclosed" && k != "electrodes_housed" && k != "comfort")
            throw Error("unknown checklist entry '" + k + "'");
    c.insulation_enclosed = get_bool(j, "insulation_enclosed");
    c.electrodes_housed = get_bool(j, "electrodes_housed");
    if (j.contains("comfort") && !j.at("comfort").is_null()) {
        const auto& cf = j.at("comfort");
        if (!cf.is_object()) throw Error("checklist comfort entry must be an object");
        if (cf.contains("notes") && !cf.at("notes").is_null()) c.comfort_notes = cf.at("notes").get<std::string>();
        c.skin_marks_observed = get_bool(cf, "skin_marks_observed");
        c.readjustment_needed = get_bool(cf, "readjustment_needed");
    }
    return c;
}

json to_json(const Checklist& c) {
    return {{"insulation_enclosed", opt_bool(c.insulation_enclosed)},
            {"electrodes_housed", opt_bool(c.electrodes_housed)},
            {"comfort",
             {{"notes", c.comfort_notes},
              {"skin_marks_observed", opt_bool(c.skin_marks_observed)},
              {"readjustment_needed", opt_bool(c.readjustment_needed)}}}};
}

std::optional<VerdictLevel> section_verdict(const json& section) {
    if (!section.is_object() || !section.contains("verdict")) return std::nullopt;
    const auto v = section.at("verdict").get<std::string>();
    if (v == "INFO") return std::nullopt;
    return parse_verdict(v);
}

ValidationReport build_report(std::map<std::string, json> sections, Checklist checklist, Metadata metadata) {
    for (const auto& [name, body] : sections) {
        if (std::find_if(kSectionNames.begin(), kSectionNames.end(),
                         [&](const char* s) { return name == s; }) == kSectionNames.end())
            throw Error("unknown report section '" + name + "'");
        if (!body.is_object()) throw Error("report section '" + name + "' must be a JSON object");
    }
    if (sections.empty()) throw Error("report needs at least one section");

    ValidationReport r;
    r.metadata = std::move(metadata);
    r.checklist = std::move(checklist);
    r.sections = std::move(sections);

    VerdictLevel overall = VerdictLevel::Pass;
    for (const auto& [name, body] : r.sections) {
        const auto v = section_verdict(body);
        r.section_verdicts[name] = verdict_text(v);
        if (v) {
            overall = worst(overall, *v);
            if (*v == VerdictLevel::Marginal)
                r.notes.push_back(name + " is MARGINAL: above its limit but within the marginal band; "
                                         "the overall verdict is demoted to MARGINAL, not FAIL");
            else if (*v == VerdictLevel::Fail)
                r.notes.push_back(name + " is FAIL");
        }
    }
    auto inspect = [&](const std::optional<bool>& item, const char* what) {
        if (!item)
            r.notes.push_back(std::string(what) + " not recorded; not counted toward the verdict");
        else if (!*item) {
            overall = VerdictLevel::Fail;
            r.notes.push_back(std::string(what) + " inspection failed");
        }
    };
    inspect(r.checklist.insulation_enclosed, "insulation_enclosed");
    inspect(r.checklist.electrodes_housed, "electrodes_housed");
    r.overall = overall;
    return r;
}

json to_json(const ValidationReport& r) {
    json sections = json::object();
    for (const auto& [k, v] : r.sections) sections[k] = v;
    return {{"schema_version", kSchemaVersion},
            {"toolkit_version", kToolkitVersion},
            {"metadata",
             {{"device", r.metadata.device},
              {"date", r.metadata.date},
              {"operator", r.metadata.operator_name},
              {"config", r.metadata.config}}},
            {"sections", sections},
            {"section_verdicts", r.section_verdicts},
            {"checklist", to_json(r.checklist)},
            {"overall_verdict", to_string(r.overall)},
            {"notes", r.notes}};
}

ValidationReport report_from_json(const json& j) {
    if (!j.is_object() || j.value("schema_version", 0) != kSchemaVersion)
        throw Error("not a schema_version 1 validation report");
    ValidationReport r;
    const auto& md = j.at("metadata");
    r.metadata.device = md.at("device").get<std::string>();
    r.metadata.date = md.at("date").get<std::string>();
    r.metadata.operator_name = md.at("operator").get<std::string>();
    r.metadata.config = md.at("config");
    for (const auto& [k, v] : j.at("sections").items()) r.sections[k] = v;
    r.section_verdicts = j.at("section_verdicts").get<std::map<std::string, std::string>>();
    r.checklist = checklist_from_json(j.at("checklist"));
    r.overall = parse_verdict(j.at("overall_verdict").get<std::string>());
    r.notes = j.at("notes").get<std::vector<std::string>>();
    return r;
}

std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

// ── Markdown ──────────────────────────────────────────────────────────────

namespace {

void md_safety(std::ostringstream& o, const json& s) {
    if (s.contains("leakage")) {
        const auto& l = s.at("leakage");
        std::size_t reps = 0;
        for (const auto& sensor : l.at("sensors")) reps = std::max(reps, sensor.at("repetitions_ua").size());
        o << "### Leakage current (µA)\n\n"
          << "Limit " << fmt(l.at("limit_ua"), 2) << " µA, marginal band up to ×"
          << fmt(l.at("marginal_multiplier"), 2) << ", judged on the per-sensor "
          << l.at("basis").get<std::string>() << ".\n\n| Sensor |";
        for (std::size_t i = 0; i < reps; ++i) o << " " << i + 1 << " |";
        o << " Mean ± std | Verdict |\n|---|";
        for (std::size_t i = 0; i < reps; ++i) o << "---|";
        o << "---|---|\n";
        for (const auto& sensor : l.at("sensors")) {
            o << "| " << sensor.at("sensor").get<std::string>() << " |";
            const auto& rv = sensor.at("repetitions_ua");
            for (std::size_t i = 0; i < reps; ++i) o << " " << (i < rv.size() ? fmt(rv[i], 2) : "") << " |";
            o << " " << fmt(sensor.at("mean_ua"), 2) << " ± " << fmt(sensor.at("sd_ua"), 2) << " | "
              << sensor.at("verdict").get<std::string>() << " |\n";
        }
        o << "\n";
    }
    if (s.contains("auxiliary")) {
        const auto& a = s.at("auxiliary");
        o << "### Patient auxiliary current (µA)\n\n| Repetition | Patient auxiliary current |\n|---|---|\n";
        std::size_t i = 1;
        for (const auto& v : a.at("repetitions_ua")) o << "| " << i++ << " | " << fmt(v, 2) << " |\n";
        o << "| Mean | " << fmt(a.at("mean_ua"), 2) << " ± " << fmt(a.at("sd_ua"), 2) << " |\n\n"
          << "Limit " << fmt(a.at("limit_ua"), 2) << " µA; " << a.at("count_over_limit").get<std::size_t>()
          << " repetition(s) above the limit; verdict " << a.at("verdict").get<std::string>() << ".\n\n";
    }
}

void md_stats_row(std::ostringstream& o, const std::string& label, const json& s) {
    o << "| " << label << " | " << fmt(s.at("mean"), 4) << " | " << fmt(s.at("sd"), 4) << " | "
      << fmt(s.at("cv_percent"), 4) << " | " << fmt(s.at("mean_variation_percent"), 4) << " |\n";
}

void md_stability(std::ostringstream& o, const json& s) {
    o << "| Repetition | Mean (mV) | SD (mV) | CV (%) | Mean variation (%) |\n|---|---|---|---|---|\n";
    for (const auto& r : s.at("repetitions")) md_stats_row(o, std::to_string(r.at("repetition").get<int>()), r);
    md_stats_row(o, "Mean", s.at("column_means"));
    o << "\nStatistics over the repetition means: mean " << fmt(s.at("overall").at("mean"), 4) << " mV, SD "
      << fmt(s.at("overall").at("sd"), 4) << " mV.\n";
    for (const auto& w : s.at("warnings")) o << "\n> Warning: " << w.get<std::string>() << "\n";
    o << "\n";
}

void md_freqresp(std::ostringstream& o, const json& s) {
    o << "Percentage error of measured vs simulated gain (%). Blank cells were not measured.\n\n| Stage |";
    for (const auto& f : s.at("frequencies_hz")) o << " " << ingest::format_number(f.get<double>()) << " Hz |";
    o << "\n|---|";
    for (std::size_t i = 0; i < s.at("frequencies_hz").size(); ++i) o << "---|";
    o << "\n";
    const auto& labels = s.at("stage_labels");
    for (std::size_t r = 0; r < s.at("stages").size(); ++r) {
        const auto stage = std::to_string(s.at("stages")[r].get<int>());
        o << "| " << stage;
        if (labels.contains(stage)) o << " (" << labels.at(stage).get<std::string>() << ")";
        o << " |";
        for (const auto& c : s.at("pe_percent")[r]) o << " " << (c.is_null() ? "" : fmt(c, 2)) << " |";
        o << "\n";
    }
    if (!s.at("max_abs_pe").is_null()) {
        const auto& m = s.at("max_abs_pe");
        o << "\nLargest deviation: stage " << m.at("stage").get<int>() << " at "
          << ingest::format_number(m.at("frequency_hz").get<double>()) << " Hz, " << fmt(m.at("pe_percent"), 2)
          << "%.\n";
    }
    o << "\n";
}

void md_agreement(std::ostringstream& o, const json& s) {
    if (s.contains("latency")) {
        const auto& l = s.at("latency");
        o << "### Inter-channel latency (ms)\n\n| Event |";
        for (const auto& ch : l.at("channels")) o << " Channel " << ch.get<int>() << " |";
        for (const auto& p : l.at("pairs")) o << " Δ " << p.get<std::string>() << " |";
        o << "\n|---|";
        for (std::size_t i = 0; i < l.at("channels").size() + l.at("pairs").size(); ++i) o << "---|";
        o << "\n";
        for (const auto& e : l.at("events")) {
            o << "| " << e.at("event").get<int>() << " |";
            for (const auto& ch : l.at("channels")) o << " " << fmt(e.at("crossing_ms").at(std::to_string(ch.get<int>())), 0) << " |";
            for (const auto& d : e.at("deltas")) o << " " << fmt(d.at("delta_ms"), 0) << " |";
            o << "\n";
        }
        o << "\nSampling interval " << fmt(l.at("sample_interval_ms"), 4) << " ms; largest delta "
          << fmt(l.at("max_delta_ms"), 3) << " ms; within one interval: "
          << (l.at("within_one_interval").get<bool>() ? "yes" : "no") << ".\n\n";
    }
    if (s.contains("compare")) {
        const auto& c = s.at("compare");
        o << "### Window-by-window feature agreement\n\n| Metric | 1 – MAPE (%) | Pearson correlation |\n|---|---|---|\n";
        for (const auto& f : c.at("features"))
            o << "| " << f.at("feature").get<std::string>() << " (" << f.at("name").get<std::string>() << ") | "
              << fmt(f.at("one_minus_mape_percent"), 2) << " | " << fmt(f.at("pearson_r"), 2) << " |\n";
        const auto& ba = c.at("bland_altman_rms");
        o << "\nBland–Altman on RMS (prototype − reference, n = " << ba.at("n").get<std::size_t>() << "): bias "
          << fmt(ba.at("bias"), 4) << ", limits of agreement [" << fmt(ba.at("loa_low"), 4) << ", "
          << fmt(ba.at("loa_high"), 4) << "], " << fmt(ba.at("fraction_within_loa"), 4)
          << " of points within.\n\n";
    }
    if (s.contains("crosstalk")) {
        const auto& x = s.at("crosstalk");
        o << "### Crosstalk (dB relative to the stimulated channel)\n\n| Stimulated |";
        for (const auto& ch : x.at("channels")) o << " Ch " << ch.get<int>() << " |";
        o << "\n|---|";
        for (std::size_t i = 0; i < x.at("channels").size(); ++i) o << "---|";
        o << "\n";
        for (std::size_t r = 0; r < x.at("stimulated").size(); ++r) {
            o << "| " << x.at("stimulated")[r].get<int>() << " |";
            for (const auto& c : x.at("db")[r]) o << " " << fmt(c, 2) << " |";
            o << "\n";
        }
        o << "\nWorst coupling: " << fmt(x.at("worst_db"), 2) << " dB.\n\n";
    }
}

void md_comms(std::ostringstream& o, const json& s) {
    o << "| Quantity | Value |\n|---|---|\n"
      << "| Expected frames | " << s.at("expected_frames").get<std::uint64_t>() << " |\n"
      << "| Received intact | " << s.at("received_ok").get<std::uint64_t>() << " |\n"
      << "| Lost | " << s.at("lost").get<std::uint64_t>() << " |\n"
      << "| Corrupted | " << s.at("corrupted").get<std::uint64_t>() << " |\n"
      << "| Resyncs | " << s.at("resyncs").get<std::uint64_t>() << " |\n"
      << "| Max inter-frame gap (ms) | " << fmt(s.at("max_inter_frame_gap_ms"), 0) << " |\n"
      << "| Continuity | " << (s.at("continuity_ok").get<bool>() ? "ok" : "broken") << " |\n"
      << "| Count matches expected (±" << s.at("count_tolerance_frames").get<std::uint64_t>() << ") | "
      << (s.at("count_matches_expected").get<bool>() ? "yes" : "no") << " |\n\n";
}

void md_mech(std::ostringstream& o, const json& s) {
    o << "| Quantity | Value |\n|---|---|\n"
      << "| Max force (N) | " << fmt(s.at("max_force_n"), 2) << " |\n"
      << "| Max stress (MPa) | " << fmt(s.at("max_stress_mpa"), 4) << " |\n"
      << "| Linear fit r² (" << s.at("fit").get<std::string>() << ") | " << fmt(s.at("linear_r2"), 4) << " |\n"
      << "| Modulus estimate (MPa) | " << fmt(s.at("modulus_estimate_mpa"), 2) << " |\n"
      << "| Safety factor vs " << fmt(s.at("yield_low_mpa"), 0) << " MPa yield | " << fmt(s.at("safety_factor"), 1)
      << " |\n"
      << "| Elastic | " << (s.at("verdict_elastic").get<bool>() ? "yes" : "no") << " |\n"
      << "| Residual strain | " << fmt(s.at("residual_strain"), 4) << " |\n\n";
}

const char* section_title(const std::string& name) {
    if (name == "safety") return "Electrical safety";
    if (name == "stability") return "Baseline stability";
    if (name == "freq_response") return "Frequency response";
    if (name == "agreement") return "Signal agreement";
    if (name == "comms") return "Communication integrity";
    if (name == "mechanical") return "Mechanical compression";
    return "Section";
}

}  // namespace

std::string render_markdown(const ValidationReport& r) {
    std::ostringstream o;
    o << "# sEMG device validation report\n\n"
      << "- Device: " << (r.metadata.device.empty() ? "unspecified" : r.metadata.device) << "\n"
      << "- Date: " << (r.metadata.date.empty() ? "unspecified" : r.metadata.date) << "\n"
      << "- Operator: " << (r.metadata.operator_name.empty() ? "unspecified" : r.metadata.operator_name) << "\n"
      << "- Report schema: " << kSchemaVersion << ", toolkit " << kToolkitVersion << "\n\n"
      << "**Overall verdict: " << to_string(r.overall) << "**\n\n"
      << "| Section | Verdict |\n|---|---|\n";
    for (const char* name : kSectionNames)
        if (auto it = r.section_verdicts.find(name); it != r.section_verdicts.end())
            o << "| " << section_title(name) << " | " << it->second << " |\n";
    o << "\n";
    if (!r.notes.empty()) {
        o << "Verdict reasoning:\n\n";
        for (const auto& n : r.notes) o << "- " << n << "\n";
        o << "\n";
    }

    const json cl = to_json(r.checklist);
    o << "## Inspection checklist\n\n| Item | Result |\n|---|---|\n"
      << "| Circuitry enclosed, no skin contact (double insulation) | " << yes_no(cl.at("insulation_enclosed")) << " |\n"
      << "| Electrode circuits in individual housings | " << yes_no(cl.at("electrodes_housed")) << " |\n"
      << "| Comfort: skin marks observed | " << yes_no(cl.at("comfort").at("skin_marks_observed")) << " |\n"
      << "| Comfort: readjustment needed | " << yes_no(cl.at("comfort").at("readjustment_needed")) << " |\n\n";
    if (!r.checklist.comfort_notes.empty()) o << "Comfort notes: " << r.checklist.comfort_notes << "\n\n";

    for (const char* name : kSectionNames) {
        auto it = r.sections.find(name);
        if (it == r.sections.end()) continue;
        o << "## " << section_title(name) << "\n\n";
        const json& s = it->second;
        const std::string n = name;
        if (n == "safety") md_safety(o, s);
        else if (n == "stability") md_stability(o, s);
        else if (n == "freq_response") md_freqresp(o, s);
        else if (n == "agreement") md_agreement(o, s);
        else if (n == "comms") md_comms(o, s);
        else if (n == "mechanical") md_mech(o, s);
        if (s.contains("artifacts") && s.at("artifacts").is_object() && !s.at("artifacts").empty()) {
            o << "Plot data:\n\n";
            for (const auto& [k, v] : s.at("artifacts").items()) o << "- " << k << ": `" << v.get<std::string>() << "`\n";
            o << "\n";
        }
    }
    o << "This is a technical validation record, not a certification document.\n";
    return o.str();
}

}  // namespace emgvalid::report
