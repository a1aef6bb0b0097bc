#pragma once

#include "emgvalid/agreement.hpp"
#include "emgvalid/comms.hpp"
#include "emgvalid/mech.hpp"
#include "emgvalid/operation.hpp"
#include "emgvalid/safety.hpp"

#include "json.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace emgvalid::report {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolkitVersion = "0.1.0";

// ── Section encoders ──────────────────────────────────────────────────────
//
// Every section object carries "section" and "verdict" keys. "verdict" is
// PASS, MARGINAL, FAIL, or INFO for purely descriptive sections. Numbers are
// rounded to fixed decimals per field so output bytes are stable.

json stats_json(const DescriptiveStats& s, int decimals);

json leakage_json(const safety::LeakageAssessment& a);
json auxiliary_json(const safety::AuxiliaryAssessment& a, const ComplianceThresholds& t);
json safety_section(const std::optional<safety::LeakageAssessment>& leakage,
                    const std::optional<safety::AuxiliaryAssessment>& auxiliary,
                    const ComplianceThresholds& t);

json stability_section(const operation::StabilityReport& r);
json freqresp_section(const operation::ErrorMatrix& m, const std::map<int, std::string>& labels);

json compare_section(const agreement::AgreementReport& r);
json latency_section(const agreement::LatencyTable& t);
json crosstalk_section(const agreement::CrosstalkMatrix& m);

json comms_section(const comms::StreamIntegrityReport& r);
json ledger_json(const comms::FaultLedger& l, const comms::FaultPlan& plan);

json mech_section(const ingest::ForceDisplacementLog& log, const mech::StressStrainCurve& c,
                  const mech::ElasticAssessment& a, const mech::ElasticityOptions& opts,
                  const ComplianceThresholds& t);

/// Bland-Altman plot data: (mean, diff) points and the bias / limits lines.
std::string bland_altman_points_csv(const agreement::BlandAltman& ba);
std::string bland_altman_lines_csv(const agreement::BlandAltman& ba);
std::string stress_strain_csv(const mech::StressStrainCurve& c);
std::string latency_csv(const agreement::LatencyTable& t);

// ── Consolidated report ──────────────────────────────────────────────────

/// The six protocol categories, in report order.
inline constexpr std::array<const char*, 6> kSectionNames{
    "safety", "stability", "freq_response", "agreement", "comms", "mechanical"};

struct Checklist {
    /// Physical inspection entries; nullopt means not inspected.
    std::optional<bool> insulation_enclosed;
    std::optional<bool> electrodes_housed;
    // Comfort observations are recorded only, never scored.
    std::string comfort_notes;
    std::optional<bool> skin_marks_observed;
    std::optional<bool> readjustment_needed;
};

Checklist checklist_from_json(const json& j);
json to_json(const Checklist& c);

struct Metadata {
    std::string device;
    std::string date;
    std::string operator_name;
    json config = json::object();
};

struct ValidationReport {
    Metadata metadata;
    std::map<std::string, json> sections;  // keyed by kSectionNames entries
    Checklist checklist;
    std::map<std::string, std::string> section_verdicts;
    VerdictLevel overall = VerdictLevel::Pass;
    std::vector<std::string> notes;
};

/// Verdict of one section object; nullopt for INFO or missing.
std::optional<VerdictLevel> section_verdict(const json& section);

/// Worst-of aggregation over sections and checklist. An inspection entry
/// recorded as false fails the report. Throws when no section is present.
ValidationReport build_report(std::map<std::string, json> sections, Checklist checklist, Metadata metadata);

json to_json(const ValidationReport& r);
ValidationReport report_from_json(const json& j);

/// Canonical serialisation: sorted keys, two-space indent, trailing newline.
std::string dump_canonical(const json& j);

std::string render_markdown(const ValidationReport& r);

}  // namespace emgvalid::report
