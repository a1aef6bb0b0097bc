#include "emgvalid/safety.hpp"

#include <algorithm>
#include <cmath>

namespace emgvalid::safety {

double current_from_voltage(double voltage_mv, double resistance_ohm) {
    if (!(resistance_ohm > 0.0)) throw Error("resistance must be > 0 ohm");
    if (!std::isfinite(voltage_mv)) throw Error("voltage must be finite");
    return voltage_mv / (resistance_ohm / 1000.0);
}

VerdictLevel LeakageAssessment::overall() const {
    VerdictLevel v = VerdictLevel::Pass;
    for (const auto& s : per_sensor) v = worst(v, s.verdict.level);
    return v;
}

LeakageAssessment assess_leakage(const ingest::RepetitionTable& table,
                                 const ComplianceThresholds& thresholds, VerdictBasis basis,
                                 TableUnit unit) {
    thresholds.validate();
    if (table.rows.empty()) throw Error("leakage table has no sensors");

    LeakageAssessment out;
    out.limit_ua = thresholds.leakage_limit_ua;
    out.marginal_multiplier = thresholds.marginal_multiplier;
    out.basis = basis;

    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string label = r < table.labels.size() ? table.labels[r] : std::to_string(r + 1);
        if (row.empty()) throw Error("sensor " + label + " has no repetitions");

        SensorLeakage s;
        s.sensor_id = label;
        s.currents_ua.reserve(row.size());
        for (double v : row) {
            const double ua = unit == TableUnit::MilliVolt
                                  ? current_from_voltage(v, thresholds.body_resistance_ohm)
                                  : v;
            if (ua < 0.0) throw Error("negative leakage current for sensor " + label);
            s.currents_ua.push_back(ua);
        }
        s.stats = descriptive_stats(s.currents_ua);
        s.max_ua = *std::max_element(s.currents_ua.begin(), s.currents_ua.end());
        const double judged = basis == VerdictBasis::Mean ? s.stats.mean : s.max_ua;
        s.verdict = verdict(judged, thresholds.leakage_limit_ua, thresholds.marginal_multiplier);
        out.per_sensor.push_back(std::move(s));
    }
    return out;
}

AuxiliaryAssessment assess_auxiliary(std::span<const double> values_ua,
                                     const ComplianceThresholds& thresholds, VerdictBasis basis) {
    thresholds.validate();
    if (values_ua.empty()) throw Error("auxiliary current series is empty");

    AuxiliaryAssessment out;
    out.repetitions.assign(values_ua.begin(), values_ua.end());
    for (double v : out.repetitions)
        if (!std::isfinite(v) || v < 0.0) throw Error("auxiliary currents must be finite and >= 0");

    out.mean_ua = mean_of(out.repetitions);
    if (out.repetitions.size() >= 2) out.sd_ua = sample_sd(out.repetitions);
    out.count_over_limit = static_cast<std::size_t>(
        std::count_if(out.repetitions.begin(), out.repetitions.end(),
                      [&](double v) { return v > thresholds.auxiliary_limit_ua; }));
    const double judged = basis == VerdictBasis::Mean
                              ? out.mean_ua
                              : *std::max_element(out.repetitions.begin(), out.repetitions.end());
    out.verdict = verdict(judged, thresholds.auxiliary_limit_ua, thresholds.marginal_multiplier);
    return out;
}

}  // namespace emgvalid::safety
