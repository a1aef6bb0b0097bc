#pragma once

#include "emgvalid/ingest.hpp"
#include "emgvalid/model.hpp"

#include <span>
#include <string>
#include <vector>

namespace emgvalid::safety {

/// Ohm's law across the sense resistor: I[uA] = V[mV] / (R[ohm] / 1000).
double current_from_voltage(double voltage_mv, double resistance_ohm);

/// Which per-sensor figure is held against the limit.
enum class VerdictBasis { Mean, WorstRepetition };

/// Unit of the values in an ingested repetition table.
enum class TableUnit { MicroAmp, MilliVolt };

struct SensorLeakage {
    std::string sensor_id;
    std::vector<double> currents_ua;
    DescriptiveStats stats;  // population SD
    double max_ua = 0.0;
    Verdict verdict;
};

struct LeakageAssessment {
    std::vector<SensorLeakage> per_sensor;
    double limit_ua = 0.0;
    double marginal_multiplier = 0.0;
    VerdictBasis basis = VerdictBasis::Mean;

    VerdictLevel overall() const;
};

LeakageAssessment assess_leakage(const ingest::RepetitionTable& table,
                                 const ComplianceThresholds& thresholds,
                                 VerdictBasis basis = VerdictBasis::Mean,
                                 TableUnit unit = TableUnit::MicroAmp);

struct AuxiliaryAssessment {
    std::vector<double> repetitions;
    double mean_ua = 0.0;
    /// Sample SD (n-1); absent for a single repetition.
    std::optional<double> sd_ua;
    Verdict verdict;
    std::size_t count_over_limit = 0;
};

AuxiliaryAssessment assess_auxiliary(std::span<const double> values_ua,
                                     const ComplianceThresholds& thresholds,
                                     VerdictBasis basis = VerdictBasis::Mean);

}  // namespace emgvalid::safety
