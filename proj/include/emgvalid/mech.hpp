#pragma once

#include "emgvalid/ingest.hpp"
#include "emgvalid/model.hpp"

#include <optional>
#include <vector>

namespace emgvalid::mech {

struct StressStrainPoint {
    double stress_mpa = 0.0;  // engineering stress, F / A0
    double strain = 0.0;      // engineering strain, d / h0
};

struct StressStrainCurve {
    std::vector<StressStrainPoint> points;
    std::size_t peak_index = 0;  // last loading point; later points are unloading
    double max_stress_mpa = 0.0;
    double max_force_n = 0.0;
    double max_strain = 0.0;

    bool has_unloading() const { return peak_index + 1 < points.size(); }
};

/// N / mm^2 is MPa, so stress needs no unit conversion.
StressStrainCurve build_curve(const ingest::ForceDisplacementLog& log);

enum class FitMode { FreeIntercept, AnchorOrigin };

struct ElasticityOptions {
    FitMode fit = FitMode::FreeIntercept;
    double min_r2 = 0.98;
    /// Residual strain at zero force above this flags plastic deformation.
    double residual_strain_limit = 0.005;
};

struct ElasticAssessment {
    double linear_r2 = 0.0;
    double modulus_estimate_mpa = 0.0;  // slope of stress vs strain
    double intercept_mpa = 0.0;
    double safety_factor = 0.0;         // yield low bound / max stress
    bool verdict_elastic = false;
    std::optional<double> residual_strain;
    bool plastic_deformation_flag = false;
    std::size_t points_fitted = 0;

    VerdictLevel verdict() const;
};

/// Least-squares fit over the loading segment. r^2 is clamped to [0, 1]
/// (an origin-anchored fit can do worse than the mean).
ElasticAssessment assess_elasticity(const StressStrainCurve& curve, const ComplianceThresholds& thresholds,
                                    const ElasticityOptions& opts = {});

}  // namespace emgvalid::mech
