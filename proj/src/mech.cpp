#include "emgvalid/mech.hpp"

#include <algorithm>
#include <cmath>

namespace emgvalid::mech {

StressStrainCurve build_curve(const ingest::ForceDisplacementLog& log) {
    ingest::validate(log);
    StressStrainCurve c;
    c.points.reserve(log.points.size());
    for (const auto& p : log.points) {
        c.points.push_back({p.force_n / log.area_mm2, p.displacement_mm / log.height_mm});
        c.max_force_n = std::max(c.max_force_n, p.force_n);
        c.max_strain = std::max(c.max_strain, c.points.back().strain);
    }
    // Force is unimodal, so the peak plateau is contiguous; loading ends at its last point.
    for (std::size_t i = 0; i < log.points.size(); ++i)
        if (log.points[i].force_n == c.max_force_n) c.peak_index = i;
    c.max_stress_mpa = c.max_force_n / log.area_mm2;
    return c;
}

VerdictLevel ElasticAssessment::verdict() const {
    return verdict_elastic && !plastic_deformation_flag && safety_factor >= 1.0 ? VerdictLevel::Pass
                                                                                : VerdictLevel::Fail;
}

ElasticAssessment assess_elasticity(const StressStrainCurve& curve, const ComplianceThresholds& thresholds,
                                    const ElasticityOptions& opts) {
    thresholds.validate();
    const std::size_t n = curve.peak_index + 1;
    if (n < 3) throw Error("elasticity assessment needs at least 3 loading points");

    const auto first = curve.points.begin();
    const auto last = first + static_cast<std::ptrdiff_t>(n);
    if (std::all_of(first, last, [&](const StressStrainPoint& p) { return p.strain == first->strain; }))
        throw Error("degenerate curve: all strains are equal");

    long double mx = 0, my = 0;
    for (auto it = first; it != last; ++it) {
        mx += it->strain;
        my += it->stress_mpa;
    }
    mx /= n;
    my /= n;

    ElasticAssessment a;
    a.points_fitted = n;
    if (opts.fit == FitMode::FreeIntercept) {
        long double sxy = 0, sxx = 0;
        for (auto it = first; it != last; ++it) {
            sxy += (it->strain - mx) * (it->stress_mpa - my);
            sxx += (it->strain - mx) * (it->strain - mx);
        }
        a.modulus_estimate_mpa = static_cast<double>(sxy / sxx);
        a.intercept_mpa = static_cast<double>(my - sxy / sxx * mx);
    } else {
        long double sxy = 0, sxx = 0;
        for (auto it = first; it != last; ++it) {
            sxy += static_cast<long double>(it->strain) * it->stress_mpa;
            sxx += static_cast<long double>(it->strain) * it->strain;
        }
        a.modulus_estimate_mpa = static_cast<double>(sxy / sxx);
        a.intercept_mpa = 0.0;
    }

    long double ss_res = 0, ss_tot = 0;
    for (auto it = first; it != last; ++it) {
        const long double fit = a.intercept_mpa + static_cast<long double>(a.modulus_estimate_mpa) * it->strain;
        ss_res += (it->stress_mpa - fit) * (it->stress_mpa - fit);
        ss_tot += (it->stress_mpa - my) * (it->stress_mpa - my);
    }
    if (ss_tot == 0.0L)
        a.linear_r2 = ss_res == 0.0L ? 1.0 : 0.0;
    else
        a.linear_r2 = std::clamp(static_cast<double>(1.0L - ss_res / ss_tot), 0.0, 1.0);

    if (!(curve.max_stress_mpa > 0.0)) throw Error("maximum stress is zero; safety factor undefined");
    a.safety_factor = thresholds.petg_yield_mpa.low_mpa / curve.max_stress_mpa;
    a.verdict_elastic = a.linear_r2 >= opts.min_r2;

    if (curve.has_unloading()) {
        const auto& tail = curve.points.back();
        if (tail.stress_mpa == 0.0) {
            a.residual_strain = tail.strain;
            a.plastic_deformation_flag = tail.strain > opts.residual_strain_limit;
        }
    }
    return a;
}

}  // namespace emgvalid::mech
