#pragma once

#include "emgvalid/agreement.hpp"
#include "emgvalid/mech.hpp"
#include "emgvalid/model.hpp"
#include "emgvalid/operation.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace emgvalid {

/// Every tunable of the toolkit. Defaults apply when no config file is given.
struct ToolkitConfig {
    ComplianceThresholds thresholds;

    double window_ms = 200.0;
    double overlap = 0.5;
    bool keep_trailing = false;
    bool zero_mean_var = false;
    bool detrend = false;
    double max_lag_s = 2.0;

    double latency_threshold_fraction = 0.5;
    double latency_refractory_ms = 500.0;
    std::string latency_pairs;  // "a:b,c:d"; empty means consecutive channels

    double mech_min_r2 = 0.98;
    double mech_residual_strain_limit = 0.005;
    bool mech_anchor_origin = false;

    std::map<int, std::string> stage_labels = operation::default_stage_labels();

    agreement::CompareOptions compare_options() const;
    agreement::LatencyOptions latency_options() const;
    mech::ElasticityOptions elasticity_options() const;
};

/// Overlay `j` on `base`. Unknown keys are errors. Threshold keys may sit at
/// the root or under "thresholds".
ToolkitConfig merge_config(ToolkitConfig base, const nlohmann::json& j);
ToolkitConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ToolkitConfig& c);

}  // namespace emgvalid
