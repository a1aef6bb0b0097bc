#include "emgvalid/config.hpp"

#include "emgvalid/ingest.hpp"

namespace emgvalid {

using nlohmann::json;

namespace {

double get_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw Error("config key '" + key + "' must be a number");
    return v.get<double>();
}

bool get_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) throw Error("config key '" + key + "' must be a boolean");
    return v.get<bool>();
}

void merge_thresholds(ComplianceThresholds& t, const std::string& key, const json& v) {
    if (key == "leakage_limit_ua") t.leakage_limit_ua = get_number(v, key);
    else if (key == "auxiliary_limit_ua") t.auxiliary_limit_ua = get_number(v, key);
    else if (key == "marginal_multiplier") t.marginal_multiplier = get_number(v, key);
    else if (key == "body_resistance_ohm") t.body_resistance_ohm = get_number(v, key);
    else if (key == "petg_yield_mpa") {
        if (!v.is_array() || v.size() != 2) throw Error("config key 'petg_yield_mpa' must be [low, high]");
        t.petg_yield_mpa = {get_number(v[0], key), get_number(v[1], key)};
    } else
        throw Error("unknown config key '" + key + "'");
}

bool is_threshold_key(const std::string& key) {
    return key == "leakage_limit_ua" || key == "auxiliary_limit_ua" || key == "marginal_multiplier" ||
           key == "body_resistance_ohm" || key == "petg_yield_mpa";
}

}  // namespace

agreement::CompareOptions ToolkitConfig::compare_options() const {
    agreement::CompareOptions o;
    o.window_ms = window_ms;
    o.overlap_fraction = overlap;
    o.trailing = keep_trailing ? agreement::TrailingWindow::Keep : agreement::TrailingWindow::Drop;
    o.variance = zero_mean_var ? agreement::VarianceConvention::ZeroMean : agreement::VarianceConvention::AboutMean;
    o.detrend = detrend;
    o.max_lag_s = max_lag_s;
    return o;
}

agreement::LatencyOptions ToolkitConfig::latency_options() const {
    agreement::LatencyOptions o;
    o.threshold_fraction = latency_threshold_fraction;
    o.refractory_ms = latency_refractory_ms;
    if (!latency_pairs.empty()) o.pairs = agreement::parse_pairs(latency_pairs);
    return o;
}

mech::ElasticityOptions ToolkitConfig::elasticity_options() const {
    mech::ElasticityOptions o;
    o.min_r2 = mech_min_r2;
    o.residual_strain_limit = mech_residual_strain_limit;
    o.fit = mech_anchor_origin ? mech::FitMode::AnchorOrigin : mech::FitMode::FreeIntercept;
    return o;
}

ToolkitConfig merge_config(ToolkitConfig c, const json& j) {
    if (!j.is_object()) throw Error("config must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        if (key == "thresholds") {
            if (!v.is_object()) throw Error("config key 'thresholds' must be an object");
            for (const auto& [k, tv] : v.items()) merge_thresholds(c.thresholds, k, tv);
        } else if (is_threshold_key(key)) {
            merge_thresholds(c.thresholds, key, v);
        } else if (key == "window_ms") c.window_ms = get_number(v, key);
        else if (key == "overlap") c.overlap = get_number(v, key);
        else if (key == "keep_trailing") c.keep_trailing = get_bool(v, key);
        else if (key == "zero_mean_var") c.zero_mean_var = get_bool(v, key);
        else if (key == "detrend") c.detrend = get_bool(v, key);
        else if (key == "max_lag_s") c.max_lag_s = get_number(v, key);
        else if (key == "latency_threshold_fraction") c.latency_threshold_fraction = get_number(v, key);
        else if (key == "latency_refractory_ms") c.latency_refractory_ms = get_number(v, key);
        else if (key == "latency_pairs") {
            if (!v.is_string()) throw Error("config key 'latency_pairs' must be a string");
            c.latency_pairs = v.get<std::string>();
            if (!c.latency_pairs.empty()) agreement::parse_pairs(c.latency_pairs);
        } else if (key == "mech_min_r2") c.mech_min_r2 = get_number(v, key);
        else if (key == "mech_residual_strain_limit") c.mech_residual_strain_limit = get_number(v, key);
        else if (key == "mech_anchor_origin") c.mech_anchor_origin = get_bool(v, key);
        else if (key == "stage_labels") {
            if (!v.is_object()) throw Error("config key 'stage_labels' must be an object");
            for (const auto& [stage, label] : v.items()) {
                const auto id = ingest::parse_number(stage);
                if (!id || *id != static_cast<int>(*id) || !label.is_string())
                    throw Error("stage_labels entries must map an integer stage to a string");
                c.stage_labels[static_cast<int>(*id)] = label.get<std::string>();
            }
        } else
            throw Error("unknown config key '" + key + "'");
    }
    c.thresholds.validate();
    if (!(c.window_ms > 0)) throw Error("window_ms must be positive");
    if (!(c.overlap >= 0 && c.overlap < 1)) throw Error("overlap must be in [0, 1)");
    if (!(c.latency_threshold_fraction > 0 && c.latency_threshold_fraction < 1))
        throw Error("latency_threshold_fraction must be in (0, 1)");
    if (!(c.latency_refractory_ms > 0)) throw Error("latency_refractory_ms must be positive");
    if (!(c.mech_min_r2 >= 0 && c.mech_min_r2 <= 1)) throw Error("mech_min_r2 must be in [0, 1]");
    return c;
}

ToolkitConfig load_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(ingest::read_text_file(path));
    } catch (const json::parse_error& e) {
        throw Error("config " + path.string() + ": " + e.what());
    }
    return merge_config(ToolkitConfig{}, j);
}

json to_json(const ToolkitConfig& c) {
    json labels = json::object();
    for (const auto& [k, v] : c.stage_labels) labels[std::to_string(k)] = v;
    const auto& t = c.thresholds;
    return {{"thresholds",
             {{"leakage_limit_ua", t.leakage_limit_ua},
              {"auxiliary_limit_ua", t.auxiliary_limit_ua},
              {"marginal_multiplier", t.marginal_multiplier},
              {"body_resistance_ohm", t.body_resistance_ohm},
              {"petg_yield_mpa", {t.petg_yield_mpa.low_mpa, t.petg_yield_mpa.high_mpa}}}},
            {"window_ms", c.window_ms},
            {"overlap", c.overlap},
            {"keep_trailing", c.keep_trailing},
            {"zero_mean_var", c.zero_mean_var},
            {"detrend", c.detrend},
            {"max_lag_s", c.max_lag_s},
            {"latency_threshold_fraction", c.latency_threshold_fraction},
            {"latency_refractory_ms", c.latency_refractory_ms},
            {"latency_pairs", c.latency_pairs},
            {"mech_min_r2", c.mech_min_r2},
            {"mech_residual_strain_limit", c.mech_residual_strain_limit},
            {"mech_anchor_origin", c.mech_anchor_origin},
            {"stage_labels", labels}};
}

}  // namespace emgvalid
