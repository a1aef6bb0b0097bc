#pragma once

#include "emgvalid/model.hpp"

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace emgvalid::agreement {

// ── Windowing ─────────────────────────────────────────────────────────────

enum class TrailingWindow { Drop, Keep };

struct WindowPlan {
    std::size_t length_samples = 0;
    double overlap_fraction = 0.0;  // [0, 1)
    TrailingWindow trailing = TrailingWindow::Drop;

    /// length * (1 - overlap), rounded, at least 1. Throws on an invalid plan.
    std::size_t step() const;
    void validate() const;

    static WindowPlan from_ms(double window_ms, double rate_hz, double overlap_fraction,
                              TrailingWindow trailing = TrailingWindow::Drop);
};

/// [begin, end) sample ranges covered by the plan over a signal of `n` samples.
std::vector<std::pair<std::size_t, std::size_t>> window_bounds(std::size_t n, const WindowPlan& plan);

// ── Features ──────────────────────────────────────────────────────────────

enum class Feature { Rms, Mav, Iemg, Var, Wl };
inline constexpr std::array<Feature, 5> kAllFeatures{Feature::Rms, Feature::Mav, Feature::Iemg,
                                                      Feature::Var, Feature::Wl};

std::string_view to_string(Feature f);
std::string_view long_name(Feature f);

/// AboutMean: sum((x - mean)^2) / (N - 1). ZeroMean: sum(x^2) / (N - 1).
enum class VarianceConvention { AboutMean, ZeroMean };

struct WindowFeatures {
    double rms = 0.0;
    double mav = 0.0;
    double iemg = 0.0;
    double var = 0.0;
    double wl = 0.0;

    double get(Feature f) const;
};

WindowFeatures window_features(std::span<const double> window,
                               VarianceConvention var = VarianceConvention::AboutMean);

struct FeatureSeries {
    Feature feature = Feature::Rms;
    std::vector<double> values;
    WindowPlan plan;
};

using FeatureSet = std::map<Feature, FeatureSeries>;

/// One value per window for each of the five features.
FeatureSet extract_features(std::span<const double> signal, const WindowPlan& plan,
                            VarianceConvention var = VarianceConvention::AboutMean);

// ── Agreement metrics ─────────────────────────────────────────────────────

/// Peak-magnitude normalisation: x / max|x|.
std::vector<double> normalize(std::span<const double> signal);

inline constexpr double kMapeEpsilon = 1e-12;

/// 100/N * sum(|ref - test| / max(|ref|, epsilon)).
double mape(std::span<const double> reference, std::span<const double> test,
            double epsilon = kMapeEpsilon);

/// Product-moment correlation; throws for constant input or n < 2.
double pearson(std::span<const double> a, std::span<const double> b);

struct BlandAltmanPoint {
    double mean = 0.0;
    double diff = 0.0;
};

struct BlandAltman {
    double bias = 0.0;
    double sd_diff = 0.0;  // sample SD
    double loa_low = 0.0;
    double loa_high = 0.0;
    double fraction_within_loa = 0.0;
    std::vector<BlandAltmanPoint> points;
};

inline constexpr double kLoaZ = 1.96;

/// diff = a - b, mean = (a + b) / 2; limits bias ± 1.96 sd(diff).
BlandAltman bland_altman(std::span<const double> a, std::span<const double> b);

// ── Latency ───────────────────────────────────────────────────────────────

struct LatencyOptions {
    double threshold_fraction = 0.5;  // of per-channel peak-to-peak
    double refractory_ms = 500.0;
    /// Pairs for which deltas are reported; empty means consecutive channels.
    std::vector<std::pair<int, int>> pairs;
};

struct PairDelta {
    int channel_a = 0;
    int channel_b = 0;
    std::optional<double> delta_ms;  // |t_a - t_b|; absent if either channel missed the event
};

struct LatencyEvent {
    int event_id = 0;
    std::map<int, std::optional<double>> crossing_ms;
    std::vector<PairDelta> deltas;
};

struct LatencyTable {
    double sample_interval_ms = 0.0;
    std::vector<int> channels;
    std::vector<std::pair<int, int>> pairs;
    std::vector<LatencyEvent> events;

    std::optional<double> max_delta_ms() const;
    std::size_t missing_crossings() const;
    /// True when every measured delta is within one sampling interval.
    bool within_one_interval() const;
};

/// Rising threshold crossings per channel, grouped into stimulus events.
/// Each event opens at the earliest pending crossing and collects, per
/// channel, the first crossing within the refractory window.
LatencyTable detect_latency(const Recording& recording, const LatencyOptions& opts = {});

std::vector<std::pair<int, int>> parse_pairs(std::string_view text);

// ── Crosstalk ─────────────────────────────────────────────────────────────

struct StimulusRecording {
    int stimulated_channel = 0;
    Recording recording;
};

struct CrosstalkMatrix {
    std::vector<int> stimulated;  // row ids
    std::vector<int> channels;    // column ids
    /// 20 log10(RMS_j / RMS_i); nullopt when RMS_j is exactly zero or channel absent.
    std::vector<std::vector<std::optional<double>>> db;

    std::optional<double> worst_db() const;
};

CrosstalkMatrix assess_crosstalk(std::span<const StimulusRecording> recordings);

// ── Device comparison ─────────────────────────────────────────────────────

struct CompareOptions {
    double window_ms = 200.0;
    double overlap_fraction = 0.5;
    TrailingWindow trailing = TrailingWindow::Drop;
    VarianceConvention variance = VarianceConvention::AboutMean;
    int prototype_channel = 0;  // 0: first channel
    int reference_channel = 0;
    double max_lag_s = 2.0;
    double min_alignment_correlation = 0.2;
    bool detrend = false;
    double mape_epsilon = kMapeEpsilon;
};

struct FeatureAgreement {
    double mape_percent = 0.0;
    double one_minus_mape_percent = 0.0;
    std::optional<double> pearson_r;  // absent when a feature series is constant
};

struct AgreementReport {
    double common_rate_hz = 0.0;
    long lag_samples = 0;  // prototype delay relative to reference
    double alignment_correlation = 0.0;
    std::size_t aligned_samples = 0;
    WindowPlan plan;
    std::map<Feature, FeatureAgreement> features;
    BlandAltman bland_altman_rms;
    FeatureSet prototype_features;
    FeatureSet reference_features;
};

/// Linear interpolation onto a `to_rate` grid starting at t = 0.
std::vector<double> resample_linear(std::span<const double> x, double from_rate, double to_rate);

struct Alignment {
    long lag = 0;  // b[n + lag] matches a[n]
    double correlation = 0.0;
};

/// Normalised cross-correlation peak over |lag| <= max_lag (mean-removed inputs).
Alignment align_by_xcorr(std::span<const double> a, std::span<const double> b, long max_lag);

AgreementReport compare_devices(const Recording& prototype, const Recording& reference,
                                const CompareOptions& opts = {});

}  // namespace emgvalid::agreement
