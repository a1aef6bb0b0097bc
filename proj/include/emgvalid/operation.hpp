#pragma once

#include "emgvalid/ingest.hpp"
#include "emgvalid/model.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace emgvalid::operation {

// ── Baseline stability ───────────────────────────────────────────────────

/// Column-wise average of the per-repetition rows (mean, SD, CV, mean variation).
struct ColumnMeans {
    double mean = 0.0;
    double sd = 0.0;
    std::optional<double> cv_percent;
    std::optional<double> mean_variation_percent;
};

struct StabilityReport {
    std::vector<DescriptiveStats> per_repetition;
    /// Statistics over the repetition means.
    DescriptiveStats overall;
    ColumnMeans column_means;
    std::vector<std::string> warnings;
};

inline constexpr std::size_t kMinStabilityRepetitions = 3;

/// Each recording is one no-load repetition. `channel_id` picks the analysed
/// channel; when absent the recording must have exactly one channel.
StabilityReport assess_stability(std::span<const Recording> recordings,
                                 std::optional<int> channel_id = std::nullopt);

// ── Stage × frequency percentage error ────────────────────────────────────

/// 100 * (measured - simulated) / simulated. Negative when the bench
/// measurement falls short of simulation.
double percentage_error(double simulated_gain, double measured_gain);

class ErrorMatrix {
public:
    ErrorMatrix() = default;
    ErrorMatrix(std::vector<int> stages, std::vector<double> frequencies_hz);

    const std::vector<int>& stages() const { return stages_; }
    const std::vector<double>& frequencies_hz() const { return frequencies_; }

    /// Percentage error at (stage index, frequency index); nullopt when not measured.
    const std::optional<double>& at(std::size_t stage_idx, std::size_t freq_idx) const;
    void set(std::size_t stage_idx, std::size_t freq_idx, double pe);

    std::optional<double> lookup(int stage, double frequency_hz) const;
    std::size_t missing_count() const;

    bool operator==(const ErrorMatrix&) const = default;

private:
    std::vector<int> stages_;
    std::vector<double> frequencies_;
    std::vector<std::optional<double>> cells_;  // row-major, stage-major
};

ErrorMatrix build_error_matrix(const ingest::FrequencySweep& sweep);

/// Wide CSV: header "stage,<f1>,<f2>,...", blank cells for missing entries.
std::string error_matrix_to_csv(const ErrorMatrix& m);
ErrorMatrix parse_error_matrix_csv(std::string_view text);

/// Long-form (stage, frequency_hz, pe_percent) for external plotting; missing cells omitted.
std::string error_matrix_to_long_csv(const ErrorMatrix& m);

/// Minimal SVG grid heatmap, colour saturating at the largest |PE|.
std::string error_matrix_to_svg(const ErrorMatrix& m, const std::map<int, std::string>& labels);

/// 1 preamp, 2 instrumentation amp, 3 notch, 4 high-pass, 5-7 band-pass, 8 rectifier.
std::map<int, std::string> default_stage_labels();

}  // namespace emgvalid::operation
