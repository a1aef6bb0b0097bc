#pragma once

#include "emgvalid/model.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace emgvalid::ingest {

// ── CSV dialect ───────────────────────────────────────────────────────────
//
// UTF-8 text, LF or CRLF line endings. The delimiter is detected from the
// first line: ';' wins over tab, tab wins over ','. Double-quoted cells are
// honoured. Numbers accept either decimal point or decimal comma.

struct CsvTable {
    char delimiter = ',';
    std::vector<std::vector<std::string>> rows;  // raw cells, blank lines skipped
    std::vector<std::size_t> line_numbers;       // 1-based source line per row
};

CsvTable parse_csv(std::string_view text);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

/// Locale-independent number parse; "1,5" and "1.5" both give 1.5.
std::optional<double> parse_number(std::string_view cell);

/// Canonical round-trippable text for a double (decimal point, shortest form).
std::string format_number(double v);

// ── Recordings ────────────────────────────────────────────────────────────

enum class TimeColumn { Auto, Present, Absent };

struct RecordingCsvOptions {
    TimeColumn time_column = TimeColumn::Auto;
    double time_uniformity_tolerance = 0.01;
};

/// One column per channel, optional header row, optional leading time column
/// (auto-detected by strict monotonicity, validated for uniform spacing and
/// then discarded in favour of rate_hz).
Recording parse_recording(std::string_view text, double rate_hz, Units units,
                          const RecordingCsvOptions& opts = {});
Recording load_recording(const std::filesystem::path& path, double rate_hz, Units units,
                         const RecordingCsvOptions& opts = {});
std::string recording_to_csv(const Recording& rec);

// ── Repetition tables ─────────────────────────────────────────────────────

struct RepetitionTable {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
};

/// Wide form: label column then one column per repetition. Long form (first
/// header cell "Repetition"): one (index, value) per line, giving a single row.
/// Columns headed "mean..." and rows labelled "mean" are summary cells and skipped.
RepetitionTable parse_repetition_table(std::string_view text);
RepetitionTable load_repetition_table(const std::filesystem::path& path);
std::string repetition_table_to_csv(const RepetitionTable& table);

// ── Frequency sweeps ──────────────────────────────────────────────────────

struct SweepEntry {
    int stage = 0;
    double frequency_hz = 0.0;
    double simulated_gain = 0.0;
    double measured_gain = 0.0;
};

struct FrequencySweep {
    std::vector<SweepEntry> entries;
};

enum class GainScale { Linear, Decibel };

/// Columns: stage, frequency_hz, simulated_gain, measured_gain. Gains in dB
/// are converted to linear ratios on load.
FrequencySweep parse_frequency_sweep(std::string_view text, GainScale scale = GainScale::Linear);
FrequencySweep load_frequency_sweep(const std::filesystem::path& path,
                                    GainScale scale = GainScale::Linear);
std::string frequency_sweep_to_csv(const FrequencySweep& sweep);
void validate(const FrequencySweep& sweep);

// ── Force–displacement logs ───────────────────────────────────────────────

struct ForceDisplacementPoint {
    double force_n = 0.0;
    double displacement_mm = 0.0;
};

struct ForceDisplacementLog {
    std::vector<ForceDisplacementPoint> points;
    double area_mm2 = 0.0;
    double height_mm = 0.0;
};

/// Force must rise monotonically to its peak (loading) and may then only
/// fall (unloading); any other shape is rejected as non-monotonic loading.
void validate(const ForceDisplacementLog& log);

ForceDisplacementLog parse_force_displacement(std::string_view text, double area_mm2,
                                              double height_mm);
ForceDisplacementLog load_force_displacement(const std::filesystem::path& path, double area_mm2,
                                             double height_mm);
std::string force_displacement_to_csv(const ForceDisplacementLog& log);

}  // namespace emgvalid::ingest
