#pragma once

#include "emgvalid/agreement.hpp"
#include "emgvalid/comms.hpp"
#include "emgvalid/ingest.hpp"
#include "emgvalid/model.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

// Deterministic fixture generators. Everything here is a pure function of its
// arguments and seed.
namespace emgvalid::synth {

// ── Published measurement tables ─────────────────────────────────────────

/// Leakage currents (µA), 8 sensors × 4 repetitions.
ingest::RepetitionTable leakage_table();
/// Patient auxiliary current (µA), 10 repetitions.
std::vector<double> auxiliary_currents();
std::string auxiliary_csv();

/// Threshold-crossing times (ms) per event for channels 2, 4 and 8.
inline constexpr std::array<int, 3> kLatencyChannels{2, 4, 8};
inline constexpr std::array<std::array<int, 3>, 11> kLatencyEventsMs{{
    {5318, 5318, 5318},
    {10291, 10291, 10291},
    {15809, 15809, 15809},
    {20700, 20691, 20691},
    {25500, 25491, 25491},
    {31164, 31164, 31164},
    {36609, 36609, 36609},
    {44818, 44818, 44818},
    {52809, 52800, 52800},
    {54164, 54164, 54164},
    {55864, 55864, 55864},
}};

// ── Signals ───────────────────────────────────────────────────────────────

/// No-load baseline repetitions: single channel, Gaussian noise about `mean_mv`.
std::vector<Recording> stability_repetitions(std::uint64_t seed, std::size_t repetitions = 3,
                                             double rate_hz = 800.0, double duration_s = 10.0,
                                             double mean_mv = 1.0, double sd_mv = 0.02);

/// Stage × frequency sweep. With `measured_equals_simulated` every cell has
/// zero error; otherwise gains deviate by a few percent and stage 4 at the
/// lowest frequency carries a simulated 1.0 against a measured 10.11.
ingest::FrequencySweep frequency_sweep(std::uint64_t seed, bool measured_equals_simulated);

struct DevicePair {
    Recording prototype;
    Recording reference;
};

/// The same burst-modulated sEMG-like source seen by two devices at their own
/// rates, each with independent additive noise at `snr_db`. The prototype
/// lags the reference by `lag_s`.
DevicePair semg_pair(std::uint64_t seed, double duration_s = 20.0, double prototype_rate_hz = 800.0,
                     double reference_rate_hz = 1000.0, double snr_db = 10.0, double lag_s = 0.15);

/// Rectangular pulses on channels 2, 4 and 8 at 1000 Hz whose first
/// above-threshold samples land exactly on the published event times.
Recording latency_steps();

/// Sequential-sampling model: channel k (0-based) of `channels` samples at
/// n*T + k*T/channels. Each step starts at a random instant common to all
/// channels.
Recording sequential_steps(std::uint64_t seed, int channels = 8, double rate_hz = 800.0,
                           std::size_t events = 10);

/// One recording per stimulated channel; the stimulus couples into every other
/// channel at `coupling_db` plus small noise.
std::vector<agreement::StimulusRecording> crosstalk_set(std::uint64_t seed, int channels = 8,
                                                        double rate_hz = 800.0, double coupling_db = -30.0);

// ── Mechanics ─────────────────────────────────────────────────────────────

inline constexpr double kEnclosureAreaMm2 = 653.33;
inline constexpr double kEnclosureHeightMm = 12.0;

/// Proportional loading to `max_force_n`, then unloading back to zero.
ingest::ForceDisplacementLog linear_force_log(double max_force_n = 98.0, std::size_t points = 50,
                                              bool with_unloading = true);
/// Stiff loading that yields past a knee to a much lower tangent stiffness.
ingest::ForceDisplacementLog knee_force_log(double max_force_n = 98.0, std::size_t points = 50);

// ── Fixture tree ──────────────────────────────────────────────────────────

/// Writes every fixture the acceptance suite and CLI examples use under `dir`.
/// Returns the relative paths written, sorted.
std::vector<std::string> write_fixtures(const std::filesystem::path& dir, std::uint64_t seed);

}  // namespace emgvalid::synth
