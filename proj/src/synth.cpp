#include "emgvalid/synth.hpp"

#include "emgvalid/random.hpp"
#include "emgvalid/report.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace emgvalid::synth {

namespace {

constexpr double kPi = std::numbers::pi;

struct Tone {
    double freq_hz;
    double amplitude;
    double phase;
};

/// Band-limited carrier: a fixed set of tones in the sEMG band.
std::vector<Tone> make_tones(Rng& rng, std::size_t n) {
    std::vector<Tone> tones;
    for (std::size_t i = 0; i < n; ++i)
        tones.push_back({rng.uniform(20.0, 150.0), rng.uniform(0.2, 1.0), rng.uniform(0.0, 2 * kPi)});
    return tones;
}

double carrier(const std::vector<Tone>& tones, double t) {
    double v = 0.0;
    for (const auto& tone : tones) v += tone.amplitude * std::sin(2 * kPi * tone.freq_hz * t + tone.phase);
    return v;
}

/// Contraction envelope: 1.5 s bursts every 3 s with raised-cosine ramps.
double envelope(double t) {
    constexpr double period = 3.0, on = 1.5, ramp = 0.2, floor = 0.05;
    if (t < 0) return floor;
    const double p = std::fmod(t, period);
    double g = 0.0;
    if (p < ramp) g = 0.5 - 0.5 * std::cos(kPi * p / ramp);
    else if (p < on - ramp) g = 1.0;
    else if (p < on) g = 0.5 + 0.5 * std::cos(kPi * (p - (on - ramp)) / ramp);
    return floor + (1.0 - floor) * g;
}

double rms(const std::vector<double>& x) {
    long double s = 0;
    for (double v : x) s += static_cast<long double>(v) * v;
    return std::sqrt(static_cast<double>(s / x.size()));
}

std::vector<double> sample_device(const std::vector<Tone>& tones, double rate_hz, double duration_s,
                                  double delay_s, double snr_db, Rng& noise) {
    const auto n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / rate_hz - delay_s;
        x[i] = 0.3 * envelope(t) * carrier(tones, t);
    }
    const double noise_sd = rms(x) / std::pow(10.0, snr_db / 20.0);
    for (double& v : x) v += noise.gaussian(0.0, noise_sd);
    return x;
}

}  // namespace

// ── Published measurement tables ─────────────────────────────────────────

ingest::RepetitionTable leakage_table() {
    return {{"1", "2", "3", "4", "5", "6", "7", "8"},
            {{15.36, 15.36, 16.98, 20.62},
             {15.77, 15.77, 19.98, 20.39},
             {15.77, 15.77, 16.98, 18.76},
             {15.04, 15.04, 26.68, 17.95},
             {16.01, 16.01, 24.66, 17.95},
             {17.71, 17.71, 20.62, 17.95},
             {17.63, 21.83, 20.38, 20.62},
             {21.83, 17.63, 24.42, 17.95}}};
}

std::vector<double> auxiliary_currents() {
    return {135.12, 135.12, 170.70, 152.18, 73.32, 63.47, 59.76, 59.66, 93.30, 67.69};
}

std::string auxiliary_csv() {
    std::string out = "repetition,current_ua\n";
    const auto v = auxiliary_currents();
    for (std::size_t i = 0; i < v.size(); ++i) out += std::to_string(i + 1) + "," + ingest::format_number(v[i]) + "\n";
    return out;
}

// ── Signals ───────────────────────────────────────────────────────────────

std::vector<Recording> stability_repetitions(std::uint64_t seed, std::size_t repetitions, double rate_hz,
                                             double duration_s, double mean_mv, double sd_mv) {
    Rng rng(seed);
    const auto n = static_cast<std::size_t>(std::llround(duration_s * rate_hz));
    std::vector<Recording> out;
    for (std::size_t r = 0; r < repetitions; ++r) {
        std::vector<double> x(n);
        for (double& v : x) v = rng.gaussian(mean_mv, sd_mv);
        out.emplace_back(std::vector<ChannelSeries>{{1, std::move(x)}}, rate_hz, Units::MilliVolt);
    }
    return out;
}

ingest::FrequencySweep frequency_sweep(std::uint64_t seed, bool measured_equals_simulated) {
    Rng rng(seed);
    const std::array<double, 5> freqs{10.0, 50.0, 100.0, 250.0, 500.0};
    ingest::FrequencySweep sweep;
    for (int stage = 1; stage <= 8; ++stage) {
        for (double f : freqs) {
            const double sim = std::round(rng.uniform(0.5, 50.0) * 100.0) / 100.0;
            double meas = sim;
            if (!measured_equals_simulated) meas = std::round(sim * rng.uniform(0.85, 1.15) * 100.0) / 100.0;
            if (stage == 4 && f == freqs.front()) {
                sweep.entries.push_back({stage, f, 1.0, measured_equals_simulated ? 1.0 : 10.11});
                continue;
            }
            sweep.entries.push_back({stage, f, sim, meas});
        }
    }
    return sweep;
}

DevicePair semg_pair(std::uint64_t seed, double duration_s, double prototype_rate_hz, double reference_rate_hz,
                     double snr_db, double lag_s) {
    Rng rng(seed);
    const auto tones = make_tones(rng, 24);
    Rng noise_p(seed ^ 0x9e3779b97f4a7c15ULL);
    Rng noise_r(seed ^ 0xc2b2ae3d27d4eb4fULL);
    auto p = sample_device(tones, prototype_rate_hz, duration_s, lag_s, snr_db, noise_p);
    auto r = sample_device(tones, reference_rate_hz, duration_s, 0.0, snr_db, noise_r);
    return {Recording({{1, std::move(p)}}, prototype_rate_hz, Units::MilliVolt),
            Recording({{1, std::move(r)}}, reference_rate_hz, Units::MilliVolt)};
}

Recording latency_steps() {
    constexpr std::size_t pulse = 200;
    const std::size_t n = static_cast<std::size_t>(kLatencyEventsMs.back()[0]) + 1000;
    std::vector<ChannelSeries> chans;
    for (std::size_t c = 0; c < kLatencyChannels.size(); ++c) {
        std::vector<double> x(n, 0.0);
        for (const auto& ev : kLatencyEventsMs) {
            const auto start = static_cast<std::size_t>(ev[c]);
            for (std::size_t i = start; i < start + pulse; ++i) x[i] = 1.0;
        }
        chans.push_back({kLatencyChannels[c], std::move(x)});
    }
    return Recording(std::move(chans), 1000.0, Units::MilliVolt);
}

Recording sequential_steps(std::uint64_t seed, int channels, double rate_hz, std::size_t events) {
    if (channels < 1 || channels > 8) throw Error("sequential_steps needs 1..8 channels");
    Rng rng(seed);
    constexpr double spacing = 1.5, width = 0.3;
    std::vector<double> onsets;
    for (std::size_t e = 0; e < events; ++e)
        onsets.push_back(1.0 + spacing * static_cast<double>(e) + rng.uniform(0.0, 0.5));
    const auto n = static_cast<std::size_t>(std::ceil((onsets.back() + 2.0) * rate_hz));
    const double dt = 1.0 / rate_hz;
    std::vector<ChannelSeries> chans;
    for (int k = 0; k < channels; ++k) {
        std::vector<double> x(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) * dt + k * dt / channels;
            for (double on : onsets)
                if (t >= on && t < on + width) x[i] = 1.0;
        }
        chans.push_back({k + 1, std::move(x)});
    }
    return Recording(std::move(chans), rate_hz, Units::MilliVolt);
}

std::vector<agreement::StimulusRecording> crosstalk_set(std::uint64_t seed, int channels, double rate_hz,
                                                        double coupling_db) {
    if (channels < 2 || channels > 8) throw Error("crosstalk_set needs 2..8 channels");
    Rng rng(seed);
    const auto n = static_cast<std::size_t>(std::llround(5.0 * rate_hz));
    const double gain = std::pow(10.0, coupling_db / 20.0);
    std::vector<agreement::StimulusRecording> out;
    for (int stim = 1; stim <= channels; ++stim) {
        const auto tones = make_tones(rng, 12);
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) s[i] = carrier(tones, static_cast<double>(i) / rate_hz);
        std::vector<ChannelSeries> chans;
        for (int ch = 1; ch <= channels; ++ch) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i)
                x[i] = (ch == stim ? s[i] : gain * s[i]) + rng.gaussian(0.0, 1e-4);
            chans.push_back({ch, std::move(x)});
        }
        out.push_back({stim, Recording(std::move(chans), rate_hz, Units::MilliVolt)});
    }
    return out;
}

// ── Mechanics ─────────────────────────────────────────────────────────────

ingest::ForceDisplacementLog linear_force_log(double max_force_n, std::size_t points, bool with_unloading) {
    if (points < 3) throw Error("linear_force_log needs at least 3 points");
    constexpr double stiffness_n_per_mm = 2000.0;
    ingest::ForceDisplacementLog log{{}, kEnclosureAreaMm2, kEnclosureHeightMm};
    for (std::size_t i = 0; i < points; ++i) {
        const double f = max_force_n * static_cast<double>(i) / static_cast<double>(points - 1);
        log.points.push_back({f, f / stiffness_n_per_mm});
    }
    if (with_unloading)
        for (std::size_t i = points - 1; i-- > 0;) log.points.push_back(log.points[i]);
    return log;
}

ingest::ForceDisplacementLog knee_force_log(double max_force_n, std::size_t points) {
    if (points < 3) throw Error("knee_force_log needs at least 3 points");
    constexpr double d_max = 0.5, knee_fraction = 0.2, soft_ratio = 0.02;
    const double d0 = knee_fraction * d_max;
    const double k1 = max_force_n / (d0 + soft_ratio * (d_max - d0));
    ingest::ForceDisplacementLog log{{}, kEnclosureAreaMm2, kEnclosureHeightMm};
    for (std::size_t i = 0; i < points; ++i) {
        const double d = d_max * static_cast<double>(i) / static_cast<double>(points - 1);
        const double f = d <= d0 ? k1 * d : k1 * d0 + soft_ratio * k1 * (d - d0);
        log.points.push_back({f, d});
    }
    return log;
}

// ── Fixture tree ──────────────────────────────────────────────────────────

std::vector<std::string> write_fixtures(const std::filesystem::path& dir, std::uint64_t seed) {
    std::vector<std::string> written;
    auto put = [&](const std::string& rel, std::string_view text) {
        ingest::write_text_file(dir / rel, text);
        written.push_back(rel);
    };
    auto put_bytes = [&](const std::string& rel, const std::vector<std::uint8_t>& bytes) {
        put(rel, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    };

    put("safety/leakage.csv", ingest::repetition_table_to_csv(leakage_table()));
    put("safety/auxiliary.csv", auxiliary_csv());

    const auto reps = stability_repetitions(seed);
    for (std::size_t i = 0; i < reps.size(); ++i)
        put("stability/rep" + std::to_string(i + 1) + ".csv", ingest::recording_to_csv(reps[i]));

    put("freqresp/sweep.csv", ingest::frequency_sweep_to_csv(frequency_sweep(seed, false)));
    put("freqresp/sweep_identity.csv", ingest::frequency_sweep_to_csv(frequency_sweep(seed, true)));

    const auto pair = semg_pair(seed);
    put("agreement/prototype.csv", ingest::recording_to_csv(pair.prototype));
    put("agreement/reference.csv", ingest::recording_to_csv(pair.reference));
    put("agreement/latency_steps.csv", ingest::recording_to_csv(latency_steps()));
    for (const auto& s : crosstalk_set(seed))
        put("agreement/crosstalk/stim_" + std::to_string(s.stimulated_channel) + ".csv",
            ingest::recording_to_csv(s.recording));

    comms::FaultPlan clean;
    clean.rng_seed = seed;
    put_bytes("comms/clean.bin", comms::emulate(48000, comms::default_signal_source(seed), clean).bytes);
    comms::FaultPlan faulty;
    faulty.rng_seed = seed;
    faulty.drop_probability = 0.01;
    faulty.corrupt_probability = 0.005;
    faulty.burst_drop = comms::BurstDrop{20000, 40};
    const auto em = comms::emulate(48000, comms::default_signal_source(seed), faulty);
    put_bytes("comms/faulty.bin", em.bytes);
    put("comms/faulty_ledger.json", report::dump_canonical(report::ledger_json(em.ledger, faulty)));

    put("mech/linear_fd.csv", ingest::force_displacement_to_csv(linear_force_log()));
    put("mech/knee_fd.csv", ingest::force_displacement_to_csv(knee_force_log()));

    put("checklist.json", report::dump_canonical({{"insulation_enclosed", true},
                                                  {"electrodes_housed", true},
                                                  {"comfort",
                                                   {{"notes", "worn for 30 min, no discomfort reported"},
                                                    {"skin_marks_observed", false},
                                                    {"readjustment_needed", false}}}}));
    put("manifest.json",
        report::dump_canonical({{"seed", seed},
                                {"stability_rate_hz", 800.0},
                                {"prototype_rate_hz", 800.0},
                                {"reference_rate_hz", 1000.0},
                                {"latency_rate_hz", 1000.0},
                                {"crosstalk_rate_hz", 800.0},
                                {"comms_rate_hz", 800.0},
                                {"comms_duration_s", 60.0},
                                {"mech_area_mm2", kEnclosureAreaMm2},
                                {"mech_height_mm", kEnclosureHeightMm}}));
    std::sort(written.begin(), written.end());
    return written;
}

}  // namespace emgvalid::synth
