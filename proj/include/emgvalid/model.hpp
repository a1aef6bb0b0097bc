#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace emgvalid {

/// Raised for invalid input or violated preconditions anywhere in the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Units { MilliVolt, RawCounts, Volt };

std::string_view to_string(Units u);
Units parse_units(std::string_view text);

struct ChannelSeries {
    int id = 0;  // 1..8
    std::vector<double> samples;
};

/// Uniformly sampled multichannel time series. Construction validates that
/// channels are non-empty, equal length, finite, and uniquely numbered.
class Recording {
public:
    Recording(std::vector<ChannelSeries> channels, double rate_hz, Units units = Units::MilliVolt);

    const std::vector<ChannelSeries>& channels() const { return channels_; }
    double rate_hz() const { return rate_hz_; }
    Units units() const { return units_; }

    std::size_t channel_count() const { return channels_.size(); }
    std::size_t length() const { return channels_.front().samples.size(); }
    double duration_s() const { return static_cast<double>(length()) / rate_hz_; }
    double sample_interval_ms() const { return 1000.0 / rate_hz_; }

    bool has_channel(int id) const;
    const ChannelSeries& channel(int id) const;  // throws if absent

    /// Copy restricted to the listed channels, in the given order.
    Recording select(std::span<const int> ids) const;

private:
    std::vector<ChannelSeries> channels_;
    double rate_hz_;
    Units units_;
};

struct DescriptiveStats {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;  // population
    /// Absent when the mean is zero.
    std::optional<double> cv_percent;
    /// 100 * mean(|x[i+1] - x[i]|) / |mean|. Absent for n < 2 or zero mean.
    std::optional<double> mean_variation_percent;
};

DescriptiveStats descriptive_stats(std::span<const double> samples);

double mean_of(std::span<const double> xs);
double population_sd(std::span<const double> xs);
double sample_sd(std::span<const double> xs);  // requires n >= 2

struct YieldRange {
    double low_mpa = 40.0;
    double high_mpa = 50.0;
};

struct ComplianceThresholds {
    double leakage_limit_ua = 10.0;
    double auxiliary_limit_ua = 100.0;
    double marginal_multiplier = 2.0;
    YieldRange petg_yield_mpa;
    double body_resistance_ohm = 1000.0;

    /// Throws Error when a limit is non-positive or the yield interval is inverted.
    void validate() const;
};

enum class VerdictLevel { Pass, Marginal, Fail };

std::string_view to_string(VerdictLevel v);
VerdictLevel parse_verdict(std::string_view text);

/// Worse of two verdicts (Fail > Marginal > Pass).
VerdictLevel worst(VerdictLevel a, VerdictLevel b);

struct Verdict {
    VerdictLevel level = VerdictLevel::Pass;
    double value = 0.0;
    double limit = 0.0;
};

/// PASS iff value <= limit, MARGINAL iff limit < value <= limit * multiplier, FAIL otherwise.
Verdict verdict(double value, double limit, double marginal_multiplier);

/// Round half away from zero at `decimals` places, tolerant of binary
/// representation error (20.115 rounds to 20.12).
double round_to(double x, int decimals);

/// Fixed-point text with exactly `decimals` places after round_to.
std::string format_fixed(double x, int decimals);

}  // namespace emgvalid
