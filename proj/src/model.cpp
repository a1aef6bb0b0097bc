#include "emgvalid/model.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <set>

namespace emgvalid {

std::string_view to_string(Units u) {
    switch (u) {
        case Units::MilliVolt: return "mV";
        case Units::RawCounts: return "raw-counts";
        case Units::Volt: return "V";
    }
    return "mV";
}

Units parse_units(std::string_view text) {
    if (text == "mV" || text == "mv") return Units::MilliVolt;
    if (text == "raw-counts" || text == "counts") return Units::RawCounts;
    if (text == "V" || text == "v") return Units::Volt;
    throw Error("unknown units '" + std::string(text) + "' (expected mV, raw-counts or V)");
}

Recording::Recording(std::vector<ChannelSeries> channels, double rate_hz, Units units)
    : channels_(std::move(channels)), rate_hz_(rate_hz), units_(units) {
    if (!(rate_hz_ > 0.0) || !std::isfinite(rate_hz_)) throw Error("recording rate must be > 0 Hz");
    if (channels_.empty()) throw Error("recording has no channels");
    const std::size_t len = channels_.front().samples.size();
    if (len == 0) throw Error("recording has no samples");
    std::set<int> ids;
    for (const auto& ch : channels_) {
        if (ch.id < 1 || ch.id > 8)
            throw Error("channel id " + std::to_string(ch.id) + " outside 1..8");
        if (!ids.insert(ch.id).second) throw Error("duplicate channel id " + std::to_string(ch.id));
        if (ch.samples.size() != len) throw Error("channels differ in length");
        for (double v : ch.samples)
            if (!std::isfinite(v))
                throw Error("non-finite sample in channel " + std::to_string(ch.id));
    }
}

bool Recording::has_channel(int id) const {
    return std::any_of(channels_.begin(), channels_.end(),
                       [id](const ChannelSeries& c) { return c.id == id; });
}

const ChannelSeries& Recording::channel(int id) const {
    for (const auto& c : channels_)
        if (c.id == id) return c;
    throw Error("recording has no channel " + std::to_string(id));
}

Recording Recording::select(std::span<const int> ids) const {
    std::vector<ChannelSeries> out;
    out.reserve(ids.size());
    for (int id : ids) out.push_back(channel(id));
    return Recording(std::move(out), rate_hz_, units_);
}

double mean_of(std::span<const double> xs) {
    if (xs.empty()) throw Error("mean of empty sequence");
    long double s = 0.0L;
    for (double v : xs) s += v;
    return static_cast<double>(s / static_cast<long double>(xs.size()));
}

namespace {

long double sum_sq_dev(std::span<const double> xs, double mean) {
    long double ss = 0.0L;
    for (double v : xs) {
        const long double d = static_cast<long double>(v) - mean;
        ss += d * d;
    }
    return ss;
}

}  // namespace

double population_sd(std::span<const double> xs) {
    const double m = mean_of(xs);
    return static_cast<double>(std::sqrt(sum_sq_dev(xs, m) / static_cast<long double>(xs.size())));
}

double sample_sd(std::span<const double> xs) {
    if (xs.size() < 2) throw Error("sample standard deviation needs at least 2 values");
    const double m = mean_of(xs);
    return static_cast<double>(
        std::sqrt(sum_sq_dev(xs, m) / static_cast<long double>(xs.size() - 1)));
}

DescriptiveStats descriptive_stats(std::span<const double> samples) {
    if (samples.empty()) throw Error("descriptive statistics of empty sequence");
    for (double v : samples)
        if (!std::isfinite(v)) throw Error("descriptive statistics of non-finite value");

    DescriptiveStats s;
    s.n = samples.size();
    s.mean = mean_of(samples);
    s.sd = population_sd(samples);

    // A constant sequence is exactly constant; keep sd at 0 despite rounding.
    if (std::all_of(samples.begin(), samples.end(), [&](double v) { return v == samples[0]; }))
        s.sd = 0.0;

    if (s.mean != 0.0) {
        s.cv_percent = 100.0 * s.sd / std::abs(s.mean);
        if (samples.size() >= 2) {
            long double acc = 0.0L;
            for (std::size_t i = 1; i < samples.size(); ++i)
                acc += std::abs(static_cast<long double>(samples[i]) - samples[i - 1]);
            const long double mad = acc / static_cast<long double>(samples.size() - 1);
            s.mean_variation_percent = static_cast<double>(100.0L * mad / std::abs(s.mean));
        }
    }
    return s;
}

void ComplianceThresholds::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw Error(std::string(name) + " must be > 0");
    };
    positive(leakage_limit_ua, "leakage_limit_ua");
    positive(auxiliary_limit_ua, "auxiliary_limit_ua");
    positive(body_resistance_ohm, "body_resistance_ohm");
    positive(petg_yield_mpa.low_mpa, "petg_yield_mpa low bound");
    positive(petg_yield_mpa.high_mpa, "petg_yield_mpa high bound");
    if (!(marginal_multiplier >= 1.0)) throw Error("marginal_multiplier must be >= 1");
    if (petg_yield_mpa.low_mpa > petg_yield_mpa.high_mpa)
        throw Error("petg_yield_mpa interval is inverted");
}

std::string_view to_string(VerdictLevel v) {
    switch (v) {
        case VerdictLevel::Pass: return "PASS";
        case VerdictLevel::Marginal: return "MARGINAL";
        case VerdictLevel::Fail: return "FAIL";
    }
    return "FAIL";
}

VerdictLevel parse_verdict(std::string_view text) {
    if (text == "PASS") return VerdictLevel::Pass;
    if (text == "MARGINAL") return VerdictLevel::Marginal;
    if (text == "FAIL") return VerdictLevel::Fail;
    throw Error("unknown verdict '" + std::string(text) + "'");
}

VerdictLevel worst(VerdictLevel a, VerdictLevel b) {
    return static_cast<int>(a) >= static_cast<int>(b) ? a : b;
}

Verdict verdict(double value, double limit, double marginal_multiplier) {
    if (!std::isfinite(value)) throw Error("verdict on non-finite value");
    if (!(limit > 0.0)) throw Error("verdict limit must be > 0");
    if (!(marginal_multiplier >= 1.0)) throw Error("marginal multiplier must be >= 1");
    Verdict v{VerdictLevel::Fail, value, limit};
    if (value <= limit)
        v.level = VerdictLevel::Pass;
    else if (value <= limit * marginal_multiplier)
        v.level = VerdictLevel::Marginal;
    return v;
}

double round_to(double x, int decimals) {
    if (!std::isfinite(x)) return x;
    const double scale = std::pow(10.0, decimals);
    const double y = std::abs(x) * scale;
    double whole = std::floor(y);
    const double tol = 64.0 * DBL_EPSILON * std::max(1.0, y);
    if (y - whole + tol >= 0.5) whole += 1.0;
    const double r = std::copysign(whole / scale, x);
    return r == 0.0 ? 0.0 : r;
}

std::string format_fixed(double x, int decimals) {
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, round_to(x, decimals));
    return buf;
}

}  // namespace emgvalid
