#include "emgvalid/agreement.hpp"

#include <algorithm>
#include <cmath>

namespace emgvalid::agreement {

std::size_t WindowPlan::step() const {
    validate();
    const auto s = std::llround(static_cast<double>(length_samples) * (1.0 - overlap_fraction));
    if (s < 1) throw Error("window step rounds to zero samples; reduce overlap");
    return static_cast<std::size_t>(s);
}

void WindowPlan::validate() const {
    if (length_samples == 0) throw Error("window length must be > 0 samples");
    if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0))
        throw Error("window overlap must be in [0, 1)");
}

WindowPlan WindowPlan::from_ms(double window_ms, double rate_hz, double overlap_fraction,
                               TrailingWindow trailing) {
    if (!(window_ms > 0.0)) throw Error("window length must be > 0 ms");
    if (!(rate_hz > 0.0)) throw Error("sampling rate must be > 0 Hz");
    const auto len = std::llround(window_ms * rate_hz / 1000.0);
    WindowPlan p{static_cast<std::size_t>(std::max<long long>(len, 1)), overlap_fraction, trailing};
    p.validate();
    return p;
}

std::vector<std::pair<std::size_t, std::size_t>> window_bounds(std::size_t n, const WindowPlan& plan) {
    const std::size_t step = plan.step();
    if (plan.length_samples > n)
        throw Error("window of " + std::to_string(plan.length_samples) +
                    " samples is longer than the signal (" + std::to_string(n) + " samples)");
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t start = 0;
    for (; start + plan.length_samples <= n; start += step)
        out.emplace_back(start, start + plan.length_samples);
    if (plan.trailing == TrailingWindow::Keep && start < n && out.back().second < n)
        out.emplace_back(start, n);
    return out;
}

std::string_view to_string(Feature f) {
    switch (f) {
        case Feature::Rms: return "RMS";
        case Feature::Mav: return "MAV";
        case Feature::Iemg: return "IEMG";
        case Feature::Var: return "VAR";
        case Feature::Wl: return "WL";
    }
    return "?";
}

std::string_view long_name(Feature f) {
    switch (f) {
        case Feature::Rms: return "Root Mean Square";
        case Feature::Mav: return "Mean Absolute Value";
        case Feature::Iemg: return "Integrated Electromyography";
        case Feature::Var: return "Variance";
        case Feature::Wl: return "Waveform Length";
    }
    return "?";
}

double WindowFeatures::get(Feature f) const {
    switch (f) {
        case Feature::Rms: return rms;
        case Feature::Mav: return mav;
        case Feature::Iemg: return iemg;
        case Feature::Var: return var;
        case Feature::Wl: return wl;
    }
    return 0.0;
}

WindowFeatures window_features(std::span<const double> w, VarianceConvention var) {
    if (w.empty()) throw Error("feature window is empty");
    const double n = static_cast<double>(w.size());
    double sum = 0.0, sum_abs = 0.0, sum_sq = 0.0, wl = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        sum += w[i];
        sum_abs += std::abs(w[i]);
        sum_sq += w[i] * w[i];
        if (i > 0) wl += std::abs(w[i] - w[i - 1]);
    }
    WindowFeatures f;
    f.rms = std::sqrt(sum_sq / n);
    f.iemg = sum_abs;
    f.mav = sum_abs / n;
    f.wl = wl;
    if (w.size() > 1) {
        if (var == VarianceConvention::ZeroMean) {
            f.var = sum_sq / (n - 1.0);
        } else {
            const double m = sum / n;
            double ss = 0.0;
            for (double x : w) ss += (x - m) * (x - m);
            f.var = ss / (n - 1.0);
        }
    }
    return f;
}

FeatureSet extract_features(std::span<const double> signal, const WindowPlan& plan,
                            VarianceConvention var) {
    const auto bounds = window_bounds(signal.size(), plan);
    FeatureSet set;
    for (Feature f : kAllFeatures) {
        set[f].feature = f;
        set[f].plan = plan;
        set[f].values.reserve(bounds.size());
    }
    for (const auto& [b, e] : bounds) {
        const auto wf = window_features(signal.subspan(b, e - b), var);
        for (Feature f : kAllFeatures) set[f].values.push_back(wf.get(f));
    }
    return set;
}

std::vector<double> normalize(std::span<const double> signal) {
    if (signal.empty()) throw Error("cannot normalise an empty signal");
    double peak = 0.0;
    for (double x : signal) peak = std::max(peak, std::abs(x));
    if (peak == 0.0) throw Error("cannot normalise an all-zero signal");
    std::vector<double> out(signal.begin(), signal.end());
    for (double& x : out) x /= peak;
    return out;
}

double mape(std::span<const double> reference, std::span<const double> test, double epsilon) {
    if (reference.size() != test.size())
        throw Error("MAPE length mismatch (" + std::to_string(reference.size()) + " vs " +
                    std::to_string(test.size()) + ")");
    if (reference.empty()) throw Error("MAPE of empty series");
    if (!(epsilon > 0.0)) throw Error("MAPE epsilon must be > 0");
    long double acc = 0.0L;
    for (std::size_t i = 0; i < reference.size(); ++i)
        acc += std::abs(reference[i] - test[i]) / std::max(std::abs(reference[i]), epsilon);
    return static_cast<double>(100.0L * acc / static_cast<long double>(reference.size()));
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error("Pearson length mismatch");
    if (a.size() < 2) throw Error("Pearson correlation needs at least 2 pairs");
    const auto constant = [](std::span<const double> x) {
        return std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    };
    if (constant(a) || constant(b)) throw Error("Pearson correlation undefined for a constant series");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) throw Error("Pearson correlation undefined for a constant series");
    return std::clamp(sab / (std::sqrt(saa) * std::sqrt(sbb)), -1.0, 1.0);
}

BlandAltman bland_altman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error("Bland-Altman length mismatch");
    if (a.size() < 2) throw Error("Bland-Altman needs at least 2 pairs");
    BlandAltman ba;
    std::vector<double> diffs;
    diffs.reserve(a.size());
    ba.points.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ba.points.push_back({(a[i] + b[i]) / 2.0, a[i] - b[i]});
        diffs.push_back(a[i] - b[i]);
    }
    ba.bias = mean_of(diffs);
    ba.sd_diff = std::all_of(diffs.begin(), diffs.end(), [&](double d) { return d == diffs[0]; })
                     ? 0.0
                     : sample_sd(diffs);
    ba.loa_low = ba.bias - kLoaZ * ba.sd_diff;
    ba.loa_high = ba.bias + kLoaZ * ba.sd_diff;
    const auto within = std::count_if(diffs.begin(), diffs.end(), [&](double d) {
        return d >= ba.loa_low && d <= ba.loa_high;
    });
    ba.fraction_within_loa = static_cast<double>(within) / static_cast<double>(diffs.size());
    return ba;
}

}  // namespace emgvalid::agreement
