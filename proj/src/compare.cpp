#include "emgvalid/agreement.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace emgvalid::agreement {

namespace {

double rms_of(std::span<const double> x) {
    long double ss = 0.0L;
    for (double v : x) ss += static_cast<long double>(v) * v;
    return static_cast<double>(std::sqrt(ss / static_cast<long double>(x.size())));
}

const ChannelSeries& pick(const Recording& rec, int id) {
    return id == 0 ? rec.channels().front() : rec.channel(id);
}

}  // namespace

// ── Crosstalk ─────────────────────────────────────────────────────────────

std::optional<double> CrosstalkMatrix::worst_db() const {
    std::optional<double> w;
    for (std::size_t r = 0; r < stimulated.size(); ++r)
        for (std::size_t c = 0; c < channels.size(); ++c)
            if (channels[c] != stimulated[r] && db[r][c] && (!w || *db[r][c] > *w)) w = db[r][c];
    return w;
}

CrosstalkMatrix assess_crosstalk(std::span<const StimulusRecording> recordings) {
    if (recordings.empty()) throw Error("crosstalk assessment needs at least one recording");

    std::vector<const StimulusRecording*> order;
    std::set<int> stim_ids, all_ids;
    for (const auto& r : recordings) {
        if (!stim_ids.insert(r.stimulated_channel).second)
            throw Error("two recordings stimulate channel " + std::to_string(r.stimulated_channel));
        if (!r.recording.has_channel(r.stimulated_channel))
            throw Error("stimulated channel " + std::to_string(r.stimulated_channel) +
                        " is not in its recording");
        for (const auto& ch : r.recording.channels()) all_ids.insert(ch.id);
        order.push_back(&r);
    }
    std::sort(order.begin(), order.end(),
              [](auto* a, auto* b) { return a->stimulated_channel < b->stimulated_channel; });

    CrosstalkMatrix m;
    m.channels.assign(all_ids.begin(), all_ids.end());
    for (const auto* r : order) {
        const int i = r->stimulated_channel;
        const double rms_i = rms_of(r->recording.channel(i).samples);
        if (rms_i == 0.0)
            throw Error("no stimulus present on channel " + std::to_string(i) + " (RMS is zero)");
        std::vector<std::optional<double>> row;
        for (int j : m.channels) {
            if (j == i) {
                row.emplace_back(0.0);
            } else if (!r->recording.has_channel(j)) {
                row.emplace_back(std::nullopt);
            } else {
                const double rms_j = rms_of(r->recording.channel(j).samples);
                row.push_back(rms_j == 0.0 ? std::nullopt
                                           : std::optional<double>(20.0 * std::log10(rms_j / rms_i)));
            }
        }
        m.stimulated.push_back(i);
        m.db.push_back(std::move(row));
    }
    return m;
}

// ── Device comparison ─────────────────────────────────────────────────────

std::vector<double> resample_linear(std::span<const double> x, double from_rate, double to_rate) {
    if (x.empty()) throw Error("cannot resample an empty signal");
    if (!(from_rate > 0.0) || !(to_rate > 0.0)) throw Error("resampling rates must be > 0");
    if (from_rate == to_rate) return {x.begin(), x.end()};
    const double ratio = from_rate / to_rate;
    const auto n_out =
        static_cast<std::size_t>(std::floor(static_cast<double>(x.size() - 1) / ratio + 1e-9)) + 1;
    std::vector<double> out(n_out);
    for (std::size_t k = 0; k < n_out; ++k) {
        const double pos = static_cast<double>(k) * ratio;
        const auto i = static_cast<std::size_t>(std::floor(pos));
        if (i + 1 >= x.size()) {
            out[k] = x.back();
        } else {
            const double frac = pos - static_cast<double>(i);
            out[k] = x[i] + frac * (x[i + 1] - x[i]);
        }
    }
    return out;
}

Alignment align_by_xcorr(std::span<const double> a, std::span<const double> b, long max_lag) {
    if (a.empty() || b.empty()) throw Error("cannot align empty signals");
    const double ma = mean_of(a), mb = mean_of(b);
    std::vector<double> ca(a.size()), cb(b.size());
    double ea = 0.0, eb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ca[i] = a[i] - ma;
        ea += ca[i] * ca[i];
    }
    for (std::size_t i = 0; i < b.size(); ++i) {
        cb[i] = b[i] - mb;
        eb += cb[i] * cb[i];
    }
    Alignment best{0, 0.0};
    if (ea == 0.0 || eb == 0.0) return best;
    const double norm = std::sqrt(ea) * std::sqrt(eb);

    const long na = static_cast<long>(a.size()), nb = static_cast<long>(b.size());
    max_lag = std::min(max_lag, std::max(na, nb) - 1);
    bool first = true;
    for (long lag = -max_lag; lag <= max_lag; ++lag) {
        const long n0 = std::max(0L, -lag);
        const long n1 = std::min(na, nb - lag);
        if (n1 <= n0) continue;
        double s = 0.0;
        for (long n = n0; n < n1; ++n) s += ca[static_cast<std::size_t>(n)] * cb[static_cast<std::size_t>(n + lag)];
        const double c = s / norm;
        if (first || c > best.correlation ||
            (c == best.correlation && std::abs(lag) < std::abs(best.lag))) {
            best = {lag, c};
            first = false;
        }
    }
    return best;
}

AgreementReport compare_devices(const Recording& prototype, const Recording& reference,
                                const CompareOptions& opts) {
    AgreementReport rep;
    const auto& pch = pick(prototype, opts.prototype_channel);
    const auto& rch = pick(reference, opts.reference_channel);

    rep.common_rate_hz = std::min(prototype.rate_hz(), reference.rate_hz());
    std::vector<double> proto = resample_linear(pch.samples, prototype.rate_hz(), rep.common_rate_hz);
    std::vector<double> ref = resample_linear(rch.samples, reference.rate_hz(), rep.common_rate_hz);

    if (opts.detrend) {
        const double mp = mean_of(proto), mr = mean_of(ref);
        for (double& v : proto) v -= mp;
        for (double& v : ref) v -= mr;
    }

    const long max_lag = std::lround(opts.max_lag_s * rep.common_rate_hz);
    const Alignment al = align_by_xcorr(ref, proto, max_lag);
    rep.lag_samples = al.lag;
    rep.alignment_correlation = al.correlation;
    if (al.correlation < opts.min_alignment_correlation)
        throw Error("signals unrelatable: peak alignment correlation " +
                    format_fixed(al.correlation, 3) + " below " +
                    format_fixed(opts.min_alignment_correlation, 3));

    const std::size_t r0 = static_cast<std::size_t>(std::max(0L, -al.lag));
    const std::size_t p0 = static_cast<std::size_t>(std::max(0L, al.lag));
    const std::size_t len = std::min(ref.size() - r0, proto.size() - p0);
    rep.aligned_samples = len;

    const auto ref_n = normalize(std::span<const double>(ref).subspan(r0, len));
    const auto proto_n = normalize(std::span<const double>(proto).subspan(p0, len));

    rep.plan = WindowPlan::from_ms(opts.window_ms, rep.common_rate_hz, opts.overlap_fraction, opts.trailing);
    rep.reference_features = extract_features(ref_n, rep.plan, opts.variance);
    rep.prototype_features = extract_features(proto_n, rep.plan, opts.variance);

    for (Feature f : kAllFeatures) {
        const auto& r = rep.reference_features.at(f).values;
        const auto& p = rep.prototype_features.at(f).values;
        FeatureAgreement fa;
        fa.mape_percent = mape(r, p, opts.mape_epsilon);
        fa.one_minus_mape_percent = 100.0 - fa.mape_percent;
        try {
            fa.pearson_r = pearson(r, p);
        } catch (const Error&) {
            fa.pearson_r = std::nullopt;
        }
        rep.features[f] = fa;
    }
    rep.bland_altman_rms = bland_altman(rep.prototype_features.at(Feature::Rms).values,
                                        rep.reference_features.at(Feature::Rms).values);
    return rep;
}

}  // namespace emgvalid::agreement
