#include "emgvalid/agreement.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>

namespace emgvalid::agreement {

namespace {

std::deque<double> rising_crossings(const ChannelSeries& ch, double rate_hz, const LatencyOptions& opts) {
    std::deque<double> out;
    const auto [lo, hi] = std::minmax_element(ch.samples.begin(), ch.samples.end());
    if (*hi - *lo <= 0.0) return out;
    const double thr = *lo + opts.threshold_fraction * (*hi - *lo);
    const double interval_ms = 1000.0 / rate_hz;
    for (std::size_t n = 1; n < ch.samples.size(); ++n) {
        if (ch.samples[n - 1] < thr && ch.samples[n] >= thr) {
            const double t = static_cast<double>(n) * interval_ms;
            if (out.empty() || t - out.back() >= opts.refractory_ms) out.push_back(t);
        }
    }
    return out;
}

}  // namespace

std::optional<double> LatencyTable::max_delta_ms() const {
    std::optional<double> m;
    for (const auto& e : events)
        for (const auto& d : e.deltas)
            if (d.delta_ms && (!m || *d.delta_ms > *m)) m = d.delta_ms;
    return m;
}

std::size_t LatencyTable::missing_crossings() const {
    std::size_t n = 0;
    for (const auto& e : events)
        for (const auto& [ch, t] : e.crossing_ms)
            if (!t) ++n;
    return n;
}

bool LatencyTable::within_one_interval() const {
    const auto m = max_delta_ms();
    return !m || *m <= sample_interval_ms * (1.0 + 1e-9);
}

LatencyTable detect_latency(const Recording& rec, const LatencyOptions& opts) {
    if (rec.channel_count() < 2) throw Error("latency detection needs at least 2 channels");
    if (!(opts.threshold_fraction > 0.0 && opts.threshold_fraction < 1.0))
        throw Error("latency threshold fraction must be in (0, 1)");
    if (!(opts.refractory_ms > 0.0)) throw Error("refractory period must be > 0 ms");

    LatencyTable table;
    table.sample_interval_ms = rec.sample_interval_ms();
    for (const auto& ch : rec.channels()) table.channels.push_back(ch.id);

    table.pairs = opts.pairs;
    if (table.pairs.empty())
        for (std::size_t i = 1; i < table.channels.size(); ++i)
            table.pairs.emplace_back(table.channels[i - 1], table.channels[i]);
    for (const auto& [a, b] : table.pairs)
        if (!rec.has_channel(a) || !rec.has_channel(b))
            throw Error("latency pair " + std::to_string(a) + ":" + std::to_string(b) +
                        " names a channel not in the recording");

    std::map<int, std::deque<double>> pending;
    for (const auto& ch : rec.channels()) pending[ch.id] = rising_crossings(ch, rec.rate_hz(), opts);

    int next_id = 1;
    while (true) {
        std::optional<double> start;
        for (const auto& [id, q] : pending)
            if (!q.empty() && (!start || q.front() < *start)) start = q.front();
        if (!start) break;

        LatencyEvent ev;
        ev.event_id = next_id++;
        for (auto& [id, q] : pending) {
            if (!q.empty() && q.front() < *start + opts.refractory_ms) {
                ev.crossing_ms[id] = q.front();
                q.pop_front();
            } else {
                ev.crossing_ms[id] = std::nullopt;
            }
        }
        for (const auto& [a, b] : table.pairs) {
            PairDelta d{a, b, std::nullopt};
            const auto& ta = ev.crossing_ms[a];
            const auto& tb = ev.crossing_ms[b];
            if (ta && tb) d.delta_ms = std::abs(*ta - *tb);
            ev.deltas.push_back(d);
        }
        table.events.push_back(std::move(ev));
    }
    return table;
}

std::vector<std::pair<int, int>> parse_pairs(std::string_view text) {
    std::vector<std::pair<int, int>> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto item = text.substr(pos, end - pos);
        const auto colon = item.find(':');
        int a = 0, b = 0;
        bool ok = colon != std::string_view::npos;
        if (ok) {
            auto r1 = std::from_chars(item.data(), item.data() + colon, a);
            auto r2 = std::from_chars(item.data() + colon + 1, item.data() + item.size(), b);
            ok = r1.ec == std::errc() && r1.ptr == item.data() + colon && r2.ec == std::errc() &&
                 r2.ptr == item.data() + item.size();
        }
        if (!ok) throw Error("bad channel pair '" + std::string(item) + "' (expected A:B)");
        if (a < 1 || a > 8 || b < 1 || b > 8 || a == b)
            throw Error("bad channel pair '" + std::string(item) + "' (two distinct channels 1..8)");
        out.emplace_back(a, b);
        pos = end + 1;
    }
    if (out.empty()) throw Error("empty channel pair list");
    return out;
}

}  // namespace emgvalid::agreement
