#include "emgvalid/operation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

namespace emgvalid::operation {

StabilityReport assess_stability(std::span<const Recording> recordings,
                                 std::optional<int> channel_id) {
    if (recordings.empty()) throw Error("stability assessment needs at least one recording");

    StabilityReport rep;
    std::vector<double> means;
    for (std::size_t i = 0; i < recordings.size(); ++i) {
        const auto& rec = recordings[i];
        const ChannelSeries* ch = nullptr;
        if (channel_id) {
            ch = &rec.channel(*channel_id);
        } else {
            if (rec.channel_count() != 1)
                throw Error("repetition " + std::to_string(i + 1) + " has " +
                            std::to_string(rec.channel_count()) +
                            " channels; select one channel explicitly");
            ch = &rec.channels().front();
        }
        rep.per_repetition.push_back(descriptive_stats(ch->samples));
        means.push_back(rep.per_repetition.back().mean);
    }
    rep.overall = descriptive_stats(means);

    const double n = static_cast<double>(rep.per_repetition.size());
    ColumnMeans cm;
    bool all_cv = true;
    bool all_mv = true;
    double cv_sum = 0.0;
    double mv_sum = 0.0;
    for (const auto& s : rep.per_repetition) {
        cm.mean += s.mean / n;
        cm.sd += s.sd / n;
        if (s.cv_percent) cv_sum += *s.cv_percent; else all_cv = false;
        if (s.mean_variation_percent) mv_sum += *s.mean_variation_percent; else all_mv = false;
    }
    if (all_cv) cm.cv_percent = cv_sum / n;
    if (all_mv) cm.mean_variation_percent = mv_sum / n;
    rep.column_means = cm;

    if (recordings.size() < kMinStabilityRepetitions)
        rep.warnings.push_back("only " + std::to_string(recordings.size()) +
                               " repetition(s); at least 3 are expected");
    return rep;
}

double percentage_error(double simulated_gain, double measured_gain) {
    if (simulated_gain == 0.0) throw Error("percentage error undefined for zero simulated gain");
    if (!std::isfinite(simulated_gain) || !std::isfinite(measured_gain))
        throw Error("percentage error of non-finite gain");
    return 100.0 * (measured_gain - simulated_gain) / simulated_gain;
}

ErrorMatrix::ErrorMatrix(std::vector<int> stages, std::vector<double> frequencies_hz)
    : stages_(std::move(stages)),
      frequencies_(std::move(frequencies_hz)),
      cells_(stages_.size() * frequencies_.size()) {}

const std::optional<double>& ErrorMatrix::at(std::size_t s, std::size_t f) const {
    if (s >= stages_.size() || f >= frequencies_.size()) throw Error("error matrix index out of range");
    return cells_[s * frequencies_.size() + f];
}

void ErrorMatrix::set(std::size_t s, std::size_t f, double pe) {
    if (s >= stages_.size() || f >= frequencies_.size()) throw Error("error matrix index out of range");
    cells_[s * frequencies_.size() + f] = pe;
}

std::optional<double> ErrorMatrix::lookup(int stage, double frequency_hz) const {
    const auto si = std::find(stages_.begin(), stages_.end(), stage);
    const auto fi = std::find(frequencies_.begin(), frequencies_.end(), frequency_hz);
    if (si == stages_.end() || fi == frequencies_.end()) return std::nullopt;
    return at(static_cast<std::size_t>(si - stages_.begin()),
              static_cast<std::size_t>(fi - frequencies_.begin()));
}

std::size_t ErrorMatrix::missing_count() const {
    return static_cast<std::size_t>(
        std::count_if(cells_.begin(), cells_.end(), [](const auto& c) { return !c.has_value(); }));
}

ErrorMatrix build_error_matrix(const ingest::FrequencySweep& sweep) {
    ingest::validate(sweep);
    std::set<int> stages;
    std::set<double> freqs;
    for (const auto& e : sweep.entries) {
        stages.insert(e.stage);
        freqs.insert(e.frequency_hz);
    }
    ErrorMatrix m({stages.begin(), stages.end()}, {freqs.begin(), freqs.end()});
    const auto& sv = m.stages();
    const auto& fv = m.frequencies_hz();
    for (const auto& e : sweep.entries) {
        const auto s = static_cast<std::size_t>(std::lower_bound(sv.begin(), sv.end(), e.stage) - sv.begin());
        const auto f = static_cast<std::size_t>(
            std::lower_bound(fv.begin(), fv.end(), e.frequency_hz) - fv.begin());
        m.set(s, f, percentage_error(e.simulated_gain, e.measured_gain));
    }
    return m;
}

std::string error_matrix_to_csv(const ErrorMatrix& m) {
    std::string out = "stage";
    for (double f : m.frequencies_hz()) out += "," + ingest::format_number(f);
    out += '\n';
    for (std::size_t s = 0; s < m.stages().size(); ++s) {
        out += std::to_string(m.stages()[s]);
        for (std::size_t f = 0; f < m.frequencies_hz().size(); ++f) {
            out += ',';
            if (const auto& c = m.at(s, f)) out += ingest::format_number(*c);
        }
        out += '\n';
    }
    return out;
}

ErrorMatrix parse_error_matrix_csv(std::string_view text) {
    const auto t = ingest::parse_csv(text);
    if (t.rows.size() < 2) throw Error("error matrix CSV needs a header and at least one stage row");
    const auto& hdr = t.rows.front();
    std::vector<double> freqs;
    for (std::size_t c = 1; c < hdr.size(); ++c) {
        auto f = ingest::parse_number(hdr[c]);
        if (!f) throw Error("error matrix header cell '" + hdr[c] + "' is not a frequency");
        freqs.push_back(*f);
    }
    std::vector<int> stages;
    for (std::size_t r = 1; r < t.rows.size(); ++r) {
        auto s = ingest::parse_number(t.rows[r][0]);
        if (!s) throw Error("error matrix row " + std::to_string(t.line_numbers[r]) + " has no stage id");
        stages.push_back(static_cast<int>(*s));
    }
    ErrorMatrix m(stages, freqs);
    for (std::size_t r = 1; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (row.size() > hdr.size())
            throw Error("ragged row " + std::to_string(t.line_numbers[r]));
        for (std::size_t c = 1; c < row.size(); ++c) {
            if (row[c].empty()) continue;
            auto v = ingest::parse_number(row[c]);
            if (!v) throw Error("non-numeric error matrix cell at row " + std::to_string(t.line_numbers[r]));
            m.set(r - 1, c - 1, *v);
        }
    }
    return m;
}

std::string error_matrix_to_long_csv(const ErrorMatrix& m) {
    std::string out = "stage,frequency_hz,pe_percent\n";
    for (std::size_t s = 0; s < m.stages().size(); ++s)
        for (std::size_t f = 0; f < m.frequencies_hz().size(); ++f)
            if (const auto& c = m.at(s, f))
                out += std::to_string(m.stages()[s]) + "," +
                       ingest::format_number(m.frequencies_hz()[f]) + "," +
                       ingest::format_number(*c) + "\n";
    return out;
}

std::string error_matrix_to_svg(const ErrorMatrix& m, const std::map<int, std::string>& labels) {
    constexpr int cell_w = 70, cell_h = 28, left = 190, top = 30;
    const int w = left + cell_w * static_cast<int>(m.frequencies_hz().size()) + 10;
    const int h = top + cell_h * static_cast<int>(m.stages().size()) + 10;

    double scale = 0.0;
    for (std::size_t s = 0; s < m.stages().size(); ++s)
        for (std::size_t f = 0; f < m.frequencies_hz().size(); ++f)
            if (const auto& c = m.at(s, f)) scale = std::max(scale, std::abs(*c));

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
                      "\" height=\"" + std::to_string(h) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    for (std::size_t f = 0; f < m.frequencies_hz().size(); ++f)
        out += "<text x=\"" + std::to_string(left + cell_w * static_cast<int>(f) + cell_w / 2) +
               "\" y=\"20\" text-anchor=\"middle\">" + ingest::format_number(m.frequencies_hz()[f]) +
               " Hz</text>\n";
    for (std::size_t s = 0; s < m.stages().size(); ++s) {
        const int y = top + cell_h * static_cast<int>(s);
        const int stage = m.stages()[s];
        auto it = labels.find(stage);
        std::string name = "Stage " + std::to_string(stage);
        if (it != labels.end()) name += " (" + it->second + ")";
        out += "<text x=\"4\" y=\"" + std::to_string(y + 18) + "\">" + name + "</text>\n";
        for (std::size_t f = 0; f < m.frequencies_hz().size(); ++f) {
            const int x = left + cell_w * static_cast<int>(f);
            const auto& c = m.at(s, f);
            std::string fill = "#dddddd";
            std::string label = "";
            if (c) {
                const double t = scale > 0.0 ? std::min(1.0, std::abs(*c) / scale) : 0.0;
                const int fade = static_cast<int>(std::lround(255.0 * (1.0 - t)));
                char buf[16];
                if (*c >= 0.0)
                    std::snprintf(buf, sizeof buf, "#ff%02x%02x", fade, fade);
                else
                    std::snprintf(buf, sizeof buf, "#%02x%02xff", fade, fade);
                fill = buf;
                label = format_fixed(*c, 1);
            }
            out += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) + "\" width=\"" +
                   std::to_string(cell_w) + "\" height=\"" + std::to_string(cell_h) + "\" fill=\"" +
                   fill + "\" stroke=\"#ffffff\"/>\n";
            if (!label.empty())
                out += "<text x=\"" + std::to_string(x + cell_w / 2) + "\" y=\"" +
                       std::to_string(y + 18) + "\" text-anchor=\"middle\">" + label + "</text>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

std::map<int, std::string> default_stage_labels() {
    return {{1, "preamplifier"},     {2, "instrumentation amplifier"},
            {3, "notch filter"},     {4, "high-pass filter"},
            {5, "band-pass filter"}, {6, "band-pass filter"},
            {7, "band-pass filter"}, {8, "rectifier"}};
}

}  // namespace emgvalid::operation
