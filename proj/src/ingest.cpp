#include "emgvalid/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace emgvalid::ingest {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

char detect_delimiter(std::string_view first_line) {
    if (first_line.find(';') != std::string_view::npos) return ';';
    if (first_line.find('\t') != std::string_view::npos) return '\t';
    return ',';
}

std::vector<std::string> split_line(std::string_view line, char delim) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            cells.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    cells.emplace_back(trim(cur));
    return cells;
}

bool row_is_numeric(const std::vector<std::string>& row) {
    return std::all_of(row.begin(), row.end(),
                       [](const std::string& c) { return parse_number(c).has_value(); });
}

std::string where(const CsvTable& t, std::size_t row, std::size_t col) {
    return "row " + std::to_string(t.line_numbers[row]) + ", column " + std::to_string(col + 1);
}

double require_number(const CsvTable& t, std::size_t row, std::size_t col) {
    const auto& cells = t.rows[row];
    if (col >= cells.size() || cells[col].empty())
        throw Error("missing cell at " + where(t, row, col));
    auto v = parse_number(cells[col]);
    if (!v) throw Error("non-numeric cell '" + cells[col] + "' at " + where(t, row, col));
    return *v;
}

/// Trailing integer of a header cell ("ch3" -> 3).
std::optional<int> trailing_int(std::string_view s) {
    std::size_t i = s.size();
    while (i > 0 && std::isdigit(static_cast<unsigned char>(s[i - 1]))) --i;
    if (i == s.size()) return std::nullopt;
    int v = 0;
    std::from_chars(s.data() + i, s.data() + s.size(), v);
    return v;
}

bool looks_like_time_header(std::string_view cell) {
    const std::string l = lower(cell);
    return l == "t" || l.rfind("time", 0) == 0 || l == "timestamp" || l == "t_ms" || l == "t_s";
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
    CsvTable table;
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF)
        text.remove_prefix(3);

    bool delim_known = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        pos = end + 1;

        const auto t = trim(line);
        if (t.empty() || t.front() == '#') {
            if (end == text.size()) break;
            continue;
        }
        if (!delim_known) {
            table.delimiter = detect_delimiter(line);
            delim_known = true;
        }
        table.rows.push_back(split_line(line, table.delimiter));
        table.line_numbers.push_back(line_no);
        if (end == text.size()) break;
    }
    return table;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::optional<double> parse_number(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return std::nullopt;
    std::string buf(cell);
    const auto comma = buf.find(',');
    if (comma != std::string::npos) {
        if (buf.find('.') != std::string::npos || buf.find(',', comma + 1) != std::string::npos)
            return std::nullopt;
        buf[comma] = '.';
    }
    const char* first = buf.data();
    const char* last = buf.data() + buf.size();
    if (*first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

// ── Recordings ────────────────────────────────────────────────────────────

Recording parse_recording(std::string_view text, double rate_hz, Units units,
                          const RecordingCsvOptions& opts) {
    const CsvTable t = parse_csv(text);
    if (t.rows.empty()) throw Error("empty recording file");

    const bool has_header = !row_is_numeric(t.rows.front());
    const std::size_t first_data = has_header ? 1 : 0;
    if (first_data >= t.rows.size()) throw Error("recording file has a header but no samples");

    const std::size_t ncols = t.rows[first_data].size();
    for (std::size_t r = first_data; r < t.rows.size(); ++r)
        if (t.rows[r].size() != ncols)
            throw Error("ragged row " + std::to_string(t.line_numbers[r]) + ": expected " +
                        std::to_string(ncols) + " cells, found " +
                        std::to_string(t.rows[r].size()));
    if (has_header && t.rows.front().size() != ncols)
        throw Error("header has " + std::to_string(t.rows.front().size()) + " cells but data has " +
                    std::to_string(ncols));

    std::vector<std::vector<double>> cols(ncols);
    for (std::size_t r = first_data; r < t.rows.size(); ++r)
        for (std::size_t c = 0; c < ncols; ++c) cols[c].push_back(require_number(t, r, c));

    bool time_col = false;
    switch (opts.time_column) {
        case TimeColumn::Present: time_col = true; break;
        case TimeColumn::Absent: time_col = false; break;
        case TimeColumn::Auto:
            if (ncols >= 2) {
                if (has_header) {
                    time_col = looks_like_time_header(t.rows.front()[0]);
                } else {
                    const auto& c0 = cols[0];
                    time_col = c0.size() >= 2 &&
                               std::adjacent_find(c0.begin(), c0.end(), std::greater_equal<>()) ==
                                   c0.end();
                }
            }
            break;
    }
    if (time_col && ncols < 2) throw Error("time column present but no channel columns");

    if (time_col && cols[0].size() >= 2) {
        const auto& tc = cols[0];
        const double span = tc.back() - tc.front();
        const double step = span / static_cast<double>(tc.size() - 1);
        if (!(step > 0.0)) throw Error("time column is not increasing");
        for (std::size_t i = 1; i < tc.size(); ++i) {
            const double d = tc[i] - tc[i - 1];
            if (std::abs(d - step) > opts.time_uniformity_tolerance * step)
                throw Error("time column spacing not uniform within " +
                            format_fixed(100.0 * opts.time_uniformity_tolerance, 1) + "% at row " +
                            std::to_string(t.line_numbers[first_data + i]));
        }
    }

    const std::size_t first_ch = time_col ? 1 : 0;
    const std::size_t nch = ncols - first_ch;

    std::vector<int> ids(nch);
    bool header_ids = has_header;
    if (has_header) {
        std::set<int> seen;
        for (std::size_t c = 0; c < nch; ++c) {
            auto id = trailing_int(t.rows.front()[first_ch + c]);
            if (!id || *id < 1 || *id > 8 || !seen.insert(*id).second) {
                header_ids = false;
                break;
            }
            ids[c] = *id;
        }
    }
    if (!header_ids)
        for (std::size_t c = 0; c < nch; ++c) ids[c] = static_cast<int>(c + 1);

    std::vector<ChannelSeries> channels;
    channels.reserve(nch);
    for (std::size_t c = 0; c < nch; ++c)
        channels.push_back({ids[c], std::move(cols[first_ch + c])});
    return Recording(std::move(channels), rate_hz, units);
}

Recording load_recording(const std::filesystem::path& path, double rate_hz, Units units,
                         const RecordingCsvOptions& opts) {
    try {
        return parse_recording(read_text_file(path), rate_hz, units, opts);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string recording_to_csv(const Recording& rec) {
    std::string out;
    const auto& chs = rec.channels();
    for (std::size_t c = 0; c < chs.size(); ++c) {
        if (c) out += ',';
        out += "ch" + std::to_string(chs[c].id);
    }
    out += '\n';
    for (std::size_t i = 0; i < rec.length(); ++i) {
        for (std::size_t c = 0; c < chs.size(); ++c) {
            if (c) out += ',';
            out += format_number(chs[c].samples[i]);
        }
        out += '\n';
    }
    return out;
}

// ── Repetition tables ─────────────────────────────────────────────────────

RepetitionTable parse_repetition_table(std::string_view text) {
    const CsvTable t = parse_csv(text);
    if (t.rows.empty()) throw Error("empty repetition table");

    const bool has_header = !row_is_numeric(t.rows.front());
    const std::size_t first_data = has_header ? 1 : 0;
    const auto is_mean = [](std::string_view s) { return lower(trim(s)).rfind("mean", 0) == 0; };

    RepetitionTable table;
    const bool long_form =
        has_header && lower(t.rows.front()[0]).rfind("repetition", 0) == 0;

    if (long_form) {
        const auto& hdr = t.rows.front();
        table.labels.push_back(hdr.size() > 1 && !hdr[1].empty() ? hdr[1] : "series");
        std::vector<double> values;
        for (std::size_t r = first_data; r < t.rows.size(); ++r) {
            if (!t.rows[r].empty() && is_mean(t.rows[r][0])) continue;
            const double v = require_number(t, r, 1);
            if (v < 0.0) throw Error("negative current magnitude at " + where(t, r, 1));
            values.push_back(v);
        }
        if (values.empty()) throw Error("repetition table has no values");
        table.rows.push_back(std::move(values));
        return table;
    }

    std::size_t width = 0;
    for (std::size_t r = first_data; r < t.rows.size(); ++r) width = std::max(width, t.rows[r].size());
    if (has_header) width = std::max(width, t.rows.front().size());

    std::vector<std::size_t> value_cols;
    for (std::size_t c = 1; c < width; ++c) {
        if (has_header && c < t.rows.front().size() && is_mean(t.rows.front()[c])) continue;
        value_cols.push_back(c);
    }
    if (value_cols.empty()) throw Error("repetition table has no repetition columns");

    for (std::size_t r = first_data; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        if (is_mean(row[0])) continue;
        std::vector<double> values;
        for (std::size_t c : value_cols) {
            const double v = require_number(t, r, c);
            if (v < 0.0) throw Error("negative current magnitude at " + where(t, r, c));
            values.push_back(v);
        }
        table.labels.push_back(row[0].empty() ? std::to_string(table.rows.size() + 1) : row[0]);
        table.rows.push_back(std::move(values));
    }
    if (table.rows.empty()) throw Error("repetition table has no rows");
    return table;
}

RepetitionTable load_repetition_table(const std::filesystem::path& path) {
    try {
        return parse_repetition_table(read_text_file(path));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string repetition_table_to_csv(const RepetitionTable& table) {
    std::size_t width = 0;
    for (const auto& r : table.rows) width = std::max(width, r.size());
    std::string out = "sensor";
    for (std::size_t c = 0; c < width; ++c) out += "," + std::to_string(c + 1);
    out += '\n';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        out += table.labels[r];
        for (double v : table.rows[r]) out += "," + format_number(v);
        out += '\n';
    }
    return out;
}

// ── Frequency sweeps ──────────────────────────────────────────────────────

void validate(const FrequencySweep& sweep) {
    if (sweep.entries.empty()) throw Error("frequency sweep has no entries");
    std::set<std::pair<int, double>> seen;
    for (const auto& e : sweep.entries) {
        if (e.stage < 1 || e.stage > 8)
            throw Error("stage " + std::to_string(e.stage) + " outside 1..8");
        if (!(e.frequency_hz > 0.0)) throw Error("frequency must be > 0 Hz");
        if (!std::isfinite(e.simulated_gain) || !std::isfinite(e.measured_gain))
            throw Error("non-finite gain");
        if (e.simulated_gain == 0.0)
            throw Error("simulated gain is zero at stage " + std::to_string(e.stage) + ", " +
                        format_number(e.frequency_hz) + " Hz");
        if (!seen.insert({e.stage, e.frequency_hz}).second)
            throw Error("duplicate (stage, frequency) entry: stage " + std::to_string(e.stage) +
                        ", " + format_number(e.frequency_hz) + " Hz");
    }
}

FrequencySweep parse_frequency_sweep(std::string_view text, GainScale scale) {
    const CsvTable t = parse_csv(text);
    if (t.rows.empty()) throw Error("empty frequency sweep file");
    const std::size_t first_data = row_is_numeric(t.rows.front()) ? 0 : 1;

    FrequencySweep sweep;
    for (std::size_t r = first_data; r < t.rows.size(); ++r) {
        if (t.rows[r].size() < 4)
            throw Error("ragged row " + std::to_string(t.line_numbers[r]) +
                        ": expected stage, frequency_hz, simulated_gain, measured_gain");
        const double stage = require_number(t, r, 0);
        if (stage != std::floor(stage)) throw Error("non-integer stage at " + where(t, r, 0));
        SweepEntry e{static_cast<int>(stage), require_number(t, r, 1), require_number(t, r, 2),
                     require_number(t, r, 3)};
        if (scale == GainScale::Decibel) {
            e.simulated_gain = std::pow(10.0, e.simulated_gain / 20.0);
            e.measured_gain = std::pow(10.0, e.measured_gain / 20.0);
        }
        sweep.entries.push_back(e);
    }
    validate(sweep);
    return sweep;
}

FrequencySweep load_frequency_sweep(const std::filesystem::path& path, GainScale scale) {
    try {
        return parse_frequency_sweep(read_text_file(path), scale);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string frequency_sweep_to_csv(const FrequencySweep& sweep) {
    std::string out = "stage,frequency_hz,simulated_gain,measured_gain\n";
    for (const auto& e : sweep.entries)
        out += std::to_string(e.stage) + "," + format_number(e.frequency_hz) + "," +
               format_number(e.simulated_gain) + "," + format_number(e.measured_gain) + "\n";
    return out;
}

// ── Force–displacement logs ───────────────────────────────────────────────

void validate(const ForceDisplacementLog& log) {
    if (!(log.area_mm2 > 0.0)) throw Error("cross-sectional area must be > 0 mm^2");
    if (!(log.height_mm > 0.0)) throw Error("original height must be > 0 mm");
    if (log.points.empty()) throw Error("force-displacement log has no points");
    for (const auto& p : log.points) {
        if (!(p.force_n >= 0.0)) throw Error("negative force in force-displacement log");
        if (!(p.displacement_mm >= 0.0))
            throw Error("negative displacement in force-displacement log");
    }
    const auto peak = std::max_element(log.points.begin(), log.points.end(),
                                       [](const auto& a, const auto& b) { return a.force_n < b.force_n; });
    for (auto it = log.points.begin(); it != peak; ++it)
        if (std::next(it)->force_n < it->force_n)
            throw Error("non-monotonic loading at point " +
                        std::to_string(std::distance(log.points.begin(), it) + 2));
    for (auto it = peak; std::next(it) != log.points.end(); ++it)
        if (std::next(it)->force_n > it->force_n)
            throw Error("non-monotonic loading at point " +
                        std::to_string(std::distance(log.points.begin(), it) + 2));
}

ForceDisplacementLog parse_force_displacement(std::string_view text, double area_mm2,
                                              double height_mm) {
    const CsvTable t = parse_csv(text);
    if (t.rows.empty()) throw Error("empty force-displacement file");
    const std::size_t first_data = row_is_numeric(t.rows.front()) ? 0 : 1;

    ForceDisplacementLog log;
    log.area_mm2 = area_mm2;
    log.height_mm = height_mm;
    for (std::size_t r = first_data; r < t.rows.size(); ++r) {
        if (t.rows[r].size() < 2)
            throw Error("ragged row " + std::to_string(t.line_numbers[r]) +
                        ": expected force_n, displacement_mm");
        log.points.push_back({require_number(t, r, 0), require_number(t, r, 1)});
    }
    validate(log);
    return log;
}

ForceDisplacementLog load_force_displacement(const std::filesystem::path& path, double area_mm2,
                                             double height_mm) {
    try {
        return parse_force_displacement(read_text_file(path), area_mm2, height_mm);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string force_displacement_to_csv(const ForceDisplacementLog& log) {
    std::string out = "force_n,displacement_mm\n";
    for (const auto& p : log.points)
        out += format_number(p.force_n) + "," + format_number(p.displacement_mm) + "\n";
    return out;
}

}  // namespace emgvalid::ingest
