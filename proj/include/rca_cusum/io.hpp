#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "rca_cusum/detector.hpp"
#include "rca_cusum/mc.hpp"

namespace rca_cusum {

inline constexpr const char* kVersion = "0.1.0";

enum class Transform { None, Log, LogDiff, LogPlusOne };

inline const char* to_string(Transform t) {
    switch (t) {
        case Transform::None: return "none";
        case Transform::Log: return "log";
        case Transform::LogDiff: return "log-diff";
        case Transform::LogPlusOne: return "log-plus-one";
    }
    return "?";
}

inline Transform transform_from_string(const std::string& s) {
    if (s == "none") return Transform::None;
    if (s == "log") return Transform::Log;
    if (s == "log-diff" || s == "logdiff") return Transform::LogDiff;
    if (s == "log-plus-one" || s == "log1p") return Transform::LogPlusOne;
    throw InvalidSpec("unknown transform: " + s);
}

struct IngestSpec {
    std::string path;
    std::string column;  // header name or 0-based index; empty = first numeric column
    Transform transform = Transform::None;
    std::optional<std::string> date_column;
    std::optional<char> delimiter;  // default: auto-detect among , ; tab
};

namespace detail {

inline std::string trim_ws(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

inline bool parse_double(const std::string& raw, double& out) {
    std::string s = trim_ws(raw);
    if (!s.empty() && s.front() == '+') s.erase(s.begin());
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline std::vector<std::string> split_row(const std::string& line, char delim) {
    std::vector<std::string> fields;
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
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline char detect_delimiter(const std::string& line) {
    const char candidates[] = {',', ';', '\t'};
    char best = ',';
    std::size_t best_count = 0;
    for (char c : candidates) {
        const std::size_t count =
            static_cast<std::size_t>(std::count(line.begin(), line.end(), c));
        if (count > best_count) {
            best = c;
            best_count = count;
        }
    }
    return best;
}

}  // namespace detail

// Parses a delimited text file into a series, applying the configured
// transform. Malformed rows and transform domain violations are reported with
// their 1-based line numbers.
inline TimeSeries load_series(const IngestSpec& spec) {
    std::ifstream in(spec.path);
    if (!in) throw DegenerateData(spec.path + ": cannot open file");

    std::vector<std::pair<long, std::string>> rows;  // line number, content
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim_ws(line);
        if (!t.empty()) rows.emplace_back(lineno, line);
    }
    if (rows.empty()) throw DegenerateData(spec.path + ": no data rows");

    const char delim = spec.delimiter ? *spec.delimiter
                                      : detail::detect_delimiter(rows.front().second);
    const std::vector<std::string> first = detail::split_row(rows.front().second, delim);
    const std::size_t ncols = first.size();

    bool has_header = false;
    for (const auto& f : first) {
        double v;
        if (!detail::parse_double(f, v) && !detail::trim_ws(f).empty()) {
            has_header = true;
            break;
        }
    }

    std::vector<std::string> header(ncols);
    for (std::size_t c = 0; c < ncols; ++c)
        header[c] = has_header ? detail::trim_ws(first[c]) : std::to_string(c);

    const auto resolve = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t c = 0; c < ncols; ++c)
            if (header[c] == name) return c;
        double idx;
        if (detail::parse_double(name, idx) && idx >= 0 && idx < static_cast<double>(ncols) &&
            idx == static_cast<double>(static_cast<std::size_t>(idx)))
            return static_cast<std::size_t>(idx);
        return std::nullopt;
    };

    std::optional<std::size_t> date_col;
    if (spec.date_column) {
        date_col = resolve(*spec.date_column);
        if (!date_col)
            throw DegenerateData(spec.path + ": date column '" + *spec.date_column +
                                 "' not found");
    }

    const std::size_t data_begin = has_header ? 1 : 0;
    std::size_t col = 0;
    if (!spec.column.empty()) {
        const auto r = resolve(spec.column);
        if (!r) throw DegenerateData(spec.path + ": column '" + spec.column + "' not found");
        col = *r;
    } else {
        // first column whose data cells all parse as numbers
        bool found = false;
        for (std::size_t c = 0; c < ncols && !found; ++c) {
            if (date_col && c == *date_col) continue;
            bool all = true;
            for (std::size_t r = data_begin; r < rows.size() && all; ++r) {
                const auto fields = detail::split_row(rows[r].second, delim);
                double v;
                if (fields.size() <= c || !detail::parse_double(fields[c], v)) all = false;
            }
            if (all) {
                col = c;
                found = true;
            }
        }
        if (!found) throw DegenerateData(spec.path + ": no numeric column found");
    }

    std::vector<double> values;
    std::vector<long> lines;
    values.reserve(rows.size());
    for (std::size_t r = data_begin; r < rows.size(); ++r) {
        const auto fields = detail::split_row(rows[r].second, delim);
        if (fields.size() != ncols)
            throw DegenerateData(spec.path + ": line " + std::to_string(rows[r].first) +
                                 ": expected " + std::to_string(ncols) + " fields, got " +
                                 std::to_string(fields.size()));
        double v;
        if (!detail::parse_double(fields[col], v))
            throw DegenerateData(spec.path + ": line " + std::to_string(rows[r].first) +
                                 ": non-numeric cell '" + detail::trim_ws(fields[col]) +
                                 "' in column '" + header[col] + "'");
        values.push_back(v);
        lines.push_back(rows[r].first);
    }

    switch (spec.transform) {
        case Transform::None:
            break;
        case Transform::Log:
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (!(values[i] > 0.0))
                    throw DegenerateData(spec.path + ": line " + std::to_string(lines[i]) +
                                         ": log requires positive values");
                values[i] = std::log(values[i]);
            }
            break;
        case Transform::LogDiff: {
            for (std::size_t i = 0; i < values.size(); ++i)
                if (!(values[i] > 0.0))
                    throw DegenerateData(spec.path + ": line " + std::to_string(lines[i]) +
                                         ": log-diff requires positive values");
            std::vector<double> diffed;
            diffed.reserve(values.size() - 1);
            for (std::size_t i = 1; i < values.size(); ++i)
                diffed.push_back(std::log(values[i]) - std::log(values[i - 1]));
            values = std::move(diffed);
            break;
        }
        case Transform::LogPlusOne:
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (!(values[i] > -1.0))
                    throw DegenerateData(spec.path + ": line " + std::to_string(lines[i]) +
                                         ": log-plus-one requires values > -1");
                values[i] = std::log1p(values[i]);
            }
            break;
    }

    if (values.size() < 2) throw DegenerateData(spec.path + ": series too short");
    TimeSeries out;
    out.values = std::move(values);
    out.n = static_cast<int>(out.values.size()) - 1;
    out.label = spec.path + ":" + header[col] +
                (spec.transform == Transform::None
                     ? std::string()
                     : std::string(" [") + to_string(spec.transform) + "]");
    return out;
}

struct PlotRow {
    double t = 0.0;
    double value = 0.0;      // Q or Qbar
    double threshold = 0.0;  // rejection envelope at t
};

struct ReportDocument {
    std::string command;
    std::string version = kVersion;
    std::map<std::string, std::string> config;  // effective configuration echo
    double elapsed_sec = 0.0;
    std::string input_label;
    std::optional<TestReport> test;
    std::optional<ChangepointSet> segmentation;
    std::optional<RejectionTable> table;
    std::vector<PlotRow> plot;
};

enum class ReportFormat { Structured, Delimited, PlotData };

namespace detail {

using nlohmann::json;

inline json to_json(const TestReport& r) {
    json j;
    j["statistic_value"] = r.statistic_value;
    j["critical_value"] = r.critical_value;
    j["reject"] = r.reject;
    if (r.breakdate) {
        j["breakdate"] = *r.breakdate;
        j["t_hat"] = r.t_hat;
    }
    if (r.eta_hat_sq) j["eta_hat_sq"] = *r.eta_hat_sq;
    j["diagnostics"] = r.diagnostics;
    return j;
}

inline TestReport test_report_from_json(const json& j) {
    TestReport r;
    r.statistic_value = j.at("statistic_value").get<double>();
    r.critical_value = j.at("critical_value").get<double>();
    r.reject = j.at("reject").get<bool>();
    if (j.contains("breakdate")) {
        r.breakdate = j.at("breakdate").get<int>();
        r.t_hat = j.at("t_hat").get<double>();
    }
    if (j.contains("eta_hat_sq")) r.eta_hat_sq = j.at("eta_hat_sq").get<double>();
    r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
    return r;
}

inline json to_json(const RejectionCell& c) {
    return json{{"beta0", c.beta0},
                {"n", c.n},
                {"kappa", c.kappa},
                {"delta", c.delta},
                {"frequency", c.frequency},
                {"rejections", c.rejections},
                {"reps", c.reps},
                {"half_width", c.half_width},
                {"overflow_redraws", c.overflow_redraws}};
}

inline RejectionCell cell_from_json(const json& j) {
    RejectionCell c;
    c.beta0 = j.at("beta0").get<double>();
    c.n = j.at("n").get<int>();
    c.kappa = j.at("kappa").get<double>();
    c.delta = j.at("delta").get<double>();
    c.frequency = j.at("frequency").get<double>();
    c.rejections = j.at("rejections").get<long>();
    c.reps = j.at("reps").get<long>();
    c.half_width = j.at("half_width").get<double>();
    c.overflow_redraws = j.at("overflow_redraws").get<long>();
    return c;
}

}  // namespace detail

// Deterministic serialization of a run: structured (JSON), key-value
// delimited, or (t, value, threshold) triples for external plotting.
inline std::string emit_report(const ReportDocument& doc, ReportFormat format) {
    using nlohmann::json;
    switch (format) {
        case ReportFormat::Structured: {
            json j;
            j["command"] = doc.command;
            j["version"] = doc.version;
            j["config"] = doc.config;
            j["elapsed_sec"] = doc.elapsed_sec;
            j["input_label"] = doc.input_label;
            if (doc.test) j["test"] = detail::to_json(*doc.test);
            if (doc.segmentation) {
                json breaks = json::array();
                for (const auto& [idx, rep] : doc.segmentation->breaks)
                    breaks.push_back(json{{"index", idx}, {"report", detail::to_json(rep)}});
                j["segmentation"] =
                    json{{"breaks", breaks}, {"min_segment", doc.segmentation->min_segment}};
            }
            if (doc.table) {
                json cells = json::array();
                for (const auto& c : doc.table->cells) cells.push_back(detail::to_json(c));
                j["table"] = json{{"cells", cells}, {"reps", doc.table->reps}};
            }
            if (!doc.plot.empty()) {
                json rows = json::array();
                for (const auto& p : doc.plot)
                    rows.push_back(json{{"t", p.t}, {"value", p.value}, {"threshold", p.threshold}});
                j["plot"] = rows;
            }
            return j.dump(2) + "\n";
        }
        case ReportFormat::Delimited: {
            std::ostringstream out;
            out << "key,value\n";
            out << "command," << doc.command << "\n";
            out << "version," << doc.version << "\n";
            out << "input," << doc.input_label << "\n";
            for (const auto& [k, v] : doc.config) out << k << "," << v << "\n";
            if (doc.test) {
                out << "statistic_value," << CvCache::format_double(doc.test->statistic_value) << "\n";
                out << "critical_value," << CvCache::format_double(doc.test->critical_value) << "\n";
                out << "reject," << (doc.test->reject ? "true" : "false") << "\n";
                if (doc.test->breakdate) {
                    out << "breakdate," << *doc.test->breakdate << "\n";
                    out << "t_hat," << CvCache::format_double(doc.test->t_hat) << "\n";
                }
                if (doc.test->eta_hat_sq)
                    out << "eta_hat_sq," << CvCache::format_double(*doc.test->eta_hat_sq) << "\n";
            }
            if (doc.segmentation) {
                out << "breaks," << doc.segmentation->breaks.size() << "\n";
                for (const auto& [idx, rep] : doc.segmentation->breaks)
                    out << "break," << idx << "," << CvCache::format_double(rep.statistic_value)
                        << "," << CvCache::format_double(rep.critical_value) << "\n";
            }
            if (doc.table) {
                out << "cell_header,beta0,n,kappa,delta,frequency,half_width,rejections,reps,"
                       "overflow_redraws\n";
                for (const auto& c : doc.table->cells)
                    out << "cell," << CvCache::format_double(c.beta0) << "," << c.n << ","
                        << CvCache::format_double(c.kappa) << ","
                        << CvCache::format_double(c.delta) << ","
                        << CvCache::format_double(c.frequency) << ","
                        << CvCache::format_double(c.half_width) << "," << c.rejections << ","
                        << c.reps << "," << c.overflow_redraws << "\n";
            }
            return out.str();
        }
        case ReportFormat::PlotData: {
            std::ostringstream out;
            out << "t,value,threshold\n";
            for (const auto& p : doc.plot)
                out << CvCache::format_double(p.t) << "," << CvCache::format_double(p.value)
                    << "," << CvCache::format_double(p.threshold) << "\n";
            return out.str();
        }
    }
    return {};
}

// Inverse of the structured format; used for round-trip checks and by
// consumers of archived reports.
inline ReportDocument parse_report(const std::string& text) {
    using nlohmann::json;
    const json j = json::parse(text);
    ReportDocument doc;
    doc.command = j.at("command").get<std::string>();
    doc.version = j.at("version").get<std::string>();
    doc.config = j.at("config").get<std::map<std::string, std::string>>();
    doc.elapsed_sec = j.at("elapsed_sec").get<double>();
    doc.input_label = j.at("input_label").get<std::string>();
    if (j.contains("test")) doc.test = detail::test_report_from_json(j.at("test"));
    if (j.contains("segmentation")) {
        ChangepointSet cs;
        cs.min_segment = j.at("segmentation").at("min_segment").get<int>();
        for (const auto& b : j.at("segmentation").at("breaks"))
            cs.breaks.emplace_back(b.at("index").get<int>(),
                                   detail::test_report_from_json(b.at("report")));
        doc.segmentation = std::move(cs);
    }
    if (j.contains("table")) {
        RejectionTable t;
        t.reps = j.at("table").at("reps").get<long>();
        for (const auto& c : j.at("table").at("cells"))
            t.cells.push_back(detail::cell_from_json(c));
        doc.table = std::move(t);
    }
    if (j.contains("plot")) {
        for (const auto& p : j.at("plot"))
            doc.plot.push_back(PlotRow{p.at("t").get<double>(), p.at("value").get<double>(),
                                       p.at("threshold").get<double>()});
    }
    return doc;
}

}  // namespace rca_cusum
