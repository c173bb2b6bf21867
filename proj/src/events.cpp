#include "conductor/events.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "conductor/error.hpp"

namespace conductor {

namespace {

bool event_before(const HighLevelEvent& a, const HighLevelEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.event_id < b.event_id;
}

// Field separators of the flat formats are percent-escaped.
std::string escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '%' || c == ',' || c == ';' || c == '=' || c == '\n' || c == '\r' || c == '#') {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", static_cast<unsigned char>(c));
            out += buf;
        } else {
            out += c;
        }
    }
    return out;
}

std::string unescape(std::string_view s, std::size_t line) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '%') {
            out += s[i];
            continue;
        }
        if (i + 2 >= s.size()) throw ParseError(line, "truncated escape");
        unsigned value = 0;
        auto [p, ec] = std::from_chars(s.data() + i + 1, s.data() + i + 3, value, 16);
        if (ec != std::errc() || p != s.data() + i + 3) throw ParseError(line, "bad escape");
        out += static_cast<char>(value);
        i += 2;
    }
    return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_double(std::string_view s, std::size_t line, const char* what) {
    // strtod handles the fixed-point text we emit and is locale independent for it.
    std::string tmp(s);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size() || !std::isfinite(v))
        throw ParseError(line, std::string("bad ") + what + " '" + tmp + "'");
    return v;
}

std::uint64_t parse_u64(std::string_view s, std::size_t line, const char* what) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size())
        throw ParseError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
    return v;
}

bool parse_flag(std::string_view s, std::size_t line) {
    if (s == "1") return true;
    if (s == "0") return false;
    throw ParseError(line, "bad flag '" + std::string(s) + "'");
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::string_view to_string(ReadingKind k) {
    switch (k) {
        case ReadingKind::Frame: return "frame";
        case ReadingKind::Gps: return "gps";
        case ReadingKind::Accel: return "accel";
        case ReadingKind::SpreaderHeight: return "spreader_height";
    }
    return {};
}

std::optional<ReadingKind> parse_reading_kind(std::string_view s) {
    for (auto k : {ReadingKind::Frame, ReadingKind::Gps, ReadingKind::Accel, ReadingKind::SpreaderHeight})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

double quantize_time(double seconds) { return std::round(seconds * 1000.0) / 1000.0; }

std::string format_time(double seconds) {
    char buf[64];
    const double q = quantize_time(seconds);
    std::snprintf(buf, sizeof buf, "%.3f", q == 0.0 ? 0.0 : q);  // no "-0.000"
    return buf;
}

void EventLog::append(HighLevelEvent event) {
    if (event.case_id.empty()) throw EmptyCaseId("event '" + event.event_id + "' has no case id");
    if (event.attributes.contains(std::string(kEventIdKey)) || event.attributes.contains(std::string(kSizeKey)))
        throw ReservedAttribute("event '" + event.event_id + "' uses a reserved attribute key");
    if (event_ids_.contains(event.event_id)) throw DuplicateEvent("duplicate event id '" + event.event_id + "'");
    event.time = quantize_time(event.time);
    event_ids_.insert(event.event_id);
    auto& trace = traces_[event.case_id];
    auto pos = std::upper_bound(trace.begin(), trace.end(), event, event_before);
    trace.insert(pos, std::move(event));
}

const std::vector<HighLevelEvent>* EventLog::trace(const std::string& case_id) const {
    auto it = traces_.find(case_id);
    return it == traces_.end() ? nullptr : &it->second;
}

EventLog append(EventLog log, HighLevelEvent event) {
    log.append(std::move(event));
    return log;
}

std::string format_log(const EventLog& log) {
    std::string out;
    for (const auto& [case_id, trace] : log.traces()) {
        for (const auto& e : trace) {
            out += escape(case_id);
            out += ',';
            out += escape(e.activity);
            out += ',';
            out += format_time(e.time);
            out += ',';
            out += std::string(kEventIdKey) + "=" + escape(e.event_id);
            out += ';' + std::string(kSizeKey) + "=" + std::to_string(e.size);
            for (const auto& [k, v] : e.attributes) out += ';' + escape(k) + '=' + escape(v);
            out += '\n';
        }
    }
    return out;
}

EventLog parse_log(std::istream& in) {
    EventLog log;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        const auto fields = split(line, ',');
        if (fields.size() != 4) throw ParseError(lineno, "expected 4 fields, got " + std::to_string(fields.size()));
        HighLevelEvent e;
        e.case_id = unescape(fields[0], lineno);
        e.activity = unescape(fields[1], lineno);
        e.time = parse_double(fields[2], lineno, "time");
        bool have_id = false;
        for (auto kv : split(fields[3], ';')) {
            auto eq = kv.find('=');
            if (eq == std::string_view::npos) throw ParseError(lineno, "attribute without '='");
            auto key = unescape(kv.substr(0, eq), lineno);
            auto value = kv.substr(eq + 1);
            if (key == kEventIdKey) {
                e.event_id = unescape(value, lineno);
                have_id = true;
            } else if (key == kSizeKey) {
                e.size = parse_u64(value, lineno, "size");
            } else if (!e.attributes.emplace(std::move(key), unescape(value, lineno)).second) {
                throw ParseError(lineno, "duplicate attribute");
            }
        }
        if (!have_id) throw ParseError(lineno, "missing event_id");
        try {
            log.append(std::move(e));
        } catch (const Error& err) {
            throw ParseError(lineno, err.what());
        }
    }
    return log;
}

EventLog parse_log_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_log(in);
}

EventLog read_log(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    return parse_log(in);
}

void write_log(const EventLog& log, const std::filesystem::path& path) { write_file(path, format_log(log)); }

std::string format_readings(const std::vector<RawReading>& readings, bool with_truth) {
    std::string out = "# reading_id,source,true_time,observed_time,kind,payload_size,sensitive,delay\n";
    for (const auto& r : readings) {
        out += escape(r.reading_id) + ',' + escape(r.source) + ',' + format_time(r.true_time) + ',' +
               format_time(r.observed_time) + ',' + std::string(to_string(r.kind)) + ',' +
               std::to_string(r.payload_size) + ',' + (r.sensitive ? "1" : "0") + ',' + format_time(r.delay) +
               '\n';
        if (with_truth && r.truth) {
            out += "#truth," + escape(r.reading_id) + ',' + escape(r.truth->label) + ',' +
                   escape(r.truth->object) + ',' + (r.truth->person ? escape(*r.truth->person) : "") + '\n';
        }
    }
    return out;
}

std::vector<RawReading> parse_readings(std::istream& in, bool with_truth) {
    std::vector<RawReading> out;
    std::map<std::string, std::size_t> index;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (!with_truth || !line.starts_with("#truth,")) continue;
            const auto f = split(std::string_view(line).substr(7), ',');
            if (f.size() != 4) throw ParseError(lineno, "bad truth record");
            auto it = index.find(unescape(f[0], lineno));
            if (it == index.end()) throw ParseError(lineno, "truth for unknown reading");
            GroundTruth t{unescape(f[1], lineno), unescape(f[2], lineno), std::nullopt};
            if (!f[3].empty()) t.person = unescape(f[3], lineno);
            out[it->second].truth = std::move(t);
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 8) throw ParseError(lineno, "expected 8 fields, got " + std::to_string(f.size()));
        RawReading r;
        r.reading_id = unescape(f[0], lineno);
        r.source = unescape(f[1], lineno);
        r.true_time = parse_double(f[2], lineno, "true_time");
        r.observed_time = parse_double(f[3], lineno, "observed_time");
        auto kind = parse_reading_kind(f[4]);
        if (!kind) throw ParseError(lineno, "bad kind");
        r.kind = *kind;
        r.payload_size = parse_u64(f[5], lineno, "payload_size");
        if (r.payload_size == 0) throw ParseError(lineno, "payload_size must be positive");
        r.sensitive = parse_flag(f[6], lineno);
        r.delay = parse_double(f[7], lineno, "delay");
        index[r.reading_id] = out.size();
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RawReading> read_readings(const std::filesystem::path& path, bool with_truth) {
    std::istringstream in(read_file(path));
    return parse_readings(in, with_truth);
}

void write_readings(const std::vector<RawReading>& readings, const std::filesystem::path& path,
                    bool with_truth) {
    write_file(path, format_readings(readings, with_truth));
}

}  // namespace conductor
