#pragma once

// Data handed between pipeline stages: raw readings, low-level events,
// high-level events and the case-grouped event log.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace conductor {

enum class ReadingKind { Frame, Gps, Accel, SpreaderHeight };

std::string_view to_string(ReadingKind k);
std::optional<ReadingKind> parse_reading_kind(std::string_view s);

/// Generator-side ground truth of a reading. Only the simulated recognizer
/// and the test oracles look at it; it is never written to pipeline outputs.
struct GroundTruth {
    std::string label;                     // low-level activity shown in the reading
    std::string object;                    // cargo/trailer code visible in the reading, may be empty
    std::optional<std::string> person;     // identifiable person in the frame

    friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct RawReading {
    std::string reading_id;
    std::string source;
    double true_time = 0.0;
    double observed_time = 0.0;  // true_time + source clock skew
    ReadingKind kind = ReadingKind::Frame;
    std::uint64_t payload_size = 1;
    bool sensitive = false;
    double delay = 0.0;  // device-side hold before the reading is sent (intermittent links)
    std::optional<GroundTruth> truth;

    friend bool operator==(const RawReading&, const RawReading&) = default;
};

struct LowLevelEvent {
    std::string event_id;
    std::string source;
    double time = 0.0;
    std::string label;
    double confidence = 1.0;
    std::optional<std::string> object_hint;
    std::optional<std::string> person_hint;  // person-type hint, removed by anonymization
    bool sensitive = false;
    std::uint64_t size = 0;
    std::map<std::string, std::string> context;  // source attributes checked by fusion guards

    friend bool operator==(const LowLevelEvent&, const LowLevelEvent&) = default;
};

struct HighLevelEvent {
    std::string event_id;
    double time = 0.0;
    std::string activity;
    std::string case_id;
    std::map<std::string, std::string> attributes;
    std::uint64_t size = 0;

    friend bool operator==(const HighLevelEvent&, const HighLevelEvent&) = default;
};

/// Rounds to whole milliseconds, the precision event logs are stored with.
double quantize_time(double seconds);

/// Traces keyed by case id, each sorted by (time, event_id).
class EventLog {
  public:
    /// Adds `event` to its trace. Throws EmptyCaseId, DuplicateEvent, ReservedAttribute.
    /// The event time is quantized to milliseconds.
    void append(HighLevelEvent event);

    const std::map<std::string, std::vector<HighLevelEvent>>& traces() const { return traces_; }
    const std::vector<HighLevelEvent>* trace(const std::string& case_id) const;
    bool contains_event(const std::string& event_id) const { return event_ids_.contains(event_id); }
    std::size_t case_count() const { return traces_.size(); }
    std::size_t event_count() const { return event_ids_.size(); }
    bool empty() const { return traces_.empty(); }

    friend bool operator==(const EventLog& a, const EventLog& b) { return a.traces_ == b.traces_; }

  private:
    std::map<std::string, std::vector<HighLevelEvent>> traces_;
    std::set<std::string> event_ids_;
};

EventLog append(EventLog log, HighLevelEvent event);

/// Attribute keys holding event_id and size in the flat log format.
inline constexpr std::string_view kEventIdKey = "event_id";
inline constexpr std::string_view kSizeKey = "size";

/// Canonical line-delimited log text: `case,activity,time,attrs`, records
/// sorted by (case, time, event_id).
std::string format_log(const EventLog& log);
EventLog parse_log(std::istream& in);
EventLog parse_log_text(std::string_view text);

/// Throws IoError / ParseError.
EventLog read_log(const std::filesystem::path& path);
void write_log(const EventLog& log, const std::filesystem::path& path);

/// Raw scenario text. Ground truth goes to `#truth,...` comment lines only
/// when `with_truth` is set; pipeline readers skip every `#` line.
std::string format_readings(const std::vector<RawReading>& readings, bool with_truth);
std::vector<RawReading> parse_readings(std::istream& in, bool with_truth);
std::vector<RawReading> read_readings(const std::filesystem::path& path, bool with_truth);
void write_readings(const std::vector<RawReading>& readings, const std::filesystem::path& path,
                    bool with_truth);

/// Fixed 3-decimal rendering used in every text output.
std::string format_time(double seconds);

}  // namespace conductor
