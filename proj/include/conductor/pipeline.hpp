#pragma once

// Pipeline stages 1-3: preprocessing raw readings into low-level events,
// fusing them into high-level events, and correlating those into per-case
// ordered streams behind a watermark.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "conductor/continuum.hpp"
#include "conductor/events.hpp"

namespace conductor {

struct PreprocessConfig {
    bool anonymize = true;
    double filter_min_confidence = 0.5;
    double reduction_ratio = 1.0;  // output bytes per input byte, in (0, 1]
    double per_reading_cost = 1.0;  // compute units per reading

    /// Throws InvalidConfig.
    void validate() const;
    friend bool operator==(const PreprocessConfig&, const PreprocessConfig&) = default;
};

/// Stand-in for on-device activity recognition: reads the generator's ground
/// truth label and perturbs it with a seeded confusion process.
struct Recognizer {
    std::uint64_t seed = 0;
    double confusion_rate = 0.0;
    std::vector<std::string> labels;  // alphabet confused labels are drawn from

    struct Result {
        std::string label;
        double confidence;
    };
    std::optional<Result> recognize(const RawReading& reading) const;
};

/// Low-level event size for a reading of `payload` bytes (rounded up, never above payload).
std::uint64_t reduced_size(std::uint64_t payload, double reduction_ratio);

std::optional<LowLevelEvent> preprocess(const RawReading& reading, const PreprocessConfig& config,
                                        const Recognizer& recognizer);

struct FusionRule {
    std::string rule_id;
    std::set<std::string> input_labels;
    double window = 1.0;  // seconds, > 0
    int min_sources = 1;
    std::string output_activity;
    std::map<std::string, std::string> context_guard;  // all pairs must match the event context

    bool matches(const LowLevelEvent& e) const;
    friend bool operator==(const FusionRule&, const FusionRule&) = default;
};

/// Checks window and min_sources; `emitters` maps a label to the sources able to emit it.
/// Throws InvalidConfig.
void validate_rule(const FusionRule& rule, const std::map<std::string, std::set<std::string>>& emitters);

inline constexpr std::uint64_t kHighLevelEventBytes = 96;

struct FusionOutput {
    HighLevelEvent event;
    std::vector<std::string> contributors;  // low-level event ids, time ordered
    bool ambiguous = false;                 // tied object hints without a context guard
};

/// Windowed multi-source fusion. Input need not be globally sorted; each rule
/// scans its matching events in (time, event_id) order. An event contributes to
/// at most one firing per rule. Output is sorted by (time, event_id).
/// Fired events with no object hint among contributors carry an empty case_id.
std::vector<FusionOutput> fuse(std::span<const LowLevelEvent> events, std::span<const FusionRule> rules);

enum class LatePolicy { NewCase, Drop };

std::string_view to_string(LatePolicy p);
std::optional<LatePolicy> parse_late_policy(std::string_view s);

struct CorrelatorState {
    double watermark = 0.0;
    LatePolicy late_policy = LatePolicy::NewCase;
    double stream_time = -std::numeric_limits<double>::infinity();
    std::map<std::string, std::vector<HighLevelEvent>> buffers;
    std::map<std::string, double> emitted_high;  // per-case time of the last emitted event
    std::map<std::string, int> instances;        // per-case number of opened instances
    std::uint64_t late_events = 0;

    std::size_t buffered() const;
};

/// Per-case reordering buffer. An event is released once the stream time
/// (largest event time seen) exceeds event.time + watermark. An event that
/// arrives after that point is late: it opens a fresh case instance
/// `case#k` (k = 2, 3, ...) flagged with attribute late=1, or is dropped.
class Correlator {
  public:
    explicit Correlator(double watermark, LatePolicy policy = LatePolicy::NewCase);
    explicit Correlator(CorrelatorState state) : state_(std::move(state)) {}

    /// Throws MissingCaseId. Returns the events released by this arrival.
    std::vector<HighLevelEvent> push(HighLevelEvent event);
    /// Moves the stream time forward without an event.
    std::vector<HighLevelEvent> advance(double stream_time);
    /// Releases everything still buffered (end of stream).
    std::vector<HighLevelEvent> flush();

    const CorrelatorState& state() const { return state_; }

  private:
    std::vector<HighLevelEvent> release(bool all);
    CorrelatorState state_;
};

std::pair<std::vector<HighLevelEvent>, CorrelatorState> correlate(std::span<const HighLevelEvent> events,
                                                                  CorrelatorState state);

/// Subtracts each source's clock skew from event times when enabled.
/// Throws UnknownNode for sources missing from the topology.
std::vector<LowLevelEvent> apply_skew_correction(std::vector<LowLevelEvent> events, const Topology& topology,
                                                 bool enabled);

}  // namespace conductor
