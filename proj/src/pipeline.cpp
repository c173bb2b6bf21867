#include "conductor/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "conductor/error.hpp"
#include "conductor/rng.hpp"

namespace conductor {

namespace {

enum Salt : std::uint64_t { kConfuse = 1, kPick = 2, kConfidence = 3 };

bool low_before(const LowLevelEvent* a, const LowLevelEvent* b) {
    if (a->time != b->time) return a->time < b->time;
    return a->event_id < b->event_id;
}

bool high_before(const HighLevelEvent& a, const HighLevelEvent& b) {
    if (a.time != b.time) return a.time < b.time;
    return a.event_id < b.event_id;
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

void PreprocessConfig::validate() const {
    if (!(reduction_ratio > 0.0 && reduction_ratio <= 1.0))
        throw InvalidConfig("reduction_ratio must lie in (0, 1]");
    if (!(filter_min_confidence >= 0.0 && filter_min_confidence <= 1.0))
        throw InvalidConfig("filter_min_confidence must lie in [0, 1]");
    if (per_reading_cost < 0.0) throw InvalidConfig("per_reading_cost must be non-negative");
}

std::optional<Recognizer::Result> Recognizer::recognize(const RawReading& reading) const {
    if (!reading.truth || reading.truth->label.empty()) return std::nullopt;
    const std::string& id = reading.reading_id;
    const bool confused = draw(seed, id, kConfuse) < confusion_rate;
    const double c = draw(seed, id, kConfidence);
    if (!confused) return Result{reading.truth->label, 0.6 + 0.4 * c};

    std::vector<const std::string*> others;
    for (const auto& l : labels)
        if (l != reading.truth->label) others.push_back(&l);
    std::string label = reading.truth->label;
    if (!others.empty()) label = *others[mix(seed, id, kPick) % others.size()];
    return Result{label, 0.05 + 0.45 * c};
}

std::uint64_t reduced_size(std::uint64_t payload, double reduction_ratio) {
    const double x = static_cast<double>(payload) * reduction_ratio;
    const double r = std::round(x);
    double bytes = std::abs(x - r) <= 1e-9 * std::max(1.0, x) ? r : std::ceil(x);
    bytes = std::clamp(bytes, 1.0, static_cast<double>(payload));
    return static_cast<std::uint64_t>(bytes);
}

std::optional<LowLevelEvent> preprocess(const RawReading& reading, const PreprocessConfig& config,
                                        const Recognizer& recognizer) {
    auto recognized = recognizer.recognize(reading);
    if (!recognized || recognized->confidence < config.filter_min_confidence) return std::nullopt;

    LowLevelEvent e;
    e.event_id = "l:" + reading.reading_id;
    e.source = reading.source;
    e.time = reading.observed_time;
    e.label = std::move(recognized->label);
    e.confidence = recognized->confidence;
    if (!reading.truth->object.empty()) e.object_hint = reading.truth->object;
    e.person_hint = reading.truth->person;
    e.sensitive = reading.sensitive;
    if (config.anonymize) {
        e.sensitive = false;
        e.person_hint.reset();
    }
    e.size = reduced_size(reading.payload_size, config.reduction_ratio);
    e.context = {{"kind", std::string(to_string(reading.kind))}, {"source", reading.source}};
    return e;
}

bool FusionRule::matches(const LowLevelEvent& e) const {
    if (!input_labels.contains(e.label)) return false;
    for (const auto& [k, v] : context_guard) {
        auto it = e.context.find(k);
        if (it == e.context.end() || it->second != v) return false;
    }
    return true;
}

void validate_rule(const FusionRule& rule, const std::map<std::string, std::set<std::string>>& emitters) {
    if (!(rule.window > 0)) throw InvalidConfig("rule " + rule.rule_id + ": window must be positive");
    if (rule.min_sources < 1) throw InvalidConfig("rule " + rule.rule_id + ": min_sources must be >= 1");
    if (rule.input_labels.empty()) throw InvalidConfig("rule " + rule.rule_id + ": no input labels");
    std::set<std::string> sources;
    for (const auto& l : rule.input_labels) {
        auto it = emitters.find(l);
        if (it != emitters.end()) sources.insert(it->second.begin(), it->second.end());
    }
    if (static_cast<std::size_t>(rule.min_sources) > sources.size())
        throw InvalidConfig("rule " + rule.rule_id + ": min_sources " + std::to_string(rule.min_sources) +
                            " exceeds the " + std::to_string(sources.size()) + " sources able to emit its labels");
}

std::vector<FusionOutput> fuse(std::span<const LowLevelEvent> events, std::span<const FusionRule> rules) {
    std::vector<FusionOutput> out;
    for (const FusionRule& rule : rules) {
        std::vector<const LowLevelEvent*> eligible;
        for (const auto& e : events)
            if (rule.matches(e)) eligible.push_back(&e);
        std::sort(eligible.begin(), eligible.end(), low_before);

        std::vector<bool> consumed(eligible.size(), false);
        for (std::size_t i = 0; i < eligible.size(); ++i) {
            if (consumed[i]) continue;
            const double end = eligible[i]->time + rule.window;
            std::vector<std::size_t> members;
            std::set<std::string> sources;
            for (std::size_t j = i; j < eligible.size() && eligible[j]->time <= end; ++j) {
                if (consumed[j]) continue;
                members.push_back(j);
                sources.insert(eligible[j]->source);
            }
            if (sources.size() < static_cast<std::size_t>(rule.min_sources)) continue;

            FusionOutput f;
            std::map<std::string, double> hint_weight;
            double confidence = 0.0;
            std::uint64_t bytes = 0;
            for (std::size_t j : members) {
                consumed[j] = true;
                const LowLevelEvent& e = *eligible[j];
                f.contributors.push_back(e.event_id);
                confidence += e.confidence;
                bytes += e.size;
                if (e.object_hint) hint_weight[*e.object_hint] += e.confidence;
            }

            std::string case_id;
            double best = -1.0;
            int ties = 0;
            for (const auto& [hint, w] : hint_weight) {  // lexicographic order: first best wins ties
                if (w > best + 1e-12) {
                    best = w;
                    case_id = hint;
                    ties = 1;
                } else if (std::abs(w - best) <= 1e-12) {
                    ++ties;
                }
            }
            f.ambiguous = ties > 1 && rule.context_guard.empty();

            HighLevelEvent& h = f.event;
            h.event_id = "h:" + rule.rule_id + ":" + eligible[i]->event_id;
            h.time = eligible[i]->time;
            h.activity = rule.output_activity;
            h.case_id = std::move(case_id);
            h.attributes["rule"] = rule.rule_id;
            h.attributes["sources"] = std::to_string(sources.size());
            h.attributes["confidence"] = fixed3(confidence / static_cast<double>(members.size()));
            if (f.ambiguous) h.attributes["ambiguous"] = "1";
            h.size = std::min(kHighLevelEventBytes, bytes);
            out.push_back(std::move(f));
        }
    }
    std::sort(out.begin(), out.end(),
              [](const FusionOutput& a, const FusionOutput& b) { return high_before(a.event, b.event); });
    return out;
}

std::string_view to_string(LatePolicy p) { return p == LatePolicy::NewCase ? "new_case" : "drop"; }

std::optional<LatePolicy> parse_late_policy(std::string_view s) {
    if (s == "new_case") return LatePolicy::NewCase;
    if (s == "drop") return LatePolicy::Drop;
    return std::nullopt;
}

std::size_t CorrelatorState::buffered() const {
    std::size_t n = 0;
    for (const auto& [_, b] : buffers) n += b.size();
    return n;
}

Correlator::Correlator(double watermark, LatePolicy policy) {
    state_.watermark = watermark;
    state_.late_policy = policy;
}

std::vector<HighLevelEvent> Correlator::push(HighLevelEvent event) {
    if (event.case_id.empty()) throw MissingCaseId("event '" + event.event_id + "' has no case id");

    if (state_.stream_time > event.time + state_.watermark) {
        ++state_.late_events;
        if (state_.late_policy == LatePolicy::Drop) return {};
        int& k = state_.instances[event.case_id];
        k = std::max(k, 1) + 1;
        event.case_id += "#" + std::to_string(k);
        event.attributes["late"] = "1";
        auto& high = state_.emitted_high[event.case_id];
        high = std::max(high, event.time);
        return {std::move(event)};
    }

    state_.stream_time = std::max(state_.stream_time, event.time);
    auto& buf = state_.buffers[event.case_id];
    buf.insert(std::upper_bound(buf.begin(), buf.end(), event, high_before), std::move(event));
    return release(false);
}

std::vector<HighLevelEvent> Correlator::advance(double stream_time) {
    state_.stream_time = std::max(state_.stream_time, stream_time);
    return release(false);
}

std::vector<HighLevelEvent> Correlator::flush() { return release(true); }

std::vector<HighLevelEvent> Correlator::release(bool all) {
    std::vector<HighLevelEvent> out;
    for (auto it = state_.buffers.begin(); it != state_.buffers.end();) {
        auto& buf = it->second;
        auto split = all ? buf.end() : std::find_if(buf.begin(), buf.end(), [&](const HighLevelEvent& e) {
            return !(state_.stream_time > e.time + state_.watermark);
        });
        if (split != buf.begin()) {
            auto& high = state_.emitted_high[it->first];
            high = std::max(high, std::prev(split)->time);
            std::move(buf.begin(), split, std::back_inserter(out));
            buf.erase(buf.begin(), split);
        }
        it = buf.empty() ? state_.buffers.erase(it) : std::next(it);
    }
    std::sort(out.begin(), out.end(), high_before);
    return out;
}

std::pair<std::vector<HighLevelEvent>, CorrelatorState> correlate(std::span<const HighLevelEvent> events,
                                                                  CorrelatorState state) {
    Correlator c(std::move(state));
    std::vector<HighLevelEvent> out;
    for (const auto& e : events) {
        auto released = c.push(e);
        std::move(released.begin(), released.end(), std::back_inserter(out));
    }
    return {std::move(out), c.state()};
}

std::vector<LowLevelEvent> apply_skew_correction(std::vector<LowLevelEvent> events, const Topology& topology,
                                                 bool enabled) {
    for (auto& e : events) {
        const double skew = topology.node(e.source).clock_skew;
        if (enabled) e.time -= skew;
    }
    return events;
}

}  // namespace conductor
