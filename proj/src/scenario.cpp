#include "conductor/scenario.hpp"

#include <algorithm>
#include <cstdio>

#include "conductor/error.hpp"
#include "conductor/pipeline.hpp"
#include "conductor/rng.hpp"

namespace conductor {

namespace {

constexpr std::uint64_t kGateFrameBytes = 2'000'000;
constexpr std::uint64_t kVehicleFrameBytes = 1'200'000;
constexpr std::uint64_t kDroneFrameBytes = 3'000'000;
constexpr std::uint64_t kTelemetryBytes = 64;

constexpr double kActivityJitter = 5.0;     // activity start within its slot
constexpr double kObservationJitter = 2.0;  // sensor sees the activity this late at most
constexpr double kDuplicateOffset = 1.0;
constexpr double kIdleFrameSpacing = 0.5;
constexpr double kFirstArrival = 10.0;

struct Observation {
    std::string source;
    std::string label;
    ReadingKind kind;
    std::uint64_t payload;
    bool shows_object;
};

bool is_camera(ReadingKind k) { return k == ReadingKind::Frame; }

std::vector<Observation> observers(const std::string& activity, const SensorRoles& r, std::size_t vehicle) {
    const std::string& cam = r.vehicle_cameras.at(vehicle % r.vehicle_cameras.size());
    auto gate = [&](const std::string& label) {
        std::vector<Observation> v;
        for (const auto& g : r.gate_cameras) v.push_back({g, label, ReadingKind::Frame, kGateFrameBytes, true});
        return v;
    };
    auto handling = [&](const std::string& cam_label, const std::string& box_label, ReadingKind box_kind) {
        return std::vector<Observation>{
            {cam, cam_label, ReadingKind::Frame, kVehicleFrameBytes, true},
            {r.drone_camera, cam_label, ReadingKind::Frame, kDroneFrameBytes, true},
            {r.sensor_box, box_label, box_kind, kTelemetryBytes, false},
        };
    };
    if (activity == "arrive") return gate("trailer_entry");
    if (activity == "register")
        return {{r.plate_camera, "plate_read", ReadingKind::Frame, kGateFrameBytes, true}};
    if (activity == "unload") return handling("container_lift", "lift_from_trailer", ReadingKind::SpreaderHeight);
    if (activity == "store") return handling("container_set_down", "set_down_stack", ReadingKind::SpreaderHeight);
    if (activity == "relocate") return handling("container_move", "travel", ReadingKind::Gps);
    if (activity == "load") return handling("container_load", "lift_from_stack", ReadingKind::SpreaderHeight);
    if (activity == "depart") return gate("trailer_exit");
    return {};
}

void check_rate(double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidConfig(std::string(name) + " must lie in [0, 1]");
}

std::string case_name(std::uint64_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "CARGO-%04llu", static_cast<unsigned long long>(index + 1));
    return buf;
}

struct Pending {
    RawReading reading;
    std::uint64_t seq;
};

}  // namespace

void ScenarioConfig::validate() const {
    check_rate(noise.confusion_rate, "confusion_rate");
    check_rate(noise.duplicate_rate, "duplicate_rate");
    check_rate(noise.drop_rate, "drop_rate");
    check_rate(sensitive_fraction, "sensitive_fraction");
    check_rate(relocate_probability, "relocate_probability");
    if (!(noise.delay_max >= 0.0)) throw InvalidConfig("delay_max must be non-negative");
    if (!(case_gap > 0.0) || !(activity_step > 0.0)) throw InvalidConfig("case_gap and activity_step must be positive");
    if (sensors.gate_cameras.empty() || sensors.vehicle_cameras.empty())
        throw InvalidConfig("scenario needs gate and vehicle cameras");
}

const std::vector<std::string>& lifecycle_activities() {
    static const std::vector<std::string> acts = {"arrive", "register", "unload", "store",
                                                  "relocate", "load", "depart"};
    return acts;
}

std::vector<std::string> scenario_labels() {
    std::set<std::string> labels;
    SensorRoles roles;
    for (const auto& a : lifecycle_activities())
        for (const auto& o : observers(a, roles, 0)) labels.insert(o.label);
    return {labels.begin(), labels.end()};
}

std::map<std::string, std::set<std::string>> scenario_emitters(const SensorRoles& roles) {
    std::map<std::string, std::set<std::string>> out;
    for (const auto& a : lifecycle_activities())
        for (std::size_t v = 0; v < roles.vehicle_cameras.size(); ++v)
            for (const auto& o : observers(a, roles, v)) out[o.label].insert(o.source);
    return out;
}

GeneratedScenario generate_scenario(const ScenarioConfig& config, const Topology& topology) {
    config.validate();
    GeneratedScenario out;
    out.config = config;
    const auto& noise = config.noise;

    std::vector<Pending> pending;
    std::uint64_t seq = 0;
    auto emit = [&](RawReading r) {
        ++out.summary.readings;
        if (r.sensitive) ++out.summary.sensitive_readings;
        if (r.truth && !r.truth->label.empty())
            ++out.summary.label_readings[r.truth->label];
        else
            ++out.summary.idle_readings;
        pending.push_back({std::move(r), seq++});
    };

    for (std::uint64_t i = 0; i < config.n_cases; ++i) {
        const std::string case_id = case_name(i);
        Stream rng(mix(config.seed, case_id, 0));
        ++out.summary.cases;
        const double start = kFirstArrival + static_cast<double>(i) * config.case_gap;
        const auto& acts = lifecycle_activities();
        std::uint32_t person_counter = 0;

        for (std::size_t slot = 0; slot < acts.size(); ++slot) {
            const std::string& activity = acts[slot];
            const bool take_relocate = rng.bernoulli(config.relocate_probability);
            if (activity == "relocate" && !take_relocate) continue;
            const double t = quantize_time(start + static_cast<double>(slot) * config.activity_step +
                                           rng.uniform(0.0, kActivityJitter));
            LedgerEntry entry{case_id, activity, t, 0};

            for (const auto& obs : observers(activity, config.sensors, static_cast<std::size_t>(i))) {
                const double skew = topology.node(obs.source).clock_skew;
                const bool outage = rng.bernoulli(noise.drop_rate);
                const double seen = quantize_time(t + rng.uniform(0.0, kObservationJitter));
                const double delay = quantize_time(rng.uniform(0.0, noise.delay_max));
                const bool duplicate = rng.bernoulli(noise.duplicate_rate);
                const bool sensitive = is_camera(obs.kind) && rng.bernoulli(config.sensitive_fraction);
                if (outage) {
                    ++out.summary.outages;
                    continue;
                }
                ++entry.observations;

                RawReading r;
                r.source = obs.source;
                r.true_time = seen;
                r.observed_time = quantize_time(seen + skew);
                r.kind = obs.kind;
                r.payload_size = obs.payload;
                r.sensitive = sensitive;
                r.delay = delay;
                r.truth = GroundTruth{obs.label, obs.shows_object ? case_id : std::string{}, std::nullopt};
                if (sensitive) r.truth->person = "person-" + case_id + "-" + std::to_string(++person_counter);

                if (duplicate) {
                    RawReading d = r;
                    d.true_time = quantize_time(seen + kDuplicateOffset);
                    d.observed_time = quantize_time(d.true_time + skew);
                    ++out.summary.duplicates;
                    emit(std::move(d));
                }
                if (is_camera(obs.kind)) {
                    for (std::uint32_t k = 0; k < config.idle_frames; ++k) {
                        RawReading idle = r;
                        idle.true_time = quantize_time(seen + kIdleFrameSpacing * (k + 1));
                        idle.observed_time = quantize_time(idle.true_time + skew);
                        idle.sensitive = rng.bernoulli(config.sensitive_fraction);
                        idle.truth = GroundTruth{{}, {}, std::nullopt};
                        if (idle.sensitive)
                            idle.truth->person = "person-" + case_id + "-" + std::to_string(++person_counter);
                        emit(std::move(idle));
                    }
                }
                emit(std::move(r));
            }
            ++out.summary.activity_totals[activity];
            out.ledger.push_back(std::move(entry));
        }
    }

    std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
        if (a.reading.true_time != b.reading.true_time) return a.reading.true_time < b.reading.true_time;
        return a.seq < b.seq;
    });
    out.readings.reserve(pending.size());
    for (std::size_t k = 0; k < pending.size(); ++k) {
        char id[32];
        std::snprintf(id, sizeof id, "r%07zu", k + 1);
        pending[k].reading.reading_id = id;
        out.readings.push_back(std::move(pending[k].reading));
    }
    return out;
}

EventLog ground_truth_log(const std::vector<LedgerEntry>& ledger) {
    EventLog log;
    std::map<std::string, int> index;
    for (const auto& e : ledger) {
        HighLevelEvent h;
        h.case_id = e.case_id;
        h.activity = e.activity;
        h.time = e.time;
        h.event_id = "g:" + e.case_id + ":" + std::to_string(index[e.case_id]++);
        h.size = kHighLevelEventBytes;
        log.append(std::move(h));
    }
    return log;
}

}  // namespace conductor
