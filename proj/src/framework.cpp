#include "conductor/framework.hpp"

#include <algorithm>

#include "conductor/error.hpp"

namespace conductor {

namespace {

constexpr Tag C(Challenge c) { return Tag::challenge(c); }
constexpr Tag G(Goal g) { return Tag::goal(g); }

std::vector<Question> build_catalog() {
    using enum Phase;
    return {
        {"Pre1", Preprocessing, "Are compute resources enough for preprocessing?", {C(Challenge::C1)}},
        {"Pre2", Preprocessing, "Is raw data privacy-critical?", {G(Goal::G1)}},
        {"Pre3", Preprocessing, "Does raw data transfer need high bandwidth?",
         {C(Challenge::C4), G(Goal::G3)}},
        {"Pre4", Preprocessing, "Is preprocessing faster on device?", {C(Challenge::C4), G(Goal::G2)}},
        {"Agg1", Aggregation, "Are low level events still privacy critical?", {G(Goal::G1)}},
        {"Agg2", Aggregation, "Are low level events still high-volume?", {C(Challenge::C1)}},
        {"Agg3", Aggregation, "Can events be build from local context?", {C(Challenge::C3)}},
        {"Agg4", Aggregation, "Can sensor/network outages be tolerated?",
         {C(Challenge::C4), C(Challenge::C5)}},
        {"Cor1", Correlation, "Does a global notion of case/object ids exist?", {C(Challenge::C6)}},
        {"Cor2", Correlation, "Is the time synchronized between the nodes?", {C(Challenge::C5)}},
        {"Cor3", Correlation, "Do out of order events violate real-time objectives?",
         {C(Challenge::C5), G(Goal::G2)}},
        {"Dis1", Discovery, "Is the process model privacy-critical?", {C(Challenge::C6), G(Goal::G1)}},
        {"Dis2", Discovery, "Does the discovery algorithm benefit from locality?",
         {G(Goal::G2), G(Goal::G3)}},
        {"Dis3", Discovery,
         "Does the process mining algorithm require consistent and complete event logs?",
         {C(Challenge::C5)}},
        {"Ins1", Insights, "Does insight extraction need advanced hardware?", {C(Challenge::C4)}},
        {"Ins2", Insights, "Can insight extraction tolerate partial results?",
         {C(Challenge::C5), G(Goal::G1)}},
    };
}

bool is_critical(Verdict v) {
    return v == Verdict::CentralizedCritical || v == Verdict::DecentralizedCritical;
}

bool is_central_side(Verdict v) {
    return v == Verdict::CentralizedCritical || v == Verdict::CentralizedFavorable;
}

// Compute-bound conflicts are resolved with hardware, privacy or completeness
// bound ones need new algorithms.
bool wants_hardware(Tag t) { return t.is(Challenge::C1) || t.is(Challenge::C4); }
bool wants_algorithm(Tag t) {
    return t.is(Goal::G1) || t.is(Challenge::C5) || t.is(Challenge::C6);
}

}  // namespace

std::string_view label(Challenge c) {
    switch (c) {
        case Challenge::C1: return "Large volume of unstructured data";
        case Challenge::C2: return "Uncertainty";
        case Challenge::C3: return "Sensitivity to ambiguous context";
        case Challenge::C4: return "Network and computing limitations";
        case Challenge::C5: return "Erroneous and incomplete data";
        case Challenge::C6: return "Necessity of shared case/object notion";
    }
    return {};
}

std::string_view label(Goal g) {
    switch (g) {
        case Goal::G1: return "Privacy preservation";
        case Goal::G2: return "Real-time responsiveness";
        case Goal::G3: return "Resource efficiency";
    }
    return {};
}

std::string tag_code(Tag t) {
    return (t.kind == Tag::Kind::Challenge ? "C" : "G") + std::to_string(t.index + 1);
}

std::optional<Tag> parse_tag(std::string_view code) {
    if (code.size() != 2) return std::nullopt;
    const int n = code[1] - '1';
    if (code[0] == 'C' && n >= 0 && n < 6) return Tag{Tag::Kind::Challenge, n};
    if (code[0] == 'G' && n >= 0 && n < 3) return Tag{Tag::Kind::Goal, n};
    return std::nullopt;
}

std::string_view to_string(Phase p) {
    switch (p) {
        case Phase::Preprocessing: return "preprocessing";
        case Phase::Aggregation: return "aggregation";
        case Phase::Correlation: return "correlation";
        case Phase::Discovery: return "discovery";
        case Phase::Insights: return "insights";
    }
    return {};
}

std::optional<Phase> parse_phase(std::string_view s) {
    for (Phase p : kAllPhases)
        if (to_string(p) == s) return p;
    return std::nullopt;
}

bool Question::has_tag(Tag t) const { return std::find(tags.begin(), tags.end(), t) != tags.end(); }

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::CentralizedCritical: return "centralized_critical";
        case Verdict::CentralizedFavorable: return "centralized_favorable";
        case Verdict::DecentralizedFavorable: return "decentralized_favorable";
        case Verdict::DecentralizedCritical: return "decentralized_critical";
        case Verdict::Unanswered: return "unanswered";
    }
    return {};
}

std::optional<Verdict> parse_verdict(std::string_view s) {
    for (Verdict v : kAllVerdicts)
        if (to_string(v) == s) return v;
    return std::nullopt;
}

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::CentralizedMandatory: return "centralized_mandatory";
        case Outcome::CentralizedFavorable: return "centralized_favorable";
        case Outcome::DecentralizedFavorable: return "decentralized_favorable";
        case Outcome::DecentralizedMandatory: return "decentralized_mandatory";
        case Outcome::Conflict: return "conflict";
    }
    return {};
}

std::optional<Outcome> parse_outcome(std::string_view s) {
    for (Outcome o : {Outcome::CentralizedMandatory, Outcome::CentralizedFavorable,
                      Outcome::DecentralizedFavorable, Outcome::DecentralizedMandatory,
                      Outcome::Conflict})
        if (to_string(o) == s) return o;
    return std::nullopt;
}

bool is_centralized(Outcome o) {
    return o == Outcome::CentralizedMandatory || o == Outcome::CentralizedFavorable;
}

bool is_decentralized(Outcome o) {
    return o == Outcome::DecentralizedMandatory || o == Outcome::DecentralizedFavorable;
}

std::string_view to_string(HintKind k) {
    switch (k) {
        case HintKind::StrongerEdgeHardware: return "stronger_edge_hardware";
        case HintKind::NewAlgorithmPrivacyUtility: return "new_algorithm_privacy_utility";
    }
    return {};
}

ResolutionHint make_hint(HintKind kind) {
    switch (kind) {
        case HintKind::StrongerEdgeHardware:
            return {kind,
                    "Move more capable compute hardware next to the data source so the step can "
                    "run locally, keeping sensitive data in place while meeting its time budget."};
        case HintKind::NewAlgorithmPrivacyUtility:
            return {kind,
                    "Use a dedicated algorithm for this step that works on protected or partial "
                    "data, and weigh the accuracy it loses against the exposure it avoids."};
    }
    return {kind, {}};
}

std::string_view to_string(TieBreak t) {
    return t == TieBreak::PreferDecentralized ? "decentral" : "central";
}

std::optional<TieBreak> parse_tie_break(std::string_view s) {
    if (s == "decentral" || s == "prefer_decentralized") return TieBreak::PreferDecentralized;
    if (s == "central" || s == "prefer_centralized") return TieBreak::PreferCentralized;
    return std::nullopt;
}

const std::vector<Question>& catalog() {
    static const std::vector<Question> questions = build_catalog();
    return questions;
}

const Question* find_question(std::string_view id) {
    for (const auto& q : catalog())
        if (q.id == id) return &q;
    return nullptr;
}

std::vector<Question> questions_for(Phase phase) {
    std::vector<Question> out;
    for (const auto& q : catalog())
        if (q.phase == phase) out.push_back(q);
    return out;
}

void Assessment::set(Answer answer) {
    if (!find_question(answer.question_id))
        throw UnknownQuestion("unknown question id '" + answer.question_id + "'");
    auto id = answer.question_id;
    answers_.insert_or_assign(std::move(id), std::move(answer));
}

const Answer* Assessment::find(const std::string& question_id) const {
    auto it = answers_.find(question_id);
    return it == answers_.end() ? nullptr : &it->second;
}

PhaseVerdict decide_phase(Phase phase, std::span<const Answer> answers, TieBreak tie_break) {
    PhaseVerdict out{phase, Outcome::DecentralizedFavorable, {}, {}, {}};

    int central_critical = 0, decentral_critical = 0;
    int central_favorable = 0, decentral_favorable = 0;
    std::vector<const Question*> critical_questions;

    for (const Answer& a : answers) {
        const Question* q = find_question(a.question_id);
        if (!q) throw UnknownQuestion("unknown question id '" + a.question_id + "'");
        if (q->phase != phase)
            throw PhaseMismatch("question " + q->id + " belongs to " + std::string(to_string(q->phase)) +
                                ", not " + std::string(to_string(phase)));
        if (a.verdict == Verdict::Unanswered) continue;

        (is_central_side(a.verdict) ? out.centralized : out.decentralized).push_back(q->id);
        switch (a.verdict) {
            case Verdict::CentralizedCritical: ++central_critical; break;
            case Verdict::CentralizedFavorable: ++central_favorable; break;
            case Verdict::DecentralizedFavorable: ++decentral_favorable; break;
            case Verdict::DecentralizedCritical: ++decentral_critical; break;
            case Verdict::Unanswered: break;
        }
        if (is_critical(a.verdict)) critical_questions.push_back(q);
    }
    std::sort(out.centralized.begin(), out.centralized.end());
    std::sort(out.decentralized.begin(), out.decentralized.end());

    if (central_critical > 0 && decentral_critical > 0) {
        out.outcome = Outcome::Conflict;
        bool hardware = false, algorithm = false;
        for (const Question* q : critical_questions) {
            for (Tag t : q->tags) {
                hardware = hardware || wants_hardware(t);
                algorithm = algorithm || wants_algorithm(t);
            }
        }
        // Tags outside both groups (C2, C3, G2, G3 only) still get both archetypes.
        if (!hardware && !algorithm) hardware = algorithm = true;
        if (hardware) out.resolution_hints.push_back(make_hint(HintKind::StrongerEdgeHardware));
        if (algorithm) out.resolution_hints.push_back(make_hint(HintKind::NewAlgorithmPrivacyUtility));
    } else if (central_critical > 0) {
        out.outcome = Outcome::CentralizedMandatory;
    } else if (decentral_critical > 0) {
        out.outcome = Outcome::DecentralizedMandatory;
    } else if (central_favorable > decentral_favorable) {
        out.outcome = Outcome::CentralizedFavorable;
    } else if (decentral_favorable > central_favorable) {
        out.outcome = Outcome::DecentralizedFavorable;
    } else {
        out.outcome = tie_break == TieBreak::PreferDecentralized ? Outcome::DecentralizedFavorable
                                                                 : Outcome::CentralizedFavorable;
    }
    return out;
}

PhaseVerdict decide_phase(Phase phase, const Assessment& assessment) {
    std::vector<Answer> in_phase;
    for (const auto& [id, answer] : assessment.answers()) {
        if (answer.question_id != id)
            throw PhaseMismatch("answer for " + answer.question_id + " stored under " + id);
        const Question* q = find_question(id);
        if (!q) throw UnknownQuestion("unknown question id '" + id + "'");
        if (q->phase == phase) in_phase.push_back(answer);
    }
    return decide_phase(phase, in_phase, assessment.tie_break());
}

std::map<Phase, PhaseVerdict> decide_all(const Assessment& assessment) {
    std::map<Phase, PhaseVerdict> out;
    for (Phase p : kAllPhases) out.emplace(p, decide_phase(p, assessment));
    return out;
}

const PolarityTable& default_polarity() {
    using enum Verdict;
    static const PolarityTable table = {
        {"Pre1", {DecentralizedFavorable, CentralizedFavorable}},
        {"Pre2", {DecentralizedCritical, CentralizedFavorable}},
        {"Pre3", {DecentralizedCritical, CentralizedFavorable}},
        {"Pre4", {DecentralizedFavorable, CentralizedFavorable}},
        {"Agg1", {DecentralizedCritical, CentralizedFavorable}},
        {"Agg2", {DecentralizedFavorable, CentralizedFavorable}},
        {"Agg3", {DecentralizedFavorable, CentralizedFavorable}},
        {"Agg4", {DecentralizedFavorable, CentralizedFavorable}},
        {"Cor1", {DecentralizedFavorable, CentralizedCritical}},
        {"Cor2", {DecentralizedFavorable, CentralizedFavorable}},
        {"Cor3", {DecentralizedFavorable, CentralizedFavorable}},
        {"Dis1", {DecentralizedCritical, CentralizedFavorable}},
        {"Dis2", {DecentralizedFavorable, CentralizedFavorable}},
        {"Dis3", {CentralizedCritical, DecentralizedFavorable}},
        {"Ins1", {CentralizedCritical, DecentralizedFavorable}},
        {"Ins2", {DecentralizedFavorable, CentralizedCritical}},
    };
    return table;
}

Assessment answers_from_booleans(const std::map<std::string, bool>& raw, const PolarityTable& polarity,
                                 TieBreak tie_break) {
    Assessment out(tie_break);
    for (const auto& [id, yes] : raw) {
        auto it = polarity.find(id);
        if (it == polarity.end()) throw MissingPolarity("no polarity entry for question " + id);
        out.set(Answer{id, yes ? it->second.if_yes : it->second.if_no, std::nullopt});
    }
    return out;
}

}  // namespace conductor
