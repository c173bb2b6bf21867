#pragma once

// Placement decision framework: the question catalog, four-valued answers,
// per-phase verdict aggregation and conflict detection.

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace conductor {

/// Pipeline phases in pipeline order.
enum class Phase { Preprocessing = 0, Aggregation, Correlation, Discovery, Insights };

inline constexpr std::array<Phase, 5> kAllPhases = {Phase::Preprocessing, Phase::Aggregation,
                                                    Phase::Correlation, Phase::Discovery,
                                                    Phase::Insights};

enum class Challenge { C1, C2, C3, C4, C5, C6 };
enum class Goal { G1, G2, G3 };

/// A question tag is either a challenge or a goal.
struct Tag {
    enum class Kind { Challenge, Goal } kind;
    int index;  // 0-based within its kind

    static constexpr Tag challenge(Challenge c) { return {Kind::Challenge, static_cast<int>(c)}; }
    static constexpr Tag goal(Goal g) { return {Kind::Goal, static_cast<int>(g)}; }

    bool is(Challenge c) const { return kind == Kind::Challenge && index == static_cast<int>(c); }
    bool is(Goal g) const { return kind == Kind::Goal && index == static_cast<int>(g); }

    friend auto operator<=>(const Tag&, const Tag&) = default;
};

std::string_view label(Challenge c);
std::string_view label(Goal g);
/// Short code, e.g. "C4" or "G1".
std::string tag_code(Tag t);
std::optional<Tag> parse_tag(std::string_view code);

std::string_view to_string(Phase p);
std::optional<Phase> parse_phase(std::string_view s);

struct Question {
    std::string id;
    Phase phase;
    std::string text;
    std::vector<Tag> tags;

    bool has_tag(Tag t) const;
    friend bool operator==(const Question&, const Question&) = default;
};

enum class Verdict {
    CentralizedCritical,
    CentralizedFavorable,
    DecentralizedFavorable,
    DecentralizedCritical,
    Unanswered
};

inline constexpr std::array<Verdict, 5> kAllVerdicts = {
    Verdict::CentralizedCritical, Verdict::CentralizedFavorable, Verdict::DecentralizedFavorable,
    Verdict::DecentralizedCritical, Verdict::Unanswered};

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view s);

struct Answer {
    std::string question_id;
    Verdict verdict = Verdict::Unanswered;
    std::optional<std::string> note;

    friend bool operator==(const Answer&, const Answer&) = default;
};

enum class Outcome {
    CentralizedMandatory,
    CentralizedFavorable,
    DecentralizedFavorable,
    DecentralizedMandatory,
    Conflict
};

std::string_view to_string(Outcome o);
std::optional<Outcome> parse_outcome(std::string_view s);
bool is_centralized(Outcome o);
bool is_decentralized(Outcome o);

enum class HintKind { StrongerEdgeHardware, NewAlgorithmPrivacyUtility };

std::string_view to_string(HintKind k);

struct ResolutionHint {
    HintKind kind;
    std::string text;

    friend bool operator==(const ResolutionHint&, const ResolutionHint&) = default;
};

ResolutionHint make_hint(HintKind kind);

struct PhaseVerdict {
    Phase phase;
    Outcome outcome;
    std::vector<std::string> centralized;    // answered ids arguing for central execution
    std::vector<std::string> decentralized;  // answered ids arguing for distributed execution
    std::vector<ResolutionHint> resolution_hints;

    friend bool operator==(const PhaseVerdict&, const PhaseVerdict&) = default;
};

enum class TieBreak { PreferDecentralized, PreferCentralized };

std::string_view to_string(TieBreak t);
std::optional<TieBreak> parse_tie_break(std::string_view s);

/// A set of answers, at most one per catalog question.
class Assessment {
  public:
    explicit Assessment(TieBreak tie_break = TieBreak::PreferDecentralized) : tie_break_(tie_break) {}

    /// Inserts or replaces the answer for `answer.question_id`.
    /// Throws UnknownQuestion for ids outside the catalog.
    void set(Answer answer);
    void erase(const std::string& question_id) { answers_.erase(question_id); }

    const Answer* find(const std::string& question_id) const;
    const std::map<std::string, Answer>& answers() const { return answers_; }
    std::size_t size() const { return answers_.size(); }

    TieBreak tie_break() const { return tie_break_; }
    void set_tie_break(TieBreak t) { tie_break_ = t; }

    friend bool operator==(const Assessment&, const Assessment&) = default;

  private:
    std::map<std::string, Answer> answers_;
    TieBreak tie_break_;
};

/// The 16 questions in table order.
const std::vector<Question>& catalog();

/// Catalog entry for `id`, or nullptr.
const Question* find_question(std::string_view id);

std::vector<Question> questions_for(Phase phase);

/// Aggregates the answers of a single phase. Every answer must refer to a
/// question of `phase` (PhaseMismatch otherwise).
PhaseVerdict decide_phase(Phase phase, std::span<const Answer> answers, TieBreak tie_break);

/// Aggregates the answers of `assessment` that belong to `phase`.
PhaseVerdict decide_phase(Phase phase, const Assessment& assessment);

std::map<Phase, PhaseVerdict> decide_all(const Assessment& assessment);

/// Verdicts to use when a yes/no question is answered yes or no.
struct Polarity {
    Verdict if_yes;
    Verdict if_no;

    friend bool operator==(const Polarity&, const Polarity&) = default;
};

using PolarityTable = std::map<std::string, Polarity>;

/// Shipped mapping from yes/no answers to verdicts, reconstructed from the
/// inland-port walkthrough. Editable as data (see default_polarity.json).
const PolarityTable& default_polarity();

Assessment answers_from_booleans(const std::map<std::string, bool>& raw,
                                 const PolarityTable& polarity,
                                 TieBreak tie_break = TieBreak::PreferDecentralized);

}  // namespace conductor
