#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace vsg {

/// Semantic match tiers, highest fidelity first.
enum class MatchTier {
    Identical = 0,
    Synonym = 1,
    HypernymHyponym = 2,
    SemanticOverlap = 3,
    Mismatch = 4,
};

/// True when `a` is of strictly higher fidelity than `b`.
constexpr bool higher_fidelity(MatchTier a, MatchTier b) {
    return static_cast<int>(a) < static_cast<int>(b);
}

/// Any tier above Mismatch.
constexpr bool is_lenient_match(MatchTier t) { return t != MatchTier::Mismatch; }

std::string_view to_string(MatchTier tier);
/// Accepts the snake_case names produced by to_string as well as the
/// display forms ("Hypernym/Hyponym", "Semantic Overlap").
std::optional<MatchTier> parse_match_tier(std::string_view text);

enum class LabelKind { Object, Attribute, Relation };

std::string_view to_string(LabelKind kind);
std::optional<LabelKind> parse_label_kind(std::string_view text);

/// Semantic judge contract. Must be deterministic per input within a session
/// and safe to call from several threads. Throws Error(JudgeUnavailable) when
/// it cannot produce a verdict.
class Judge {
public:
    virtual ~Judge() = default;
    virtual MatchTier judge(std::string_view pred, std::string_view gt, LabelKind kind) = 0;
};

/// Lowercases, trims and collapses internal whitespace.
std::string normalize_label(std::string_view label);

/// Judge backed by a flat word-relation table.
///
/// File format, one edge per line, tab or space separated, `#` comments:
///     synonym   human   person
///     hypernym  animal  dog        (animal is a hypernym of dog)
///     overlap   cup     mug
/// Synonym and overlap edges are symmetric; a hypernym edge matches in either
/// direction. Labels are compared after normalize_label; multi-word labels
/// use underscores or quotes in the file ("teddy_bear" == "teddy bear").
class LexiconJudge final : public Judge {
public:
    LexiconJudge() = default;

    static LexiconJudge from_file(const std::filesystem::path& path);
    static LexiconJudge from_string(std::string_view text);

    void add_edge(MatchTier tier, std::string_view a, std::string_view b);

    MatchTier judge(std::string_view pred, std::string_view gt, LabelKind kind) override;

private:
    std::map<std::pair<std::string, std::string>, MatchTier> edges_;
};

} // namespace vsg
