#include "vsg/judge.hpp"

#include "vsg/errors.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

namespace vsg {

std::string_view to_string(MatchTier tier) {
    switch (tier) {
    case MatchTier::Identical: return "identical";
    case MatchTier::Synonym: return "synonym";
    case MatchTier::HypernymHyponym: return "hypernym_hyponym";
    case MatchTier::SemanticOverlap: return "semantic_overlap";
    case MatchTier::Mismatch: return "mismatch";
    }
    return "mismatch";
}

std::optional<MatchTier> parse_match_tier(std::string_view text) {
    std::string key;
    for (char c : text) {
        if (c == ' ' || c == '/' || c == '-') {
            key.push_back('_');
        } else {
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (key == "identical") return MatchTier::Identical;
    if (key == "synonym") return MatchTier::Synonym;
    if (key == "hypernym_hyponym" || key == "hypernym" || key == "hyponym") {
        return MatchTier::HypernymHyponym;
    }
    if (key == "semantic_overlap" || key == "overlap") return MatchTier::SemanticOverlap;
    if (key == "mismatch") return MatchTier::Mismatch;
    return std::nullopt;
}

std::string_view to_string(LabelKind kind) {
    switch (kind) {
    case LabelKind::Object: return "object";
    case LabelKind::Attribute: return "attribute";
    case LabelKind::Relation: return "relation";
    }
    return "object";
}

std::optional<LabelKind> parse_label_kind(std::string_view text) {
    if (text == "object") return LabelKind::Object;
    if (text == "attribute") return LabelKind::Attribute;
    if (text == "relation") return LabelKind::Relation;
    return std::nullopt;
}

std::string normalize_label(std::string_view label) {
    std::string out;
    bool pending_space = false;
    for (char c : label) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        if (i >= line.size()) {
            break;
        }
        std::string field;
        if (line[i] == '"') {
            const std::size_t close = line.find('"', i + 1);
            if (close == std::string::npos) {
                throw Error(ErrorKind::ParseError, "unterminated quote in lexicon line: " + line);
            }
            field = line.substr(i + 1, close - i - 1);
            i = close + 1;
        } else {
            while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
                field.push_back(line[i] == '_' ? ' ' : line[i]);
                ++i;
            }
        }
        fields.push_back(std::move(field));
    }
    return fields;
}

} // namespace

LexiconJudge LexiconJudge::from_string(std::string_view text) {
    LexiconJudge judge;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto fields = split_fields(line);
        if (fields.empty()) {
            continue;
        }
        if (fields.size() != 3) {
            throw ParseError("lexicon line " + std::to_string(line_no) +
                                 " must have exactly three fields",
                             line_no, 0);
        }
        const auto tier = parse_match_tier(fields[0]);
        if (!tier || *tier == MatchTier::Identical || *tier == MatchTier::Mismatch) {
            throw ParseError("lexicon line " + std::to_string(line_no) + ": unknown relation '" +
                                 fields[0] + "'",
                             line_no, 0);
        }
        judge.add_edge(*tier, fields[1], fields[2]);
    }
    return judge;
}

LexiconJudge LexiconJudge::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::IoError, "cannot open lexicon " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str());
}

void LexiconJudge::add_edge(MatchTier tier, std::string_view a, std::string_view b) {
    const std::string na = normalize_label(a);
    const std::string nb = normalize_label(b);
    for (const auto& key : {std::pair{na, nb}, std::pair{nb, na}}) {
        auto [it, inserted] = edges_.emplace(key, tier);
        if (!inserted && higher_fidelity(tier, it->second)) {
            it->second = tier;
        }
    }
}

MatchTier LexiconJudge::judge(std::string_view pred, std::string_view gt, LabelKind /*kind*/) {
    const std::string np = normalize_label(pred);
    const std::string ng = normalize_label(gt);
    if (np == ng) {
        return MatchTier::Identical;
    }
    auto it = edges_.find({np, ng});
    return it == edges_.end() ? MatchTier::Mismatch : it->second;
}

} // namespace vsg
