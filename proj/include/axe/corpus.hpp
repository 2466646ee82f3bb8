// Corpus model: tokens, sentences, gold categories, vocabulary construction
// and the single-aspect filter. Parsers for the concrete input formats live
// in semeval.hpp / jsonl.hpp.
#pragma once

#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace axe {

enum class PosTag { Noun, Adj, Verb, Other };

// Coarse 4-tag scheme; common universal POS tags are folded into it so that
// off-the-shelf tagger output can be ingested directly.
inline PosTag pos_tag_from_string(std::string_view s) {
    if (s == "NOUN" || s == "PROPN") return PosTag::Noun;
    if (s == "ADJ") return PosTag::Adj;
    if (s == "VERB" || s == "AUX") return PosTag::Verb;
    return PosTag::Other;
}

inline const char *to_string(PosTag t) {
    switch (t) {
        case PosTag::Noun: return "NOUN";
        case PosTag::Adj: return "ADJ";
        case PosTag::Verb: return "VERB";
        default: return "OTHER";
    }
}

enum class GoldCategory { Food, Staff, Ambience, Price, Miscellaneous };

inline constexpr GoldCategory kAllCategories[] = {GoldCategory::Food, GoldCategory::Staff, GoldCategory::Ambience,
                                                  GoldCategory::Price, GoldCategory::Miscellaneous};

inline const char *to_string(GoldCategory c) {
    switch (c) {
        case GoldCategory::Food: return "Food";
        case GoldCategory::Staff: return "Staff";
        case GoldCategory::Ambience: return "Ambience";
        case GoldCategory::Price: return "Price";
        default: return "Miscellaneous";
    }
}

// Accepts both our canonical names and the SemEval attribute spellings
// (service -> Staff, anecdotes/miscellaneous -> Miscellaneous).
inline GoldCategory category_from_string(std::string_view s) {
    std::string lower;
    lower.reserve(s.size());
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "food") return GoldCategory::Food;
    if (lower == "staff" || lower == "service") return GoldCategory::Staff;
    if (lower == "ambience") return GoldCategory::Ambience;
    if (lower == "price") return GoldCategory::Price;
    if (lower == "miscellaneous" || lower == "anecdotes/miscellaneous") return GoldCategory::Miscellaneous;
    throw std::invalid_argument("unknown aspect category: \"" + std::string(s) + "\"");
}

struct Token {
    std::string surface;  // as it appeared
    std::string norm;     // lowercased
    std::optional<PosTag> pos;
};

struct Sentence {
    std::string id;
    std::string text;  // raw source text
    std::vector<Token> tokens;
    std::vector<int> token_ids;  // attached against a vocabulary; unknowns removed
    std::optional<GoldCategory> gold;
    int aspect_count{0};  // distinct source annotations; 0 = unlabeled
};

using StopwordSet = std::unordered_set<std::string>;

namespace detail {
inline bool is_token_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }
}  // namespace detail

// Lowercases, strips punctuation, drops stopwords. Hyphens and apostrophes
// survive only between token characters ("wait-staff", "don't").
inline std::vector<Token> tokenize(std::string_view text, const StopwordSet &stopwords) {
    std::vector<Token> out;
    std::string surface, norm;
    auto flush = [&] {
        if (!norm.empty() && !stopwords.contains(norm)) out.push_back({surface, norm, std::nullopt});
        surface.clear();
        norm.clear();
    };
    for (size_t i = 0; i < text.size(); ++i) {
        const unsigned char c = static_cast<unsigned char>(text[i]);
        if (detail::is_token_byte(c)) {
            surface.push_back(static_cast<char>(c));
            norm.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
        } else if ((c == '-' || c == '\'') && !norm.empty() && i + 1 < text.size() &&
                   detail::is_token_byte(static_cast<unsigned char>(text[i + 1]))) {
            surface.push_back(static_cast<char>(c));
            norm.push_back(static_cast<char>(c));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

// Keeps sentences annotated with exactly one aspect plus every unlabeled
// sentence (their aspect count is unknowable). Retained sentences are
// passed through untouched.
inline std::vector<Sentence> filter_single_aspect(const std::vector<Sentence> &sentences) {
    std::vector<Sentence> out;
    out.reserve(sentences.size());
    for (const auto &s : sentences)
        if (s.aspect_count <= 1) out.push_back(s);
    return out;
}

struct Vocabulary {
    std::vector<std::string> words;       // id -> word
    std::vector<long long> counts;        // id -> corpus frequency
    std::unordered_map<std::string, int> index;
    int min_count{1};

    int size() const { return static_cast<int>(words.size()); }
    bool contains(const std::string &w) const { return index.contains(w); }
    int id_of(const std::string &w) const {
        auto it = index.find(w);
        if (it == index.end()) throw std::invalid_argument("vocabulary: unknown word \"" + w + "\"");
        return it->second;
    }
};

// Ids in descending frequency, ties broken lexicographically.
inline Vocabulary build_vocab(const std::vector<Sentence> &sentences, int min_count) {
    if (min_count < 1) throw std::invalid_argument("build_vocab: min_count must be >= 1");
    std::map<std::string, long long> freq;
    for (const auto &s : sentences)
        for (const auto &t : s.tokens) ++freq[t.norm];
    if (freq.empty()) throw std::invalid_argument("build_vocab: empty corpus");
    std::vector<std::pair<std::string, long long>> kept;
    for (const auto &[w, c] : freq)
        if (c >= min_count) kept.emplace_back(w, c);
    if (kept.empty()) throw std::invalid_argument("build_vocab: no word reaches min_count");
    std::sort(kept.begin(), kept.end(), [](const auto &a, const auto &b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    Vocabulary v;
    v.min_count = min_count;
    for (const auto &[w, c] : kept) {
        v.index.emplace(w, v.size());
        v.words.push_back(w);
        v.counts.push_back(c);
    }
    return v;
}

// Re-derives token_ids against an arbitrary word -> id lookup (vocabulary or
// embedding table); unknown words are dropped. Returns dropped token count.
inline long long attach_token_ids(std::vector<Sentence> &sentences,
                                  const std::function<int(const std::string &)> &lookup) {
    long long dropped = 0;
    for (auto &s : sentences) {
        s.token_ids.clear();
        for (const auto &t : s.tokens) {
            const int id = lookup(t.norm);
            if (id >= 0)
                s.token_ids.push_back(id);
            else
                ++dropped;
        }
    }
    return dropped;
}

inline long long attach_token_ids(std::vector<Sentence> &sentences, const Vocabulary &vocab) {
    return attach_token_ids(sentences, [&](const std::string &w) {
        auto it = vocab.index.find(w);
        return it == vocab.index.end() ? -1 : it->second;
    });
}

// Optional plug-in tagging hook; tags are normally ingested from the input
// files rather than computed here.
using PosTagger = std::function<std::vector<PosTag>(const std::vector<Token> &)>;

inline void apply_pos_tagger(std::vector<Sentence> &sentences, const PosTagger &tagger) {
    for (auto &s : sentences) {
        std::vector<PosTag> tags = tagger(s.tokens);
        if (tags.size() != s.tokens.size())
            throw std::invalid_argument("apply_pos_tagger: tagger returned " + std::to_string(tags.size()) +
                                        " tags for " + std::to_string(s.tokens.size()) + " tokens");
        for (size_t i = 0; i < tags.size(); ++i) s.tokens[i].pos = tags[i];
    }
}

}  // namespace axe
