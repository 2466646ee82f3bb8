#pragma once

#include <string>
#include <vector>

#include "axe/ensembles.hpp"
#include "clustered_setup.hpp"

namespace axe::testutil {

// Hand-built conflict table exercising every rule path and the four published
// ensemble variants. Expected outcomes were derived by evaluating the cosine
// table over the toy embeddings by hand.
struct RuleFixture {
    EmbeddingMatrix E;
    std::vector<Sentence> sentences;
    std::vector<std::pair<std::string, PriorLabel>> cat_preds;
    std::vector<std::pair<std::string, GoldCategory>> abae_preds;
    std::vector<std::pair<GoldCategory, Vector>> label_embs;

    struct Expectation {
        std::string config;  // nn-adj, only-nn, fost, misc-only, abae-misc
        std::string id;
        GoldCategory category;
        Provenance provenance;
    };
    std::vector<Expectation> expectations;
};

inline RuleConfig rule_fixture_config(const std::string &name) {
    RuleConfig cfg;
    if (name == "nn-adj") return cfg;
    if (name == "only-nn") {
        cfg.candidate_mode = CandidateMode::NounsOnly;
        return cfg;
    }
    if (name == "fost") {
        cfg.scope = {GoldCategory::Food, GoldCategory::Staff};
        return cfg;
    }
    if (name == "misc-only") {
        cfg.fallback = FallbackMode::MiscOnly;
        return cfg;
    }
    if (name == "abae-misc") {
        cfg.scope = {};
        return cfg;
    }
    throw std::invalid_argument("unknown fixture config: " + name);
}

inline RuleFixture make_rule_fixture() {
    RuleFixture f;
    f.E = make_embeddings({"food", "staff", "ambience", "pizza", "waiter", "decor", "tasty",
                           "neutral", "soup", "barman"},
                          Matrix(10, 3,
                                 {1, 0, 0,        // food
                                  0, 1, 0,        // staff
                                  0, 0, 1,        // ambience
                                  0.9, 0.1, 0,    // pizza: closest to food
                                  0.1, 0.9, 0,    // waiter: closest to staff
                                  0.1, 0, 0.9,    // decor: closest to ambience
                                  0.6, 0.4, 0,    // tasty: adjective, closest to food
                                  1, 1, 1,        // neutral: exact three-way tie
                                  0.8, 0.2, 0,    // soup: food at cos 0.970
                                  0.05, 0.95, 0}));  // barman: staff at cos 0.999
    f.label_embs = {{GoldCategory::Food, Vector{1, 0, 0}},
                    {GoldCategory::Staff, Vector{0, 1, 0}},
                    {GoldCategory::Ambience, Vector{0, 0, 1}}};

    auto sent = [&](std::string id, std::vector<std::pair<std::string, PosTag>> tokens) {
        Sentence s;
        s.id = std::move(id);
        for (auto &[word, pos] : tokens) s.tokens.push_back({word, word, pos});
        f.sentences.push_back(std::move(s));
    };
    sent("c1", {{"pizza", PosTag::Noun}});
    sent("c2", {{"decor", PosTag::Noun}});
    sent("c3", {{"pizza", PosTag::Noun}});
    sent("c4", {{"waiter", PosTag::Noun}});
    sent("c5", {{"tasty", PosTag::Adj}});
    sent("c6", {{"pizza", PosTag::Noun}});
    sent("c7", {{"pizza", PosTag::Noun}});
    sent("c8", {{"zzz", PosTag::Noun}});  // only an out-of-vocabulary candidate
    sent("c9", {{"decor", PosTag::Noun}});
    sent("c10", {{"neutral", PosTag::Noun}});
    sent("c11", {{"soup", PosTag::Noun}, {"barman", PosTag::Noun}});
    sent("c12", {{"decor", PosTag::Noun}});

    f.cat_preds = {{"c1", PriorLabel::Food},     {"c2", PriorLabel::Ambience},
                   {"c3", PriorLabel::Food},     {"c4", PriorLabel::Staff},
                   {"c5", PriorLabel::Food},     {"c6", PriorLabel::None},
                   {"c7", PriorLabel::None},     {"c8", PriorLabel::Food},
                   {"c9", PriorLabel::Ambience}, {"c10", PriorLabel::Food},
                   {"c11", PriorLabel::Food},    {"c12", PriorLabel::None}};
    f.abae_preds = {{"c1", GoldCategory::Food},  {"c2", GoldCategory::Ambience},
                    {"c3", GoldCategory::Staff}, {"c4", GoldCategory::Food},
                    {"c5", GoldCategory::Staff}, {"c6", GoldCategory::Food},
                    {"c8", GoldCategory::Staff}, {"c9", GoldCategory::Food},
                    {"c10", GoldCategory::Staff}, {"c11", GoldCategory::Staff},
                    {"c12", GoldCategory::Ambience}};  // c7 deliberately missing

    using E = RuleFixture::Expectation;
    f.expectations = {
        E{"nn-adj", "c1", GoldCategory::Food, Provenance::Agreement},
        E{"nn-adj", "c2", GoldCategory::Ambience, Provenance::Agreement},
        E{"nn-adj", "c3", GoldCategory::Food, Provenance::Disambiguated},
        E{"nn-adj", "c4", GoldCategory::Staff, Provenance::Disambiguated},
        E{"nn-adj", "c5", GoldCategory::Food, Provenance::Disambiguated},
        E{"nn-adj", "c6", GoldCategory::Food, Provenance::AbaeFallback},
        E{"nn-adj", "c7", GoldCategory::Miscellaneous, Provenance::Miscellaneous},
        E{"nn-adj", "c8", GoldCategory::Miscellaneous, Provenance::Miscellaneous},
        E{"nn-adj", "c9", GoldCategory::Ambience, Provenance::Disambiguated},
        E{"nn-adj", "c10", GoldCategory::Food, Provenance::Disambiguated},
        E{"nn-adj", "c11", GoldCategory::Staff, Provenance::Disambiguated},
        E{"nn-adj", "c12", GoldCategory::Ambience, Provenance::AbaeFallback},
        E{"only-nn", "c5", GoldCategory::Miscellaneous, Provenance::Miscellaneous},
        E{"fost", "c9", GoldCategory::Food, Provenance::AbaeFallback},
        E{"misc-only", "c6", GoldCategory::Miscellaneous, Provenance::Miscellaneous},
        E{"misc-only", "c12", GoldCategory::Miscellaneous, Provenance::Miscellaneous},
        E{"abae-misc", "c3", GoldCategory::Staff, Provenance::AbaeFallback},
    };
    return f;
}

}  // namespace axe::testutil
