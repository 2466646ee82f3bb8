#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "axe/corpus.hpp"
#include "axe/embeddings.hpp"
#include "axe/numerics.hpp"

namespace axe {

enum class PriorLabel { Food, Staff, Ambience, None };

inline const char *to_string(PriorLabel label) {
    switch (label) {
        case PriorLabel::Food: return "Food";
        case PriorLabel::Staff: return "Staff";
        case PriorLabel::Ambience: return "Ambience";
        case PriorLabel::None: return "None";
    }
    throw std::invalid_argument("unknown prior label");
}

inline PriorLabel prior_label_from_string(const std::string &name) {
    std::string low;
    for (char c : name) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (low == "food") return PriorLabel::Food;
    if (low == "staff" || low == "service") return PriorLabel::Staff;
    if (low == "ambience" || low == "ambiance") return PriorLabel::Ambience;
    if (low == "none") return PriorLabel::None;
    throw std::invalid_argument("unknown prior label: \"" + name + "\"");
}

inline std::optional<GoldCategory> prior_to_gold(PriorLabel label) {
    switch (label) {
        case PriorLabel::Food: return GoldCategory::Food;
        case PriorLabel::Staff: return GoldCategory::Staff;
        case PriorLabel::Ambience: return GoldCategory::Ambience;
        case PriorLabel::None: return std::nullopt;
    }
    return std::nullopt;
}

struct CatModel {
    // ordered Food, Staff, Ambience, None; vectors are unnormalized means
    std::vector<std::pair<PriorLabel, Vector>> label_embs;
    std::vector<int> candidates;  // vocabulary ids, frequency-descending
    double gamma = 0.0;
    std::string none_word;
};

struct PriorPrediction {
    std::string id;
    PriorLabel label = PriorLabel::None;
    Vector label_emb;  // unit norm
};

struct CatConfig {
    std::vector<std::string> food_seeds{"food"};
    std::vector<std::string> staff_seeds{"staff"};
    std::vector<std::string> ambience_seeds{"ambience"};
    double gamma = 0.0;  // 0 means 1/d
    int top_n = 200;
};

inline Vector label_embedding(const std::vector<std::string> &seed_words, const EmbeddingMatrix &E) {
    if (seed_words.empty()) throw std::invalid_argument("cat: label needs at least one seed word");
    Vector out(E.dim(), 0.0);
    for (const auto &w : seed_words) {
        if (!E.contains(w))
            throw std::invalid_argument("cat: seed word \"" + w + "\" is not in the vocabulary");
        auto row = E.row_of(w);
        for (int j = 0; j < E.dim(); ++j) out[j] += row[j];
    }
    for (double &x : out) x /= static_cast<double>(seed_words.size());
    if (norm2(std::span<const double>(out)) < kNormEps)
        throw std::invalid_argument("cat: label embedding is the zero vector");
    return out;
}

// Top-n most frequent NOUN-tagged vocabulary words; lexicographic tiebreak.
inline std::vector<int> candidate_aspects(const std::vector<Sentence> &sentences,
                                          const EmbeddingMatrix &E, int top_n) {
    if (top_n < 0) throw std::invalid_argument("cat: top_n must be non-negative");
    std::map<std::string, long long> counts;
    for (const auto &s : sentences)
        for (const auto &t : s.tokens)
            if (t.pos == PosTag::Noun && E.contains(t.norm)) ++counts[t.norm];
    if (counts.empty()) throw std::invalid_argument("cat: corpus contains no in-vocabulary nouns");
    std::vector<std::pair<std::string, long long>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto &a, const auto &b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<int> out;
    for (const auto &[word, count] : ranked) {
        if (std::ssize(out) == top_n) break;
        out.push_back(E.id_of(word));
    }
    return out;
}

// weight(w_i) proportional to the summed RBF kernel against the candidate set;
// zero kernel mass falls back to uniform weights.
inline Vector cat_attention_weights(std::span<const int> ids, const std::vector<int> &candidates,
                                    const EmbeddingMatrix &E, double gamma) {
    if (ids.empty()) throw std::invalid_argument("cat: empty sentence");
    if (!(gamma > 0)) throw std::invalid_argument("cat: gamma must be positive");
    Vector weights(ids.size(), 0.0);
    double mass = 0.0;
    for (size_t i = 0; i < ids.size(); ++i) {
        auto e = E.vectors.row(ids[i]);
        for (int c : candidates) weights[i] += rbf(e, E.vectors.row(c), gamma);
        mass += weights[i];
    }
    if (mass <= 0.0) {
        std::fill(weights.begin(), weights.end(), 1.0 / static_cast<double>(ids.size()));
        return weights;
    }
    for (double &w : weights) w /= mass;
    return weights;
}

inline Vector cat_attention(std::span<const int> ids, const std::vector<int> &candidates,
                            const EmbeddingMatrix &E, double gamma) {
    const Vector weights = cat_attention_weights(ids, candidates, E, gamma);
    Vector out(E.dim(), 0.0);
    for (size_t i = 0; i < ids.size(); ++i) {
        auto e = E.vectors.row(ids[i]);
        for (int j = 0; j < E.dim(); ++j) out[j] += weights[i] * e[j];
    }
    return out;
}

// Synthetic none-label placeholder: negate the mean of the three labels and
// return the embedding of the closest vocabulary word.
inline Vector make_none_label(const Vector &food, const Vector &staff, const Vector &ambience,
                              const EmbeddingMatrix &E, std::string *chosen_word = nullptr) {
    if (E.size() == 0) throw std::invalid_argument("cat: empty vocabulary");
    if (food.size() != staff.size() || staff.size() != ambience.size() ||
        std::ssize(food) != E.dim())
        throw std::invalid_argument("cat: label dimension mismatch");
    Vector v(food.size());
    for (size_t j = 0; j < v.size(); ++j) v[j] = -(food[j] + staff[j] + ambience[j]) / 3.0;
    if (norm2(std::span<const double>(v)) < kNormEps)
        throw std::invalid_argument("cat: negated label mean is the zero vector");
    int best = -1;
    double best_cos = -2.0;
    for (int w = 0; w < E.size(); ++w) {
        auto row = E.vectors.row(w);
        if (norm2(row) < kNormEps) continue;
        const double c = cosine(std::span<const double>(v), row);
        if (c > best_cos) {
            best_cos = c;
            best = w;
        }
    }
    if (best < 0) throw std::invalid_argument("cat: vocabulary has only zero vectors");
    if (chosen_word) *chosen_word = E.words[best];
    return Vector(E.vectors.row(best).begin(), E.vectors.row(best).end());
}

inline CatModel build_cat_model(const std::vector<Sentence> &sentences, const EmbeddingMatrix &E,
                                const CatConfig &config = {}) {
    CatModel model;
    model.gamma = config.gamma > 0 ? config.gamma : 1.0 / E.dim();
    const Vector food = label_embedding(config.food_seeds, E);
    const Vector staff = label_embedding(config.staff_seeds, E);
    const Vector ambience = label_embedding(config.ambience_seeds, E);
    const Vector none = make_none_label(food, staff, ambience, E, &model.none_word);
    model.label_embs = {{PriorLabel::Food, food},
                        {PriorLabel::Staff, staff},
                        {PriorLabel::Ambience, ambience},
                        {PriorLabel::None, none}};
    model.candidates = candidate_aspects(sentences, E, config.top_n);
    return model;
}

// Cosine argmax over the four label vectors; ties keep the earlier label in
// Food, Staff, Ambience, None order. Empty or zero-attended sentences get None.
inline PriorPrediction assign_label(const Sentence &sentence, const CatModel &model,
                                    const EmbeddingMatrix &E) {
    PriorPrediction pred;
    pred.id = sentence.id;
    const Vector *chosen = nullptr;
    for (const auto &[label, emb] : model.label_embs)
        if (label == PriorLabel::None) chosen = &emb;
    if (chosen == nullptr) throw std::invalid_argument("cat: model lacks the None label");

    if (!sentence.token_ids.empty()) {
        const Vector attended =
            cat_attention(sentence.token_ids, model.candidates, E, model.gamma);
        if (norm2(std::span<const double>(attended)) >= kNormEps) {
            double best = -2.0;
            for (const auto &[label, emb] : model.label_embs) {
                const double c = cosine(std::span<const double>(attended), std::span<const double>(emb));
                if (c > best) {
                    best = c;
                    pred.label = label;
                    chosen = &emb;
                }
            }
        }
    }
    pred.label_emb = l2_normalize(*chosen);
    return pred;
}

inline std::vector<PriorPrediction> run_cat(const std::vector<Sentence> &sentences,
                                            const CatModel &model, const EmbeddingMatrix &E) {
    std::vector<PriorPrediction> out;
    out.reserve(sentences.size());
    for (const auto &s : sentences) out.push_back(assign_label(s, model, E));
    return out;
}

inline std::string to_prior_jsonl(const std::vector<PriorPrediction> &preds) {
    std::string out;
    for (const auto &p : preds) {
        nlohmann::json j;
        j["id"] = p.id;
        j["label"] = to_string(p.label);
        out += j.dump();
        out += '\n';
    }
    return out;
}

inline std::vector<std::pair<std::string, PriorLabel>> parse_prior_jsonl(const std::string &bytes) {
    std::vector<std::pair<std::string, PriorLabel>> out;
    size_t start = 0;
    int line_no = 0;
    while (start <= bytes.size()) {
        size_t end = bytes.find('\n', start);
        if (end == std::string::npos) end = bytes.size();
        const std::string line = bytes.substr(start, end - start);
        ++line_no;
        start = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            if (end == bytes.size()) break;
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(line);
            if (!j.contains("id") || !j.at("id").is_string())
                throw std::invalid_argument("missing string field \"id\"");
            if (!j.contains("label") || !j.at("label").is_string())
                throw std::invalid_argument("missing string field \"label\"");
            out.emplace_back(j.at("id").get<std::string>(),
                             prior_label_from_string(j.at("label").get<std::string>()));
        } catch (const nlohmann::json::parse_error &e) {
            throw std::invalid_argument("prior jsonl line " + std::to_string(line_no) + ": " + e.what());
        } catch (const std::invalid_argument &e) {
            throw std::invalid_argument("prior jsonl line " + std::to_string(line_no) + ": " + e.what());
        }
        if (end == bytes.size()) break;
    }
    return out;
}

}  // namespace axe
