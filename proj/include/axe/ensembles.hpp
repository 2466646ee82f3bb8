#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "axe/abae.hpp"
#include "axe/cat.hpp"
#include "axe/corpus.hpp"
#include "axe/embeddings.hpp"
#include "axe/numerics.hpp"

namespace axe {

enum class CandidateMode { NounsAndAdjectives, NounsOnly };
enum class FallbackMode { AbaeThenMisc, MiscOnly };

struct RuleConfig {
    CandidateMode candidate_mode = CandidateMode::NounsAndAdjectives;
    // empty scope disables cosine disambiguation entirely
    std::vector<GoldCategory> scope{GoldCategory::Food, GoldCategory::Staff, GoldCategory::Ambience};
    FallbackMode fallback = FallbackMode::AbaeThenMisc;
};

enum class Provenance { Agreement, Disambiguated, AbaeFallback, Miscellaneous };

inline const char *to_string(Provenance p) {
    switch (p) {
        case Provenance::Agreement: return "agreement";
        case Provenance::Disambiguated: return "disambiguated";
        case Provenance::AbaeFallback: return "abae-fallback";
        case Provenance::Miscellaneous: return "miscellaneous";
    }
    throw std::invalid_argument("unknown provenance");
}

struct EnsemblePrediction {
    std::string id;
    GoldCategory category = GoldCategory::Miscellaneous;
    Provenance provenance = Provenance::Miscellaneous;
};

// Label vectors for the disambiguation scope, usually taken from the prior
// model's seed-word embeddings.
inline std::vector<std::pair<GoldCategory, Vector>> scope_label_embs(const CatModel &model) {
    std::vector<std::pair<GoldCategory, Vector>> out;
    for (const auto &[label, emb] : model.label_embs)
        if (auto gold = prior_to_gold(label)) out.emplace_back(*gold, emb);
    return out;
}

// Rule-based combination of the two prediction sets:
//   agreement keeps the shared label; a conflict whose prior label is in scope
//   is resolved by the best cosine between a candidate word and a scope label;
//   an in-scope conflict with no candidates is Miscellaneous; everything else
//   falls back per config. Ties prefer Food, Staff, Ambience order, then the
//   earlier candidate.
inline std::vector<EnsemblePrediction> rule_ensemble(
    const std::vector<std::pair<std::string, PriorLabel>> &cat_preds,
    const std::vector<std::pair<std::string, GoldCategory>> &abae_preds,
    const std::vector<Sentence> &sentences, const EmbeddingMatrix &E,
    const std::vector<std::pair<GoldCategory, Vector>> &label_embs, const RuleConfig &config) {
    std::unordered_set<std::string> known_ids;
    for (const auto &s : sentences)
        if (!known_ids.insert(s.id).second)
            throw std::invalid_argument("rule ensemble: duplicate sentence id \"" + s.id + "\"");

    std::unordered_map<std::string, PriorLabel> cat_by_id;
    for (const auto &[id, label] : cat_preds) {
        if (!known_ids.count(id))
            throw std::invalid_argument("rule ensemble: prior prediction for unknown id \"" + id + "\"");
        if (!cat_by_id.emplace(id, label).second)
            throw std::invalid_argument("rule ensemble: duplicate prior prediction for id \"" + id + "\"");
    }
    std::unordered_map<std::string, GoldCategory> abae_by_id;
    for (const auto &[id, category] : abae_preds) {
        if (!known_ids.count(id))
            throw std::invalid_argument("rule ensemble: model prediction for unknown id \"" + id + "\"");
        if (!abae_by_id.emplace(id, category).second)
            throw std::invalid_argument("rule ensemble: duplicate model prediction for id \"" + id + "\"");
    }

    // canonical Food, Staff, Ambience order fixes the similarity tiebreak
    std::vector<GoldCategory> scope;
    for (GoldCategory c : {GoldCategory::Food, GoldCategory::Staff, GoldCategory::Ambience})
        if (std::find(config.scope.begin(), config.scope.end(), c) != config.scope.end())
            scope.push_back(c);
    for (GoldCategory c : config.scope)
        if (c != GoldCategory::Food && c != GoldCategory::Staff && c != GoldCategory::Ambience)
            throw std::invalid_argument("rule ensemble: scope must be within Food, Staff, Ambience");

    std::vector<std::pair<GoldCategory, const Vector *>> scope_embs;
    for (GoldCategory c : scope) {
        const Vector *emb = nullptr;
        for (const auto &[cat, vec] : label_embs)
            if (cat == c) emb = &vec;
        if (emb == nullptr)
            throw std::invalid_argument(std::string("rule ensemble: no label embedding for ") +
                                        to_string(c));
        if (norm2(std::span<const double>(*emb)) < kNormEps)
            throw std::invalid_argument(std::string("rule ensemble: zero label embedding for ") +
                                        to_string(c));
        scope_embs.emplace_back(c, emb);
    }

    std::vector<EnsemblePrediction> out;
    out.reserve(sentences.size());
    for (const auto &s : sentences) {
        const auto cat_it = cat_by_id.find(s.id);
        if (cat_it == cat_by_id.end())
            throw std::invalid_argument("rule ensemble: no prior prediction for id \"" + s.id + "\"");
        const PriorLabel prior = cat_it->second;
        const std::optional<GoldCategory> prior_gold = prior_to_gold(prior);
        const auto abae_it = abae_by_id.find(s.id);
        const std::optional<GoldCategory> abae_gold =
            abae_it == abae_by_id.end() ? std::nullopt : std::optional<GoldCategory>(abae_it->second);

        EnsemblePrediction pred;
        pred.id = s.id;
        if (prior_gold && abae_gold && *prior_gold == *abae_gold) {
            pred.category = *prior_gold;
            pred.provenance = Provenance::Agreement;
            out.push_back(std::move(pred));
            continue;
        }

        const bool in_scope =
            prior_gold && std::find(scope.begin(), scope.end(), *prior_gold) != scope.end();
        if (in_scope) {
            std::vector<int> candidates;
            for (const auto &t : s.tokens) {
                if (!t.pos) continue;
                const bool keep = *t.pos == PosTag::Noun ||
                                  (config.candidate_mode == CandidateMode::NounsAndAdjectives &&
                                   *t.pos == PosTag::Adj);
                if (keep && E.contains(t.norm)) candidates.push_back(E.id_of(t.norm));
            }
            if (!candidates.empty()) {
                double best = -2.0;
                GoldCategory best_cat = scope.front();
                for (int cand : candidates) {
                    auto word_emb = E.vectors.row(cand);
                    if (norm2(word_emb) < kNormEps) continue;
                    for (const auto &[cat, emb] : scope_embs) {
                        const double sim = cosine(word_emb, std::span<const double>(*emb));
                        if (sim > best) {
                            best = sim;
                            best_cat = cat;
                        }
                    }
                }
                if (best > -2.0) {
                    pred.category = best_cat;
                    pred.provenance = Provenance::Disambiguated;
                    out.push_back(std::move(pred));
                    continue;
                }
            }
            pred.category = GoldCategory::Miscellaneous;
            pred.provenance = Provenance::Miscellaneous;
            out.push_back(std::move(pred));
            continue;
        }

        if (config.fallback == FallbackMode::AbaeThenMisc && abae_gold) {
            pred.category = *abae_gold;
            pred.provenance = Provenance::AbaeFallback;
        } else {
            pred.category = GoldCategory::Miscellaneous;
            pred.provenance = Provenance::Miscellaneous;
        }
        out.push_back(std::move(pred));
    }
    return out;
}

inline std::string to_ensemble_jsonl(const std::vector<EnsemblePrediction> &preds) {
    std::string out;
    for (const auto &p : preds) {
        nlohmann::json j;
        j["id"] = p.id;
        j["category"] = to_string(p.category);
        j["provenance"] = to_string(p.provenance);
        out += j.dump();
        out += '\n';
    }
    return out;
}

// One anchor row per corpus sentence: the l2-normalized embedding of the
// prior label's seed word, masked in only for Food, Staff and Ambience.
inline AnchorSet build_anchors(const std::vector<std::pair<std::string, PriorLabel>> &prior_preds,
                               const std::vector<Sentence> &corpus, const EmbeddingMatrix &E,
                               double sigma) {
    if (sigma < 0) throw std::invalid_argument("anchors: sigma must be non-negative");
    std::unordered_set<std::string> known_ids;
    for (const auto &s : corpus)
        if (!known_ids.insert(s.id).second)
            throw std::invalid_argument("anchors: duplicate sentence id \"" + s.id + "\"");
    std::unordered_map<std::string, PriorLabel> by_id;
    for (const auto &[id, label] : prior_preds) {
        if (!known_ids.count(id))
            throw std::invalid_argument("anchors: prediction for unknown id \"" + id + "\"");
        if (!by_id.emplace(id, label).second)
            throw std::invalid_argument("anchors: duplicate prediction for id \"" + id + "\"");
    }

    auto label_row = [&](PriorLabel label) -> Vector {
        const char *word = nullptr;
        switch (label) {
            case PriorLabel::Food: word = "food"; break;
            case PriorLabel::Staff: word = "staff"; break;
            case PriorLabel::Ambience: word = "ambience"; break;
            case PriorLabel::None: return {};
        }
        if (!E.contains(word))
            throw std::invalid_argument("anchors: label word \"" + std::string(word) +
                                        "\" is not in the vocabulary");
        return l2_normalize(Vector(E.row_of(word).begin(), E.row_of(word).end()));
    };

    AnchorSet anchors;
    anchors.sigma = sigma;
    anchors.rows = Matrix(static_cast<int>(corpus.size()), E.dim());
    anchors.mask.assign(corpus.size(), 0);
    for (size_t i = 0; i < corpus.size(); ++i) {
        const auto it = by_id.find(corpus[i].id);
        if (it == by_id.end())
            throw std::invalid_argument("anchors: no prediction for id \"" + corpus[i].id + "\"");
        const Vector row = label_row(it->second);
        if (!row.empty()) {
            std::copy(row.begin(), row.end(), anchors.rows.row(static_cast<int>(i)).begin());
            anchors.mask[i] = 1;
        }
    }
    return anchors;
}

// K over a batch: rows of r_batch are normalized, dotted against their own
// anchor row, and masked squared deviations from 1 are summed. Equivalent to
// the diagonal of the full batch Gram matrix.
inline double anchored_penalty(const Matrix &r_batch, const Matrix &anchor_rows,
                               const std::vector<std::uint8_t> &mask) {
    if (!r_batch.same_shape(anchor_rows))
        throw std::invalid_argument("anchored penalty: batch and anchor shapes differ");
    if (std::ssize(mask) != r_batch.rows)
        throw std::invalid_argument("anchored penalty: mask length does not match batch");
    double k = 0.0;
    for (int i = 0; i < r_batch.rows; ++i) {
        if (!mask[i]) continue;
        auto r = r_batch.row(i);
        const double n = norm2(r);
        if (n < kNormEps)
            throw std::invalid_argument("anchored penalty: zero-norm reconstruction row " +
                                        std::to_string(i));
        double g = 0.0;
        auto a = anchor_rows.row(i);
        for (int j = 0; j < r_batch.cols; ++j) g += (r[j] / n) * a[j];
        k += (g - 1.0) * (g - 1.0);
    }
    return k;
}

inline AbaeTrainResult anchored_train(const std::vector<Sentence> &corpus, const EmbeddingMatrix &E,
                                      const AbaeHyper &hyper, const AnchorSet &anchors) {
    return train(corpus, E, hyper, &anchors);
}

}  // namespace axe
