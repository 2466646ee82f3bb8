#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "axe/corpus.hpp"
#include "axe/numerics.hpp"

namespace axe {

// Three-topic corpus with disjoint per-topic vocabularies. Topic t generates
// its seed word ("food"/"staff"/"ambience") as the most frequent word; `noise`
// is the probability a token is drawn from a different topic.
struct SyntheticConfig {
    int topic_vocab = 200;
    int n_sentences = 5000;
    int min_len = 4;
    int max_len = 9;
    double noise = 0.0;
    std::uint64_t seed = 1;
};

struct SyntheticCorpus {
    std::vector<Sentence> sentences;
    Vocabulary vocab;
};

inline const char *synthetic_topic_seed_word(int topic) {
    switch (topic) {
        case 0: return "food";
        case 1: return "staff";
        case 2: return "ambience";
        default: throw std::invalid_argument("synthetic: topic must be 0, 1 or 2");
    }
}

inline GoldCategory synthetic_topic_category(int topic) {
    switch (topic) {
        case 0: return GoldCategory::Food;
        case 1: return GoldCategory::Staff;
        case 2: return GoldCategory::Ambience;
        default: throw std::invalid_argument("synthetic: topic must be 0, 1 or 2");
    }
}

inline SyntheticCorpus generate_synthetic(const SyntheticConfig &config) {
    if (config.topic_vocab < 2) throw std::invalid_argument("synthetic: topic_vocab must be at least 2");
    if (config.n_sentences < 3) throw std::invalid_argument("synthetic: need at least 3 sentences");
    if (config.min_len < 1 || config.max_len < config.min_len)
        throw std::invalid_argument("synthetic: bad sentence length range");
    if (config.noise < 0 || config.noise > 1)
        throw std::invalid_argument("synthetic: noise must be within [0, 1]");

    SeededRng rng(derive_seed(config.seed, "synthetic"));
    auto topic_word = [&](int topic, int rank) -> std::string {
        if (rank == 0) return synthetic_topic_seed_word(topic);
        // hyphenated so the word survives tokenization as a single token
        return std::string(synthetic_topic_seed_word(topic)) + "-w" + std::to_string(rank);
    };
    // squared uniform biases ranks toward 0, giving a frequent seed word
    auto draw_rank = [&] {
        const double u = rng.uniform_real();
        return static_cast<int>(u * u * config.topic_vocab);
    };

    SyntheticCorpus out;
    out.sentences.reserve(config.n_sentences);
    for (int i = 0; i < config.n_sentences; ++i) {
        const int topic = i % 3;
        const int len = config.min_len +
                        static_cast<int>(rng.uniform_u64(
                            static_cast<std::uint64_t>(config.max_len - config.min_len + 1)));
        Sentence s;
        s.id = "syn" + std::to_string(i);
        s.gold = synthetic_topic_category(topic);
        s.aspect_count = 1;
        for (int t = 0; t < len; ++t) {
            int word_topic = topic;
            if (config.noise > 0 && rng.uniform_real() < config.noise) {
                const int other = static_cast<int>(rng.uniform_u64(2));
                word_topic = (topic + 1 + other) % 3;
            }
            const std::string word = topic_word(word_topic, draw_rank());
            if (t > 0) s.text += ' ';
            s.text += word;
            s.tokens.push_back({word, word, PosTag::Noun});
        }
        out.sentences.push_back(std::move(s));
    }

    out.vocab = build_vocab(out.sentences, 1);
    attach_token_ids(out.sentences, out.vocab);
    return out;
}

}  // namespace axe
