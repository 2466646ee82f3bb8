#pragma once

#include <string>
#include <vector>

#include "axe/embeddings.hpp"
#include "axe/synthetic.hpp"

namespace axe::testutil {

inline EmbeddingMatrix make_embeddings(std::vector<std::string> words, Matrix vectors) {
    EmbeddingMatrix e;
    e.words = std::move(words);
    for (size_t i = 0; i < e.words.size(); ++i) e.index.emplace(e.words[i], static_cast<int>(i));
    e.vectors = std::move(vectors);
    return e;
}

struct ClusteredSetup {
    SyntheticCorpus corpus;
    EmbeddingMatrix E;
};

// Small topical corpus with embeddings clustered by topic, so training tests
// do not depend on SGNS quality.
inline ClusteredSetup make_clustered_setup(std::uint64_t seed = 1, int topic_vocab = 20,
                                           int n_sentences = 90) {
    SyntheticConfig cfg;
    cfg.topic_vocab = topic_vocab;
    cfg.n_sentences = n_sentences;
    cfg.min_len = 3;
    cfg.max_len = 6;
    cfg.seed = seed;
    ClusteredSetup setup;
    setup.corpus = generate_synthetic(cfg);
    const int d = 12;
    const int v = setup.corpus.vocab.size();
    SeededRng rng(derive_seed(seed, "clustered-emb"));
    Matrix vectors(v, d);
    for (int w = 0; w < v; ++w) {
        const std::string &word = setup.corpus.vocab.words[w];
        const int topic = word.starts_with("food") ? 0 : word.starts_with("staff") ? 1 : 2;
        for (int j = 0; j < d; ++j) vectors(w, j) = rng.uniform_real(-0.05, 0.05);
        for (int j = 4 * topic; j < 4 * topic + 4; ++j) vectors(w, j) += 1.0;
    }
    setup.E = make_embeddings(setup.corpus.vocab.words, std::move(vectors));
    return setup;
}

}  // namespace axe::testutil
