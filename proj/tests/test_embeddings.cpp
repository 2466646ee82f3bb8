#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include "axe/embeddings.hpp"
#include "axe/kmeans.hpp"
#include "test_util.hpp"

using namespace axe;

namespace {

std::vector<Sentence> repeated_corpus(const std::vector<std::vector<std::string>> &patterns, int reps) {
    std::vector<Sentence> out;
    for (int r = 0; r < reps; ++r)
        for (const auto &words : patterns) {
            Sentence s;
            for (const auto &w : words) s.tokens.push_back({w, w, std::nullopt});
            out.push_back(std::move(s));
        }
    return out;
}

EmbeddingMatrix train_toy(std::uint64_t seed, std::vector<double> *loss = nullptr) {
    auto sentences = repeated_corpus({{"aa", "bb"}, {"cc", "dd"}}, 200);
    auto vocab = build_vocab(sentences, 1);
    attach_token_ids(sentences, vocab);
    SgnsConfig cfg;
    cfg.dim = 8;
    cfg.window = 2;
    cfg.negatives = 3;
    cfg.epochs = 4;
    cfg.learning_rate = 0.05;
    cfg.seed = seed;
    return train_sgns(sentences, vocab, cfg, loss);
}

}  // namespace

TEST_CASE("co-occurring words end up closer", "[embeddings]") {
    auto emb = train_toy(7);
    const double ab = cosine(emb.row_of("aa"), emb.row_of("bb"));
    const double ac = cosine(emb.row_of("aa"), emb.row_of("cc"));
    CHECK(ab > ac);
}

TEST_CASE("sgns is bit-identical under a fixed seed", "[embeddings]") {
    auto first = train_toy(11);
    auto second = train_toy(11);
    CHECK(first.vectors.data == second.vectors.data);
    auto third = train_toy(12);
    CHECK(first.vectors.data != third.vectors.data);
}

TEST_CASE("sgns epoch loss trends down", "[embeddings]") {
    std::vector<double> loss;
    train_toy(3, &loss);
    REQUIRE(loss.size() == 4);
    for (double l : loss) CHECK(std::isfinite(l));
    const double head = (loss[0] + loss[1]) / 2;
    const double tail = (loss[2] + loss[3]) / 2;
    CHECK(tail <= head);
}

TEST_CASE("sgns input validation", "[embeddings]") {
    auto sentences = repeated_corpus({{"aa", "bb"}}, 5);
    auto vocab = build_vocab(sentences, 1);
    attach_token_ids(sentences, vocab);
    SgnsConfig cfg;
    cfg.dim = 4;
    SECTION("bad hyperparameters") {
        SgnsConfig c = cfg;
        c.dim = 1;
        CHECK_THROWS_AS(train_sgns(sentences, vocab, c), std::invalid_argument);
        c = cfg;
        c.epochs = 0;
        CHECK_THROWS_AS(train_sgns(sentences, vocab, c), std::invalid_argument);
        c = cfg;
        c.learning_rate = 0;
        CHECK_THROWS_AS(train_sgns(sentences, vocab, c), std::invalid_argument);
    }
    SECTION("no usable tokens") {
        std::vector<Sentence> empty_ids(3);
        CHECK_THROWS_AS(train_sgns(empty_ids, vocab, cfg), std::invalid_argument);
    }
    SECTION("memory budget") {
        SgnsConfig c = cfg;
        c.dim = 1 << 30;
        CHECK_THROWS_WITH(train_sgns(sentences, vocab, c),
                          Catch::Matchers::ContainsSubstring("memory budget"));
    }
}

TEST_CASE("embedding text round trip", "[embeddings]") {
    SECTION("exactly representable values round trip exactly") {
        EmbeddingMatrix e;
        e.words = {"x", "y"};
        e.index = {{"x", 0}, {"y", 1}};
        e.vectors = Matrix{2, 2, {0.25, -1.5, 0.125, 3.0}};
        auto back = load_text(save_text(e));
        CHECK(back.vectors.data == e.vectors.data);
        CHECK(back.words == e.words);
    }
    SECTION("random values round trip within 1e-9") {
        SeededRng rng(99);
        EmbeddingMatrix e;
        for (int i = 0; i < 6; ++i) {
            e.words.push_back("w" + std::to_string(i));
            e.index.emplace(e.words.back(), i);
        }
        e.vectors = testutil::rand_matrix(rng, 6, 5);
        auto back = load_text(save_text(e));
        REQUIRE(back.dim() == 5);
        for (size_t i = 0; i < e.vectors.data.size(); ++i)
            CHECK(std::abs(back.vectors.data[i] - e.vectors.data[i]) < 1e-9);
    }
}

TEST_CASE("embedding file validation", "[embeddings]") {
    CHECK_THROWS_AS(load_text(""), std::invalid_argument);
    CHECK_THROWS_AS(load_text("2\nx 1 2\ny 3 4\n"), std::invalid_argument);
    // header promises 2 rows, one provided
    CHECK_THROWS_AS(load_text("2 2\nx 1 2\n"), std::invalid_argument);
    // short vector
    CHECK_THROWS_WITH(load_text("1 3\nx 1 2\n"), Catch::Matchers::ContainsSubstring("expected 3"));
    CHECK_THROWS_WITH(load_text("2 2\nx 1 2\nx 3 4\n"),
                      Catch::Matchers::ContainsSubstring("duplicate"));
    CHECK_THROWS_WITH(load_text("1 2\nx 1 oops\n"),
                      Catch::Matchers::ContainsSubstring("non-numeric"));
    CHECK_THROWS_AS(load_text("1 1\nx 5\n"), std::invalid_argument);
}

TEST_CASE("hand-written embedding fixture serves lookups", "[embeddings]") {
    const std::string fixture =
        "3 3\n"
        "king 0.125 0.5 -0.25\n"
        "queen 0.1 0.45 -0.2\n"
        "banana -0.7 0.02 0.9\n";
    auto emb = load_text(fixture);
    CHECK(emb.size() == 3);
    CHECK(emb.dim() == 3);
    CHECK(emb.row_of("queen")[1] == 0.45);
    CHECK(cosine(emb.row_of("king"), emb.row_of("queen")) >
          cosine(emb.row_of("king"), emb.row_of("banana")));
    CHECK_THROWS_WITH(emb.row_of("pear"), Catch::Matchers::ContainsSubstring("pear"));
    CHECK(save_text(emb) == fixture);
}

TEST_CASE("sigmoid midpoint", "[embeddings]") { CHECK(sigmoid(0.0) == 0.5); }

TEST_CASE("kmeans recovers separated blobs", "[embeddings]") {
    SeededRng rng(5);
    Matrix points{40, 2, std::vector<double>(80)};
    for (int i = 0; i < 40; ++i) {
        const double cx = i < 20 ? 0.0 : 10.0;
        points(i, 0) = cx + rng.uniform_real(-0.5, 0.5);
        points(i, 1) = rng.uniform_real(-0.5, 0.5);
    }
    SeededRng km_rng(17);
    auto centroids = kmeans(points, 2, km_rng);
    REQUIRE(centroids.rows == 2);
    double lo = std::min(centroids(0, 0), centroids(1, 0));
    double hi = std::max(centroids(0, 0), centroids(1, 0));
    CHECK(std::abs(lo - 0.0) < 1.0);
    CHECK(std::abs(hi - 10.0) < 1.0);
}

TEST_CASE("kmeans with k equal to point count has zero inertia", "[embeddings]") {
    Matrix points{3, 2, {0, 0, 5, 5, -3, 4}};
    SeededRng rng(1);
    auto centroids = kmeans(points, 3, rng);
    // every point must coincide with some centroid
    for (int i = 0; i < 3; ++i) {
        double best = 1e300;
        for (int c = 0; c < 3; ++c)
            best = std::min(best, detail::sq_dist(points.row(i), centroids.row(c)));
        CHECK(best < 1e-18);
    }
}

TEST_CASE("kmeans determinism and validation", "[embeddings]") {
    SeededRng rng(8);
    auto points = testutil::rand_matrix(rng, 30, 4);
    SeededRng a(42), b(42);
    CHECK(kmeans(points, 5, a).data == kmeans(points, 5, b).data);
    SeededRng c(1);
    CHECK_THROWS_AS(kmeans(points, 0, c), std::invalid_argument);
    CHECK_THROWS_AS(kmeans(points, 31, c), std::invalid_argument);
}
