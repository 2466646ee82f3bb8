#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "axe/corpus.hpp"
#include "axe/numerics.hpp"

namespace axe {

// Word vectors plus their own word list, so a loaded file is self-contained.
struct EmbeddingMatrix {
    std::vector<std::string> words;
    std::unordered_map<std::string, int> index;
    Matrix vectors;  // V x d

    int size() const { return static_cast<int>(words.size()); }
    int dim() const { return vectors.cols; }
    bool contains(const std::string &w) const { return index.count(w) > 0; }

    int id_of(const std::string &w) const {
        auto it = index.find(w);
        if (it == index.end()) throw std::invalid_argument("embedding lookup: unknown word \"" + w + "\"");
        return it->second;
    }

    std::span<const double> row_of(const std::string &w) const { return vectors.row(id_of(w)); }
};

struct SgnsConfig {
    int dim = 200;
    int window = 5;
    int negatives = 5;
    int epochs = 5;
    double learning_rate = 0.025;
    std::uint64_t seed = 1;
};

namespace detail {

inline void validate_sgns_config(const SgnsConfig &c) {
    if (c.dim < 2) throw std::invalid_argument("sgns: dim must be at least 2");
    if (c.window < 1 || c.negatives < 1 || c.epochs < 1)
        throw std::invalid_argument("sgns: window, negatives and epochs must be positive");
    if (!(c.learning_rate > 0)) throw std::invalid_argument("sgns: learning_rate must be positive");
}

// Cumulative unigram^(3/4) table sampled by binary search.
class NegativeSampler {
  public:
    explicit NegativeSampler(const std::vector<long long> &counts) {
        cumulative_.reserve(counts.size());
        double total = 0.0;
        for (long long c : counts) {
            total += std::pow(static_cast<double>(c), 0.75);
            cumulative_.push_back(total);
        }
    }

    int draw(SeededRng &rng, int exclude) const {
        for (;;) {
            const double u = rng.uniform_real() * cumulative_.back();
            const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
            int id = static_cast<int>(std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                                               std::ssize(cumulative_) - 1));
            if (id != exclude) return id;
        }
    }

  private:
    std::vector<double> cumulative_;
};

}  // namespace detail

// Skip-gram with negative sampling over token ids. Returns the input-vector
// table. Single-threaded; bit-identical for a fixed seed. If epoch_loss is
// given it receives the per-epoch mean negative-sampling log-loss.
inline EmbeddingMatrix train_sgns(const std::vector<Sentence> &sentences, const Vocabulary &vocab,
                                  const SgnsConfig &config, std::vector<double> *epoch_loss = nullptr) {
    detail::validate_sgns_config(config);
    const int v = vocab.size();
    if (v < 2) throw std::invalid_argument("sgns: vocabulary must contain at least 2 words");

    constexpr double kMemoryBudgetBytes = 4.0 * 1024 * 1024 * 1024;
    if (2.0 * v * config.dim * sizeof(double) > kMemoryBudgetBytes)
        throw std::invalid_argument("sgns: dim " + std::to_string(config.dim) + " with vocabulary " +
                                    std::to_string(v) + " exceeds the memory budget");

    long long total_tokens = 0;
    for (const auto &s : sentences) total_tokens += std::ssize(s.token_ids);
    if (total_tokens == 0) throw std::invalid_argument("sgns: corpus has no in-vocabulary tokens");

    SeededRng rng(derive_seed(config.seed, "sgns"));
    Matrix syn0{v, config.dim, std::vector<double>(static_cast<size_t>(v) * config.dim)};
    Matrix syn1{v, config.dim, std::vector<double>(static_cast<size_t>(v) * config.dim, 0.0)};
    for (double &x : syn0.data) x = (rng.uniform_real() - 0.5) / config.dim;

    detail::NegativeSampler sampler(vocab.counts);
    const double lr0 = config.learning_rate;
    const double total_work = static_cast<double>(config.epochs) * total_tokens + 1.0;
    long long processed = 0;

    std::vector<double> grad_acc(config.dim);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double loss_sum = 0.0;
        long long pair_count = 0;
        for (const auto &sent : sentences) {
            const auto &ids = sent.token_ids;
            const int n = static_cast<int>(ids.size());
            for (int pos = 0; pos < n; ++pos) {
                const double alpha =
                    lr0 * std::max(1e-4, 1.0 - static_cast<double>(processed) / total_work);
                ++processed;
                const int win = config.window - static_cast<int>(rng.uniform_u64(
                                                    static_cast<std::uint64_t>(config.window)));
                for (int off = -win; off <= win; ++off) {
                    if (off == 0) continue;
                    const int cpos = pos + off;
                    if (cpos < 0 || cpos >= n) continue;
                    const int center = ids[pos];
                    const int context = ids[cpos];
                    auto h = syn0.row(center);
                    std::fill(grad_acc.begin(), grad_acc.end(), 0.0);
                    for (int s = 0; s <= config.negatives; ++s) {
                        const int target = (s == 0) ? context : sampler.draw(rng, context);
                        const double label = (s == 0) ? 1.0 : 0.0;
                        auto out = syn1.row(target);
                        const double f = sigmoid(dot(h, out));
                        loss_sum -= std::log(std::max(label > 0 ? f : 1.0 - f, 1e-12));
                        const double g = (label - f) * alpha;
                        for (int j = 0; j < config.dim; ++j) {
                            grad_acc[j] += g * out[j];
                            out[j] += g * h[j];
                        }
                    }
                    auto hw = syn0.row(center);
                    for (int j = 0; j < config.dim; ++j) hw[j] += grad_acc[j];
                    ++pair_count;
                }
            }
        }
        if (epoch_loss) epoch_loss->push_back(pair_count > 0 ? loss_sum / pair_count : 0.0);
    }

    EmbeddingMatrix emb;
    emb.words = vocab.words;
    for (int i = 0; i < v; ++i) emb.index.emplace(vocab.words[i], i);
    emb.vectors = std::move(syn0);
    if (!all_finite(emb.vectors)) throw std::runtime_error("sgns: training produced non-finite vectors");
    return emb;
}

inline std::string save_text(const EmbeddingMatrix &emb) {
    if (emb.vectors.rows != emb.size())
        throw std::invalid_argument("save_text: row count does not match word list");
    std::string out = std::to_string(emb.size()) + " " + std::to_string(emb.dim()) + "\n";
    char buf[64];
    for (int i = 0; i < emb.size(); ++i) {
        out += emb.words[i];
        for (double x : emb.vectors.row(i)) {
            std::snprintf(buf, sizeof(buf), " %.9g", x);
            out += buf;
        }
        out += '\n';
    }
    return out;
}

inline EmbeddingMatrix load_text(const std::string &bytes) {
    std::vector<std::vector<std::string>> lines;
    {
        std::vector<std::string> fields;
        std::string cur;
        auto flush_field = [&] {
            if (!cur.empty()) {
                fields.push_back(cur);
                cur.clear();
            }
        };
        for (char ch : bytes) {
            if (ch == '\n') {
                flush_field();
                if (!fields.empty()) lines.push_back(std::move(fields));
                fields.clear();
            } else if (ch == ' ' || ch == '\t' || ch == '\r') {
                flush_field();
            } else {
                cur.push_back(ch);
            }
        }
        flush_field();
        if (!fields.empty()) lines.push_back(std::move(fields));
    }
    if (lines.empty()) throw std::invalid_argument("embedding file: empty input");
    if (lines[0].size() != 2) throw std::invalid_argument("embedding file: header must be \"V d\"");

    auto parse_int = [](const std::string &s, const char *what) {
        int value = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
        if (ec != std::errc{} || p != s.data() + s.size() || value <= 0)
            throw std::invalid_argument(std::string("embedding file: bad ") + what + " \"" + s + "\"");
        return value;
    };
    const int v = parse_int(lines[0][0], "vocabulary size");
    const int d = parse_int(lines[0][1], "dimension");
    if (d < 2) throw std::invalid_argument("embedding file: dimension must be at least 2");
    if (std::ssize(lines) != v + 1)
        throw std::invalid_argument("embedding file: header promises " + std::to_string(v) +
                                    " rows but found " + std::to_string(lines.size() - 1));

    EmbeddingMatrix emb;
    emb.vectors = Matrix{v, d, std::vector<double>(static_cast<size_t>(v) * d)};
    for (int i = 0; i < v; ++i) {
        const auto &fields = lines[i + 1];
        if (std::ssize(fields) != d + 1)
            throw std::invalid_argument("embedding file: row " + std::to_string(i + 1) + " has " +
                                        std::to_string(fields.size() - 1) + " values, expected " +
                                        std::to_string(d));
        const std::string &word = fields[0];
        if (!emb.index.emplace(word, i).second)
            throw std::invalid_argument("embedding file: duplicate word \"" + word + "\"");
        emb.words.push_back(word);
        for (int j = 0; j < d; ++j) {
            const std::string &f = fields[j + 1];
            double value = 0.0;
            auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
            if (ec != std::errc{} || p != f.data() + f.size() || !std::isfinite(value))
                throw std::invalid_argument("embedding file: non-numeric field \"" + f + "\" in row " +
                                            std::to_string(i + 1));
            emb.vectors(i, j) = value;
        }
    }
    return emb;
}

}  // namespace axe
