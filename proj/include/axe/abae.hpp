#pragma once

#include <algorithm>
#include <cmath>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "axe/autodiff.hpp"
#include "axe/corpus.hpp"
#include "axe/embeddings.hpp"
#include "axe/kmeans.hpp"
#include "axe/numerics.hpp"

namespace axe {

struct AbaeParams {
    Matrix T;  // k x d aspect embeddings
    Matrix M;  // d x d attention bilinear form
    Matrix W;  // k x d projection
    Vector b;  // length k

    int k() const { return T.rows; }
    int d() const { return T.cols; }

    void validate() const {
        if (T.rows < 2 || T.cols < 1) throw std::invalid_argument("abae params: T must be k x d with k >= 2");
        if (M.rows != T.cols || M.cols != T.cols) throw std::invalid_argument("abae params: M must be d x d");
        if (W.rows != T.rows || W.cols != T.cols) throw std::invalid_argument("abae params: W must be k x d");
        if (std::ssize(b) != T.rows) throw std::invalid_argument("abae params: b must have length k");
        if (!all_finite(T) || !all_finite(M) || !all_finite(W) ||
            !std::all_of(b.begin(), b.end(), [](double x) { return std::isfinite(x); }))
            throw std::invalid_argument("abae params: non-finite values");
    }
};

struct AbaeHyper {
    int k = 14;
    double lambda = 1.0;
    int negatives = 20;
    int epochs = 15;
    int batch_size = 50;
    double learning_rate = 0.001;
    std::uint64_t seed = 1;
};

struct ForwardTrace {
    Vector y_s;
    Vector a;
    Vector z_s;
    Vector p_t;
    Vector r_s;
};

// Per-sentence anchor rows for the regularized ensemble. Rows are indexed by
// corpus position; masked-in rows are unit norm. Defined here so the training
// loop can accept it without depending on the ensembles header.
struct AnchorSet {
    Matrix rows;                     // n_sentences x d
    std::vector<std::uint8_t> mask;  // 1 iff the prior label is an in-scope aspect
    double sigma = 0.1;
};

inline Vector sentence_average(std::span<const int> ids, const EmbeddingMatrix &E) {
    if (ids.empty()) throw std::invalid_argument("abae: sentence is empty after vocabulary filtering");
    Vector y(E.dim(), 0.0);
    for (int id : ids) {
        if (id < 0 || id >= E.size()) throw std::invalid_argument("abae: token id out of embedding range");
        auto row = E.vectors.row(id);
        for (int j = 0; j < E.dim(); ++j) y[j] += row[j];
    }
    for (double &x : y) x /= static_cast<double>(ids.size());
    return y;
}

inline Vector attention_weights(std::span<const int> ids, const EmbeddingMatrix &E, const Matrix &M) {
    const Vector y = sentence_average(ids, E);
    if (M.rows != E.dim() || M.cols != E.dim())
        throw std::invalid_argument("abae: M shape does not match embedding dim");
    Vector my(E.dim(), 0.0);
    for (int r = 0; r < M.rows; ++r) my[r] = dot(M.row(r), y);
    Vector logits(ids.size());
    for (size_t i = 0; i < ids.size(); ++i) logits[i] = dot(E.vectors.row(ids[i]), my);
    return softmax(logits);
}

inline Vector weighted_embedding(std::span<const int> ids, const Vector &a, const EmbeddingMatrix &E) {
    if (ids.size() != a.size()) throw std::invalid_argument("abae: attention length does not match sentence");
    Vector z(E.dim(), 0.0);
    for (size_t i = 0; i < ids.size(); ++i) {
        auto row = E.vectors.row(ids[i]);
        for (int j = 0; j < E.dim(); ++j) z[j] += a[i] * row[j];
    }
    return z;
}

inline Vector aspect_probs(const Vector &z, const Matrix &W, const Vector &b) {
    if (W.cols != std::ssize(z) || W.rows != std::ssize(b))
        throw std::invalid_argument("abae: W/b shape mismatch");
    Vector logits(W.rows);
    for (int r = 0; r < W.rows; ++r) logits[r] = dot(W.row(r), std::span<const double>(z)) + b[r];
    return softmax(logits);
}

inline Vector reconstruct(const Vector &p, const Matrix &T) {
    if (T.rows != std::ssize(p)) throw std::invalid_argument("abae: p_t length does not match aspect count");
    Vector r(T.cols, 0.0);
    for (int i = 0; i < T.rows; ++i) {
        auto row = T.row(i);
        for (int j = 0; j < T.cols; ++j) r[j] += p[i] * row[j];
    }
    return r;
}

inline ForwardTrace forward(std::span<const int> ids, const AbaeParams &params, const EmbeddingMatrix &E) {
    ForwardTrace t;
    t.y_s = sentence_average(ids, E);
    t.a = attention_weights(ids, E, params.M);
    t.z_s = weighted_embedding(ids, t.a, E);
    t.p_t = aspect_probs(t.z_s, params.W, params.b);
    t.r_s = reconstruct(t.p_t, params.T);
    return t;
}

// m uniform draws from [0, corpus_size) excluding `current`.
inline std::vector<int> sample_negatives(int current, int corpus_size, int m, SeededRng &rng) {
    if (corpus_size < 2) throw std::invalid_argument("abae: negative sampling needs at least 2 sentences");
    if (m < 1) throw std::invalid_argument("abae: negative sample count must be positive");
    std::vector<int> out;
    out.reserve(m);
    while (std::ssize(out) < m) {
        const int idx = static_cast<int>(rng.uniform_u64(static_cast<std::uint64_t>(corpus_size)));
        if (idx != current) out.push_back(idx);
    }
    return out;
}

inline double hinge_loss(const Vector &r, const Vector &z, const std::vector<Vector> &negative_means) {
    const double rz = dot(std::span<const double>(r), std::span<const double>(z));
    double total = 0.0;
    for (const auto &n : negative_means) {
        if (n.size() != r.size()) throw std::invalid_argument("abae: negative mean length mismatch");
        total += std::max(0.0, 1.0 - rz + dot(std::span<const double>(r), std::span<const double>(n)));
    }
    return total;
}

inline double ortho_penalty(const Matrix &T) {
    Matrix tn = T;
    for (int i = 0; i < tn.rows; ++i) {
        const double n = norm2(tn.row(i));
        if (n < kNormEps) throw std::invalid_argument("abae: zero aspect row in ortho penalty");
        for (double &x : tn.row(i)) x /= n;
    }
    const Matrix gram = matmul(tn, transpose(tn));
    double sum = 0.0;
    for (int i = 0; i < gram.rows; ++i)
        for (int j = 0; j < gram.cols; ++j) {
            const double v = gram(i, j) - (i == j ? 1.0 : 0.0);
            sum += v * v;
        }
    return std::sqrt(sum);
}

inline double total_loss(double j, double u, double lambda, double k = 0.0, double sigma = 0.0) {
    if (lambda < 0) throw std::invalid_argument("abae: lambda must be non-negative");
    if (sigma < 0) throw std::invalid_argument("abae: sigma must be non-negative");
    return j + lambda * u + sigma * k;
}

struct EpochStats {
    double mean_loss = 0.0;  // per-batch means; J is a batch sum, U once per batch
    double mean_j = 0.0;
    double mean_u = 0.0;
    double mean_k = 0.0;
};

struct AbaeTrainResult {
    AbaeParams params;
    std::vector<EpochStats> history;
    long long skipped_empty = 0;
};

namespace detail {

struct AdamState {
    Vector m, v;
    explicit AdamState(size_t n) : m(n, 0.0), v(n, 0.0) {}
};

inline void adam_step(std::vector<double> &param, const std::vector<double> &grad, AdamState &state,
                      double lr, long long t) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t));
    for (size_t i = 0; i < param.size(); ++i) {
        state.m[i] = b1 * state.m[i] + (1 - b1) * grad[i];
        state.v[i] = b2 * state.v[i] + (1 - b2) * grad[i] * grad[i];
        param[i] -= lr * (state.m[i] / c1) / (std::sqrt(state.v[i] / c2) + eps);
    }
}

struct BatchLossIds {
    ad::NodeId loss, j, u, k;
    bool has_u = false, has_k = false;
};

// Builds the hinge + regularizer batch loss on the tape. `batch` holds positions
// into `actives`; negatives index `averages` rows. Anchor rows use the original
// corpus index of each sentence.
inline BatchLossIds build_batch_loss(ad::Tape &tape, ad::NodeId t_id, ad::NodeId m_id, ad::NodeId w_id,
                                     ad::NodeId b_id, const std::vector<int> &batch,
                                     const std::vector<std::span<const int>> &active_ids,
                                     const std::vector<int> &active_original, const Matrix &averages,
                                     const EmbeddingMatrix &E,
                                     const std::vector<std::vector<int>> &negatives, double lambda,
                                     const AnchorSet *anchors) {
    const int d = E.dim();
    const bool use_anchors = anchors != nullptr && anchors->sigma > 0;
    BatchLossIds out{};
    std::optional<ad::NodeId> j_total, k_total;

    for (size_t bi = 0; bi < batch.size(); ++bi) {
        const int pos = batch[bi];
        const auto ids = active_ids[pos];
        const int n = static_cast<int>(ids.size());

        Matrix es(n, d);
        for (int i = 0; i < n; ++i)
            std::copy_n(E.vectors.row(ids[i]).begin(), d, es.row(i).begin());
        const ad::NodeId es_id = tape.constant(es);

        Matrix y(d, 1);
        std::copy_n(averages.row(pos).begin(), d, y.data.begin());
        const ad::NodeId y_id = tape.constant(y);

        const ad::NodeId logits = tape.matmul(es_id, tape.matmul(m_id, y_id));  // n x 1
        const ad::NodeId a_id = tape.softmax_vec(logits);
        const ad::NodeId z_id = tape.matmul(tape.transpose(es_id), a_id);  // d x 1
        const ad::NodeId p_id = tape.softmax_vec(tape.add(tape.matmul(w_id, z_id), b_id));
        const ad::NodeId r_id = tape.matmul(tape.transpose(t_id), p_id);  // d x 1

        const auto &negs = negatives[bi];
        Matrix neg_rows(static_cast<int>(negs.size()), d);
        for (size_t i = 0; i < negs.size(); ++i)
            std::copy_n(averages.row(negs[i]).begin(), d, neg_rows.row(i).begin());
        const ad::NodeId rz = tape.matmul(tape.transpose(r_id), z_id);  // 1 x 1
        const ad::NodeId rn = tape.matmul(tape.constant(neg_rows), r_id);  // m x 1
        const ad::NodeId margins = tape.relu(tape.add_scalar(
            tape.sub(rn, tape.expand_scalar(rz, static_cast<int>(negs.size()), 1)), 1.0));
        const ad::NodeId j_sent = tape.sum_all(margins);
        j_total = j_total ? tape.add(*j_total, j_sent) : j_sent;

        if (use_anchors && anchors->mask[active_original[pos]]) {
            Matrix anchor(d, 1);
            std::copy_n(anchors->rows.row(active_original[pos]).begin(), d, anchor.data.begin());
            const ad::NodeId g_ii =
                tape.matmul(tape.transpose(tape.vec_normalize(r_id)), tape.constant(anchor));
            const ad::NodeId contrib = tape.square(tape.add_scalar(g_ii, -1.0));
            k_total = k_total ? tape.add(*k_total, contrib) : contrib;
        }
    }

    out.j = *j_total;
    ad::NodeId loss = *j_total;
    if (lambda > 0) {
        const ad::NodeId tn = tape.row_normalize(t_id);
        const ad::NodeId gram = tape.matmul(tn, tape.transpose(tn));
        out.u = tape.frob_norm(tape.sub_identity(gram));
        out.has_u = true;
        loss = tape.add(loss, tape.scale(out.u, lambda));
    }
    if (k_total) {
        out.k = *k_total;
        out.has_k = true;
        loss = tape.add(loss, tape.scale(*k_total, anchors->sigma));
    }
    out.loss = loss;
    return out;
}

}  // namespace detail

inline AbaeTrainResult train(const std::vector<Sentence> &corpus, const EmbeddingMatrix &E,
                             const AbaeHyper &hyper, const AnchorSet *anchors = nullptr) {
    if (hyper.k < 2) throw std::invalid_argument("abae: k must be at least 2");
    if (hyper.negatives < 1) throw std::invalid_argument("abae: negatives must be positive");
    if (hyper.lambda < 0) throw std::invalid_argument("abae: lambda must be non-negative");
    if (hyper.epochs < 1 || hyper.batch_size < 1)
        throw std::invalid_argument("abae: epochs and batch_size must be positive");
    if (!(hyper.learning_rate > 0)) throw std::invalid_argument("abae: learning_rate must be positive");
    if (corpus.empty()) throw std::invalid_argument("abae: empty corpus");
    if (E.size() < hyper.k)
        throw std::invalid_argument("abae: k exceeds vocabulary size " + std::to_string(E.size()));
    if (anchors != nullptr) {
        if (anchors->sigma < 0) throw std::invalid_argument("abae: sigma must be non-negative");
        if (anchors->rows.rows != std::ssize(corpus) || std::ssize(anchors->mask) != std::ssize(corpus))
            throw std::invalid_argument("abae: anchor set does not cover the corpus");
        if (anchors->rows.cols != E.dim())
            throw std::invalid_argument("abae: anchor dimension does not match embeddings");
    }

    AbaeTrainResult result;
    std::vector<std::span<const int>> active_ids;
    std::vector<int> active_original;
    for (size_t i = 0; i < corpus.size(); ++i) {
        if (corpus[i].token_ids.empty()) {
            ++result.skipped_empty;
            continue;
        }
        active_ids.emplace_back(corpus[i].token_ids);
        active_original.push_back(static_cast<int>(i));
    }
    const int n_active = static_cast<int>(active_ids.size());
    if (n_active < 2) throw std::invalid_argument("abae: need at least 2 non-empty sentences");

    const int d = E.dim();
    Matrix averages(n_active, d);
    for (int i = 0; i < n_active; ++i) {
        const Vector y = sentence_average(active_ids[i], E);
        std::copy(y.begin(), y.end(), averages.row(i).begin());
    }

    AbaeParams params;
    {
        SeededRng km_rng(derive_seed(hyper.seed, "abae-kmeans"));
        params.T = kmeans(E.vectors, hyper.k, km_rng, 10, 100);
        params.M = Matrix::identity(d);
        SeededRng init_rng(derive_seed(hyper.seed, "abae-init"));
        params.W = Matrix(hyper.k, d);
        for (double &x : params.W.data) x = init_rng.uniform_real(-0.01, 0.01);
        params.b.assign(hyper.k, 0.0);
        for (double &x : params.b) x = init_rng.uniform_real(-0.01, 0.01);
    }

    SeededRng shuffle_rng(derive_seed(hyper.seed, "abae-shuffle"));
    SeededRng neg_rng(derive_seed(hyper.seed, "abae-negatives"));

    detail::AdamState adam_t(params.T.data.size()), adam_m(params.M.data.size()),
        adam_w(params.W.data.size()), adam_b(params.b.size());
    long long step = 0;

    std::vector<int> order(n_active);
    for (int i = 0; i < n_active; ++i) order[i] = i;

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double sum_loss = 0, sum_j = 0, sum_u = 0, sum_k = 0;
        int batches = 0;
        for (int start = 0; start < n_active; start += hyper.batch_size) {
            const int end = std::min(start + hyper.batch_size, n_active);
            std::vector<int> batch(order.begin() + start, order.begin() + end);
            std::vector<std::vector<int>> negatives;
            negatives.reserve(batch.size());
            for (int pos : batch)
                negatives.push_back(sample_negatives(pos, n_active, hyper.negatives, neg_rng));

            ad::Tape tape;
            const ad::NodeId t_id = tape.leaf(params.T);
            const ad::NodeId m_id = tape.leaf(params.M);
            const ad::NodeId w_id = tape.leaf(params.W);
            const ad::NodeId b_id = tape.leaf(Matrix::from_vector(params.b));
            const auto ids = detail::build_batch_loss(tape, t_id, m_id, w_id, b_id, batch, active_ids,
                                                      active_original, averages, E, negatives,
                                                      hyper.lambda, anchors);
            const double loss = tape.scalar_val(ids.loss);
            if (!std::isfinite(loss))
                throw std::runtime_error("abae: training diverged (non-finite loss) at epoch " +
                                         std::to_string(epoch + 1) + " batch " +
                                         std::to_string(batches + 1));
            tape.backward(ids.loss);
            ++step;
            detail::adam_step(params.T.data, tape.grad(t_id).data, adam_t, hyper.learning_rate, step);
            detail::adam_step(params.M.data, tape.grad(m_id).data, adam_m, hyper.learning_rate, step);
            detail::adam_step(params.W.data, tape.grad(w_id).data, adam_w, hyper.learning_rate, step);
            detail::adam_step(params.b, tape.grad(b_id).data, adam_b, hyper.learning_rate, step);

            sum_loss += loss;
            sum_j += tape.scalar_val(ids.j);
            if (ids.has_u) sum_u += tape.scalar_val(ids.u);
            if (ids.has_k) sum_k += tape.scalar_val(ids.k);
            ++batches;
        }
        EpochStats stats;
        stats.mean_loss = sum_loss / batches;
        stats.mean_j = sum_j / batches;
        stats.mean_u = sum_u / batches;
        stats.mean_k = sum_k / batches;
        result.history.push_back(stats);
    }

    params.validate();
    result.params = std::move(params);
    return result;
}

// One-shot loss and gradients for an explicit batch; `batch` and the entries
// of `negatives` are corpus indices of non-empty sentences.
struct BatchEval {
    double loss = 0, j = 0, u = 0, k = 0;
    Matrix grad_T, grad_M, grad_W, grad_b;  // grad_b is k x 1
};

inline BatchEval evaluate_batch(const AbaeParams &params, const std::vector<Sentence> &corpus,
                                const EmbeddingMatrix &E, const std::vector<int> &batch,
                                const std::vector<std::vector<int>> &negatives, double lambda,
                                const AnchorSet *anchors = nullptr) {
    params.validate();
    if (params.d() != E.dim()) throw std::invalid_argument("abae: parameter dim does not match embeddings");
    if (lambda < 0) throw std::invalid_argument("abae: lambda must be non-negative");
    if (batch.empty()) throw std::invalid_argument("abae: empty batch");
    if (negatives.size() != batch.size())
        throw std::invalid_argument("abae: one negative list per batch item required");
    auto check_index = [&](int i) {
        if (i < 0 || i >= std::ssize(corpus) || corpus[i].token_ids.empty())
            throw std::invalid_argument("abae: batch references an empty or out-of-range sentence");
    };
    for (int i : batch) check_index(i);
    for (const auto &negs : negatives)
        for (int i : negs) check_index(i);

    const int d = E.dim();
    std::vector<std::span<const int>> active_ids;
    std::vector<int> active_original;
    Matrix averages(static_cast<int>(corpus.size()), d);
    for (size_t i = 0; i < corpus.size(); ++i) {
        active_ids.emplace_back(corpus[i].token_ids);
        active_original.push_back(static_cast<int>(i));
        if (!corpus[i].token_ids.empty()) {
            const Vector y = sentence_average(corpus[i].token_ids, E);
            std::copy(y.begin(), y.end(), averages.row(static_cast<int>(i)).begin());
        }
    }

    ad::Tape tape;
    const ad::NodeId t_id = tape.leaf(params.T);
    const ad::NodeId m_id = tape.leaf(params.M);
    const ad::NodeId w_id = tape.leaf(params.W);
    const ad::NodeId b_id = tape.leaf(Matrix::from_vector(params.b));
    const auto ids = detail::build_batch_loss(tape, t_id, m_id, w_id, b_id, batch, active_ids,
                                              active_original, averages, E, negatives, lambda, anchors);
    tape.backward(ids.loss);

    BatchEval out;
    out.loss = tape.scalar_val(ids.loss);
    out.j = tape.scalar_val(ids.j);
    out.u = ids.has_u ? tape.scalar_val(ids.u) : 0.0;
    out.k = ids.has_k ? tape.scalar_val(ids.k) : 0.0;
    out.grad_T = tape.grad(t_id);
    out.grad_M = tape.grad(m_id);
    out.grad_W = tape.grad(w_id);
    out.grad_b = tape.grad(b_id);
    return out;
}

struct InferResult {
    int aspect = 0;
    Vector p_t;
};

inline InferResult infer(std::span<const int> ids, const AbaeParams &params, const EmbeddingMatrix &E) {
    const ForwardTrace trace = forward(ids, params, E);
    InferResult out;
    out.p_t = trace.p_t;
    out.aspect = static_cast<int>(std::max_element(out.p_t.begin(), out.p_t.end()) - out.p_t.begin());
    return out;
}

// Per aspect, the n vocabulary words with highest cosine to the aspect row.
// Zero-norm word vectors rank last.
inline std::vector<std::vector<std::string>> top_words(const Matrix &T, const EmbeddingMatrix &E, int n) {
    if (n < 0) throw std::invalid_argument("abae: top_words count must be non-negative");
    if (n > E.size())
        throw std::invalid_argument("abae: top_words count exceeds vocabulary size " +
                                    std::to_string(E.size()));
    std::vector<std::vector<std::string>> out;
    for (int a = 0; a < T.rows; ++a) {
        auto trow = T.row(a);
        if (norm2(trow) < kNormEps) throw std::invalid_argument("abae: zero aspect row in top_words");
        std::vector<std::pair<double, int>> scored;
        scored.reserve(E.size());
        for (int w = 0; w < E.size(); ++w) {
            auto wrow = E.vectors.row(w);
            const double score = norm2(wrow) < kNormEps ? -2.0 : cosine(trow, wrow);
            scored.emplace_back(score, w);
        }
        std::sort(scored.begin(), scored.end(), [](const auto &x, const auto &y) {
            if (x.first != y.first) return x.first > y.first;
            return x.second < y.second;
        });
        std::vector<std::string> words;
        for (int i = 0; i < n; ++i) words.push_back(E.words[scored[i].second]);
        out.push_back(std::move(words));
    }
    return out;
}

namespace detail {

inline void append_bytes(std::string &out, const void *p, size_t n) {
    out.append(static_cast<const char *>(p), n);
}

inline void read_bytes(const std::string &in, size_t &off, void *p, size_t n) {
    if (off + n > in.size()) throw std::invalid_argument("abae model: truncated file");
    std::memcpy(p, in.data() + off, n);
    off += n;
}

inline void append_matrix(std::string &out, const Matrix &m) {
    append_bytes(out, m.data.data(), m.data.size() * sizeof(double));
}

}  // namespace detail

inline std::string save_model(const AbaeParams &params, double lambda) {
    params.validate();
    std::string out = "AXEMODEL";
    const std::uint32_t version = 1;
    const std::int32_t k = params.k(), d = params.d();
    detail::append_bytes(out, &version, sizeof(version));
    detail::append_bytes(out, &k, sizeof(k));
    detail::append_bytes(out, &d, sizeof(d));
    detail::append_bytes(out, &lambda, sizeof(lambda));
    detail::append_matrix(out, params.T);
    detail::append_matrix(out, params.M);
    detail::append_matrix(out, params.W);
    detail::append_bytes(out, params.b.data(), params.b.size() * sizeof(double));
    return out;
}

inline std::pair<AbaeParams, double> load_model(const std::string &bytes) {
    if (bytes.size() < 8 || bytes.compare(0, 8, "AXEMODEL") != 0)
        throw std::invalid_argument("abae model: bad magic");
    size_t off = 8;
    std::uint32_t version = 0;
    detail::read_bytes(bytes, off, &version, sizeof(version));
    if (version != 1) throw std::invalid_argument("abae model: unsupported version " + std::to_string(version));
    std::int32_t k = 0, d = 0;
    double lambda = 0;
    detail::read_bytes(bytes, off, &k, sizeof(k));
    detail::read_bytes(bytes, off, &d, sizeof(d));
    detail::read_bytes(bytes, off, &lambda, sizeof(lambda));
    if (k < 2 || d < 1) throw std::invalid_argument("abae model: invalid shape header");
    AbaeParams params;
    params.T = Matrix(k, d);
    params.M = Matrix(d, d);
    params.W = Matrix(k, d);
    params.b.assign(k, 0.0);
    detail::read_bytes(bytes, off, params.T.data.data(), params.T.data.size() * sizeof(double));
    detail::read_bytes(bytes, off, params.M.data.data(), params.M.data.size() * sizeof(double));
    detail::read_bytes(bytes, off, params.W.data.data(), params.W.data.size() * sizeof(double));
    detail::read_bytes(bytes, off, params.b.data(), params.b.size() * sizeof(double));
    if (off != bytes.size()) throw std::invalid_argument("abae model: trailing bytes");
    params.validate();
    return {std::move(params), lambda};
}

}  // namespace axe
