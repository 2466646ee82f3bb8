// Dense double-precision vectors/matrices, elementary kernels and a
// deterministic RNG. Everything downstream (embeddings, ABAE, CAt) is built
// on these primitives.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace axe {

using Vector = std::vector<double>;

struct Matrix {
    int rows{0};
    int cols{0};
    std::vector<double> data;  // row-major

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {
        if (r < 0 || c < 0) throw std::invalid_argument("Matrix: negative shape");
    }
    Matrix(int r, int c, std::vector<double> values) : rows(r), cols(c), data(std::move(values)) {
        if (r < 0 || c < 0) throw std::invalid_argument("Matrix: negative shape");
        if (std::ssize(data) != static_cast<std::ptrdiff_t>(r) * c)
            throw std::invalid_argument("Matrix: data length does not match shape");
    }

    double &operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

    std::span<double> row(int r) { return {data.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)}; }
    std::span<const double> row(int r) const {
        return {data.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)};
    }

    bool same_shape(const Matrix &o) const { return rows == o.rows && cols == o.cols; }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix from_vector(const Vector &v) {  // column vector
        Matrix m(static_cast<int>(v.size()), 1);
        std::copy(v.begin(), v.end(), m.data.begin());
        return m;
    }

    Vector to_vector() const { return Vector(data.begin(), data.end()); }
};

inline bool all_finite(const Matrix &m) {
    return std::all_of(m.data.begin(), m.data.end(), [](double x) { return std::isfinite(x); });
}

// C = A * B
inline Matrix matmul(const Matrix &a, const Matrix &b) {
    if (a.cols != b.rows) throw std::invalid_argument("matmul: inner dimensions disagree");
    Matrix c(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i) {
        const double *ar = a.data.data() + static_cast<size_t>(i) * a.cols;
        double *cr = c.data.data() + static_cast<size_t>(i) * b.cols;
        for (int k = 0; k < a.cols; ++k) {
            const double aik = ar[k];
            if (aik == 0.0) continue;
            const double *br = b.data.data() + static_cast<size_t>(k) * b.cols;
            for (int j = 0; j < b.cols; ++j) cr[j] += aik * br[j];
        }
    }
    return c;
}

inline Matrix transpose(const Matrix &a) {
    Matrix t(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
    return t;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<const double> v) { return std::sqrt(dot(v, v)); }

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Max-subtracted softmax; the plain form overflows for large logits.
inline Vector softmax(const Vector &v) {
    if (v.empty()) throw std::invalid_argument("softmax: empty vector");
    const double mx = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(mx)) throw std::invalid_argument("softmax: non-finite input");
    Vector out(v.size());
    double sum = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        out[i] = std::exp(v[i] - mx);
        sum += out[i];
    }
    for (double &x : out) x /= sum;
    return out;
}

constexpr double kNormEps = 1e-12;

// Zero-norm input is an error: silently returning zeros would corrupt every
// cosine-based label assignment downstream.
inline Vector l2_normalize(const Vector &v) {
    const double n = norm2(v);
    if (n <= kNormEps) throw std::invalid_argument("l2_normalize: zero-norm vector");
    Vector out(v.size());
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
    return out;
}

inline double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = norm2(a), nb = norm2(b);
    if (na <= kNormEps || nb <= kNormEps) throw std::invalid_argument("cosine: zero-norm vector");
    return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

inline double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
    if (a.size() != b.size()) throw std::invalid_argument("rbf: length mismatch");
    if (!(gamma > 0.0)) throw std::invalid_argument("rbf: gamma must be positive");
    double d2 = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

inline uint64_t fnv1a64(std::string_view bytes) {
    uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// One top-level seed per run; stages draw from independent streams derived by
// tag so that adding a stage never shifts another stage's sequence.
inline uint64_t derive_seed(uint64_t seed, std::string_view stage) { return splitmix64(seed ^ fnv1a64(stage)); }

// mt19937_64 raw output is specified by the standard, so the sequence is
// reproducible across platforms; std:: distributions are not, hence the
// hand-rolled draws.
class SeededRng {
  public:
    explicit SeededRng(uint64_t seed) : seed_(seed), eng_(seed) {}

    uint64_t seed() const { return seed_; }

    uint64_t next_u64() { return eng_(); }

    // uniform on [0, n)
    uint64_t uniform_u64(uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_u64: n must be positive");
        const uint64_t lim = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = eng_();
        } while (x >= lim);
        return x % n;
    }

    // uniform on [0, 1)
    double uniform_real() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform_real(double lo, double hi) { return lo + (hi - lo) * uniform_real(); }

    template <typename T>
    void shuffle(std::vector<T> &v) {
        for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_u64(i)]);
    }

    SeededRng split(std::string_view stage) const { return SeededRng(derive_seed(seed_, stage)); }

  private:
    uint64_t seed_;
    std::mt19937_64 eng_;
};

}  // namespace axe
