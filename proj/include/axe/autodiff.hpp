// Minimal reverse-mode automatic differentiation over dense matrices.
// A Tape lives for one loss evaluation: build the graph forward, call
// backward() on the scalar loss node, read gradients off the leaves.
// Only the op set needed by the training losses is provided.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "axe/numerics.hpp"

namespace axe::ad {

enum class Op {
    Leaf,          // parameter, receives gradient
    Const,         // input data, no gradient
    MatMul,        // A * B
    Transpose,     // A^T
    Add,           // A + B
    Sub,           // A - B
    Scale,         // scalar_ * A
    AddScalar,     // A + scalar_ (elementwise)
    Relu,          // max(0, A) elementwise
    Square,        // A ∘ A
    SumAll,        // 1x1 sum of entries
    FrobNorm,      // 1x1 Frobenius norm
    SoftmaxVec,    // softmax over a single row or column vector
    RowNormalize,  // each row divided by its L2 norm
    VecNormalize,  // whole matrix divided by its Frobenius norm
    ExpandScalar,  // broadcast a 1x1 to rows x cols
    SubIdentity,   // A - I (square A)
};

using NodeId = int;

class Tape {
  public:
    struct Node {
        Op op;
        int a{-1};
        int b{-1};
        double scalar{0.0};
        bool requires_grad{false};
        Matrix val;
        Matrix grad;  // allocated during backward for requires_grad nodes
    };

    int leaf(Matrix m) {
        Node n{Op::Leaf, -1, -1, 0.0, true, std::move(m), {}};
        return push(std::move(n));
    }

    int constant(Matrix m) {
        Node n{Op::Const, -1, -1, 0.0, false, std::move(m), {}};
        return push(std::move(n));
    }

    int matmul(int a, int b) {
        check(a);
        check(b);
        return push({Op::MatMul, a, b, 0.0, needs(a) || needs(b), axe::matmul(val(a), val(b)), {}});
    }

    int transpose(int a) {
        check(a);
        return push({Op::Transpose, a, -1, 0.0, needs(a), axe::transpose(val(a)), {}});
    }

    int add(int a, int b) {
        require_same_shape(a, b, "add");
        Matrix m = val(a);
        for (size_t i = 0; i < m.data.size(); ++i) m.data[i] += val(b).data[i];
        return push({Op::Add, a, b, 0.0, needs(a) || needs(b), std::move(m), {}});
    }

    int sub(int a, int b) {
        require_same_shape(a, b, "sub");
        Matrix m = val(a);
        for (size_t i = 0; i < m.data.size(); ++i) m.data[i] -= val(b).data[i];
        return push({Op::Sub, a, b, 0.0, needs(a) || needs(b), std::move(m), {}});
    }

    int scale(int a, double s) {
        check(a);
        Matrix m = val(a);
        for (double &x : m.data) x *= s;
        return push({Op::Scale, a, -1, s, needs(a), std::move(m), {}});
    }

    int add_scalar(int a, double s) {
        check(a);
        Matrix m = val(a);
        for (double &x : m.data) x += s;
        return push({Op::AddScalar, a, -1, s, needs(a), std::move(m), {}});
    }

    int relu(int a) {
        check(a);
        Matrix m = val(a);
        for (double &x : m.data) x = x > 0.0 ? x : 0.0;
        return push({Op::Relu, a, -1, 0.0, needs(a), std::move(m), {}});
    }

    int square(int a) {
        check(a);
        Matrix m = val(a);
        for (double &x : m.data) x *= x;
        return push({Op::Square, a, -1, 0.0, needs(a), std::move(m), {}});
    }

    int sum_all(int a) {
        check(a);
        double s = 0.0;
        for (double x : val(a).data) s += x;
        Matrix m(1, 1);
        m(0, 0) = s;
        return push({Op::SumAll, a, -1, 0.0, needs(a), std::move(m), {}});
    }

    int frob_norm(int a) {
        check(a);
        double s = 0.0;
        for (double x : val(a).data) s += x * x;
        Matrix m(1, 1);
        m(0, 0) = std::sqrt(s);
        return push({Op::FrobNorm, a, -1, 0.0, needs(a), std::move(m), {}});
    }

    int softmax_vec(int a) {
        check(a);
        const Matrix &v = val(a);
        if (v.rows != 1 && v.cols != 1) throw std::invalid_argument("softmax_vec: expects a vector");
        Vector out = axe::softmax(v.to_vector());
        Matrix m(v.rows, v.cols);
        std::copy(out.begin(), out.end(), m.data.begin());
        return push({Op::SoftmaxVec, a, -1, 0.0, needs(a), std::move(m), {}});
    }

    int row_normalize(int a) {
        check(a);
        Matrix m = val(a);
        for (int r = 0; r < m.rows; ++r) {
            const double n = norm2(m.row(r));
            if (n <= kNormEps) throw std::invalid_argument("row_normalize: zero-norm row");
            for (double &x : m.row(r)) x /= n;
        }
        return push({Op::RowNormalize, a, -1, 0.0, needs(a), std::move(m), {}});
    }

    int vec_normalize(int a) {
        check(a);
        Matrix m = val(a);
        const double n = norm2(std::span<const double>(m.data));
        if (n <= kNormEps) throw std::invalid_argument("vec_normalize: zero-norm input");
        for (double &x : m.data) x /= n;
        return push({Op::VecNormalize, a, -1, 0.0, needs(a), std::move(m), {}});
    }

    int expand_scalar(int a, int rows, int cols) {
        check(a);
        if (val(a).rows != 1 || val(a).cols != 1) throw std::invalid_argument("expand_scalar: expects a 1x1");
        Matrix m(rows, cols, val(a)(0, 0));
        return push({Op::ExpandScalar, a, -1, 0.0, needs(a), std::move(m), {}});
    }

    int sub_identity(int a) {
        check(a);
        const Matrix &v = val(a);
        if (v.rows != v.cols) throw std::invalid_argument("sub_identity: square matrix required");
        Matrix m = v;
        for (int i = 0; i < m.rows; ++i) m(i, i) -= 1.0;
        return push({Op::SubIdentity, a, -1, 0.0, needs(a), std::move(m), {}});
    }

    const Matrix &val(int id) const { return nodes_[id].val; }
    const Matrix &grad(int id) const { return nodes_[id].grad; }
    double scalar_val(int id) const { return nodes_[id].val(0, 0); }

    // Seeds d(loss)/d(loss) = 1 and accumulates gradients down the tape.
    void backward(int loss_id) {
        check(loss_id);
        Node &ln = nodes_[loss_id];
        if (ln.val.rows != 1 || ln.val.cols != 1) throw std::invalid_argument("backward: loss must be 1x1");
        for (Node &n : nodes_)
            if (n.requires_grad) n.grad = Matrix(n.val.rows, n.val.cols);
        if (!ln.requires_grad) return;  // loss does not depend on any leaf
        ln.grad(0, 0) = 1.0;
        for (int i = loss_id; i >= 0; --i) propagate(i);
    }

  private:
    std::vector<Node> nodes_;

    int push(Node n) {
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    void check(int id) const {
        if (id < 0 || id >= static_cast<int>(nodes_.size())) throw std::invalid_argument("tape: bad node id");
    }

    bool needs(int id) const { return nodes_[id].requires_grad; }

    void require_same_shape(int a, int b, const char *what) {
        check(a);
        check(b);
        if (!val(a).same_shape(val(b))) throw std::invalid_argument(std::string(what) + ": shape mismatch");
    }

    static void axpy(Matrix &dst, const Matrix &src, double c = 1.0) {
        for (size_t i = 0; i < dst.data.size(); ++i) dst.data[i] += c * src.data[i];
    }

    void propagate(int id) {
        Node &n = nodes_[id];
        if (!n.requires_grad || n.grad.data.empty()) return;
        const Matrix &g = n.grad;
        switch (n.op) {
            case Op::Leaf:
            case Op::Const:
                break;
            case Op::MatMul: {
                if (needs(n.a)) axpy(nodes_[n.a].grad, axe::matmul(g, axe::transpose(val(n.b))));
                if (needs(n.b)) axpy(nodes_[n.b].grad, axe::matmul(axe::transpose(val(n.a)), g));
                break;
            }
            case Op::Transpose:
                if (needs(n.a)) axpy(nodes_[n.a].grad, axe::transpose(g));
                break;
            case Op::Add:
                if (needs(n.a)) axpy(nodes_[n.a].grad, g);
                if (needs(n.b)) axpy(nodes_[n.b].grad, g);
                break;
            case Op::Sub:
                if (needs(n.a)) axpy(nodes_[n.a].grad, g);
                if (needs(n.b)) axpy(nodes_[n.b].grad, g, -1.0);
                break;
            case Op::Scale:
                if (needs(n.a)) axpy(nodes_[n.a].grad, g, n.scalar);
                break;
            case Op::AddScalar:
            case Op::SubIdentity:
                if (needs(n.a)) axpy(nodes_[n.a].grad, g);
                break;
            case Op::Relu: {
                if (!needs(n.a)) break;
                Matrix &ga = nodes_[n.a].grad;
                const Matrix &x = val(n.a);
                for (size_t i = 0; i < ga.data.size(); ++i)
                    if (x.data[i] > 0.0) ga.data[i] += g.data[i];
                break;
            }
            case Op::Square: {
                if (!needs(n.a)) break;
                Matrix &ga = nodes_[n.a].grad;
                const Matrix &x = val(n.a);
                for (size_t i = 0; i < ga.data.size(); ++i) ga.data[i] += 2.0 * x.data[i] * g.data[i];
                break;
            }
            case Op::SumAll: {
                if (!needs(n.a)) break;
                Matrix &ga = nodes_[n.a].grad;
                const double gs = g(0, 0);
                for (double &x : ga.data) x += gs;
                break;
            }
            case Op::FrobNorm: {
                if (!needs(n.a)) break;
                const double nv = n.val(0, 0);
                if (nv <= kNormEps) break;  // not differentiable at 0
                Matrix &ga = nodes_[n.a].grad;
                const Matrix &x = val(n.a);
                const double gs = g(0, 0) / nv;
                for (size_t i = 0; i < ga.data.size(); ++i) ga.data[i] += gs * x.data[i];
                break;
            }
            case Op::SoftmaxVec: {
                if (!needs(n.a)) break;
                Matrix &ga = nodes_[n.a].grad;
                const Matrix &s = n.val;
                double gd = 0.0;
                for (size_t i = 0; i < s.data.size(); ++i) gd += g.data[i] * s.data[i];
                for (size_t i = 0; i < s.data.size(); ++i) ga.data[i] += s.data[i] * (g.data[i] - gd);
                break;
            }
            case Op::RowNormalize: {
                if (!needs(n.a)) break;
                Matrix &ga = nodes_[n.a].grad;
                const Matrix &x = val(n.a);
                const Matrix &u = n.val;
                for (int r = 0; r < x.rows; ++r) {
                    const double nv = norm2(x.row(r));
                    double gu = 0.0;
                    for (int c = 0; c < x.cols; ++c) gu += g(r, c) * u(r, c);
                    for (int c = 0; c < x.cols; ++c) ga(r, c) += (g(r, c) - u(r, c) * gu) / nv;
                }
                break;
            }
            case Op::VecNormalize: {
                if (!needs(n.a)) break;
                Matrix &ga = nodes_[n.a].grad;
                const Matrix &x = val(n.a);
                const Matrix &u = n.val;
                const double nv = norm2(std::span<const double>(x.data));
                double gu = 0.0;
                for (size_t i = 0; i < x.data.size(); ++i) gu += g.data[i] * u.data[i];
                for (size_t i = 0; i < x.data.size(); ++i) ga.data[i] += (g.data[i] - u.data[i] * gu) / nv;
                break;
            }
            case Op::ExpandScalar: {
                if (!needs(n.a)) break;
                double s = 0.0;
                for (double x : g.data) s += x;
                nodes_[n.a].grad(0, 0) += s;
                break;
            }
        }
    }
};

}  // namespace axe::ad
