#pragma once

// Reverse-mode differentiable dense tensors on top of Eigen.
//
// Every tensor is a 2-D matrix (rows x cols); sequences are stored one
// position per row. Operations build a graph of shared nodes; calling
// backward() on a 1x1 result walks the graph in reverse topological order and
// accumulates gradients into every node that requires them.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace corank {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

class shape_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline thread_local bool grad_enabled = true;
inline thread_local std::uint64_t* flop_sink = nullptr;

inline void count_flops(std::uint64_t n)
{
    if (flop_sink != nullptr) {
        *flop_sink += n;
    }
}

template <typename Scalar>
struct Node {
    Matrix<Scalar> value;
    Matrix<Scalar> grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward;

    template <typename Derived>
    void accumulate(const Eigen::MatrixBase<Derived>& g)
    {
        if (grad.size() == 0) {
            grad = g;
        } else {
            grad += g;
        }
    }

    // Gradient buffer as seen by parents; zero when nothing flowed back.
    Matrix<Scalar> grad_or_zero() const
    {
        if (grad.size() == 0) {
            return Matrix<Scalar>::Zero(value.rows(), value.cols());
        }
        return grad;
    }
};

}  // namespace detail

/// Disables graph construction on this thread for its lifetime.
class NoGradGuard {
  public:
    NoGradGuard() : previous_(detail::grad_enabled) { detail::grad_enabled = false; }
    ~NoGradGuard() { detail::grad_enabled = previous_; }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

  private:
    bool previous_;
};

/// Counts matrix-product FLOPs (2mkn per product) executed on this thread.
class FlopCounter {
  public:
    FlopCounter() : previous_(detail::flop_sink) { detail::flop_sink = &count_; }
    ~FlopCounter() { detail::flop_sink = previous_; }
    FlopCounter(const FlopCounter&) = delete;
    FlopCounter& operator=(const FlopCounter&) = delete;

    [[nodiscard]] std::uint64_t count() const { return count_; }

  private:
    std::uint64_t count_ = 0;
    std::uint64_t* previous_;
};

template <typename Scalar>
class BasicTensor {
  public:
    using scalar_type = Scalar;
    using node_type = detail::Node<Scalar>;

    BasicTensor() : node_(std::make_shared<node_type>()) {}

    explicit BasicTensor(Matrix<Scalar> value, bool requires_grad = false)
        : node_(std::make_shared<node_type>())
    {
        node_->value = std::move(value);
        node_->requires_grad = requires_grad;
    }

    static BasicTensor scalar(Scalar v)
    {
        Matrix<Scalar> m(1, 1);
        m(0, 0) = v;
        return BasicTensor(std::move(m));
    }

    static BasicTensor row(const std::vector<Scalar>& values)
    {
        Matrix<Scalar> m(1, static_cast<Index>(values.size()));
        for (std::size_t i = 0; i < values.size(); ++i) {
            m(0, static_cast<Index>(i)) = values[i];
        }
        return BasicTensor(std::move(m));
    }

    // Builds an interior node; gradients are tracked only if some parent needs them.
    static BasicTensor from_op(
        Matrix<Scalar> value,
        std::vector<BasicTensor> parents,
        std::function<void(node_type&)> backward)
    {
        BasicTensor out(std::move(value));
        if (!detail::grad_enabled) {
            return out;
        }
        bool needs = false;
        for (auto const& p : parents) {
            needs = needs || p.requires_grad();
        }
        if (needs) {
            out.node_->requires_grad = true;
            out.node_->parents.reserve(parents.size());
            for (auto& p : parents) {
                out.node_->parents.push_back(p.node_);
            }
            out.node_->backward = std::move(backward);
        }
        return out;
    }

    [[nodiscard]] Index rows() const { return node_->value.rows(); }
    [[nodiscard]] Index cols() const { return node_->value.cols(); }
    [[nodiscard]] Index size() const { return node_->value.size(); }
    [[nodiscard]] std::vector<Index> shape() const { return {rows(), cols()}; }

    [[nodiscard]] const Matrix<Scalar>& value() const { return node_->value; }
    [[nodiscard]] Matrix<Scalar>& mutable_value() { return node_->value; }
    [[nodiscard]] Scalar item() const
    {
        if (size() != 1) {
            throw shape_error("item() requires a 1x1 tensor");
        }
        return node_->value(0, 0);
    }

    [[nodiscard]] bool requires_grad() const { return node_->requires_grad; }
    [[nodiscard]] bool has_grad() const { return node_->grad.size() != 0; }
    [[nodiscard]] Matrix<Scalar> grad() const { return node_->grad_or_zero(); }
    void zero_grad() { node_->grad.resize(0, 0); }

    [[nodiscard]] node_type& node() const { return *node_; }
    [[nodiscard]] const std::shared_ptr<node_type>& node_ptr() const { return node_; }

    /// Reverse pass from this scalar. Leaf gradients accumulate across calls.
    void backward() const
    {
        if (size() != 1) {
            throw shape_error("backward() requires a scalar (1x1) loss");
        }
        if (!requires_grad()) {
            return;
        }
        std::vector<node_type*> order;
        std::unordered_set<node_type*> seen;
        std::vector<std::pair<node_type*, std::size_t>> stack{{node_.get(), 0}};
        seen.insert(node_.get());
        while (!stack.empty()) {
            auto& [n, next] = stack.back();
            if (next < n->parents.size()) {
                node_type* p = n->parents[next++].get();
                if (p->requires_grad && seen.insert(p).second) {
                    stack.emplace_back(p, 0);
                }
            } else {
                order.push_back(n);
                stack.pop_back();
            }
        }
        node_->accumulate(Matrix<Scalar>::Ones(1, 1));
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            node_type* n = *it;
            if (n->backward && n->grad.size() != 0) {
                n->backward(*n);
                n->grad.resize(0, 0);
            }
        }
    }

  private:
    std::shared_ptr<node_type> node_;
};

using Tensor = BasicTensor<double>;
using TensorF = BasicTensor<float>;

namespace detail {

template <typename Scalar>
void require_same_shape(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b, const char* op)
{
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw shape_error(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) + "x"
                          + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x"
                          + std::to_string(b.cols()) + ")");
    }
}

template <typename Scalar>
void require_finite(const Matrix<Scalar>& m)
{
    if (!m.allFinite()) {
        throw std::domain_error("non-finite input");
    }
}

}  // namespace detail

template <typename Scalar>
BasicTensor<Scalar> matmul(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b)
{
    if (a.cols() != b.rows()) {
        throw shape_error("matmul: inner dimensions differ");
    }
    detail::count_flops(2ULL * a.rows() * a.cols() * b.cols());
    return BasicTensor<Scalar>::from_op(a.value() * b.value(), {a, b}, [](auto& n) {
        auto& pa = *n.parents[0];
        auto& pb = *n.parents[1];
        if (pa.requires_grad) {
            pa.accumulate(n.grad * pb.value.transpose());
        }
        if (pb.requires_grad) {
            pb.accumulate(pa.value.transpose() * n.grad);
        }
    });
}

template <typename Scalar>
BasicTensor<Scalar> transpose(const BasicTensor<Scalar>& a)
{
    Matrix<Scalar> v = a.value().transpose();
    return BasicTensor<Scalar>::from_op(std::move(v), {a}, [](auto& n) {
        n.parents[0]->accumulate(n.grad.transpose());
    });
}

template <typename Scalar>
BasicTensor<Scalar> add(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b)
{
    detail::require_same_shape(a, b, "add");
    return BasicTensor<Scalar>::from_op(a.value() + b.value(), {a, b}, [](auto& n) {
        for (auto& p : n.parents) {
            if (p->requires_grad) {
                p->accumulate(n.grad);
            }
        }
    });
}

template <typename Scalar>
BasicTensor<Scalar> sub(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b)
{
    detail::require_same_shape(a, b, "sub");
    return BasicTensor<Scalar>::from_op(a.value() - b.value(), {a, b}, [](auto& n) {
        if (n.parents[0]->requires_grad) {
            n.parents[0]->accumulate(n.grad);
        }
        if (n.parents[1]->requires_grad) {
            n.parents[1]->accumulate(-n.grad);
        }
    });
}

/// Elementwise product.
template <typename Scalar>
BasicTensor<Scalar> mul(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b)
{
    detail::require_same_shape(a, b, "mul");
    Matrix<Scalar> v = a.value().cwiseProduct(b.value());
    return BasicTensor<Scalar>::from_op(std::move(v), {a, b}, [](auto& n) {
        auto& pa = *n.parents[0];
        auto& pb = *n.parents[1];
        if (pa.requires_grad) {
            pa.accumulate(n.grad.cwiseProduct(pb.value));
        }
        if (pb.requires_grad) {
            pb.accumulate(n.grad.cwiseProduct(pa.value));
        }
    });
}

template <typename Scalar>
BasicTensor<Scalar> scale(const BasicTensor<Scalar>& a, Scalar s)
{
    return BasicTensor<Scalar>::from_op(a.value() * s, {a}, [s](auto& n) {
        n.parents[0]->accumulate(n.grad * s);
    });
}

template <typename Scalar>
BasicTensor<Scalar> add_scalar(const BasicTensor<Scalar>& a, Scalar s)
{
    Matrix<Scalar> v = a.value().array() + s;
    return BasicTensor<Scalar>::from_op(std::move(v), {a}, [](auto& n) {
        n.parents[0]->accumulate(n.grad);
    });
}

/// a (r x c) + broadcast of row (1 x c) over every row of a.
template <typename Scalar>
BasicTensor<Scalar> add_row(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& row)
{
    if (row.rows() != 1 || row.cols() != a.cols()) {
        throw shape_error("add_row: bias must be 1 x cols");
    }
    Matrix<Scalar> v = a.value().rowwise() + row.value().row(0);
    return BasicTensor<Scalar>::from_op(std::move(v), {a, row}, [](auto& n) {
        if (n.parents[0]->requires_grad) {
            n.parents[0]->accumulate(n.grad);
        }
        if (n.parents[1]->requires_grad) {
            n.parents[1]->accumulate(n.grad.colwise().sum());
        }
    });
}

/// x W + b with W (in x out) and b (1 x out).
template <typename Scalar>
BasicTensor<Scalar> linear(
    const BasicTensor<Scalar>& x, const BasicTensor<Scalar>& weight, const BasicTensor<Scalar>& bias)
{
    return add_row(matmul(x, weight), bias);
}

template <typename Scalar>
BasicTensor<Scalar> sum(const BasicTensor<Scalar>& a)
{
    Matrix<Scalar> v(1, 1);
    v(0, 0) = a.value().sum();
    return BasicTensor<Scalar>::from_op(std::move(v), {a}, [](auto& n) {
        auto& p = *n.parents[0];
        p.accumulate(Matrix<Scalar>::Constant(p.value.rows(), p.value.cols(), n.grad(0, 0)));
    });
}

template <typename Scalar>
BasicTensor<Scalar> log(const BasicTensor<Scalar>& a)
{
    Matrix<Scalar> v = a.value().array().log();
    return BasicTensor<Scalar>::from_op(std::move(v), {a}, [](auto& n) {
        auto& p = *n.parents[0];
        p.accumulate((n.grad.array() / p.value.array()).matrix());
    });
}

template <typename Scalar>
BasicTensor<Scalar> sigmoid(const BasicTensor<Scalar>& a)
{
    Matrix<Scalar> v = a.value().unaryExpr([](Scalar x) {
        // Split by sign so exp() never overflows.
        if (x >= 0) {
            return Scalar(1) / (Scalar(1) + std::exp(-x));
        }
        Scalar e = std::exp(x);
        return e / (Scalar(1) + e);
    });
    return BasicTensor<Scalar>::from_op(v, {a}, [](auto& n) {
        Matrix<Scalar> d = n.value.array() * (Scalar(1) - n.value.array());
        n.parents[0]->accumulate(n.grad.cwiseProduct(d));
    });
}

/// Clamps into [lo, hi]; the gradient is zero where clamping is active.
template <typename Scalar>
BasicTensor<Scalar> clamp(const BasicTensor<Scalar>& a, Scalar lo, Scalar hi)
{
    Matrix<Scalar> v = a.value().cwiseMax(lo).cwiseMin(hi);
    return BasicTensor<Scalar>::from_op(v, {a}, [lo, hi](auto& n) {
        auto& p = *n.parents[0];
        Matrix<Scalar> pass = p.value.unaryExpr(
            [lo, hi](Scalar x) { return (x >= lo && x <= hi) ? Scalar(1) : Scalar(0); });
        p.accumulate(n.grad.cwiseProduct(pass));
    });
}

/// Exact GELU: x * Phi(x), Phi the standard normal CDF.
template <typename Scalar>
BasicTensor<Scalar> gelu(const BasicTensor<Scalar>& a)
{
    const Scalar inv_sqrt2 = Scalar(0.70710678118654752440);
    Matrix<Scalar> v = a.value().unaryExpr(
        [inv_sqrt2](Scalar x) { return Scalar(0.5) * x * (Scalar(1) + std::erf(x * inv_sqrt2)); });
    return BasicTensor<Scalar>::from_op(std::move(v), {a}, [inv_sqrt2](auto& n) {
        auto& p = *n.parents[0];
        const Scalar inv_sqrt_2pi = Scalar(0.39894228040143267794);
        Matrix<Scalar> d = p.value.unaryExpr([&](Scalar x) {
            Scalar cdf = Scalar(0.5) * (Scalar(1) + std::erf(x * inv_sqrt2));
            Scalar pdf = inv_sqrt_2pi * std::exp(Scalar(-0.5) * x * x);
            return cdf + x * pdf;
        });
        p.accumulate(n.grad.cwiseProduct(d));
    });
}

namespace detail {

// Row softmax over the columns whose mask entry is true; masked columns get 0.
template <typename Scalar, typename Derived>
void masked_softmax_row(Eigen::MatrixBase<Derived> const& logits, const std::vector<bool>* mask,
                        Index offset, Eigen::Ref<Vector<Scalar>> out)
{
    const Index n = logits.size();
    auto keep = [&](Index i) {
        return mask == nullptr || (*mask)[static_cast<std::size_t>(offset + i)];
    };
    Scalar max = -std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i < n; ++i) {
        if (keep(i)) {
            max = std::max(max, logits(i));
        }
    }
    Scalar total = 0;
    for (Index i = 0; i < n; ++i) {
        if (keep(i)) {
            out(i) = std::exp(logits(i) - max);
            total += out(i);
        } else {
            out(i) = 0;
        }
    }
    if (total > 0) {
        out /= total;
    }
}

}  // namespace detail

/// Numerically stable softmax of every row; max-subtracted.
template <typename Scalar>
BasicTensor<Scalar> softmax_rows(const BasicTensor<Scalar>& a)
{
    detail::require_finite(a.value());
    Matrix<Scalar> v(a.rows(), a.cols());
    Vector<Scalar> buf(a.cols());
    for (Index r = 0; r < a.rows(); ++r) {
        detail::masked_softmax_row<Scalar>(a.value().row(r).transpose(), nullptr, 0, buf);
        v.row(r) = buf.transpose();
    }
    return BasicTensor<Scalar>::from_op(v, {a}, [](auto& n) {
        const auto& y = n.value;
        Vector<Scalar> dot = (n.grad.cwiseProduct(y)).rowwise().sum();
        Matrix<Scalar> g = y.cwiseProduct(n.grad.colwise() - dot);
        n.parents[0]->accumulate(g);
    });
}

/// Softmax of a single vector, returned as a plain Eigen vector.
template <typename Scalar>
Vector<Scalar> softmax(const Vector<Scalar>& v)
{
    if (v.size() == 0) {
        throw std::invalid_argument("softmax: empty input");
    }
    detail::require_finite(Matrix<Scalar>(v.transpose()));
    Vector<Scalar> out(v.size());
    detail::masked_softmax_row<Scalar>(v, nullptr, 0, out);
    return out;
}

/// Row-wise layer normalization with population variance.
template <typename Scalar>
BasicTensor<Scalar> layer_norm_rows(
    const BasicTensor<Scalar>& x, const BasicTensor<Scalar>& gamma, const BasicTensor<Scalar>& beta,
    Scalar eps = Scalar(1e-12))
{
    const Index h = x.cols();
    if (gamma.rows() != 1 || gamma.cols() != h || beta.rows() != 1 || beta.cols() != h) {
        throw shape_error("layer_norm: gamma/beta must be 1 x H");
    }
    Matrix<Scalar> xhat(x.rows(), h);
    Vector<Scalar> inv_std(x.rows());
    for (Index r = 0; r < x.rows(); ++r) {
        auto row = x.value().row(r);
        Scalar mean = row.mean();
        Scalar var = (row.array() - mean).square().sum() / Scalar(h);
        inv_std(r) = Scalar(1) / std::sqrt(var + eps);
        xhat.row(r) = (row.array() - mean) * inv_std(r);
    }
    Matrix<Scalar> out = (xhat.array().rowwise() * gamma.value().row(0).array()).rowwise()
                         + beta.value().row(0).array();
    return BasicTensor<Scalar>::from_op(
        std::move(out), {x, gamma, beta},
        [xhat = std::move(xhat), inv_std = std::move(inv_std), h](auto& n) {
            auto& px = *n.parents[0];
            auto& pg = *n.parents[1];
            auto& pb = *n.parents[2];
            if (pb.requires_grad) {
                pb.accumulate(n.grad.colwise().sum());
            }
            if (pg.requires_grad) {
                pg.accumulate(n.grad.cwiseProduct(xhat).colwise().sum());
            }
            if (px.requires_grad) {
                Matrix<Scalar> dxhat = n.grad.array().rowwise() * pg.value.row(0).array();
                Matrix<Scalar> dx(dxhat.rows(), h);
                for (Index r = 0; r < dxhat.rows(); ++r) {
                    Scalar m1 = dxhat.row(r).mean();
                    Scalar m2 = dxhat.row(r).cwiseProduct(xhat.row(r)).mean();
                    dx.row(r) = inv_std(r)
                                * (dxhat.row(r).array() - m1 - xhat.row(r).array() * m2);
                }
                px.accumulate(dx);
            }
        });
}

/// Multi-head scaled dot-product attention over independent blocks.
///
/// q, k, v are (blocks * block_len) x H. Rows [b*block_len, (b+1)*block_len)
/// form block b and attend only within that block. Columns are split into
/// `heads` contiguous slices of H/heads. Keys whose key_mask entry is false
/// receive zero attention weight.
template <typename Scalar>
BasicTensor<Scalar> attention(
    const BasicTensor<Scalar>& q, const BasicTensor<Scalar>& k, const BasicTensor<Scalar>& v,
    Index block_len, Index heads, const std::vector<bool>& key_mask)
{
    detail::require_same_shape(q, k, "attention");
    detail::require_same_shape(q, v, "attention");
    const Index total = q.rows();
    const Index hidden = q.cols();
    if (block_len <= 0 || total % block_len != 0) {
        throw shape_error("attention: rows must be a multiple of block length");
    }
    if (heads <= 0 || hidden % heads != 0) {
        throw shape_error("attention: hidden size must be divisible by heads");
    }
    if (static_cast<Index>(key_mask.size()) != total) {
        throw shape_error("attention: mask length must equal row count");
    }
    const Index blocks = total / block_len;
    const Index dh = hidden / heads;
    const Scalar scale = Scalar(1) / std::sqrt(Scalar(dh));
    detail::count_flops(4ULL * blocks * heads * block_len * block_len * dh);

    // Probabilities per (block, head), block_len x block_len each.
    std::vector<Matrix<Scalar>> probs(static_cast<std::size_t>(blocks * heads));
    Matrix<Scalar> out(total, hidden);
    Vector<Scalar> buf(block_len);
    for (Index b = 0; b < blocks; ++b) {
        const Index r0 = b * block_len;
        for (Index h = 0; h < heads; ++h) {
            auto qh = q.value().block(r0, h * dh, block_len, dh);
            auto kh = k.value().block(r0, h * dh, block_len, dh);
            auto vh = v.value().block(r0, h * dh, block_len, dh);
            Matrix<Scalar> s = (qh * kh.transpose()) * scale;
            Matrix<Scalar>& p = probs[static_cast<std::size_t>(b * heads + h)];
            p.resize(block_len, block_len);
            for (Index r = 0; r < block_len; ++r) {
                detail::masked_softmax_row<Scalar>(s.row(r).transpose(), &key_mask, r0, buf);
                p.row(r) = buf.transpose();
            }
            out.block(r0, h * dh, block_len, dh) = p * vh;
        }
    }
    return BasicTensor<Scalar>::from_op(
        std::move(out), {q, k, v},
        [probs = std::move(probs), blocks, heads, block_len, dh, scale](auto& n) {
            auto& pq = *n.parents[0];
            auto& pk = *n.parents[1];
            auto& pv = *n.parents[2];
            Matrix<Scalar> dq = Matrix<Scalar>::Zero(pq.value.rows(), pq.value.cols());
            Matrix<Scalar> dk = dq;
            Matrix<Scalar> dv = dq;
            for (Index b = 0; b < blocks; ++b) {
                const Index r0 = b * block_len;
                for (Index h = 0; h < heads; ++h) {
                    const Matrix<Scalar>& p = probs[static_cast<std::size_t>(b * heads + h)];
                    auto go = n.grad.block(r0, h * dh, block_len, dh);
                    auto qh = pq.value.block(r0, h * dh, block_len, dh);
                    auto kh = pk.value.block(r0, h * dh, block_len, dh);
                    auto vh = pv.value.block(r0, h * dh, block_len, dh);
                    dv.block(r0, h * dh, block_len, dh) = p.transpose() * go;
                    Matrix<Scalar> dp = go * vh.transpose();
                    Vector<Scalar> dot = dp.cwiseProduct(p).rowwise().sum();
                    Matrix<Scalar> ds = p.cwiseProduct(dp.colwise() - dot) * scale;
                    dq.block(r0, h * dh, block_len, dh) = ds * kh;
                    dk.block(r0, h * dh, block_len, dh) = ds.transpose() * qh;
                }
            }
            if (pq.requires_grad) {
                pq.accumulate(dq);
            }
            if (pk.requires_grad) {
                pk.accumulate(dk);
            }
            if (pv.requires_grad) {
                pv.accumulate(dv);
            }
        });
}

/// Rows of `table` selected by `ids` (embedding lookup; ids may repeat).
template <typename Scalar>
BasicTensor<Scalar> take_rows(const BasicTensor<Scalar>& table, const std::vector<Index>& ids)
{
    Matrix<Scalar> out(static_cast<Index>(ids.size()), table.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || ids[i] >= table.rows()) {
            throw std::out_of_range("take_rows: index " + std::to_string(ids[i]) + " out of range");
        }
        out.row(static_cast<Index>(i)) = table.value().row(ids[i]);
    }
    return BasicTensor<Scalar>::from_op(std::move(out), {table}, [ids](auto& n) {
        auto& p = *n.parents[0];
        Matrix<Scalar> g = Matrix<Scalar>::Zero(p.value.rows(), p.value.cols());
        for (std::size_t i = 0; i < ids.size(); ++i) {
            g.row(ids[i]) += n.grad.row(static_cast<Index>(i));
        }
        p.accumulate(g);
    });
}

template <typename Scalar>
BasicTensor<Scalar> slice_rows(const BasicTensor<Scalar>& a, Index begin, Index count)
{
    if (begin < 0 || count < 0 || begin + count > a.rows()) {
        throw std::out_of_range("slice_rows: range outside tensor");
    }
    Matrix<Scalar> v = a.value().middleRows(begin, count);
    return BasicTensor<Scalar>::from_op(std::move(v), {a}, [begin, count](auto& n) {
        auto& p = *n.parents[0];
        Matrix<Scalar> g = Matrix<Scalar>::Zero(p.value.rows(), p.value.cols());
        g.middleRows(begin, count) = n.grad;
        p.accumulate(g);
    });
}

template <typename Scalar>
BasicTensor<Scalar> concat_rows(const std::vector<BasicTensor<Scalar>>& parts)
{
    if (parts.empty()) {
        throw shape_error("concat_rows: nothing to concatenate");
    }
    Index rows = 0;
    const Index cols = parts.front().cols();
    for (auto const& p : parts) {
        if (p.cols() != cols) {
            throw shape_error("concat_rows: column counts differ");
        }
        rows += p.rows();
    }
    Matrix<Scalar> v(rows, cols);
    Index at = 0;
    for (auto const& p : parts) {
        v.middleRows(at, p.rows()) = p.value();
        at += p.rows();
    }
    return BasicTensor<Scalar>::from_op(std::move(v), parts, [](auto& n) {
        Index at = 0;
        for (auto& p : n.parents) {
            const Index r = p->value.rows();
            if (p->requires_grad) {
                p->accumulate(n.grad.middleRows(at, r));
            }
            at += r;
        }
    });
}

/// Zeroes the rows whose mask entry is false.
template <typename Scalar>
BasicTensor<Scalar> mask_rows(const BasicTensor<Scalar>& a, const std::vector<bool>& mask)
{
    if (static_cast<Index>(mask.size()) != a.rows()) {
        throw shape_error("mask_rows: mask length must equal row count");
    }
    Vector<Scalar> keep(a.rows());
    for (Index r = 0; r < a.rows(); ++r) {
        keep(r) = mask[static_cast<std::size_t>(r)] ? Scalar(1) : Scalar(0);
    }
    Matrix<Scalar> v = a.value().array().colwise() * keep.array();
    return BasicTensor<Scalar>::from_op(std::move(v), {a}, [keep](auto& n) {
        Matrix<Scalar> g = n.grad.array().colwise() * keep.array();
        n.parents[0]->accumulate(g);
    });
}

/// out_j = sum_i w_i * x_{j*m + i}, with x (n*m) x H and w m x 1.
template <typename Scalar>
BasicTensor<Scalar> weighted_block_sum(const BasicTensor<Scalar>& x, const BasicTensor<Scalar>& w)
{
    const Index m = w.rows();
    if (w.cols() != 1 || m == 0 || x.rows() % m != 0) {
        throw shape_error("weighted_block_sum: x rows must be a multiple of the weight count");
    }
    const Index n = x.rows() / m;
    Matrix<Scalar> out = Matrix<Scalar>::Zero(n, x.cols());
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < m; ++i) {
            out.row(j) += w.value()(i, 0) * x.value().row(j * m + i);
        }
    }
    return BasicTensor<Scalar>::from_op(std::move(out), {x, w}, [m, n](auto& node) {
        auto& px = *node.parents[0];
        auto& pw = *node.parents[1];
        if (px.requires_grad) {
            Matrix<Scalar> g(px.value.rows(), px.value.cols());
            for (Index j = 0; j < n; ++j) {
                for (Index i = 0; i < m; ++i) {
                    g.row(j * m + i) = pw.value(i, 0) * node.grad.row(j);
                }
            }
            px.accumulate(g);
        }
        if (pw.requires_grad) {
            Matrix<Scalar> g = Matrix<Scalar>::Zero(m, 1);
            for (Index j = 0; j < n; ++j) {
                for (Index i = 0; i < m; ++i) {
                    g(i, 0) += node.grad.row(j).dot(px.value.row(j * m + i));
                }
            }
            pw.accumulate(g);
        }
    });
}

}  // namespace corank
