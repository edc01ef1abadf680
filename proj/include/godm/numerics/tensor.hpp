#pragma once

// Dense row-major tensors with reverse-mode differentiation.
//
// A Tensor is a reference-counted handle to a node of the computation graph:
// copying a Tensor aliases the same buffer, clone() makes an independent leaf.
// Operations on tensors that require gradients record their backward closure
// on the result; backward() walks that graph once and then releases it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "godm/error.hpp"

namespace godm {

using Shape = std::vector<std::size_t>;

/// Lower/upper bound applied to probabilities before any logarithm.
inline constexpr double kProbClamp = 1e-12;

namespace detail {

struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;  // empty until the first accumulation
    bool requires_grad = false;
    bool leaf = true;
    bool consumed = false;
    std::string name;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward;
};

inline thread_local bool grad_mode_enabled = true;

inline std::size_t product(const Shape& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
    os << ']';
    return os.str();
}

inline std::vector<double>& grad_of(Node& n) {
    if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
    return n.grad;
}

}  // namespace detail

/// Disables graph recording on the current thread for its lifetime.
class NoGradGuard {
public:
    NoGradGuard() : previous_(detail::grad_mode_enabled) { detail::grad_mode_enabled = false; }
    ~NoGradGuard() { detail::grad_mode_enabled = previous_; }
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool previous_;
};

class Tensor {
public:
    Tensor() : node_(std::make_shared<detail::Node>()) { node_->shape = {0, 0}; }

    static Tensor from(Shape shape, std::vector<double> values) {
        if (detail::product(shape) != values.size()) {
            throw ShapeError("tensor: shape " + detail::shape_str(shape) + " needs " +
                             std::to_string(detail::product(shape)) + " values, got " +
                             std::to_string(values.size()));
        }
        Tensor t;
        t.node_->shape = std::move(shape);
        t.node_->value = std::move(values);
        return t;
    }
    static Tensor zeros(Shape shape) {
        const auto n = detail::product(shape);
        return from(std::move(shape), std::vector<double>(n, 0.0));
    }
    static Tensor full(Shape shape, double v) {
        const auto n = detail::product(shape);
        return from(std::move(shape), std::vector<double>(n, v));
    }
    static Tensor scalar(double v) { return from({1, 1}, {v}); }

    /// A named leaf that accumulates gradients.
    static Tensor parameter(Shape shape, std::vector<double> values, std::string name) {
        Tensor t = from(std::move(shape), std::move(values));
        t.node_->requires_grad = true;
        t.node_->name = std::move(name);
        return t;
    }

    const Shape& shape() const noexcept { return node_->shape; }
    std::size_t rank() const noexcept { return node_->shape.size(); }
    std::size_t numel() const noexcept { return node_->value.size(); }
    std::size_t rows() const { return rank() >= 1 ? node_->shape[0] : 1; }
    std::size_t cols() const { return rank() >= 2 ? node_->shape[1] : 1; }
    bool empty() const noexcept { return node_->value.empty(); }

    std::span<const double> data() const noexcept { return node_->value; }
    /// In-place write access; used by optimizers and initializers on leaves.
    std::span<double> mutable_data() noexcept { return node_->value; }
    const std::vector<double>& values() const noexcept { return node_->value; }

    double at(std::size_t i, std::size_t j) const { return node_->value[i * cols() + j]; }
    double item() const {
        if (numel() != 1) throw ShapeError("item: tensor " + detail::shape_str(shape()) + " is not scalar");
        return node_->value[0];
    }

    bool requires_grad() const noexcept { return node_->requires_grad; }
    bool is_leaf() const noexcept { return node_->leaf; }
    bool has_grad() const noexcept { return !node_->grad.empty(); }
    std::span<const double> grad() const noexcept { return node_->grad; }
    void zero_grad() { node_->grad.clear(); }
    const std::string& name() const noexcept { return node_->name; }

    /// Same values, no gradient tracking, independent buffer.
    Tensor detach() const { return from(shape(), node_->value); }
    /// Independent copy that keeps leaf/parameter status.
    Tensor clone() const {
        Tensor t = from(shape(), node_->value);
        t.node_->requires_grad = node_->requires_grad && node_->leaf;
        t.node_->name = node_->name;
        return t;
    }

    bool same_node(const Tensor& o) const noexcept { return node_ == o.node_; }

    // Graph construction hook used by the op implementations below.
    static Tensor make_result(Shape shape, std::vector<double> value,
                              std::vector<Tensor> inputs, std::function<void(detail::Node&)> bw) {
        Tensor out = from(std::move(shape), std::move(value));
        if (!detail::grad_mode_enabled) return out;
        bool track = false;
        for (const auto& in : inputs) track = track || in.node_->requires_grad;
        if (!track) return out;
        out.node_->requires_grad = true;
        out.node_->leaf = false;
        for (auto& in : inputs) out.node_->parents.push_back(in.node_);
        out.node_->backward = std::move(bw);
        return out;
    }

    friend void backward(const Tensor& loss);

private:
    std::shared_ptr<detail::Node> node_;
};

/// Reverse pass from a scalar loss. Leaf gradients accumulate; the recorded
/// graph is released afterwards, so a second call on the same loss throws.
inline void backward(const Tensor& loss) {
    auto* root = loss.node_.get();
    if (loss.numel() != 1) {
        throw ShapeError("backward: loss must be scalar, got " + detail::shape_str(loss.shape()));
    }
    if (root->consumed) throw Error("backward: graph already consumed; run a new forward pass");
    if (!root->requires_grad) throw Error("backward: loss does not depend on any tracked tensor");

    std::vector<detail::Node*> order;
    std::unordered_set<detail::Node*> seen;
    std::vector<std::pair<detail::Node*, std::size_t>> stack{{root, 0}};
    seen.insert(root);
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            detail::Node* p = node->parents[next++].get();
            if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }

    detail::grad_of(*root)[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        detail::Node* n = *it;
        if (n->backward && !n->grad.empty()) n->backward(*n);
    }
    for (detail::Node* n : order) {
        if (n->leaf) continue;
        n->backward = nullptr;
        n->parents.clear();
        n->grad.clear();
        n->grad.shrink_to_fit();
        n->consumed = true;
    }
}

namespace ops {

namespace detail_ops {

inline void require_rank2(const char* op, const Tensor& t) {
    if (t.rank() != 2) {
        throw ShapeError(std::string(op) + ": expected a matrix, got " + detail::shape_str(t.shape()));
    }
}

inline void require_same(const char* op, const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + detail::shape_str(a.shape()) + " vs " +
                         detail::shape_str(b.shape()));
    }
}

template <class F, class D>
Tensor unary(const Tensor& a, F f, D dfdx) {
    std::vector<double> out(a.numel());
    const auto in = a.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
    return Tensor::make_result(a.shape(), std::move(out), {a}, [dfdx](detail::Node& self) {
        auto& p = *self.parents[0];
        auto& g = detail::grad_of(p);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * dfdx(p.value[i], self.value[i]);
    });
}

}  // namespace detail_ops

/// a[m×k] · b[k×n]
inline Tensor matmul(const Tensor& a, const Tensor& b) {
    detail_ops::require_rank2("matmul", a);
    detail_ops::require_rank2("matmul", b);
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    if (b.rows() != k) {
        throw ShapeError("matmul: inner dimensions differ " + detail::shape_str(a.shape()) + " · " +
                         detail::shape_str(b.shape()));
    }
    std::vector<double> out(m * n, 0.0);
    const auto A = a.data();
    const auto B = b.data();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            const double av = A[i * k + p];
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += av * B[p * n + j];
        }
    return Tensor::make_result({m, n}, std::move(out), {a, b}, [m, k, n](detail::Node& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        const auto& G = self.grad;
        if (pa.requires_grad) {
            auto& ga = detail::grad_of(pa);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t p = 0; p < k; ++p) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < n; ++j) s += G[i * n + j] * pb.value[p * n + j];
                    ga[i * k + p] += s;
                }
        }
        if (pb.requires_grad) {
            auto& gb = detail::grad_of(pb);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t p = 0; p < k; ++p) {
                    const double av = pa.value[i * k + p];
                    if (av == 0.0) continue;
                    for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += av * G[i * n + j];
                }
        }
    });
}

/// x[m×in] · w[out×in]ᵀ, the usual dense layer without bias.
inline Tensor linear(const Tensor& x, const Tensor& w) {
    detail_ops::require_rank2("linear", x);
    detail_ops::require_rank2("linear", w);
    const std::size_t m = x.rows(), in = x.cols(), outw = w.rows();
    if (w.cols() != in) {
        throw ShapeError("linear: input " + detail::shape_str(x.shape()) + " incompatible with weight " +
                         detail::shape_str(w.shape()));
    }
    std::vector<double> out(m * outw, 0.0);
    const auto X = x.data();
    const auto W = w.data();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t o = 0; o < outw; ++o) {
            double s = 0.0;
            for (std::size_t k = 0; k < in; ++k) s += X[i * in + k] * W[o * in + k];
            out[i * outw + o] = s;
        }
    return Tensor::make_result({m, outw}, std::move(out), {x, w}, [m, in, outw](detail::Node& self) {
        auto& px = *self.parents[0];
        auto& pw = *self.parents[1];
        const auto& G = self.grad;
        if (px.requires_grad) {
            auto& gx = detail::grad_of(px);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t o = 0; o < outw; ++o) {
                    const double g = G[i * outw + o];
                    if (g == 0.0) continue;
                    for (std::size_t k = 0; k < in; ++k) gx[i * in + k] += g * pw.value[o * in + k];
                }
        }
        if (pw.requires_grad) {
            auto& gw = detail::grad_of(pw);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t o = 0; o < outw; ++o) {
                    const double g = G[i * outw + o];
                    if (g == 0.0) continue;
                    for (std::size_t k = 0; k < in; ++k) gw[o * in + k] += g * px.value[i * in + k];
                }
        }
    });
}

inline Tensor transpose(const Tensor& a) {
    detail_ops::require_rank2("transpose", a);
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<double> out(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j * m + i] = a.data()[i * n + j];
    return Tensor::make_result({n, m}, std::move(out), {a}, [m, n](detail::Node& self) {
        auto& g = detail::grad_of(*self.parents[0]);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) g[i * n + j] += self.grad[j * m + i];
    });
}

inline Tensor add(const Tensor& a, const Tensor& b) {
    detail_ops::require_same("add", a, b);
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
    return Tensor::make_result(a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
        for (auto& p : self.parents) {
            if (!p->requires_grad) continue;
            auto& g = detail::grad_of(*p);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
    });
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
    detail_ops::require_same("sub", a, b);
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
    return Tensor::make_result(a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
        const double sign[2] = {1.0, -1.0};
        for (std::size_t k = 0; k < 2; ++k) {
            auto& p = *self.parents[k];
            if (!p.requires_grad) continue;
            auto& g = detail::grad_of(p);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += sign[k] * self.grad[i];
        }
    });
}

/// Elementwise product.
inline Tensor mul(const Tensor& a, const Tensor& b) {
    detail_ops::require_same("mul", a, b);
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
    return Tensor::make_result(a.shape(), std::move(out), {a, b}, [](detail::Node& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        if (pa.requires_grad) {
            auto& g = detail::grad_of(pa);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pb.value[i];
        }
        if (pb.requires_grad) {
            auto& g = detail::grad_of(pb);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * pa.value[i];
        }
    });
}

/// a[m×n] + row[1×n] broadcast over rows.
inline Tensor add_row(const Tensor& a, const Tensor& row) {
    detail_ops::require_rank2("add_row", a);
    if (row.numel() != a.cols()) {
        throw ShapeError("add_row: row " + detail::shape_str(row.shape()) + " does not match " +
                         detail::shape_str(a.shape()));
    }
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[i * n + j] = a.data()[i * n + j] + row.data()[j];
    return Tensor::make_result(a.shape(), std::move(out), {a, row}, [m, n](detail::Node& self) {
        auto& pa = *self.parents[0];
        auto& pr = *self.parents[1];
        if (pa.requires_grad) {
            auto& g = detail::grad_of(pa);
            for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
        }
        if (pr.requires_grad) {
            auto& g = detail::grad_of(pr);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) g[j] += self.grad[i * n + j];
        }
    });
}

inline Tensor scale(const Tensor& a, double c) {
    return detail_ops::unary(a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

inline Tensor add_scalar(const Tensor& a, double c) {
    return detail_ops::unary(a, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

inline Tensor relu(const Tensor& a) {
    return detail_ops::unary(
        a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

inline double sigmoid_value(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline Tensor sigmoid(const Tensor& a) {
    return detail_ops::unary(a, sigmoid_value, [](double, double y) { return y * (1.0 - y); });
}

inline Tensor exp(const Tensor& a) {
    return detail_ops::unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

/// Natural log of max(x, 1e-12); the clamped region has zero slope.
inline Tensor log(const Tensor& a) {
    return detail_ops::unary(
        a, [](double x) { return std::log(std::max(x, kProbClamp)); },
        [](double x, double) { return x > kProbClamp ? 1.0 / x : 0.0; });
}

inline Tensor sin(const Tensor& a) {
    return detail_ops::unary(a, [](double x) { return std::sin(x); }, [](double x, double) { return std::cos(x); });
}

inline Tensor cos(const Tensor& a) {
    return detail_ops::unary(a, [](double x) { return std::cos(x); }, [](double x, double) { return -std::sin(x); });
}

inline Tensor square(const Tensor& a) {
    return detail_ops::unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

/// [a | b] along columns.
inline Tensor concat_cols(const Tensor& a, const Tensor& b) {
    detail_ops::require_rank2("concat_cols", a);
    detail_ops::require_rank2("concat_cols", b);
    if (a.rows() != b.rows()) {
        throw ShapeError("concat_cols: row counts differ " + detail::shape_str(a.shape()) + " vs " +
                         detail::shape_str(b.shape()));
    }
    const std::size_t m = a.rows(), na = a.cols(), nb = b.cols(), n = na + nb;
    std::vector<double> out(m * n);
    for (std::size_t i = 0; i < m; ++i) {
        std::copy_n(a.data().begin() + i * na, na, out.begin() + i * n);
        std::copy_n(b.data().begin() + i * nb, nb, out.begin() + i * n + na);
    }
    return Tensor::make_result({m, n}, std::move(out), {a, b}, [m, na, nb, n](detail::Node& self) {
        auto& pa = *self.parents[0];
        auto& pb = *self.parents[1];
        if (pa.requires_grad) {
            auto& g = detail::grad_of(pa);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < na; ++j) g[i * na + j] += self.grad[i * n + j];
        }
        if (pb.requires_grad) {
            auto& g = detail::grad_of(pb);
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < nb; ++j) g[i * nb + j] += self.grad[i * n + na + j];
        }
    });
}

/// out[r] = a[index[r]]
inline Tensor gather_rows(const Tensor& a, std::vector<std::size_t> index) {
    detail_ops::require_rank2("gather_rows", a);
    const std::size_t n = a.cols();
    for (auto r : index) {
        if (r >= a.rows()) {
            throw ShapeError("gather_rows: index " + std::to_string(r) + " out of range for " +
                             detail::shape_str(a.shape()));
        }
    }
    std::vector<double> out(index.size() * n);
    for (std::size_t r = 0; r < index.size(); ++r)
        std::copy_n(a.data().begin() + index[r] * n, n, out.begin() + r * n);
    const std::size_t rows = index.size();
    return Tensor::make_result({rows, n}, std::move(out), {a}, [idx = std::move(index), n](detail::Node& self) {
        auto& g = detail::grad_of(*self.parents[0]);
        for (std::size_t r = 0; r < idx.size(); ++r)
            for (std::size_t j = 0; j < n; ++j) g[idx[r] * n + j] += self.grad[r * n + j];
    });
}

/// out[s] = mean of the rows r with segment[r] == s; an empty segment yields zeros.
inline Tensor segment_mean(const Tensor& a, std::vector<std::size_t> segment, std::size_t num_segments) {
    detail_ops::require_rank2("segment_mean", a);
    if (segment.size() != a.rows()) {
        throw ShapeError("segment_mean: " + std::to_string(segment.size()) + " segment ids for " +
                         detail::shape_str(a.shape()));
    }
    const std::size_t n = a.cols();
    std::vector<double> count(num_segments, 0.0);
    for (auto s : segment) {
        if (s >= num_segments) {
            throw ShapeError("segment_mean: segment id " + std::to_string(s) + " >= " + std::to_string(num_segments));
        }
        count[s] += 1.0;
    }
    std::vector<double> out(num_segments * n, 0.0);
    for (std::size_t r = 0; r < segment.size(); ++r)
        for (std::size_t j = 0; j < n; ++j) out[segment[r] * n + j] += a.data()[r * n + j];
    for (std::size_t s = 0; s < num_segments; ++s)
        if (count[s] > 0.0)
            for (std::size_t j = 0; j < n; ++j) out[s * n + j] /= count[s];
    return Tensor::make_result({num_segments, n}, std::move(out), {a},
                               [seg = std::move(segment), cnt = std::move(count), n](detail::Node& self) {
                                   auto& g = detail::grad_of(*self.parents[0]);
                                   for (std::size_t r = 0; r < seg.size(); ++r) {
                                       const double inv = 1.0 / cnt[seg[r]];
                                       for (std::size_t j = 0; j < n; ++j)
                                           g[r * n + j] += self.grad[seg[r] * n + j] * inv;
                                   }
                               });
}

/// Row-wise softmax.
inline Tensor softmax_rows(const Tensor& a) {
    detail_ops::require_rank2("softmax_rows", a);
    const std::size_t m = a.rows(), n = a.cols();
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < m; ++i) {
        const double* row = a.data().data() + i * n;
        const double mx = *std::max_element(row, row + n);
        double z = 0.0;
        for (std::size_t j = 0; j < n; ++j) z += (out[i * n + j] = std::exp(row[j] - mx));
        for (std::size_t j = 0; j < n; ++j) out[i * n + j] /= z;
    }
    return Tensor::make_result(a.shape(), std::move(out), {a}, [m, n](detail::Node& self) {
        auto& g = detail::grad_of(*self.parents[0]);
        for (std::size_t i = 0; i < m; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < n; ++j) dot += self.grad[i * n + j] * self.value[i * n + j];
            for (std::size_t j = 0; j < n; ++j)
                g[i * n + j] += self.value[i * n + j] * (self.grad[i * n + j] - dot);
        }
    });
}

inline Tensor sum(const Tensor& a) {
    double s = 0.0;
    for (double v : a.data()) s += v;
    return Tensor::make_result({1, 1}, {s}, {a}, [](detail::Node& self) {
        auto& g = detail::grad_of(*self.parents[0]);
        for (auto& v : g) v += self.grad[0];
    });
}

inline Tensor mean(const Tensor& a) {
    if (a.numel() == 0) throw ShapeError("mean: empty tensor");
    return scale(sum(a), 1.0 / static_cast<double>(a.numel()));
}

/// Mean over all entries of (a − b)².
inline Tensor mse(const Tensor& a, const Tensor& b) {
    detail_ops::require_same("mse", a, b);
    return mean(square(sub(a, b)));
}

/// −mean[t·log p + (1−t)·log(1−p)] with p clamped to [1e-12, 1−1e-12].
inline Tensor binary_cross_entropy(const Tensor& prob, std::vector<double> target) {
    if (prob.numel() != target.size()) {
        throw ShapeError("binary_cross_entropy: " + std::to_string(target.size()) + " targets for " +
                         detail::shape_str(prob.shape()));
    }
    if (target.empty()) throw ShapeError("binary_cross_entropy: empty input");
    const double inv = 1.0 / static_cast<double>(target.size());
    double s = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double p = std::clamp(prob.data()[i], kProbClamp, 1.0 - kProbClamp);
        s -= target[i] * std::log(p) + (1.0 - target[i]) * std::log(1.0 - p);
    }
    return Tensor::make_result({1, 1}, {s * inv}, {prob}, [t = std::move(target), inv](detail::Node& self) {
        auto& pp = *self.parents[0];
        auto& g = detail::grad_of(pp);
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double raw = pp.value[i];
            if (raw <= kProbClamp || raw >= 1.0 - kProbClamp) continue;
            g[i] += self.grad[0] * inv * (-(t[i] / raw) + (1.0 - t[i]) / (1.0 - raw));
        }
    });
}

/// −mean log prob[r, target[r]] with the same clamping; targets are 0-based columns.
inline Tensor cross_entropy(const Tensor& prob, std::vector<std::size_t> target) {
    detail_ops::require_rank2("cross_entropy", prob);
    if (prob.rows() != target.size()) {
        throw ShapeError("cross_entropy: " + std::to_string(target.size()) + " targets for " +
                         detail::shape_str(prob.shape()));
    }
    if (target.empty()) throw ShapeError("cross_entropy: empty input");
    const std::size_t n = prob.cols();
    for (auto t : target)
        if (t >= n) throw ShapeError("cross_entropy: class " + std::to_string(t) + " >= " + std::to_string(n));
    const double inv = 1.0 / static_cast<double>(target.size());
    double s = 0.0;
    for (std::size_t r = 0; r < target.size(); ++r) s -= std::log(std::max(prob.data()[r * n + target[r]], kProbClamp));
    return Tensor::make_result({1, 1}, {s * inv}, {prob}, [t = std::move(target), inv, n](detail::Node& self) {
        auto& pp = *self.parents[0];
        auto& g = detail::grad_of(pp);
        for (std::size_t r = 0; r < t.size(); ++r) {
            const double p = pp.value[r * n + t[r]];
            if (p > kProbClamp) g[r * n + t[r]] -= self.grad[0] * inv / p;
        }
    });
}

/// Throws NumericError naming `where` if any entry is NaN or infinite.
inline void require_finite(const Tensor& t, const std::string& where) {
    for (double v : t.data())
        if (!std::isfinite(v)) throw NumericError(where + ": non-finite value");
}

}  // namespace ops
}  // namespace godm
