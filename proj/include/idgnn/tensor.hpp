#pragma once

// Dense double tensors with reverse-mode autodiff on a define-by-run tape.
// A Tensor is a cheap handle to a shared node; ops append backward closures
// and backward() replays them in reverse topological order.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace idgnn {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
}

inline std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
    os << ']';
    return os.str();
}

struct DimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IndexError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

struct Node {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;  // lazily sized on backward
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void()> backward;  // accumulates into parents' grad

    std::size_t numel() const { return data.size(); }
    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
    }
};

}  // namespace detail

class Tensor {
public:
    Tensor() : node_(std::make_shared<detail::Node>()) {}

    Tensor(Shape shape, std::vector<double> data, bool requires_grad = false)
        : node_(std::make_shared<detail::Node>()) {
        if (shape_numel(shape) != data.size())
            throw DimError("tensor data length " + std::to_string(data.size()) +
                           " does not match shape " + shape_str(shape));
        node_->shape = std::move(shape);
        node_->data = std::move(data);
        node_->requires_grad = requires_grad;
    }

    static Tensor zeros(Shape shape, bool requires_grad = false) {
        std::vector<double> d(shape_numel(shape), 0.0);
        return Tensor(std::move(shape), std::move(d), requires_grad);
    }

    static Tensor full(Shape shape, double v, bool requires_grad = false) {
        std::vector<double> d(shape_numel(shape), v);
        return Tensor(std::move(shape), std::move(d), requires_grad);
    }

    static Tensor scalar(double v, bool requires_grad = false) {
        return Tensor({1}, {v}, requires_grad);
    }

    const Shape& shape() const { return node_->shape; }
    std::size_t numel() const { return node_->numel(); }
    std::size_t dim(std::size_t i) const { return node_->shape.at(i); }
    bool requires_grad() const { return node_->requires_grad; }

    const std::vector<double>& data() const { return node_->data; }
    double item() const {
        if (numel() != 1) throw DimError("item() on non-scalar tensor " + shape_str(shape()));
        return node_->data[0];
    }
    double at(std::size_t r, std::size_t c) const {
        return node_->data[r * node_->shape[1] + c];
    }

    // Leaf mutation (parameter updates); never used on op outputs.
    std::vector<double>& mutable_data() { return node_->data; }

    const std::vector<double>& grad() const {
        if (node_->grad.size() != node_->data.size())
            throw std::runtime_error("grad not populated; call backward() first");
        return node_->grad;
    }
    bool has_grad() const { return node_->grad.size() == node_->data.size(); }
    void zero_grad() { node_->grad.assign(node_->data.size(), 0.0); }

    // Reverse-mode sweep from a scalar output.
    void backward() const {
        if (numel() != 1) throw DimError("backward() requires a scalar, got " + shape_str(shape()));
        std::vector<detail::Node*> order;
        std::unordered_set<detail::Node*> seen;
        topo(node_.get(), seen, order);
        node_->ensure_grad();
        node_->grad[0] = 1.0;
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            if ((*it)->backward) (*it)->backward();
        }
    }

    detail::Node* node() const { return node_.get(); }
    const std::shared_ptr<detail::Node>& node_ptr() const { return node_; }

    static Tensor from_node(std::shared_ptr<detail::Node> n) {
        Tensor t;
        t.node_ = std::move(n);
        return t;
    }

private:
    static void topo(detail::Node* n, std::unordered_set<detail::Node*>& seen,
                     std::vector<detail::Node*>& order) {
        if (seen.count(n)) return;
        seen.insert(n);
        for (auto& p : n->parents) topo(p.get(), seen, order);
        order.push_back(n);
    }

    std::shared_ptr<detail::Node> node_;
};

namespace detail {

inline std::shared_ptr<Node> make_op(Shape shape, std::vector<double> data,
                                     std::vector<std::shared_ptr<Node>> parents) {
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->data = std::move(data);
    n->parents = std::move(parents);
    n->requires_grad =
        std::any_of(n->parents.begin(), n->parents.end(),
                    [](const auto& p) { return p->requires_grad; });
    for (auto& p : n->parents) p->ensure_grad();
    return n;
}

}  // namespace detail

// ---- core ops --------------------------------------------------------------

inline Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.shape().size() != 2 || b.shape().size() != 2 || a.dim(1) != b.dim(0))
        throw DimError("matmul shape mismatch: " + shape_str(a.shape()) + " x " +
                       shape_str(b.shape()));
    const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
    std::vector<double> out(m * n, 0.0);
    const auto& A = a.data();
    const auto& B = b.data();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            const double av = A[i * k + p];
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += av * B[p * n + j];
        }
    auto node = detail::make_op({m, n}, std::move(out), {a.node_ptr(), b.node_ptr()});
    auto* c = node.get();
    auto* an = a.node();
    auto* bn = b.node();
    node->backward = [c, an, bn, m, k, n]() {
        // dA = dC * B^T, dB = A^T * dC
        if (an->requires_grad)
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t p = 0; p < k; ++p) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < n; ++j)
                        acc += c->grad[i * n + j] * bn->data[p * n + j];
                    an->grad[i * k + p] += acc;
                }
        if (bn->requires_grad)
            for (std::size_t p = 0; p < k; ++p)
                for (std::size_t j = 0; j < n; ++j) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < m; ++i)
                        acc += an->data[i * k + p] * c->grad[i * n + j];
                    bn->grad[p * n + j] += acc;
                }
    };
    return Tensor::from_node(node);
}

// Row v of the result is the sum of h rows over directed edges (src -> v).
inline Tensor segment_sum(const Tensor& h, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    if (h.shape().size() != 2) throw DimError("segment_sum expects a 2-d tensor");
    const std::size_t n = h.dim(0), d = h.dim(1);
    for (auto [u, v] : edges)
        if (u >= n || v >= n)
            throw IndexError("segment_sum edge endpoint out of range: (" + std::to_string(u) +
                             "," + std::to_string(v) + ") with n=" + std::to_string(n));
    std::vector<double> out(n * d, 0.0);
    const auto& H = h.data();
    for (auto [u, v] : edges)
        for (std::size_t j = 0; j < d; ++j) out[v * d + j] += H[u * d + j];
    auto node = detail::make_op({n, d}, std::move(out), {h.node_ptr()});
    auto* c = node.get();
    auto* hn = h.node();
    auto es = edges;
    node->backward = [c, hn, es, d]() {
        if (!hn->requires_grad) return;
        for (auto [u, v] : es)
            for (std::size_t j = 0; j < d; ++j) hn->grad[u * d + j] += c->grad[v * d + j];
    };
    return Tensor::from_node(node);
}

inline Tensor add(const Tensor& a, const Tensor& b) {
    // same shape, or b a [1 x d] row vector broadcast over a's rows
    const bool rowcast = a.shape().size() == 2 && b.shape().size() == 2 && b.dim(0) == 1 &&
                         b.dim(1) == a.dim(1) && a.dim(0) != 1;
    if (!rowcast && a.shape() != b.shape())
        throw DimError("add shape mismatch: " + shape_str(a.shape()) + " vs " +
                       shape_str(b.shape()));
    std::vector<double> out(a.numel());
    const std::size_t d = rowcast ? a.dim(1) : 0;
    for (std::size_t i = 0; i < a.numel(); ++i)
        out[i] = a.data()[i] + (rowcast ? b.data()[i % d] : b.data()[i]);
    auto node = detail::make_op(a.shape(), std::move(out), {a.node_ptr(), b.node_ptr()});
    auto* c = node.get();
    auto* an = a.node();
    auto* bn = b.node();
    node->backward = [c, an, bn, rowcast, d]() {
        if (an->requires_grad)
            for (std::size_t i = 0; i < c->data.size(); ++i) an->grad[i] += c->grad[i];
        if (bn->requires_grad) {
            if (rowcast)
                for (std::size_t i = 0; i < c->data.size(); ++i) bn->grad[i % d] += c->grad[i];
            else
                for (std::size_t i = 0; i < c->data.size(); ++i) bn->grad[i] += c->grad[i];
        }
    };
    return Tensor::from_node(node);
}

inline Tensor mul(const Tensor& a, const Tensor& b) {
    // same shape, or b an [m x 1] column broadcast over a's columns
    const bool colcast = a.shape().size() == 2 && b.shape().size() == 2 && b.dim(1) == 1 &&
                         b.dim(0) == a.dim(0) && a.dim(1) != 1;
    if (!colcast && a.shape() != b.shape())
        throw DimError("mul shape mismatch: " + shape_str(a.shape()) + " vs " +
                       shape_str(b.shape()));
    const std::size_t d = colcast ? a.dim(1) : 1;
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < a.numel(); ++i)
        out[i] = a.data()[i] * (colcast ? b.data()[i / d] : b.data()[i]);
    auto node = detail::make_op(a.shape(), std::move(out), {a.node_ptr(), b.node_ptr()});
    auto* c = node.get();
    auto* an = a.node();
    auto* bn = b.node();
    node->backward = [c, an, bn, colcast, d]() {
        for (std::size_t i = 0; i < c->data.size(); ++i) {
            const double bv = colcast ? bn->data[i / d] : bn->data[i];
            if (an->requires_grad) an->grad[i] += c->grad[i] * bv;
            if (bn->requires_grad) {
                if (colcast)
                    bn->grad[i / d] += c->grad[i] * an->data[i];
                else
                    bn->grad[i] += c->grad[i] * an->data[i];
            }
        }
    };
    return Tensor::from_node(node);
}

inline Tensor scale(const Tensor& a, double s) {
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < a.numel(); ++i) out[i] = a.data()[i] * s;
    auto node = detail::make_op(a.shape(), std::move(out), {a.node_ptr()});
    auto* c = node.get();
    auto* an = a.node();
    node->backward = [c, an, s]() {
        if (!an->requires_grad) return;
        for (std::size_t i = 0; i < c->data.size(); ++i) an->grad[i] += c->grad[i] * s;
    };
    return Tensor::from_node(node);
}

inline Tensor sub(const Tensor& a, const Tensor& b) { return add(a, scale(b, -1.0)); }

inline Tensor relu(const Tensor& a) {
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < a.numel(); ++i) out[i] = a.data()[i] > 0.0 ? a.data()[i] : 0.0;
    auto node = detail::make_op(a.shape(), std::move(out), {a.node_ptr()});
    auto* c = node.get();
    auto* an = a.node();
    node->backward = [c, an]() {
        if (!an->requires_grad) return;
        for (std::size_t i = 0; i < c->data.size(); ++i)
            if (an->data[i] > 0.0) an->grad[i] += c->grad[i];
    };
    return Tensor::from_node(node);
}

inline Tensor leaky_relu(const Tensor& a, double slope) {
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < a.numel(); ++i)
        out[i] = a.data()[i] > 0.0 ? a.data()[i] : slope * a.data()[i];
    auto node = detail::make_op(a.shape(), std::move(out), {a.node_ptr()});
    auto* c = node.get();
    auto* an = a.node();
    node->backward = [c, an, slope]() {
        if (!an->requires_grad) return;
        for (std::size_t i = 0; i < c->data.size(); ++i)
            an->grad[i] += c->grad[i] * (an->data[i] > 0.0 ? 1.0 : slope);
    };
    return Tensor::from_node(node);
}

inline Tensor concat(const std::vector<Tensor>& parts, int axis) {
    if (parts.empty()) throw DimError("concat of zero tensors");
    if (axis != 0 && axis != 1) throw DimError("concat supports axis 0 or 1");
    for (const auto& t : parts)
        if (t.shape().size() != 2) throw DimError("concat expects 2-d tensors");
    std::size_t rows = parts[0].dim(0), cols = parts[0].dim(1);
    if (axis == 1) {
        cols = 0;
        for (const auto& t : parts) {
            if (t.dim(0) != rows) throw DimError("concat axis-1 row mismatch");
            cols += t.dim(1);
        }
    } else {
        rows = 0;
        for (const auto& t : parts) {
            if (t.dim(1) != cols) throw DimError("concat axis-0 column mismatch");
            rows += t.dim(0);
        }
    }
    std::vector<double> out(rows * cols);
    std::vector<std::shared_ptr<detail::Node>> parents;
    parents.reserve(parts.size());
    for (const auto& t : parts) parents.push_back(t.node_ptr());
    if (axis == 1) {
        std::size_t off = 0;
        for (const auto& t : parts) {
            const std::size_t d = t.dim(1);
            for (std::size_t i = 0; i < rows; ++i)
                for (std::size_t j = 0; j < d; ++j) out[i * cols + off + j] = t.data()[i * d + j];
            off += d;
        }
    } else {
        std::size_t off = 0;
        for (const auto& t : parts) {
            std::copy(t.data().begin(), t.data().end(), out.begin() + off);
            off += t.numel();
        }
    }
    auto node = detail::make_op({rows, cols}, std::move(out), std::move(parents));
    auto* c = node.get();
    std::vector<detail::Node*> ps;
    for (auto& p : c->parents) ps.push_back(p.get());
    node->backward = [c, ps, axis, rows, cols]() {
        if (axis == 1) {
            std::size_t off = 0;
            for (auto* p : ps) {
                const std::size_t d = p->shape[1];
                if (p->requires_grad)
                    for (std::size_t i = 0; i < rows; ++i)
                        for (std::size_t j = 0; j < d; ++j)
                            p->grad[i * d + j] += c->grad[i * cols + off + j];
                off += d;
            }
        } else {
            std::size_t off = 0;
            for (auto* p : ps) {
                if (p->requires_grad)
                    for (std::size_t i = 0; i < p->data.size(); ++i) p->grad[i] += c->grad[off + i];
                off += p->data.size();
            }
        }
    };
    return Tensor::from_node(node);
}

// Select rows by index; duplicates allowed, gradient scatter-adds.
inline Tensor gather_rows(const Tensor& t, const std::vector<std::size_t>& idx) {
    if (t.shape().size() != 2) throw DimError("gather_rows expects a 2-d tensor");
    const std::size_t n = t.dim(0), d = t.dim(1);
    for (auto i : idx)
        if (i >= n) throw IndexError("gather_rows index " + std::to_string(i) + " out of range");
    std::vector<double> out(idx.size() * d);
    for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t j = 0; j < d; ++j) out[r * d + j] = t.data()[idx[r] * d + j];
    auto node = detail::make_op({idx.size(), d}, std::move(out), {t.node_ptr()});
    auto* c = node.get();
    auto* tn = t.node();
    auto is = idx;
    node->backward = [c, tn, is, d]() {
        if (!tn->requires_grad) return;
        for (std::size_t r = 0; r < is.size(); ++r)
            for (std::size_t j = 0; j < d; ++j) tn->grad[is[r] * d + j] += c->grad[r * d + j];
    };
    return Tensor::from_node(node);
}

// Softmax over groups of rows of an [m x 1] tensor; segment ids need not be sorted.
inline Tensor softmax_over_segments(const Tensor& scores, const std::vector<std::size_t>& segment) {
    if (scores.shape().size() != 2 || scores.dim(1) != 1)
        throw DimError("softmax_over_segments expects an [m x 1] tensor");
    if (segment.size() != scores.dim(0)) throw DimError("segment id count mismatch");
    const std::size_t m = scores.dim(0);
    std::size_t nseg = 0;
    for (auto s : segment) nseg = std::max(nseg, s + 1);
    std::vector<double> segmax(nseg, -1e300), segsum(nseg, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        segmax[segment[i]] = std::max(segmax[segment[i]], scores.data()[i]);
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        out[i] = std::exp(scores.data()[i] - segmax[segment[i]]);
        segsum[segment[i]] += out[i];
    }
    for (std::size_t i = 0; i < m; ++i) out[i] /= segsum[segment[i]];
    auto node = detail::make_op({m, 1}, std::move(out), {scores.node_ptr()});
    auto* c = node.get();
    auto* sn = scores.node();
    auto seg = segment;
    node->backward = [c, sn, seg, nseg]() {
        if (!sn->requires_grad) return;
        std::vector<double> dot(nseg, 0.0);
        for (std::size_t i = 0; i < c->data.size(); ++i) dot[seg[i]] += c->grad[i] * c->data[i];
        for (std::size_t i = 0; i < c->data.size(); ++i)
            sn->grad[i] += c->data[i] * (c->grad[i] - dot[seg[i]]);
    };
    return Tensor::from_node(node);
}

// Pool node rows into per-graph rows using the batch membership vector.
inline Tensor sum_pool(const Tensor& h, const std::vector<std::size_t>& membership,
                       std::size_t num_graphs) {
    if (h.shape().size() != 2 || membership.size() != h.dim(0))
        throw DimError("sum_pool membership length mismatch");
    const std::size_t d = h.dim(1);
    std::vector<double> out(num_graphs * d, 0.0);
    for (std::size_t i = 0; i < membership.size(); ++i) {
        if (membership[i] >= num_graphs) throw IndexError("sum_pool membership out of range");
        for (std::size_t j = 0; j < d; ++j) out[membership[i] * d + j] += h.data()[i * d + j];
    }
    auto node = detail::make_op({num_graphs, d}, std::move(out), {h.node_ptr()});
    auto* c = node.get();
    auto* hn = h.node();
    auto mem = membership;
    node->backward = [c, hn, mem, d]() {
        if (!hn->requires_grad) return;
        for (std::size_t i = 0; i < mem.size(); ++i)
            for (std::size_t j = 0; j < d; ++j) hn->grad[i * d + j] += c->grad[mem[i] * d + j];
    };
    return Tensor::from_node(node);
}

inline Tensor mean_pool(const Tensor& h, const std::vector<std::size_t>& membership,
                        std::size_t num_graphs) {
    std::vector<double> counts(num_graphs, 0.0);
    for (auto m : membership) {
        if (m >= num_graphs) throw IndexError("mean_pool membership out of range");
        counts[m] += 1.0;
    }
    Tensor summed = sum_pool(h, membership, num_graphs);
    std::vector<double> inv(num_graphs);
    for (std::size_t g = 0; g < num_graphs; ++g) inv[g] = counts[g] > 0.0 ? 1.0 / counts[g] : 0.0;
    return mul(summed, Tensor({num_graphs, 1}, std::move(inv)));
}

// Inverted dropout; mask is constant for the backward pass.
inline Tensor dropout(const Tensor& a, double rate, bool train, std::mt19937_64& rng) {
    if (rate < 0.0 || rate >= 1.0) throw DimError("dropout rate must lie in [0,1)");
    if (!train || rate == 0.0) return a;
    const double keep = 1.0 - rate;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> mask(a.numel());
    for (auto& m : mask) m = (uni(rng) < keep) ? 1.0 / keep : 0.0;
    std::vector<double> out(a.numel());
    for (std::size_t i = 0; i < a.numel(); ++i) out[i] = a.data()[i] * mask[i];
    auto node = detail::make_op(a.shape(), std::move(out), {a.node_ptr()});
    auto* c = node.get();
    auto* an = a.node();
    node->backward = [c, an, mask = std::move(mask)]() {
        if (!an->requires_grad) return;
        for (std::size_t i = 0; i < c->data.size(); ++i) an->grad[i] += c->grad[i] * mask[i];
    };
    return Tensor::from_node(node);
}

// Mean cross-entropy over rows; label -1 marks an unlabeled row and is skipped.
inline Tensor cross_entropy(const Tensor& logits, const std::vector<long>& labels) {
    if (logits.shape().size() != 2 || labels.size() != logits.dim(0))
        throw DimError("cross_entropy label count mismatch");
    const std::size_t n = logits.dim(0), cdim = logits.dim(1);
    std::size_t counted = 0;
    double loss = 0.0;
    std::vector<double> probs(n * cdim, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (labels[i] < 0) continue;
        if (static_cast<std::size_t>(labels[i]) >= cdim)
            throw IndexError("cross_entropy label " + std::to_string(labels[i]) +
                             " outside class range " + std::to_string(cdim));
        double mx = logits.data()[i * cdim];
        for (std::size_t j = 1; j < cdim; ++j) mx = std::max(mx, logits.data()[i * cdim + j]);
        double z = 0.0;
        for (std::size_t j = 0; j < cdim; ++j) {
            probs[i * cdim + j] = std::exp(logits.data()[i * cdim + j] - mx);
            z += probs[i * cdim + j];
        }
        for (std::size_t j = 0; j < cdim; ++j) probs[i * cdim + j] /= z;
        loss -= std::log(std::max(probs[i * cdim + labels[i]], 1e-300));
        ++counted;
    }
    if (counted == 0) throw DimError("cross_entropy with no labeled rows");
    loss /= static_cast<double>(counted);
    auto node = detail::make_op({1}, {loss}, {logits.node_ptr()});
    auto* c = node.get();
    auto* ln = logits.node();
    auto labs = labels;
    node->backward = [c, ln, labs, probs = std::move(probs), cdim, counted]() {
        if (!ln->requires_grad) return;
        const double g = c->grad[0] / static_cast<double>(counted);
        for (std::size_t i = 0; i < labs.size(); ++i) {
            if (labs[i] < 0) continue;
            for (std::size_t j = 0; j < cdim; ++j) {
                double ind = (static_cast<long>(j) == labs[i]) ? 1.0 : 0.0;
                ln->grad[i * cdim + j] += g * (probs[i * cdim + j] - ind);
            }
        }
    };
    return Tensor::from_node(node);
}

// Sum of squared entrywise differences: ||a - b||_F^2.
inline Tensor sq_frobenius_diff(const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape())
        throw DimError("sq_frobenius_diff shape mismatch: " + shape_str(a.shape()) + " vs " +
                       shape_str(b.shape()));
    double v = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        const double d = a.data()[i] - b.data()[i];
        v += d * d;
    }
    auto node = detail::make_op({1}, {v}, {a.node_ptr(), b.node_ptr()});
    auto* c = node.get();
    auto* an = a.node();
    auto* bn = b.node();
    node->backward = [c, an, bn]() {
        const double g = c->grad[0];
        for (std::size_t i = 0; i < an->data.size(); ++i) {
            const double d = an->data[i] - bn->data[i];
            if (an->requires_grad) an->grad[i] += 2.0 * g * d;
            if (bn->requires_grad) bn->grad[i] -= 2.0 * g * d;
        }
    };
    return Tensor::from_node(node);
}

inline Tensor sum(const Tensor& a) {
    double v = std::accumulate(a.data().begin(), a.data().end(), 0.0);
    auto node = detail::make_op({1}, {v}, {a.node_ptr()});
    auto* c = node.get();
    auto* an = a.node();
    node->backward = [c, an]() {
        if (!an->requires_grad) return;
        for (auto& g : an->grad) g += c->grad[0];
    };
    return Tensor::from_node(node);
}

inline std::size_t argmax_row(const Tensor& t, std::size_t row) {
    const std::size_t d = t.dim(1);
    std::size_t best = 0;
    for (std::size_t j = 1; j < d; ++j)
        if (t.at(row, j) > t.at(row, best)) best = j;  // ties go to the lowest index
    return best;
}

}  // namespace idgnn
