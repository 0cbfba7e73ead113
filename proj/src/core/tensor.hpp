#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "core/error.hpp"

namespace acdl {

using Shape = std::vector<int>;

inline int64_t numel(const Shape& s) {
    int64_t n = 1;
    for (int d : s) n *= d;
    return n;
}

inline std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? ", " : "") << s[i];
    os << "]";
    return os.str();
}

inline void check_shape_valid(const Shape& s) {
    for (int d : s) {
        if (d <= 0) throw ShapeError("tensor extents must be positive, got " + shape_str(s));
    }
}

template <class T>
class Tensor;

// One recorded op in the backward tape. `backward` reads the output's value
// and gradient buffers and accumulates into the captured input tensors.
template <class T>
struct GraphNode {
    const char* op;
    std::vector<Tensor<T>> inputs;
    std::function<void(const std::vector<T>& out_v, const std::vector<T>& out_g)> backward;
};

// Dense row-major tensor with an optional gradient slot. Copies are shallow
// (shared storage); clone() makes a deep copy. A tensor produced by a
// recorded op keeps a GraphNode so backward() can replay the chain rule.
template <class T>
class Tensor {
    struct Data {
        Shape shape;
        std::vector<T> v;
        std::vector<T> g;  // empty until a gradient is accumulated
        bool requires_grad = false;
        std::shared_ptr<GraphNode<T>> node;
    };

public:
    Tensor() = default;

    static Tensor zeros(Shape shape) {
        check_shape_valid(shape);
        Tensor t;
        t.d_ = std::make_shared<Data>();
        t.d_->v.assign(static_cast<size_t>(numel(shape)), T(0));
        t.d_->shape = std::move(shape);
        return t;
    }

    static Tensor full(Shape shape, T value) {
        Tensor t = zeros(std::move(shape));
        for (T& x : t.d_->v) x = value;
        t.check_finite("full");
        return t;
    }

    static Tensor from_data(Shape shape, std::vector<T> values) {
        check_shape_valid(shape);
        if (static_cast<int64_t>(values.size()) != numel(shape)) {
            throw ShapeError("data length " + std::to_string(values.size()) +
                             " does not match shape " + shape_str(shape));
        }
        Tensor t;
        t.d_ = std::make_shared<Data>();
        t.d_->shape = std::move(shape);
        t.d_->v = std::move(values);
        t.check_finite("from_data");
        return t;
    }

    static Tensor scalar(T value) { return from_data({1}, {value}); }

    bool defined() const { return d_ != nullptr; }
    const Shape& shape() const { return d_->shape; }
    int rank() const { return static_cast<int>(d_->shape.size()); }
    int dim(int i) const { return d_->shape[static_cast<size_t>(i)]; }
    int64_t size() const { return static_cast<int64_t>(d_->v.size()); }

    // Lvalue-only: a span into a temporary tensor would dangle.
    std::span<const T> values() const& { return d_->v; }
    std::span<const T> values() const&& = delete;
    // Mutation is reserved for initialization and the owning optimizer step.
    std::span<T> values_mut() & { return d_->v; }

    T item() const {
        if (size() != 1) throw ShapeError("item() requires a scalar, got " + shape_str(shape()));
        return d_->v[0];
    }

    bool requires_grad() const { return d_->requires_grad; }
    Tensor& set_requires_grad(bool b) {
        d_->requires_grad = b;
        return *this;
    }

    bool has_grad() const { return !d_->g.empty(); }
    std::span<const T> grad() const& {
        if (d_->g.empty()) throw ValueError("tensor has no gradient");
        return d_->g;
    }
    std::span<const T> grad() const&& = delete;

    void zero_grad() { d_->g.clear(); }

    void accumulate_grad(std::span<const T> delta) {
        if (static_cast<int64_t>(delta.size()) != size()) {
            throw ShapeError("gradient length mismatch for shape " + shape_str(shape()));
        }
        if (d_->g.empty()) d_->g.assign(d_->v.size(), T(0));
        for (size_t i = 0; i < delta.size(); ++i) d_->g[i] += delta[i];
    }

    // Ensures the grad buffer exists and hands out a writable view.
    std::span<T> grad_buffer() {
        if (d_->g.empty()) d_->g.assign(d_->v.size(), T(0));
        return d_->g;
    }

    // Same values, no history, no grad requirement.
    Tensor detach() const {
        Tensor t;
        t.d_ = std::make_shared<Data>();
        t.d_->shape = d_->shape;
        t.d_->v = d_->v;
        return t;
    }

    // Deep copy including grad requirement (but not history or grads).
    Tensor clone() const {
        Tensor t = detach();
        t.d_->requires_grad = d_->requires_grad;
        return t;
    }

    bool same_storage(const Tensor& other) const { return d_ == other.d_; }

    const std::shared_ptr<GraphNode<T>>& node() const { return d_->node; }

    void check_finite(const char* op) const {
        for (const T x : d_->v) {
            if (!std::isfinite(static_cast<double>(x))) {
                throw NumericError(std::string(op) + " produced a non-finite value");
            }
        }
    }

    // Used by op builders: fresh tensor that records its creator.
    static Tensor make_result(Shape shape, std::vector<T> values, std::shared_ptr<GraphNode<T>> node) {
        check_shape_valid(shape);
        Tensor t;
        t.d_ = std::make_shared<Data>();
        t.d_->shape = std::move(shape);
        t.d_->v = std::move(values);
        if (node) {
            t.d_->requires_grad = true;
            t.d_->node = std::move(node);
        }
        return t;
    }

    // Reverse-mode sweep from a scalar. Every requires_grad tensor reachable
    // through the recorded graph receives d(this)/d(tensor), accumulating
    // additively across fan-out.
    void backward() {
        if (size() != 1) throw ValueError("backward() requires a scalar loss, got " + shape_str(shape()));
        // Topological order via iterative post-order DFS over creator nodes.
        std::vector<Data*> order;
        std::unordered_set<Data*> visited;
        struct Frame {
            Data* data;
            size_t next_input;
        };
        std::vector<Frame> stack;
        stack.push_back({d_.get(), 0});
        visited.insert(d_.get());
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (!f.data->node || f.next_input >= f.data->node->inputs.size()) {
                order.push_back(f.data);
                stack.pop_back();
                continue;
            }
            Data* in = f.data->node->inputs[f.next_input++].d_.get();
            if (in && in->requires_grad && !visited.count(in)) {
                visited.insert(in);
                stack.push_back({in, 0});
            }
        }
        d_->g.assign(1, T(1));
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            Data* data = *it;
            if (!data->node || data->g.empty()) continue;
            data->node->backward(data->v, data->g);
        }
    }

private:
    std::shared_ptr<Data> d_;
};

using TensorF = Tensor<float>;
using TensorD = Tensor<double>;

}  // namespace acdl
