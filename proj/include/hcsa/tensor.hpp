#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hcsa/errors.hpp"

namespace hcsa {

using Shape = std::vector<std::size_t>;

inline std::size_t numel(const Shape& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

inline std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << "x";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

namespace detail {

struct TensorNode {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;  // same length as value iff requires_grad
    bool requires_grad = false;
};

}  // namespace detail

// Dense row-major tensor of 64-bit floats. Copying a Tensor aliases the same
// underlying buffer; ops never mutate their inputs, so aliasing is safe during
// a forward pass. Gradient buffers live next to the values and are filled by
// Tape::backward.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape) {
        return make(std::move(shape), 0.0);
    }

    static Tensor full(Shape shape, double v) {
        return make(std::move(shape), v);
    }

    static Tensor scalar(double v) { return full({1}, v); }

    // User-facing constructor: validates element count and finiteness.
    static Tensor from_data(Shape shape, std::vector<double> data) {
        if (numel(shape) != data.size()) {
            throw ShapeError("from_data: shape " + shape_str(shape) + " expects " +
                             std::to_string(numel(shape)) + " elements, got " +
                             std::to_string(data.size()));
        }
        for (double v : data) {
            if (!std::isfinite(v)) throw InputError("from_data: non-finite value");
        }
        Tensor t;
        t.node_ = std::make_shared<detail::TensorNode>();
        t.node_->shape = std::move(shape);
        t.node_->value = std::move(data);
        return t;
    }

    // Internal constructor for op outputs; skips validation.
    static Tensor wrap(Shape shape, std::vector<double> data) {
        Tensor t;
        t.node_ = std::make_shared<detail::TensorNode>();
        t.node_->shape = std::move(shape);
        t.node_->value = std::move(data);
        return t;
    }

    bool defined() const { return node_ != nullptr; }

    const Shape& shape() const { return node_->shape; }
    std::size_t rank() const { return node_->shape.size(); }
    std::size_t dim(std::size_t i) const { return node_->shape[i]; }
    std::size_t size() const { return node_->value.size(); }

    // 2-D accessors (row-major).
    std::size_t rows() const { return node_->shape.at(0); }
    std::size_t cols() const { return node_->shape.at(1); }
    double operator()(std::size_t i, std::size_t j) const {
        return node_->value[i * cols() + j];
    }
    double operator[](std::size_t i) const { return node_->value[i]; }

    std::vector<double>& values() { return node_->value; }
    const std::vector<double>& values() const { return node_->value; }

    // Gradient buffer; mutable through const handles the way a shared_ptr's
    // pointee is (closures hold const copies of their input handles).
    std::vector<double>& grad() const { return node_->grad; }

    bool requires_grad() const { return node_ && node_->requires_grad; }

    Tensor& set_requires_grad(bool on) {
        node_->requires_grad = on;
        if (on) {
            node_->grad.assign(node_->value.size(), 0.0);
        } else {
            node_->grad.clear();
        }
        return *this;
    }

    void zero_grad() {
        if (node_->requires_grad) node_->grad.assign(node_->value.size(), 0.0);
    }

    double item() const {
        if (size() != 1) {
            throw ShapeError("item: tensor " + shape_str(shape()) + " is not a scalar");
        }
        return node_->value[0];
    }

    bool all_finite() const {
        for (double v : node_->value) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    detail::TensorNode* node() const { return node_.get(); }
    const std::shared_ptr<detail::TensorNode>& node_ptr() const { return node_; }

private:
    static Tensor make(Shape shape, double fill) {
        Tensor t;
        t.node_ = std::make_shared<detail::TensorNode>();
        std::size_t n = numel(shape);
        t.node_->shape = std::move(shape);
        t.node_->value.assign(n, fill);
        return t;
    }

    std::shared_ptr<detail::TensorNode> node_;
};

// Record of one forward pass. Each differentiable op appends a closure that
// propagates gradients from its output to its inputs; backward() replays the
// closures in exact reverse execution order.
class Tape {
public:
    void record(std::function<void()> fn, const Tensor& output) {
        steps_.push_back(Step{std::move(fn), output.node_ptr()});
    }

    std::size_t size() const { return steps_.size(); }

    // Seeds d(loss)/d(loss) = 1 and runs all recorded closures in reverse.
    // Gradients of tensors produced on this tape are reset first, so leaf
    // gradients accumulate by exactly one d(loss)/d(leaf) per call.
    void backward(const Tensor& loss) {
        if (loss.size() != 1) {
            throw ShapeError("backward: loss must be scalar, got " + shape_str(loss.shape()));
        }
        if (!loss.requires_grad()) {
            throw Error("backward: loss does not require grad (no parameters on tape?)");
        }
        for (auto& step : steps_) {
            if (step.output->requires_grad) {
                step.output->grad.assign(step.output->value.size(), 0.0);
            }
        }
        loss.node()->grad[0] += 1.0;
        for (auto it = steps_.rbegin(); it != steps_.rend(); ++it) {
            it->backward();
        }
    }

private:
    struct Step {
        std::function<void()> backward;
        std::shared_ptr<detail::TensorNode> output;
    };
    std::vector<Step> steps_;
};

namespace detail {
inline thread_local Tape* g_current_tape = nullptr;
}

inline Tape* current_tape() { return detail::g_current_tape; }

// Installs a tape as the thread's recording target for the scope's lifetime.
// Ops executed with no active tape run as pure functions (inference mode).
class TapeScope {
public:
    explicit TapeScope(Tape& tape) : prev_(detail::g_current_tape) {
        detail::g_current_tape = &tape;
    }
    ~TapeScope() { detail::g_current_tape = prev_; }

    TapeScope(const TapeScope&) = delete;
    TapeScope& operator=(const TapeScope&) = delete;

private:
    Tape* prev_;
};

}  // namespace hcsa
