#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace edgegcn {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

// One vertex of the differentiation tape. A node owns its value and, when it
// participates in differentiation, a gradient buffer of identical shape.
struct Node {
    Shape shape;
    std::vector<double> data;
    std::vector<double> grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    // Adds this node's grad into the grads of its parents. Empty for leaves.
    std::function<void(Node&)> backward;
};

} // namespace detail

/// Dense row-major array of 64-bit reals with reverse-mode differentiation.
///
/// Tensor is a cheap handle: copies share the same storage. Use clone() for
/// an independent value copy. Every op that consumes a tensor with
/// requires_grad() set records itself on the tape so that backward() can
/// later propagate gradients to all contributing leaves.
class Tensor {
public:
    Tensor();

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double value, bool requires_grad = false);
    static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);

    const Shape& shape() const;
    std::size_t rank() const { return shape().size(); }
    std::size_t dim(std::size_t axis) const;
    std::size_t numel() const;

    std::span<const double> data() const;
    /// Mutable view of the values. Writing through it does not touch the tape;
    /// use only on leaves (parameters, inputs) between forward passes.
    std::span<double> mutable_data();
    std::span<const double> grad() const;
    std::span<double> mutable_grad();

    bool requires_grad() const;
    /// Turns a leaf into a differentiable parameter (allocating its grad).
    void set_requires_grad(bool flag);
    bool is_leaf() const;
    void zero_grad();

    /// Value of a single-element tensor.
    double item() const;
    double at(std::initializer_list<std::size_t> index) const;

    /// Deep copy of the value as a new leaf.
    Tensor clone() const;
    /// Same value, cut from the tape.
    Tensor detach() const;

    bool defined() const { return static_cast<bool>(node_); }
    bool same_node(const Tensor& other) const { return node_ == other.node_; }

    // Tape plumbing used by op implementations.
    explicit Tensor(std::shared_ptr<detail::Node> node);
    const std::shared_ptr<detail::Node>& node() const { return node_; }

private:
    std::shared_ptr<detail::Node> node_;
};

/// Reverse pass from a single-element loss. Leaf gradients accumulate across
/// calls until zeroed; intermediate gradients are recomputed each call.
void backward(const Tensor& loss);

/// Disables tape recording on the current thread for its lifetime.
class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool previous_;
};

bool grad_enabled();

/// When on, every op verifies its output is finite and throws NumericError.
void set_debug_checks(bool enabled);
bool debug_checks();

} // namespace edgegcn
