#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gradex/geometry.hpp"

namespace gradex::ad {

/// Elementary operations recorded on the tape. Piecewise operations (Max*,
/// Min*, Wrap) record which branch was taken when the value was computed.
enum class Op : std::uint8_t {
    Leaf,   // independent input
    Const,  // captured constant
    Add,    // a + b
    Sub,    // a - b
    Mul,    // a * b
    Div,    // a / b
    Neg,    // -a
    AddC,   // a + aux
    MulC,   // a * aux
    SubC,   // aux - a
    DivC,   // a / aux
    Sin,    // sin(a)
    Cos,    // cos(a)
    Sqrt,   // sqrt(a)
    Exp,    // exp(a)
    MaxL,   // max(a, b), left branch active
    MaxR,   // max(a, b), right branch active
    Wrap,   // angle reduced to (-pi, pi]
};

class Var;

/// Operation record of a scalar computation, supporting exact forward
/// replay and reverse-mode adjoint accumulation.
class Tape {
public:
    struct Node {
        Op op = Op::Const;
        std::int32_t a = -1;
        std::int32_t b = -1;
        double aux = 0.0;
        double value = 0.0;
    };

    Var leaf(double v);
    Var constant(double v);

    std::size_t size() const { return nodes_.size(); }
    const Node& node(std::size_t k) const { return nodes_[k]; }
    void reserve(std::size_t n) { nodes_.reserve(n); }
    void clear() { nodes_.clear(); }

    /// Recompute every node value in order from the recorded operations.
    /// Reproduces the original forward pass exactly.
    void replay() {
        for (Node& n : nodes_) {
            switch (n.op) {
                case Op::Leaf:
                case Op::Const: break;
                case Op::Add: n.value = nodes_[n.a].value + nodes_[n.b].value; break;
                case Op::Sub: n.value = nodes_[n.a].value - nodes_[n.b].value; break;
                case Op::Mul: n.value = nodes_[n.a].value * nodes_[n.b].value; break;
                case Op::Div: n.value = nodes_[n.a].value / nodes_[n.b].value; break;
                case Op::Neg: n.value = -nodes_[n.a].value; break;
                case Op::AddC: n.value = nodes_[n.a].value + n.aux; break;
                case Op::MulC: n.value = nodes_[n.a].value * n.aux; break;
                case Op::SubC: n.value = n.aux - nodes_[n.a].value; break;
                case Op::DivC: n.value = nodes_[n.a].value / n.aux; break;
                case Op::Sin: n.value = std::sin(nodes_[n.a].value); break;
                case Op::Cos: n.value = std::cos(nodes_[n.a].value); break;
                case Op::Sqrt: n.value = std::sqrt(nodes_[n.a].value); break;
                case Op::Exp: n.value = std::exp(nodes_[n.a].value); break;
                case Op::MaxL:
                case Op::MaxR:
                    n.value = std::max(nodes_[n.a].value, nodes_[n.b].value);
                    break;
                case Op::Wrap: n.value = wrap_angle(nodes_[n.a].value); break;
            }
        }
    }

    /// Reverse sweep from the given output node: returns the adjoint of
    /// every node. Piecewise nodes propagate along their recorded branch.
    std::vector<double> adjoints(std::int32_t output) const {
        std::vector<double> adj(nodes_.size(), 0.0);
        adj[output] = 1.0;
        for (std::int32_t k = static_cast<std::int32_t>(nodes_.size()) - 1; k >= 0; --k) {
            double g = adj[k];
            if (g == 0.0) continue;
            const Node& n = nodes_[k];
            switch (n.op) {
                case Op::Leaf:
                case Op::Const: break;
                case Op::Add:
                    adj[n.a] += g;
                    adj[n.b] += g;
                    break;
                case Op::Sub:
                    adj[n.a] += g;
                    adj[n.b] -= g;
                    break;
                case Op::Mul:
                    adj[n.a] += g * nodes_[n.b].value;
                    adj[n.b] += g * nodes_[n.a].value;
                    break;
                case Op::Div: {
                    double vb = nodes_[n.b].value;
                    adj[n.a] += g / vb;
                    adj[n.b] -= g * nodes_[n.a].value / (vb * vb);
                    break;
                }
                case Op::Neg: adj[n.a] -= g; break;
                case Op::AddC: adj[n.a] += g; break;
                case Op::MulC: adj[n.a] += g * n.aux; break;
                case Op::SubC: adj[n.a] -= g; break;
                case Op::DivC: adj[n.a] += g / n.aux; break;
                case Op::Sin: adj[n.a] += g * std::cos(nodes_[n.a].value); break;
                case Op::Cos: adj[n.a] -= g * std::sin(nodes_[n.a].value); break;
                case Op::Sqrt: adj[n.a] += g * 0.5 / n.value; break;
                case Op::Exp: adj[n.a] += g * n.value; break;
                case Op::MaxL: adj[n.a] += g; break;
                case Op::MaxR: adj[n.b] += g; break;
                case Op::Wrap: adj[n.a] += g; break;
            }
        }
        return adj;
    }

private:
    std::vector<Node> nodes_;
    friend class Var;

    std::int32_t push(Node n) {
        nodes_.push_back(n);
        return static_cast<std::int32_t>(nodes_.size() - 1);
    }
};

/// Scalar bound to a tape node. Arithmetic on Vars records the operation.
class Var {
public:
    Var() = default;
    Var(Tape* tape, std::int32_t index, double value)
        : tape_(tape), index_(index), value_(value) {}

    double value() const { return value_; }
    std::int32_t index() const { return index_; }
    Tape* tape() const { return tape_; }

    Var make(Op op, std::int32_t a, std::int32_t b, double aux, double value) const {
        return Var(tape_, tape_->push({op, a, b, aux, value}), value);
    }

    friend Var operator+(const Var& a, const Var& b) {
        return a.make(Op::Add, a.index_, b.index_, 0.0, a.value_ + b.value_);
    }
    friend Var operator-(const Var& a, const Var& b) {
        return a.make(Op::Sub, a.index_, b.index_, 0.0, a.value_ - b.value_);
    }
    friend Var operator*(const Var& a, const Var& b) {
        return a.make(Op::Mul, a.index_, b.index_, 0.0, a.value_ * b.value_);
    }
    friend Var operator/(const Var& a, const Var& b) {
        return a.make(Op::Div, a.index_, b.index_, 0.0, a.value_ / b.value_);
    }
    friend Var operator-(const Var& a) {
        return a.make(Op::Neg, a.index_, -1, 0.0, -a.value_);
    }
    friend Var operator+(const Var& a, double c) {
        return a.make(Op::AddC, a.index_, -1, c, a.value_ + c);
    }
    friend Var operator+(double c, const Var& a) { return a + c; }
    friend Var operator-(const Var& a, double c) {
        return a.make(Op::AddC, a.index_, -1, -c, a.value_ - c);
    }
    friend Var operator-(double c, const Var& a) {
        return a.make(Op::SubC, a.index_, -1, c, c - a.value_);
    }
    friend Var operator*(const Var& a, double c) {
        return a.make(Op::MulC, a.index_, -1, c, a.value_ * c);
    }
    friend Var operator*(double c, const Var& a) { return a * c; }
    friend Var operator/(const Var& a, double c) {
        return a.make(Op::DivC, a.index_, -1, c, a.value_ / c);
    }

private:
    Tape* tape_ = nullptr;
    std::int32_t index_ = -1;
    double value_ = 0.0;
};

inline Var Tape::leaf(double v) { return Var(this, push({Op::Leaf, -1, -1, 0.0, v}), v); }
inline Var Tape::constant(double v) { return Var(this, push({Op::Const, -1, -1, 0.0, v}), v); }

inline Var sin(const Var& a) {
    return a.make(Op::Sin, a.index(), -1, 0.0, std::sin(a.value()));
}
inline Var cos(const Var& a) {
    return a.make(Op::Cos, a.index(), -1, 0.0, std::cos(a.value()));
}
inline Var sqrt(const Var& a) {
    return a.make(Op::Sqrt, a.index(), -1, 0.0, std::sqrt(a.value()));
}
inline Var exp(const Var& a) {
    return a.make(Op::Exp, a.index(), -1, 0.0, std::exp(a.value()));
}
inline Var max(const Var& a, const Var& b) {
    bool left = a.value() >= b.value();
    return a.make(left ? Op::MaxL : Op::MaxR, a.index(), b.index(), 0.0,
                  left ? a.value() : b.value());
}
inline Var wrap_angle(const Var& a) {
    return a.make(Op::Wrap, a.index(), -1, 0.0, gradex::wrap_angle(a.value()));
}

}  // namespace gradex::ad

namespace gradex {

// Uniform scalar access so numeric templates instantiate for both plain
// doubles and tape variables.
inline double value_of(double x) { return x; }
inline double value_of(const ad::Var& x) { return x.value(); }

inline double smax(double a, double b) { return std::max(a, b); }
inline ad::Var smax(const ad::Var& a, const ad::Var& b) { return ad::max(a, b); }

// Make a constant scalar on the same tape as `ref` (or a plain double).
inline double constant_like(double, double v) { return v; }
inline ad::Var constant_like(const ad::Var& ref, double v) { return ref.tape()->constant(v); }

}  // namespace gradex
