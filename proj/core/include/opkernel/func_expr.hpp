#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "opkernel/domain_set.hpp"

namespace opkernel {

/// Which variable a leaf refers to.  Univariate expressions use only T;
/// bivariate kernel expressions may use both.
enum class Axis { T = 0, S = 1 };

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what), position_(position) {}
    std::size_t position() const { return position_; }

  private:
    std::size_t position_;
};

/// Immutable symbolic function tree.
///
/// Node kinds: constants, the variables t/s, closed-set indicators, sin, cos,
/// exp, non-negative integer powers, +, -, *, and scaling by a constant.
/// Evaluation is total on the reals: the grammar admits `/` only when the
/// divisor folds to a nonzero constant at parse time, so no division node
/// ever exists in a tree.
class FuncExpr {
  public:
    FuncExpr();  // the zero function

    /// Parse a univariate expression in t.
    static FuncExpr parse(std::string_view text);
    /// Parse a bivariate expression in t and s.  `ind(lo,hi)` applies to t;
    /// `ind(lo,hi,s)` applies to s.
    static FuncExpr parse_bivariate(std::string_view text);

    static FuncExpr constant(double c);
    static FuncExpr var(Axis axis = Axis::T);
    static FuncExpr indicator(const LebesgueSet& set, Axis axis = Axis::T);

    FuncExpr operator+(const FuncExpr& rhs) const;
    FuncExpr operator-(const FuncExpr& rhs) const;
    FuncExpr operator*(const FuncExpr& rhs) const;
    FuncExpr scaled(double c) const;
    FuncExpr pow(int n) const;

    friend FuncExpr sin(const FuncExpr& f);
    friend FuncExpr cos(const FuncExpr& f);
    friend FuncExpr exp(const FuncExpr& f);

    double operator()(double t) const;
    double operator()(double t, double s) const;

    bool uses_axis(Axis axis) const;

    /// True when the tree contains any indicator node.
    bool has_jumps() const;

    /// Indicator endpoints on the given axis inside [lo, hi], plus the window
    /// endpoints themselves; sorted, deduplicated within 1e-14.
    std::vector<double> breakpoints(double lo, double hi, Axis axis = Axis::T) const;

    /// Canonical text form; parse(to_string()) reproduces the same tree.
    std::string to_string() const;

    bool operator==(const FuncExpr& rhs) const;

    struct Node;

  private:
    explicit FuncExpr(std::shared_ptr<const Node> root);
    std::shared_ptr<const Node> root_;
};

/// Piecewise-constant function: one value per cell of an ordered partition.
/// Values on cell boundaries are immaterial under a.e. semantics.
class SimpleFunction {
  public:
    SimpleFunction(OrderedPartition partition, std::vector<double> values);

    const OrderedPartition& partition() const { return partition_; }
    const std::vector<double>& values() const { return values_; }

    double operator()(double t) const;

    /// Expansion as a sum of scaled indicators.
    FuncExpr to_expr() const;

  private:
    OrderedPartition partition_;
    std::vector<double> values_;
};

}  // namespace opkernel
