#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace opkernel {

/// Closed real interval [lo, hi].  Endpoints may be +-infinity.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    bool contains(double t) const { return t >= lo && t <= hi; }
    bool operator==(const Interval&) const = default;
};

/// Finite union of disjoint closed intervals with Lebesgue measure.
///
/// The representation is normalized: intervals are sorted by lower endpoint
/// and merged whenever they overlap or touch, so equality is structural.
/// All downstream semantics are almost-everywhere, so endpoint membership
/// ambiguity (closed vs half-open) is deliberate and harmless.
class LebesgueSet {
  public:
    LebesgueSet() = default;
    explicit LebesgueSet(std::vector<Interval> intervals);

    static LebesgueSet empty_set() { return LebesgueSet{}; }
    static LebesgueSet interval(double lo, double hi);
    static LebesgueSet real_line();

    const std::vector<Interval>& intervals() const { return intervals_; }
    bool empty() const { return intervals_.empty(); }
    bool bounded() const;

    /// Sum of interval lengths; +infinity when an unbounded interval is present.
    double measure() const;

    bool contains(double t) const;

    /// Hull endpoints.  Undefined (throws) on the empty set.
    double inf() const;
    double sup() const;
    Interval hull() const;

    bool operator==(const LebesgueSet&) const = default;

    std::string to_string() const;

  private:
    std::vector<Interval> intervals_;  // disjoint, sorted by lo
};

LebesgueSet intersect(const LebesgueSet& s1, const LebesgueSet& s2);
LebesgueSet set_minus(const LebesgueSet& s1, const LebesgueSet& s2);
LebesgueSet set_union(const LebesgueSet& s1, const LebesgueSet& s2);

/// Ordered list of cells covering a base interval [alpha, beta].
///
/// Cells are pairwise disjoint up to endpoints, their union is the base
/// interval, and they are ordered: sup(cell k1) <= inf(cell k2) for k1 < k2.
/// Construction throws std::invalid_argument when any requirement fails.
class OrderedPartition {
  public:
    OrderedPartition(double alpha, double beta, std::vector<LebesgueSet> cells);

    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    const std::vector<LebesgueSet>& cells() const { return cells_; }
    std::size_t size() const { return cells_.size(); }

    /// Index of the cell containing t; boundary points resolve to the first
    /// matching cell.  Returns size() when t lies outside every cell.
    std::size_t cell_of(double t) const;

  private:
    double alpha_;
    double beta_;
    std::vector<LebesgueSet> cells_;
};

/// Numeric stand-in for "equal to zero almost everywhere".
///
/// A sampled function is a.e. zero when the quadrature measure of
/// { |value| > eps_value + eps_rel * max|value| } does not exceed eps_measure.
struct AeTolerance {
    double eps_value = 1e-9;
    double eps_rel = 1e-9;
    double eps_measure = 1e-6;

    /// Default tolerance scaled to a base domain: eps_measure becomes
    /// 1e-6 * base_measure.
    static AeTolerance defaults_for(double base_measure);

    void validate() const;
};

struct AeVerdict {
    bool is_ae_zero = false;
    double violation_measure = 0.0;
    double max_abs = 0.0;
};

/// Decide whether weighted samples represent an a.e.-zero function.
/// Throws std::invalid_argument on an empty grid.
AeVerdict ae_zero(std::span<const double> values, std::span<const double> weights,
                  const AeTolerance& tol);

}  // namespace opkernel
