#include "opkernel/domain_set.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace opkernel {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

LebesgueSet::LebesgueSet(std::vector<Interval> intervals) {
    for (const auto& iv : intervals) {
        if (std::isnan(iv.lo) || std::isnan(iv.hi)) {
            throw std::invalid_argument("interval endpoint is NaN");
        }
        if (iv.lo > iv.hi) {
            throw std::invalid_argument("interval has lo > hi");
        }
    }
    std::sort(intervals.begin(), intervals.end(),
              [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (const auto& iv : intervals) {
        if (!intervals_.empty() && iv.lo <= intervals_.back().hi) {
            intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
        } else {
            intervals_.push_back(iv);
        }
    }
}

LebesgueSet LebesgueSet::interval(double lo, double hi) {
    return LebesgueSet{{Interval{lo, hi}}};
}

LebesgueSet LebesgueSet::real_line() { return interval(-kInf, kInf); }

bool LebesgueSet::bounded() const {
    for (const auto& iv : intervals_) {
        if (std::isinf(iv.lo) || std::isinf(iv.hi)) return false;
    }
    return true;
}

double LebesgueSet::measure() const {
    double m = 0.0;
    for (const auto& iv : intervals_) m += iv.length();
    return m;
}

bool LebesgueSet::contains(double t) const {
    // intervals are sorted; binary search on lo
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    if (it == intervals_.begin()) return false;
    return std::prev(it)->contains(t);
}

double LebesgueSet::inf() const {
    if (empty()) throw std::invalid_argument("inf() of empty set");
    return intervals_.front().lo;
}

double LebesgueSet::sup() const {
    if (empty()) throw std::invalid_argument("sup() of empty set");
    return intervals_.back().hi;
}

Interval LebesgueSet::hull() const { return Interval{inf(), sup()}; }

std::string LebesgueSet::to_string() const {
    std::ostringstream os;
    os << "{";
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        if (i) os << " u ";
        os << "[" << intervals_[i].lo << "," << intervals_[i].hi << "]";
    }
    os << "}";
    return os.str();
}

LebesgueSet intersect(const LebesgueSet& s1, const LebesgueSet& s2) {
    std::vector<Interval> out;
    const auto& a = s1.intervals();
    const auto& b = s2.intervals();
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double lo = std::max(a[i].lo, b[j].lo);
        const double hi = std::min(a[i].hi, b[j].hi);
        if (lo <= hi) out.push_back(Interval{lo, hi});
        if (a[i].hi < b[j].hi) {
            ++i;
        } else {
            ++j;
        }
    }
    return LebesgueSet{std::move(out)};
}

LebesgueSet set_minus(const LebesgueSet& s1, const LebesgueSet& s2) {
    std::vector<Interval> out;
    const auto& b = s2.intervals();
    for (const auto& iv : s1.intervals()) {
        double cursor = iv.lo;
        for (const auto& cut : b) {
            if (cut.hi < cursor) continue;
            if (cut.lo > iv.hi) break;
            if (cut.lo > cursor) out.push_back(Interval{cursor, cut.lo});
            cursor = std::max(cursor, cut.hi);
            if (cursor >= iv.hi) break;
        }
        if (cursor < iv.hi) out.push_back(Interval{cursor, iv.hi});
    }
    return LebesgueSet{std::move(out)};
}

LebesgueSet set_union(const LebesgueSet& s1, const LebesgueSet& s2) {
    std::vector<Interval> out = s1.intervals();
    out.insert(out.end(), s2.intervals().begin(), s2.intervals().end());
    return LebesgueSet{std::move(out)};
}

OrderedPartition::OrderedPartition(double alpha, double beta, std::vector<LebesgueSet> cells)
    : alpha_(alpha), beta_(beta), cells_(std::move(cells)) {
    if (!(alpha < beta)) throw std::invalid_argument("partition base requires alpha < beta");
    if (cells_.empty()) throw std::invalid_argument("partition needs at least one cell");

    LebesgueSet covered;
    double covered_measure = 0.0;
    for (std::size_t k = 0; k < cells_.size(); ++k) {
        const auto& cell = cells_[k];
        if (cell.empty()) throw std::invalid_argument("partition cell is empty");
        if (!cell.bounded()) throw std::invalid_argument("partition cell is unbounded");
        if (cell.inf() < alpha_ - 1e-12 || cell.sup() > beta_ + 1e-12) {
            throw std::invalid_argument("partition cell escapes the base interval");
        }
        if (intersect(covered, cell).measure() > 1e-12 * (beta_ - alpha_)) {
            throw std::invalid_argument("partition cells overlap");
        }
        if (k + 1 < cells_.size()) {
            // order condition against every later cell reduces to the next one
            // after sorting-by-construction is enforced below
            const auto& next = cells_[k + 1];
            if (cell.sup() > next.inf() + 1e-12) {
                throw std::invalid_argument("partition violates sup(cell k) <= inf(cell k+1)");
            }
        }
        covered = set_union(covered, cell);
        covered_measure += cell.measure();
    }
    if (std::abs(covered_measure - (beta_ - alpha_)) > 1e-9 * (beta_ - alpha_)) {
        throw std::invalid_argument("partition cells do not cover the base interval");
    }
}

std::size_t OrderedPartition::cell_of(double t) const {
    for (std::size_t k = 0; k < cells_.size(); ++k) {
        if (cells_[k].contains(t)) return k;
    }
    return cells_.size();
}

AeTolerance AeTolerance::defaults_for(double base_measure) {
    AeTolerance tol;
    tol.eps_measure = 1e-6 * base_measure;
    tol.validate();
    return tol;
}

void AeTolerance::validate() const {
    if (!(eps_value > 0.0) || !(eps_rel > 0.0) || !(eps_measure > 0.0)) {
        throw std::invalid_argument("AeTolerance fields must be strictly positive");
    }
}

AeVerdict ae_zero(std::span<const double> values, std::span<const double> weights,
                  const AeTolerance& tol) {
    if (values.empty()) throw std::invalid_argument("empty domain");
    if (values.size() != weights.size()) {
        throw std::invalid_argument("values/weights size mismatch");
    }
    tol.validate();

    AeVerdict v;
    for (double x : values) v.max_abs = std::max(v.max_abs, std::abs(x));
    const double threshold = tol.eps_value + tol.eps_rel * v.max_abs;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::abs(values[i]) > threshold) v.violation_measure += weights[i];
    }
    v.is_ae_zero = v.violation_measure <= tol.eps_measure;
    return v;
}

}  // namespace opkernel
