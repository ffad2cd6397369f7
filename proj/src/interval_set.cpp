#include "hyst/interval_set.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace hyst {

IntervalSet::IntervalSet(std::vector<Interval> components, double tol)
    : comps_(std::move(components)) {
    for (const auto& c : comps_) {
        if (c.hi < c.lo) throw std::invalid_argument("IntervalSet: hi < lo");
    }
    normalize(tol);
}

void IntervalSet::normalize(double tol) {
    std::sort(comps_.begin(), comps_.end(),
              [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    std::vector<Interval> merged;
    for (const auto& c : comps_) {
        if (!merged.empty() && c.lo <= merged.back().hi + tol) {
            merged.back().hi = std::max(merged.back().hi, c.hi);
        } else {
            merged.push_back(c);
        }
    }
    comps_ = std::move(merged);
}

double IntervalSet::min() const {
    if (comps_.empty()) throw std::domain_error("IntervalSet::min on empty set");
    return comps_.front().lo;
}

double IntervalSet::max() const {
    if (comps_.empty()) throw std::domain_error("IntervalSet::max on empty set");
    return comps_.back().hi;
}

bool IntervalSet::contains(double x, double tol) const {
    for (const auto& c : comps_) {
        if (x >= c.lo - tol && x <= c.hi + tol) return true;
    }
    return false;
}

double IntervalSet::measure() const {
    double m = 0.0;
    for (const auto& c : comps_) m += c.hi - c.lo;
    return m;
}

double IntervalSet::distance(double x) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : comps_) {
        if (x < c.lo)
            d = std::min(d, c.lo - x);
        else if (x > c.hi)
            d = std::min(d, x - c.hi);
        else
            return 0.0;
    }
    return d;
}

double IntervalSet::distance(const IntervalSet& other) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& c : comps_) {
        d = std::min(d, other.distance(c.lo));
        d = std::min(d, other.distance(c.hi));
        // Disjoint closed intervals attain their mutual distance at endpoints.
    }
    for (const auto& c : other.comps_) {
        d = std::min(d, distance(c.lo));
        d = std::min(d, distance(c.hi));
    }
    return d;
}

void IntervalSet::add(double lo, double hi) {
    if (hi < lo) throw std::invalid_argument("IntervalSet::add: hi < lo");
    comps_.push_back({lo, hi});
    normalize(kTolEq);
}

IntervalSet IntervalSet::inflate(double eps) const {
    std::vector<Interval> out;
    out.reserve(comps_.size());
    for (const auto& c : comps_) out.push_back({c.lo - eps, c.hi + eps});
    return IntervalSet(std::move(out));
}

bool IntervalSet::subset_of_open_neighborhood(const IntervalSet& other, double eps,
                                              double tol) const {
    // Merge the open intervals (lo-eps, hi+eps); two of them only join into
    // one interval when they genuinely overlap, not when they merely touch.
    std::vector<Interval> open;
    for (const auto& c : other.comps_) open.push_back({c.lo - eps, c.hi + eps});
    std::sort(open.begin(), open.end(),
              [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    std::vector<Interval> merged;
    for (const auto& c : open) {
        if (!merged.empty() && c.lo < merged.back().hi - tol) {
            merged.back().hi = std::max(merged.back().hi, c.hi);
        } else {
            merged.push_back(c);
        }
    }
    for (const auto& c : comps_) {
        bool covered = false;
        for (const auto& m : merged) {
            // strictly inside the open interval, with at least tol of margin
            if (c.lo >= m.lo + tol && c.hi <= m.hi - tol) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
    }
    return true;
}

bool IntervalSet::subset_of(const IntervalSet& other, double tol) const {
    for (const auto& c : comps_) {
        bool covered = false;
        for (const auto& m : other.comps_) {
            if (c.lo >= m.lo - tol && c.hi <= m.hi + tol) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
    }
    return true;
}

IntervalSet IntervalSet::unite(const IntervalSet& x, const IntervalSet& y) {
    std::vector<Interval> all = x.comps_;
    all.insert(all.end(), y.comps_.begin(), y.comps_.end());
    return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::complement_within(double lo, double hi) const {
    std::vector<Interval> out;
    double cursor = lo;
    for (const auto& c : comps_) {
        if (c.lo > cursor) out.push_back({cursor, std::min(c.lo, hi)});
        cursor = std::max(cursor, c.hi);
        if (cursor >= hi) break;
    }
    if (cursor < hi) out.push_back({cursor, hi});
    return IntervalSet(std::move(out));
}

bool IntervalSet::same_as(const IntervalSet& other, double tol) const {
    if (comps_.size() != other.comps_.size()) return false;
    for (std::size_t i = 0; i < comps_.size(); ++i) {
        if (!approx_eq(comps_[i].lo, other.comps_[i].lo, tol)) return false;
        if (!approx_eq(comps_[i].hi, other.comps_[i].hi, tol)) return false;
    }
    return true;
}

}  // namespace hyst
