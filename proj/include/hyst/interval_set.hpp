#pragma once

#include <vector>

#include "hyst/common.hpp"

namespace hyst {

// A finite union of disjoint closed intervals [l,r] with l <= r; degenerate
// intervals (points) are allowed. Components are kept sorted and merged.
// Used for argmax sets M(u), sublevel sets M_delta(u), rail-contact sets
// I_0 / I_+ / I_- and good sets A_delta^eps(u).
class IntervalSet {
public:
    struct Interval {
        double lo;
        double hi;
    };

    IntervalSet() = default;
    explicit IntervalSet(std::vector<Interval> components, double tol = kTolEq);

    static IntervalSet point(double x) { return IntervalSet({{x, x}}); }
    static IntervalSet interval(double lo, double hi) { return IntervalSet({{lo, hi}}); }

    const std::vector<Interval>& components() const { return comps_; }
    bool empty() const { return comps_.empty(); }
    std::size_t size() const { return comps_.size(); }

    double min() const;  // leftmost point; throws if empty
    double max() const;  // rightmost point; throws if empty

    bool contains(double x, double tol = kTolEq) const;
    double measure() const;  // total Lebesgue measure

    // Distance from x to the set (0 if contained); +inf for the empty set.
    double distance(double x) const;
    // Minimal distance between points of *this and of other; +inf if either
    // set is empty.
    double distance(const IntervalSet& other) const;

    void add(double lo, double hi);

    // Closed eps-fattening [lo-eps, hi+eps] of every component.
    IntervalSet inflate(double eps) const;

    // Whether every point of *this lies in the *open* Minkowski sum
    // other + (-eps, eps). Boundary contacts count as failures (up to tol).
    bool subset_of_open_neighborhood(const IntervalSet& other, double eps,
                                     double tol = kTolEq) const;

    // Subset test against the closed set `other`, with slack tol.
    bool subset_of(const IntervalSet& other, double tol = kTolEq) const;

    bool same_as(const IntervalSet& other, double tol = kTolEq) const;

    static IntervalSet unite(const IntervalSet& x, const IntervalSet& y);

    // Closure of [lo,hi] minus this set.
    IntervalSet complement_within(double lo, double hi) const;

private:
    void normalize(double tol);
    std::vector<Interval> comps_;
};

}  // namespace hyst
