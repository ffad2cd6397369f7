#include "hyst/maxfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hyst {

void DiracMeasure::validate() const {
    double total = 0.0;
    for (const auto& a : atoms) {
        if (!(a.weight > 0.0)) throw std::invalid_argument("DiracMeasure: weights must be positive");
        total += a.weight;
    }
    if (!approx_eq(total, 1.0)) throw std::invalid_argument("DiracMeasure: total mass must be 1");
}

double max_value(const PlSignal& u) {
    return *std::max_element(u.values().begin(), u.values().end());
}

IntervalSet argmax_set(const PlSignal& u) {
    return near_argmax_set(u, 0.0);
}

IntervalSet near_argmax_set(const PlSignal& u, double delta) {
    if (delta < 0.0) throw std::invalid_argument("near_argmax_set: delta >= 0 required");
    const double level = max_value(u) - delta;
    const auto& n = u.grid().nodes();
    const auto& v = u.values();
    std::vector<IntervalSet::Interval> comps;
    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
        bool in0 = v[i] >= level - kTolEq;
        bool in1 = v[i + 1] >= level - kTolEq;
        if (in0 && in1) {
            comps.push_back({n[i], n[i + 1]});
        } else if (in0 != in1) {
            // linear crossing of the level inside the segment
            double tc = n[i] + (level - v[i]) / (v[i + 1] - v[i]) * (n[i + 1] - n[i]);
            tc = std::clamp(tc, n[i], n[i + 1]);
            if (in0)
                comps.push_back({n[i], tc});
            else
                comps.push_back({tc, n[i + 1]});
        }
    }
    return IntervalSet(std::move(comps));
}

double max_over(const IntervalSet& set, const PlSignal& h) {
    if (set.empty()) throw std::domain_error("max_over: empty set");
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : set.components()) {
        best = std::max(best, std::max(h.eval(c.lo), h.eval(c.hi)));
        for (double t : h.grid().nodes())
            if (t > c.lo && t < c.hi) best = std::max(best, h.eval(t));
    }
    return best;
}

double min_over(const IntervalSet& set, const PlSignal& h) {
    if (set.empty()) throw std::domain_error("min_over: empty set");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : set.components()) {
        best = std::min(best, std::min(h.eval(c.lo), h.eval(c.hi)));
        for (double t : h.grid().nodes())
            if (t > c.lo && t < c.hi) best = std::min(best, h.eval(t));
    }
    return best;
}

double directional_derivative(const PlSignal& u, const PlSignal& h) {
    if (!approx_eq(u.a(), h.a()) || !approx_eq(u.b(), h.b()))
        throw std::domain_error("directional_derivative: domain mismatch");
    return max_over(argmax_set(u), h);
}

DiracMeasure select_measure(const IntervalSet& support, SelectionRule rule) {
    if (support.empty()) throw std::domain_error("select_measure: empty support");
    DiracMeasure mu;
    switch (rule) {
        case SelectionRule::Rightmost:
            mu.atoms.push_back({support.max(), 1.0});
            break;
        case SelectionRule::Leftmost:
            mu.atoms.push_back({support.min(), 1.0});
            break;
        case SelectionRule::UniformAtoms: {
            double w = 1.0 / static_cast<double>(support.size());
            for (const auto& c : support.components()) mu.atoms.push_back({c.hi, w});
            break;
        }
    }
    return mu;
}

DiracMeasure newton_selection(const PlSignal& u, SelectionRule rule) {
    return select_measure(argmax_set(u), rule);
}

double apply_measure(const DiracMeasure& mu, const PlSignal& h) {
    double acc = 0.0;
    for (const auto& a : mu.atoms) acc += a.weight * h.eval(a.location);
    return acc;
}

PlSignal counterexample_base() {
    return PlSignal({0.0, 1.0}, {1.0, 0.0});
}

PlSignal counterexample_direction(double lambda) {
    if (!(lambda > 0.0) || !(lambda < 1.0))
        throw std::invalid_argument("counterexample_direction: lambda in (0,1) required");
    return PlSignal({0.0, lambda, 1.0}, {0.0, 2.0 * lambda, 2.0 * lambda});
}

CounterexampleRatios counterexample_w11(double lambda) {
    PlSignal u = counterexample_base();
    PlSignal h = counterexample_direction(lambda);
    PlSignal uh = add(u, h);
    double gap = max_value(uh) - max_value(u);
    double denom = w11_norm(h);
    DiracMeasure mu = newton_selection(uh, SelectionRule::Rightmost);
    double newton = std::abs(gap - apply_measure(mu, h)) / denom;
    double bouligand = std::abs(gap - directional_derivative(u, h)) / denom;
    return {newton, bouligand};
}

}  // namespace hyst
