#pragma once

#include <utility>
#include <vector>

#include "hyst/interval_set.hpp"
#include "hyst/signal.hpp"

namespace hyst {

// Finite nonnegative combination of point masses with total mass 1; the
// atomic representatives of the measures mu with supp(mu) in the argmax set.
struct DiracMeasure {
    struct Atom {
        double location;
        double weight;  // > 0
    };
    std::vector<Atom> atoms;

    void validate() const;  // weights positive, sum 1 within kTolEq
};

// Picks one element out of the set-valued derivative: a Dirac at the
// rightmost or leftmost maximizer, or equal weights on one representative
// per argmax component. Rightmost is the library-wide default.
enum class SelectionRule { Rightmost, Leftmost, UniformAtoms };

double max_value(const PlSignal& u);

// Exact argmax set {tau : u(tau) = max u}; a finite union of closed
// intervals and points with endpoints at nodes.
IntervalSet argmax_set(const PlSignal& u);

// Exact sublevel set {tau : u(tau) >= max u - delta}. delta >= 0.
IntervalSet near_argmax_set(const PlSignal& u, double delta);

// max of h over an IntervalSet (exact; attained at component endpoints or
// h-nodes inside).
double max_over(const IntervalSet& set, const PlSignal& h);
double min_over(const IntervalSet& set, const PlSignal& h);

// Directional derivative of the maximum functional: max of h over argmax(u).
double directional_derivative(const PlSignal& u, const PlSignal& h);

DiracMeasure select_measure(const IntervalSet& support, SelectionRule rule);
DiracMeasure newton_selection(const PlSignal& u, SelectionRule rule);

double apply_measure(const DiracMeasure& mu, const PlSignal& h);

// Rebuilds the W^{1,1} example (u(s) = 1-s, the capped ramp h_lambda on
// [0,1]) and returns the Newton and Bouligand remainder ratios w.r.t. the
// W^{1,1} norm. Both equal 1/2 for every lambda in (0,1), which is what
// rules out this norm.
struct CounterexampleRatios {
    double newton_ratio;
    double bouligand_ratio;
};
CounterexampleRatios counterexample_w11(double lambda);

// The two signals of the counterexample, exposed for rate studies.
PlSignal counterexample_base();              // 1 - s on [0,1]
PlSignal counterexample_direction(double lambda);  // h_lambda

}  // namespace hyst
