#pragma once

#include <vector>

#include "hyst/interval_set.hpp"
#include "hyst/maxfun.hpp"
#include "hyst/signal.hpp"

namespace hyst {

// t -> m(t) = max M_t(u), the rightmost running maximizer. Nondecreasing and
// right-continuous; regimes are either the identity m(t) = t (u sits at its
// running maximum) or frozen at the last attainment point.
struct MaximizerPath {
    struct Regime {
        double lo, hi;
        bool identity;
        double frozen_point;  // valid when !identity
    };
    std::vector<Regime> regimes;  // tile [a,b]; a degenerate [b,b] regime marks a final touch

    double at(double t) const;
};

struct GoodSetReport {
    double delta = 0.0;
    double eps = 0.0;
    IntervalSet good_set;        // A_delta^eps(u), closure of the good interior
    double complement_measure = 0.0;
};

// Running maximum F(u)(t) = max u over [a,t]; exact, nondecreasing; output
// grid is the input grid plus the points where u re-attains its running max.
PlSignal accumulated_max(const PlSignal& u);

// Exact M_t(u) and M_{t,delta}(u).
IntervalSet argmax_to(const PlSignal& u, double t);
IntervalSet near_argmax_to(const PlSignal& u, double t, double delta);

MaximizerPath maximizer_path(const PlSignal& u);

// t -> max over M_t(u) of h; jumps at regime changes carry one-sided limits,
// the value at t = b is attached exactly.
StepLinSignal pointwise_dir_derivative(const PlSignal& u, const PlSignal& h);

// t -> <mu_t, h> with mu_t in Phi_t(v) picked by the rule (default rule is
// the Dirac at m(t)).
StepLinSignal newton_apply(const PlSignal& v, const PlSignal& h, SelectionRule rule);

// The Dirac selection mu_t at a fixed time, for pointwise checks.
DiracMeasure selection_at(const PlSignal& v, double t, SelectionRule rule);

// The set of times where M_{t,delta}(u) fits inside the open eps-neighborhood
// of M_t(u). Exact for piecewise-linear u via an event decomposition; the
// event set is quadratic in the node count, so this is intended for modest
// grids.
GoodSetReport good_set(const PlSignal& u, double delta, double eps);

enum class DerivativeFlavor { Newton, Bouligand };

// ||F(u+h) - F(u) - D||_{L^q(a,gamma)} where D is the Newton action taken at
// the perturbed point u+h (per the remainder definition) or the pointwise
// directional derivative at u.
double remainder_lq(const PlSignal& u, const PlSignal& h, DerivativeFlavor flavor,
                    SelectionRule rule, double lq_exponent, double gamma);

namespace detail {

// Cell decomposition of the running-max structure: per refined segment,
// whether u sits strictly below its running max (Frozen), rises strictly at
// the max (Rise), or moves along a plateau at the max level (Flat).
struct MaxAnalysis {
    PlSignal input;        // refined: original nodes + re-attainment crossings
    PlSignal running_max;  // on the refined grid
    enum class CellKind { Frozen, Rise, Flat };
    struct Cell {
        CellKind kind;
        double anchor;  // rightmost maximizer on the open cell (Frozen only)
    };
    std::vector<Cell> cells;  // one per refined segment
    bool final_touch = false; // u(b) re-attains the max but the last cell is frozen

    double m_at(double t) const;          // rightmost maximizer of [a,t]
    IntervalSet argmax_at(double t) const;  // exact M_t, direct query
};

MaxAnalysis analyze_running_max(const PlSignal& v);

// t -> <mu_t, h>, atoms placed in the argmax set of v over [a,t] by rule.
StepLinSignal selection_apply(const MaxAnalysis& A, const PlSignal& h, SelectionRule rule);

// t -> max over M_t(v) of h.
StepLinSignal argmax_max_of(const MaxAnalysis& A, const PlSignal& h);

}  // namespace detail

}  // namespace hyst
