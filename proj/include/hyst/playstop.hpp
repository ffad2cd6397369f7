#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "hyst/accmax.hpp"
#include "hyst/interval_set.hpp"
#include "hyst/maxfun.hpp"
#include "hyst/signal.hpp"

namespace hyst {

struct PlayConfig {
    double r = 0.0;   // characteristic half-width, r >= 0
    double z0 = 0.0;  // initial stop value (clamped to [-r,r] at start)
};

inline double default_tol_active(double r) { return 1e-9 * std::max(1.0, r); }

// pi_r: projection onto [-r,r].
double clamp_to(double x, double r);

struct PlayResult {
    PlSignal w;  // play output, grid = input nodes + rail switching points
    PlSignal z;  // stop output on the same grid; z = u - w, |z| <= r
};

// Exact play/stop on the monotonicity partition induced by the nodes
// (every linear segment is monotone). w moves only while z sits on a rail.
PlayResult play(const PlSignal& u, const PlayConfig& cfg);
PlSignal stop(const PlSignal& u, const PlayConfig& cfg);

struct RailSets {
    IntervalSet i0;      // |z| < r
    IntervalSet iplus;   // z = +r (within tol_active)
    IntervalSet iminus;  // z = -r
    double delta_i = 0.0;  // min distance between iplus and iminus; +inf if either empty
};

RailSets classify_intervals(const PlSignal& u, const PlayConfig& cfg, double tol_active);

enum class IntervalLabel { Plus, Minus };

// Partition of [a,b] into plus/minus intervals together with a validated
// stability radius: each labeled interval keeps its character for the base
// point (exactly) and for sampled perturbations in the delta-ball.
struct Decomposition {
    std::vector<double> partition;      // t_0 = a < ... < t_N = b
    std::vector<IntervalLabel> labels;  // one per partition interval
    double delta = 0.0;
    double delta_i = 0.0;
    RailSets rails;       // rail sets of the base point
    PlSignal base_u;
    double base_z0 = 0.0;
    PlayConfig cfg;

    std::size_t interval_count() const { return labels.size(); }
    void require_in_ball(const PlSignal& v, double y0) const;    // throws stale_decomposition
    void require_base_point(const PlSignal& u, double z0) const;
};

// Builds the partition by cutting the gaps between rail components of
// opposite polarity at their midpoints, then validates the plus/minus
// property for the base point, for a Lipschitz margin bound, and for
// n_samples random perturbations in the delta-ball; delta halves on failure
// (at most 20 times, then decomposition_error).
Decomposition local_partition(const PlSignal& u, const PlayConfig& cfg,
                              int n_samples = 32, unsigned seed = 0x2c1b3c6dU);

// psi_+(v,p;t,t_*) = max{p, max_{[t_*,t]}(v - r)}, psi_- mirrored.
double psi_plus(const PlSignal& v, double p, double t, double t_star, double r);
double psi_minus(const PlSignal& v, double p, double t, double t_star, double r);

// Memory values w_k at the partition nodes, propagated by psi_+/psi_-.
struct MemoryTrace {
    std::vector<double> values;  // one per partition node
};
MemoryTrace memory_trace(const PlSignal& v, double y0, const Decomposition& dec);

// One-sided directional derivatives of the positive part and of pi_r.
double pos_part_dd(double x, double q);
double clamp_dd(double x, double q, double r);

// Sparse row of the derivative action at one output time:
// value = sum over atoms of weight * h(node) + q_coeff * q0.
struct LinearRow {
    std::vector<std::pair<std::size_t, double>> h_coeffs;  // (h-grid node index, weight)
    double q_coeff = 0.0;

    double apply(const PlSignal& h, double q0) const;
};

// The Newton derivative action L^{P_r}(h,q0) at (v,y0): the StepLinSignal it
// produces plus the same linear action as sparse rows over the output grid
// (rows: nodes of v's grid, columns: nodes of h's grid plus the q0 column).
struct PlayDerivative {
    StepLinSignal signal;
    std::vector<double> row_times;
    std::vector<LinearRow> rows;
};

PlayDerivative play_newton_apply(const PlSignal& v, double y0, const PlSignal& h,
                                 double q0, const Decomposition& dec, SelectionRule rule);
StepLinSignal stop_newton_apply(const PlSignal& v, double y0, const PlSignal& h,
                                double q0, const Decomposition& dec, SelectionRule rule);

// Bouligand (directional) derivative at the decomposition's base point.
StepLinSignal play_dir_derivative(const PlSignal& u, double z0, const PlSignal& h,
                                  double q0, const Decomposition& dec);
StepLinSignal stop_dir_derivative(const PlSignal& u, double z0, const PlSignal& h,
                                  double q0, const Decomposition& dec);

}  // namespace hyst
