#pragma once

#include <string>
#include <vector>

#include "hyst/accmax.hpp"
#include "hyst/playstop.hpp"
#include "hyst/signal.hpp"

namespace hyst {

// Implicit time-discretization of the defining variational inequality:
// z_{i+1} = pi_r(z_i + u_{i+1} - u_i), w = u - z, on the grid refined by
// splitting every segment into `refinement` equal parts. Exact at every
// refined node for piecewise-linear u, which makes it an independent oracle
// for the play construction.
PlayResult oracle_play_projection(const PlSignal& u, const PlayConfig& cfg, int refinement);

// One-sided difference quotient (Op(base + lambda*dir) - Op(base)) / lambda
// of a named operator: "play" | "stop" | "accmax" | "max".
StepLinSignal fd_directional(const std::string& opname, const PlSignal& base,
                             const PlSignal& dir, double lambda,
                             const PlayConfig& cfg = {}, double q0 = 0.0);

struct RateLadderEntry {
    double lambda;
    double h_sup;     // sup norm of the perturbation
    double h_x;       // norm of the perturbation in the study space X (+ |q0|)
    double remainder; // L^q remainder on [a, gamma]
    double ratio;     // remainder / h_x
};

struct RateReport {
    std::string op;
    std::string flavor;  // "newton" | "bouligand"
    NormSpec norm;
    double lq_exponent = 2.0;
    double gamma = 0.0;
    std::vector<RateLadderEntry> ladder;
    std::vector<std::pair<double, double>> envelope;  // (delta, running max of ratios with h_sup <= delta)
    bool converged = false;  // final ratio <= 0.1 * first ratio, or the final
                             // remainder sits at the floating-point noise floor

    std::string to_json() const;
};

// How the per-rung perturbation is produced: a fixed profile scaled by
// lambda, or the capped-ramp counterexample profile whose corner sits at
// lambda (the profile family of the W^{1,1} example).
enum class DirectionFamily { Scaled, CounterexampleProfile };

struct RateStudyConfig {
    std::string op;  // "play" | "stop" | "accmax" | "max"
    DerivativeFlavor flavor = DerivativeFlavor::Newton;
    DirectionFamily family = DirectionFamily::Scaled;
    NormSpec norm = NormSpec::holder(0.5);
    double lq_exponent = 2.0;
    double gamma = 0.0;  // 0 means "use b"
    std::vector<double> ladder;  // strictly decreasing; empty means the default
    PlayConfig cfg;   // play/stop only
    double q0 = 0.0;  // initial-value component of the direction (play/stop)
};

// The default ladder 10^{-1}, 10^{-1.5}, ..., 10^{-4}.
std::vector<double> default_ladder();

// Scales the direction down the ladder and records remainder ratios. For the
// newton flavor the derivative is taken at the perturbed point and the ratio
// reported per rung is the worst over the three selection rules; for the
// bouligand flavor the directional derivative at the base point is used.
RateReport rate_study(const RateStudyConfig& config, const PlSignal& base,
                      const PlSignal& h_base);

}  // namespace hyst
