#pragma once

#include <string>
#include <vector>

#include "hyst/playstop.hpp"
#include "hyst/signal.hpp"

namespace hyst {

// Residual equation c_id * u(t_j) + c_play * P_r[u;z0](t_j) = f(t_j) on the
// nodes of f's grid. Supported problem class: c_id > 0 and c_play >= 0 (the
// operator sum is then monotone).
struct PlayEquation {
    double c_id = 1.0;
    double c_play = 0.0;
    PlayConfig cfg;
    PlSignal f;

    void validate() const;  // throws std::invalid_argument
};

std::vector<double> residual(const PlayEquation& eq, const PlSignal& u);
double residual_sup(const std::vector<double>& r);

// Dense view of c_id * I + c_play * L^{P_r} at (u, z0), rows/columns on the
// equation grid (the q0 column of the play derivative is dropped).
struct NewtonMatrix {
    std::size_t n = 0;
    std::vector<double> data;  // row-major n x n

    double& at(std::size_t i, std::size_t j) { return data[i * n + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

NewtonMatrix newton_matrix(const PlayEquation& eq, const PlSignal& u);

struct SolveReport {
    std::vector<double> residual_norms;     // per iteration, starting with ||R(u0)||
    std::vector<double> superlinear_ratios; // ||R_{k+1}|| / ||R_k||
    bool converged = false;
    int iterations = 0;
    std::string diagnosis;  // empty on success
    std::vector<double> solution_values;    // node values of the final iterate

    std::string to_json() const;
};

// Semismooth Newton iteration u <- u - M^{-1} R(u) with M reassembled (and
// the decomposition recomputed) at every iterate. Optional damping halves
// the step while the residual increases (at most 10 times); the superlinear
// acceptance protocol runs undamped.
SolveReport semismooth_newton(const PlayEquation& eq, const PlSignal& u0, double tol,
                              int maxit, bool damping = true);

// Problem file: JSON {c_id, c_play, r, z0, f: csv path, grid: csv path or
// "from-f", u0: optional csv path}. Relative paths resolve against the
// problem file's directory.
struct LoadedProblem {
    PlayEquation eq;
    PlSignal u0;
};
LoadedProblem load_problem(const std::string& path);

}  // namespace hyst
