#include "hyst/solver.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <json.hpp>

namespace hyst {

void PlayEquation::validate() const {
    if (!(c_id > 0.0) || c_play < 0.0)
        throw std::invalid_argument(
            "PlayEquation: supported class requires c_id > 0 and c_play >= 0");
    if (cfg.r < 0.0) throw std::invalid_argument("PlayEquation: r >= 0 required");
}

std::vector<double> residual(const PlayEquation& eq, const PlSignal& u) {
    const auto& n = eq.f.grid().nodes();
    if (u.node_count() != n.size())
        throw std::domain_error("residual: iterate grid does not match equation grid");
    for (std::size_t i = 0; i < n.size(); ++i)
        if (!approx_eq(u.grid().nodes()[i], n[i]))
            throw std::domain_error("residual: iterate grid does not match equation grid");

    PlayResult pr = play(u, eq.cfg);
    std::vector<double> out(n.size());
    for (std::size_t j = 0; j < n.size(); ++j)
        out[j] = eq.c_id * u.values()[j] + eq.c_play * pr.w.eval(n[j]) - eq.f.values()[j];
    return out;
}

double residual_sup(const std::vector<double>& r) {
    double m = 0.0;
    for (double x : r) m = std::max(m, std::abs(x));
    return m;
}

NewtonMatrix newton_matrix(const PlayEquation& eq, const PlSignal& u) {
    eq.validate();
    const std::size_t n = u.node_count();
    NewtonMatrix M;
    M.n = n;
    M.data.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) M.at(i, i) = eq.c_id;

    if (eq.c_play != 0.0) {
        if (!(eq.cfg.r > 0.0))
            throw std::invalid_argument("newton_matrix: r > 0 required for the play derivative");
        Decomposition dec = local_partition(u, eq.cfg);
        PlSignal zero(u.grid(), std::vector<double>(n, 0.0));
        PlayDerivative pd =
            play_newton_apply(u, eq.cfg.z0, zero, 0.0, dec, SelectionRule::Rightmost);
        for (std::size_t i = 0; i < n; ++i)
            for (const auto& [j, c] : pd.rows[i].h_coeffs) M.at(i, j) += eq.c_play * c;
    }
    return M;
}

SolveReport semismooth_newton(const PlayEquation& eq, const PlSignal& u0, double tol,
                              int maxit, bool damping) {
    eq.validate();
    if (!(tol > 0.0)) throw std::invalid_argument("semismooth_newton: tol > 0 required");

    SolveReport rep;
    PlSignal u = u0;
    std::vector<double> R = residual(eq, u);
    double rn = residual_sup(R);
    rep.residual_norms.push_back(rn);

    for (int it = 0; it < maxit && rn > tol; ++it) {
        NewtonMatrix M;
        try {
            M = newton_matrix(eq, u);
        } catch (const decomposition_error& ex) {
            rep.diagnosis = std::string("decomposition failure: ") + ex.what();
            break;
        }
        const std::size_t n = M.n;
        Eigen::MatrixXd A(n, n);
        Eigen::VectorXd b(n);
        for (std::size_t i = 0; i < n; ++i) {
            b(static_cast<Eigen::Index>(i)) = R[i];
            for (std::size_t j = 0; j < n; ++j)
                A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = M.at(i, j);
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
        Eigen::VectorXd d = lu.solve(b);
        if (!d.allFinite() || (A * d - b).norm() > 1e-8 * std::max(1.0, b.norm())) {
            rep.diagnosis = "singular Newton matrix";
            break;
        }

        double step = 1.0;
        PlSignal u_next = u;
        std::vector<double> R_next;
        double rn_next = rn;
        for (int halving = 0; halving <= (damping ? 10 : 0); ++halving) {
            std::vector<double> vals = u.values();
            for (std::size_t i = 0; i < vals.size(); ++i)
                vals[i] -= step * d(static_cast<Eigen::Index>(i));
            u_next = PlSignal(u.grid(), std::move(vals));
            R_next = residual(eq, u_next);
            rn_next = residual_sup(R_next);
            if (!damping || rn_next <= rn || halving == 10) break;
            step *= 0.5;
        }

        u = u_next;
        R = std::move(R_next);
        rn = rn_next;
        rep.residual_norms.push_back(rn);
        ++rep.iterations;
    }

    rep.converged = rn <= tol && rep.diagnosis.empty();
    if (!rep.converged && rep.diagnosis.empty()) rep.diagnosis = "maximum iterations reached";
    for (std::size_t i = 1; i < rep.residual_norms.size(); ++i) {
        double prev = rep.residual_norms[i - 1];
        rep.superlinear_ratios.push_back(prev > 0.0 ? rep.residual_norms[i] / prev : 0.0);
    }
    rep.solution_values = u.values();
    return rep;
}

std::string SolveReport::to_json() const {
    nlohmann::json j;
    j["converged"] = converged;
    j["iterations"] = iterations;
    j["residual_norms"] = residual_norms;
    j["superlinear_ratios"] = superlinear_ratios;
    j["diagnosis"] = diagnosis;
    return j.dump(2);
}

LoadedProblem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& ex) {
        throw std::runtime_error(path + ": " + ex.what());
    }

    auto dir = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (dir / fp).string();
    };

    for (const char* key : {"c_id", "c_play", "r", "z0", "f"})
        if (!j.contains(key)) throw std::runtime_error(path + ": missing key \"" + key + "\"");

    PlSignal f = read_signal_csv_file(resolve(j.at("f").get<std::string>()));
    if (j.contains("grid") && j.at("grid").is_string() &&
        j.at("grid").get<std::string>() != "from-f") {
        PlSignal g = read_signal_csv_file(resolve(j.at("grid").get<std::string>()));
        f = f.refined(g.grid().nodes());
    }

    PlayEquation eq{j.at("c_id").get<double>(), j.at("c_play").get<double>(),
                    {j.at("r").get<double>(), j.at("z0").get<double>()}, f};
    eq.validate();

    std::vector<double> u0_vals(eq.f.node_count(), 0.0);
    if (j.contains("u0")) {
        PlSignal raw = read_signal_csv_file(resolve(j.at("u0").get<std::string>()));
        if (!approx_eq(raw.a(), eq.f.a()) || !approx_eq(raw.b(), eq.f.b()))
            throw std::runtime_error(path + ": u0 domain does not match f");
        for (std::size_t i = 0; i < eq.f.node_count(); ++i)
            u0_vals[i] = raw.eval(eq.f.grid().nodes()[i]);
    }
    PlSignal u0(eq.f.grid(), std::move(u0_vals));
    return {std::move(eq), std::move(u0)};
}

}  // namespace hyst
