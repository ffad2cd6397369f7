#include <cstdio>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyst/accmax.hpp"
#include "hyst/maxfun.hpp"
#include "hyst/playstop.hpp"
#include "hyst/signal.hpp"
#include "hyst/solver.hpp"
#include "hyst/verify.hpp"

namespace {

using namespace hyst;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

SelectionRule parse_rule(const std::string& s) {
    if (s == "rightmost") return SelectionRule::Rightmost;
    if (s == "leftmost") return SelectionRule::Leftmost;
    if (s == "uniform") return SelectionRule::UniformAtoms;
    throw CLI::ValidationError("--rule", "expected rightmost|leftmost|uniform");
}

// holder:A | w1p:P (w1p:1 selects the W^{1,1} diagnostic, w1p:inf the
// Lipschitz norm) | sup
NormSpec parse_norm(const std::string& s) {
    if (s == "sup") return NormSpec::sup();
    auto colon = s.find(':');
    if (colon != std::string::npos) {
        std::string kind = s.substr(0, colon);
        std::string arg = s.substr(colon + 1);
        if (kind == "holder") return NormSpec::holder(std::stod(arg));
        if (kind == "w1p") {
            if (arg == "inf") return NormSpec::holder(1.0);
            double p = std::stod(arg);
            return p == 1.0 ? NormSpec::w11_diagnostic() : NormSpec::w1p(p);
        }
    }
    throw CLI::ValidationError("--norm", "expected holder:A or w1p:P");
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error(out_path + ": cannot open for writing");
        out << text;
    }
}

void write_signal(const PlSignal& s, const std::string& out_path) {
    if (out_path.empty())
        write_signal_csv(std::cout, s);
    else
        write_signal_csv_file(out_path, s);
}

int run(int argc, char** argv) {
    CLI::App app{"scalar play/stop hysteresis: evaluation, generalized derivatives, "
                 "rate studies and a semismooth Newton solver"};
    app.require_subcommand(1);

    // eval
    auto* c_eval = app.add_subcommand("eval", "evaluate play/stop trajectories");
    std::string in_path, out_path, out_stop;
    double r = 1.0, z0 = 0.0;
    c_eval->add_option("--input", in_path, "input signal CSV")->required();
    c_eval->add_option("--r", r, "characteristic half-width")->required();
    c_eval->add_option("--z0", z0, "initial stop value");
    c_eval->add_option("--out", out_path, "play output CSV (default stdout)");
    c_eval->add_option("--out-stop", out_stop, "stop output CSV");

    // accmax
    auto* c_acc = app.add_subcommand("accmax", "accumulated maximum");
    std::string acc_in, acc_out;
    c_acc->add_option("--input", acc_in, "input signal CSV")->required();
    c_acc->add_option("--out", acc_out, "output CSV (default stdout)");

    // derive
    auto* c_der = app.add_subcommand("derive", "derivative action as t,left,right CSV");
    std::string der_op, der_flavor = "newton", der_in, der_dir, der_rule = "rightmost", der_out;
    double der_q0 = 0.0, der_r = 1.0, der_z0 = 0.0;
    c_der->add_option("--op", der_op, "play|stop|accmax|max")->required();
    c_der->add_option("--flavor", der_flavor, "newton|bouligand");
    c_der->add_option("--input", der_in, "base signal CSV")->required();
    c_der->add_option("--dir", der_dir, "direction signal CSV")->required();
    c_der->add_option("--q0", der_q0, "initial-value direction component");
    c_der->add_option("--rule", der_rule, "rightmost|leftmost|uniform");
    c_der->add_option("--r", der_r, "characteristic half-width");
    c_der->add_option("--z0", der_z0, "initial stop value");
    c_der->add_option("--out", der_out, "output CSV (default stdout)");

    // decompose
    auto* c_dec = app.add_subcommand("decompose", "plus/minus interval decomposition JSON");
    std::string dec_in, dec_out;
    double dec_r = 1.0, dec_z0 = 0.0;
    c_dec->add_option("--input", dec_in, "input signal CSV")->required();
    c_dec->add_option("--r", dec_r, "characteristic half-width")->required();
    c_dec->add_option("--z0", dec_z0, "initial stop value");
    c_dec->add_option("--out", dec_out, "output path (default stdout)");

    // rates
    auto* c_rate = app.add_subcommand("rates", "remainder rate study JSON");
    std::string rate_op, rate_flavor = "newton", rate_norm = "holder:0.5", rate_in, rate_dir,
                rate_ladder, rate_out;
    double rate_lq = 2.0, rate_r = 1.0, rate_z0 = 0.0, rate_q0 = 0.0, rate_gamma = 0.0;
    c_rate->add_option("--op", rate_op, "play|stop|accmax|max")->required();
    c_rate->add_option("--flavor", rate_flavor, "newton|bouligand");
    c_rate->add_option("--norm", rate_norm, "holder:A|w1p:P");
    c_rate->add_option("--lq", rate_lq, "L^q exponent of the remainder norm");
    c_rate->add_option("--ladder", rate_ladder, "comma-separated lambda ladder");
    c_rate->add_option("--input", rate_in, "base signal CSV")->required();
    c_rate->add_option("--dir", rate_dir, "direction signal CSV")->required();
    c_rate->add_option("--r", rate_r, "characteristic half-width");
    c_rate->add_option("--z0", rate_z0, "initial stop value");
    c_rate->add_option("--q0", rate_q0, "initial-value direction component");
    c_rate->add_option("--gamma", rate_gamma, "window end (default b)");
    c_rate->add_option("--out", rate_out, "output path (default stdout)");

    // solve
    auto* c_sol = app.add_subcommand("solve", "semismooth Newton solve");
    std::string sol_problem, sol_out, sol_solution;
    double sol_tol = 1e-10;
    int sol_maxit = 30;
    bool sol_undamped = false;
    c_sol->add_option("--problem", sol_problem, "problem JSON")->required();
    c_sol->add_option("--tol", sol_tol, "residual sup-norm tolerance");
    c_sol->add_option("--maxit", sol_maxit, "maximum iterations");
    c_sol->add_flag("--undamped", sol_undamped, "disable step damping");
    c_sol->add_option("--out", sol_out, "report JSON path (default stdout)");
    c_sol->add_option("--out-solution", sol_solution, "solution CSV path");

    // counterexample
    auto* c_ce = app.add_subcommand("counterexample", "the W^{1,1} maximum-functional example");
    double ce_lambda = 0.1;
    c_ce->add_option("--lambda", ce_lambda, "ramp width in (0,1)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (c_eval->parsed()) {
        PlSignal u = read_signal_csv_file(in_path);
        PlayResult pr = play(u, {r, z0});
        write_signal(pr.w, out_path);
        if (!out_stop.empty()) write_signal_csv_file(out_stop, pr.z);
        return kExitOk;
    }

    if (c_acc->parsed()) {
        PlSignal u = read_signal_csv_file(acc_in);
        write_signal(accumulated_max(u), acc_out);
        return kExitOk;
    }

    if (c_der->parsed()) {
        PlSignal u = read_signal_csv_file(der_in);
        PlSignal h = read_signal_csv_file(der_dir);
        SelectionRule rule = parse_rule(der_rule);
        bool newton = der_flavor == "newton";
        if (!newton && der_flavor != "bouligand")
            throw CLI::ValidationError("--flavor", "expected newton|bouligand");
        StepLinSignal out = [&]() -> StepLinSignal {
            if (der_op == "max") {
                double v = newton ? apply_measure(newton_selection(u, rule), h)
                                  : directional_derivative(u, h);
                return StepLinSignal::constant(u.a(), u.b(), v);
            }
            if (der_op == "accmax")
                return newton ? newton_apply(u, h, rule) : pointwise_dir_derivative(u, h);
            if (der_op == "play" || der_op == "stop") {
                Decomposition dec = local_partition(u, {der_r, der_z0});
                if (der_op == "play")
                    return newton ? play_newton_apply(u, der_z0, h, der_q0, dec, rule).signal
                                  : play_dir_derivative(u, der_z0, h, der_q0, dec);
                return newton ? stop_newton_apply(u, der_z0, h, der_q0, dec, rule)
                              : stop_dir_derivative(u, der_z0, h, der_q0, dec);
            }
            throw CLI::ValidationError("--op", "expected play|stop|accmax|max");
        }();
        if (der_out.empty())
            write_steplin_csv(std::cout, out);
        else
            write_steplin_csv_file(der_out, out);
        return kExitOk;
    }

    if (c_dec->parsed()) {
        PlSignal u = read_signal_csv_file(dec_in);
        Decomposition dec = local_partition(u, {dec_r, dec_z0});
        nlohmann::json j;
        j["partition"] = dec.partition;
        j["labels"] = nlohmann::json::array();
        for (auto lab : dec.labels)
            j["labels"].push_back(lab == IntervalLabel::Plus ? "plus" : "minus");
        j["delta"] = dec.delta;
        j["delta_I"] = std::isfinite(dec.delta_i) ? nlohmann::json(dec.delta_i)
                                                  : nlohmann::json("inf");
        emit(j.dump(2), dec_out);
        return kExitOk;
    }

    if (c_rate->parsed()) {
        PlSignal u = read_signal_csv_file(rate_in);
        PlSignal h = read_signal_csv_file(rate_dir);
        RateStudyConfig cfg;
        cfg.op = rate_op;
        if (rate_flavor == "newton")
            cfg.flavor = DerivativeFlavor::Newton;
        else if (rate_flavor == "bouligand")
            cfg.flavor = DerivativeFlavor::Bouligand;
        else
            throw CLI::ValidationError("--flavor", "expected newton|bouligand");
        cfg.norm = parse_norm(rate_norm);
        cfg.lq_exponent = rate_lq;
        cfg.gamma = rate_gamma;
        cfg.cfg = {rate_r, rate_z0};
        cfg.q0 = rate_q0;
        if (!rate_ladder.empty()) {
            std::istringstream is(rate_ladder);
            std::string tok;
            while (std::getline(is, tok, ',')) cfg.ladder.push_back(std::stod(tok));
        }
        emit(rate_study(cfg, u, h).to_json(), rate_out);
        return kExitOk;
    }

    if (c_sol->parsed()) {
        LoadedProblem lp = load_problem(sol_problem);
        SolveReport rep = semismooth_newton(lp.eq, lp.u0, sol_tol, sol_maxit, !sol_undamped);
        emit(rep.to_json(), sol_out);
        if (!sol_solution.empty())
            write_signal_csv_file(sol_solution, PlSignal(lp.eq.f.grid(), rep.solution_values));
        if (!rep.converged) {
            std::cerr << "solve: " << rep.diagnosis << "\n";
            return kExitNumerical;
        }
        return kExitOk;
    }

    if (c_ce->parsed()) {
        CounterexampleRatios cr = counterexample_w11(ce_lambda);
        std::cout << "newton_ratio=" << cr.newton_ratio
                  << " bouligand_ratio=" << cr.bouligand_ratio << "\n";
        return kExitOk;
    }

    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::Error& ex) {
        std::cerr << ex.what() << "\n";
        return kExitUsage;
    } catch (const hyst::decomposition_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitNumerical;
    } catch (const hyst::stale_decomposition& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitData;
    }
}
