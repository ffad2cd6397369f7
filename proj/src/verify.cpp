#include "hyst/verify.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hyst/maxfun.hpp"

namespace hyst {

PlayResult oracle_play_projection(const PlSignal& u, const PlayConfig& cfg, int refinement) {
    if (refinement < 1) throw std::invalid_argument("oracle_play_projection: refinement >= 1");
    const auto& n = u.grid().nodes();
    std::vector<double> extra;
    for (std::size_t i = 0; i + 1 < n.size(); ++i)
        for (int j = 1; j < refinement; ++j)
            extra.push_back(n[i] + (n[i + 1] - n[i]) * j / refinement);
    PlSignal ur = u.refined(extra);

    const auto& rn = ur.grid().nodes();
    const auto& rv = ur.values();
    std::vector<double> z(rn.size()), w(rn.size());
    z[0] = clamp_to(cfg.z0, cfg.r);
    w[0] = rv[0] - z[0];
    for (std::size_t i = 0; i + 1 < rn.size(); ++i) {
        z[i + 1] = clamp_to(z[i] + rv[i + 1] - rv[i], cfg.r);
        w[i + 1] = rv[i + 1] - z[i + 1];
    }
    return {PlSignal(rn, w), PlSignal(rn, z)};
}

StepLinSignal fd_directional(const std::string& opname, const PlSignal& base,
                             const PlSignal& dir, double lambda, const PlayConfig& cfg,
                             double q0) {
    if (!(lambda > 0.0)) throw std::invalid_argument("fd_directional: lambda > 0 required");
    PlSignal perturbed = add(base, scale(dir, lambda));
    if (opname == "max") {
        double q = (max_value(perturbed) - max_value(base)) / lambda;
        return StepLinSignal::constant(base.a(), base.b(), q);
    }
    if (opname == "accmax") {
        PlSignal d = subtract(accumulated_max(perturbed), accumulated_max(base));
        return StepLinSignal::from_pl(scale(d, 1.0 / lambda));
    }
    if (opname == "play" || opname == "stop") {
        PlayConfig pcfg{cfg.r, cfg.z0 + lambda * q0};
        PlayResult pp = play(perturbed, pcfg);
        PlayResult pb = play(base, cfg);
        const PlSignal& xp = opname == "play" ? pp.w : pp.z;
        const PlSignal& xb = opname == "play" ? pb.w : pb.z;
        return StepLinSignal::from_pl(scale(subtract(xp, xb), 1.0 / lambda));
    }
    throw std::invalid_argument("fd_directional: unknown operator \"" + opname + "\"");
}

std::vector<double> default_ladder() {
    std::vector<double> out;
    for (int i = 0; i < 7; ++i) out.push_back(std::pow(10.0, -1.0 - 0.5 * i));
    return out;
}

namespace {

double direction_norm(const PlSignal& h, const NormSpec& norm, double q0) {
    return signal_norm(h, norm) + std::abs(q0);
}

double scalar_remainder_max(const PlSignal& u, const PlSignal& h, DerivativeFlavor flavor,
                            SelectionRule rule) {
    PlSignal uh = add(u, h);
    double gap = max_value(uh) - max_value(u);
    if (flavor == DerivativeFlavor::Newton)
        return std::abs(gap - apply_measure(newton_selection(uh, rule), h));
    return std::abs(gap - directional_derivative(u, h));
}

}  // namespace

RateReport rate_study(const RateStudyConfig& config, const PlSignal& base,
                      const PlSignal& h_base) {
    RateReport rep;
    rep.op = config.op;
    rep.flavor = config.flavor == DerivativeFlavor::Newton ? "newton" : "bouligand";
    rep.norm = config.norm;
    rep.lq_exponent = config.lq_exponent;
    rep.gamma = config.gamma > 0.0 ? config.gamma : base.b();
    std::vector<double> ladder = config.ladder.empty() ? default_ladder() : config.ladder;

    const bool is_play = config.op == "play" || config.op == "stop";
    const bool is_stop = config.op == "stop";
    const SelectionRule rules[] = {SelectionRule::Rightmost, SelectionRule::Leftmost,
                                   SelectionRule::UniformAtoms};

    std::optional<Decomposition> dec;
    if (is_play) dec.emplace(local_partition(base, config.cfg));

    for (double lambda : ladder) {
        PlSignal h = config.family == DirectionFamily::Scaled
                         ? scale(h_base, lambda)
                         : counterexample_direction(lambda);
        double q = lambda * config.q0;
        RateLadderEntry e;
        e.lambda = lambda;
        e.h_sup = sup_norm(h);
        e.h_x = direction_norm(h, config.norm, q);
        double rem = 0.0;

        if (config.op == "max") {
            if (config.flavor == DerivativeFlavor::Newton) {
                for (auto rule : rules)
                    rem = std::max(rem, scalar_remainder_max(base, h, config.flavor, rule));
            } else {
                rem = scalar_remainder_max(base, h, config.flavor, SelectionRule::Rightmost);
            }
        } else if (config.op == "accmax") {
            if (config.flavor == DerivativeFlavor::Newton) {
                for (auto rule : rules)
                    rem = std::max(rem, remainder_lq(base, h, config.flavor, rule,
                                                     config.lq_exponent, rep.gamma));
            } else {
                rem = remainder_lq(base, h, config.flavor, SelectionRule::Rightmost,
                                   config.lq_exponent, rep.gamma);
            }
        } else if (is_play) {
            PlSignal vb = add(base, h);
            double yb = config.cfg.z0 + q;
            PlayResult pp = play(vb, {config.cfg.r, yb});
            PlayResult pb = play(base, config.cfg);
            PlSignal diff = is_stop ? subtract(pp.z, pb.z) : subtract(pp.w, pb.w);
            if (config.flavor == DerivativeFlavor::Newton) {
                for (auto rule : rules) {
                    StepLinSignal d = is_stop
                                          ? stop_newton_apply(vb, yb, h, q, *dec, rule)
                                          : play_newton_apply(vb, yb, h, q, *dec, rule).signal;
                    rem = std::max(rem, lq_norm(subtract(diff, d), config.lq_exponent,
                                                base.a(), rep.gamma));
                }
            } else {
                StepLinSignal d = is_stop
                                      ? stop_dir_derivative(base, config.cfg.z0, h, q, *dec)
                                      : play_dir_derivative(base, config.cfg.z0, h, q, *dec);
                rem = lq_norm(subtract(diff, d), config.lq_exponent, base.a(), rep.gamma);
            }
        } else {
            throw std::invalid_argument("rate_study: unknown operator \"" + config.op + "\"");
        }

        e.remainder = rem;
        e.ratio = e.h_x > 0.0 ? rem / e.h_x : 0.0;
        rep.ladder.push_back(e);
    }

    // empirical envelope: for each rung's h_sup, the worst ratio observed at
    // or below that perturbation size
    for (const auto& e : rep.ladder) {
        double worst = 0.0;
        for (const auto& o : rep.ladder)
            if (o.h_sup <= e.h_sup + kTolEq) worst = std::max(worst, o.ratio);
        rep.envelope.emplace_back(e.h_sup, worst);
    }
    std::sort(rep.envelope.begin(), rep.envelope.end());

    if (!rep.ladder.empty()) {
        double first = rep.ladder.front().ratio;
        double last = rep.ladder.back().ratio;
        // remainders at the floating-point noise floor are exact zeros of the
        // underlying arithmetic and count as converged
        double floor = 1e-13 * (1.0 + sup_norm(base));
        rep.converged = rep.ladder.back().remainder <= floor ||
                        (first > 0.0 && last <= 0.1 * first);
    }
    return rep;
}

std::string RateReport::to_json() const {
    nlohmann::json j;
    j["operator"] = op;
    j["flavor"] = flavor;
    j["norm"] = norm.name();
    j["lq_exponent"] = lq_exponent;
    j["gamma"] = gamma;
    j["ladder"] = nlohmann::json::array();
    for (const auto& e : ladder) {
        j["ladder"].push_back({{"lambda", e.lambda},
                               {"h_sup", e.h_sup},
                               {"h_X", e.h_x},
                               {"remainder", e.remainder},
                               {"ratio", e.ratio}});
    }
    j["envelope"] = nlohmann::json::array();
    for (const auto& [d, rho] : envelope)
        j["envelope"].push_back({{"delta", d}, {"rho_hat", rho}});
    j["verdict"] = converged ? "converged" : "non-convergent";
    return j.dump(2);
}

}  // namespace hyst
