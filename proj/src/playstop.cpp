#include "hyst/playstop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hyst {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double clamp_to(double x, double r) {
    if (r < 0.0) throw std::invalid_argument("clamp_to: r >= 0 required");
    return std::max(-r, std::min(r, x));
}

// --- play / stop --------------------------------------------------------------

PlayResult play(const PlSignal& u, const PlayConfig& cfg) {
    if (cfg.r < 0.0) throw std::invalid_argument("play: r >= 0 required");
    const double r = cfg.r;
    const auto& n = u.grid().nodes();
    const auto& uv = u.values();

    std::vector<double> tn{n[0]};
    std::vector<double> wn{uv[0] - clamp_to(cfg.z0, r)};

    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
        double t0 = n[i], t1 = n[i + 1];
        double v0 = uv[i], v1 = uv[i + 1];
        double wp = wn.back();
        if (v1 >= v0) {
            // nondecreasing segment: w(t) = max(wp, u(t) - r)
            if (v1 - r > wp && v0 - r < wp) {
                double ts = t0 + (wp + r - v0) / (v1 - v0) * (t1 - t0);
                if (ts > t0 && ts < t1) {
                    tn.push_back(ts);
                    // anchor the switch node on the rail so that u = w + z
                    // stays exact there even for steep segments
                    wn.push_back(u.eval(ts) - r);
                }
            }
            tn.push_back(t1);
            wn.push_back(std::max(wp, v1 - r));
        } else {
            // nonincreasing segment: w(t) = min(wp, u(t) + r)
            if (v1 + r < wp && v0 + r > wp) {
                double ts = t0 + (wp - r - v0) / (v1 - v0) * (t1 - t0);
                if (ts > t0 && ts < t1) {
                    tn.push_back(ts);
                    wn.push_back(u.eval(ts) + r);
                }
            }
            tn.push_back(t1);
            wn.push_back(std::min(wp, v1 + r));
        }
    }

    std::vector<double> zn(tn.size());
    for (std::size_t i = 0; i < tn.size(); ++i) zn[i] = u.eval(tn[i]) - wn[i];
    PlSignal w(tn, wn);
    PlSignal z(std::move(tn), std::move(zn));
    return {std::move(w), std::move(z)};
}

PlSignal stop(const PlSignal& u, const PlayConfig& cfg) {
    return play(u, cfg).z;
}

// --- rail classification --------------------------------------------------------

RailSets classify_intervals(const PlSignal& u, const PlayConfig& cfg, double tol_active) {
    if (!(cfg.r > 0.0)) throw std::invalid_argument("classify_intervals: r > 0 required");
    PlSignal z = play(u, cfg).z;
    const auto& n = z.grid().nodes();
    const auto& zv = z.values();

    auto rail_set = [&](double rail) {
        IntervalSet out;
        for (std::size_t i = 0; i + 1 < n.size(); ++i) {
            double d0 = zv[i] - rail, d1 = zv[i + 1] - rail;
            double lo, hi;
            if (std::abs(d1 - d0) <= kTolEq) {
                if (std::abs(d0) > tol_active && std::abs(d1) > tol_active) continue;
                lo = n[i];
                hi = n[i + 1];
            } else {
                double ta = n[i] + (-tol_active - d0) / (d1 - d0) * (n[i + 1] - n[i]);
                double tb = n[i] + (tol_active - d0) / (d1 - d0) * (n[i + 1] - n[i]);
                lo = std::max(n[i], std::min(ta, tb));
                hi = std::min(n[i + 1], std::max(ta, tb));
                if (hi < lo) continue;
            }
            out.add(lo, hi);
        }
        return out;
    };

    RailSets rs;
    rs.iplus = rail_set(cfg.r);
    rs.iminus = rail_set(-cfg.r);
    rs.i0 = IntervalSet::unite(rs.iplus, rs.iminus).complement_within(u.a(), u.b());
    rs.delta_i = rs.iplus.distance(rs.iminus);
    return rs;
}

// --- decomposition ---------------------------------------------------------------

void Decomposition::require_in_ball(const PlSignal& v, double y0) const {
    double dv = sup_norm(subtract(v, base_u));
    double dz = std::abs(y0 - base_z0);
    if (dv > delta + kTolEq || dz > delta + kTolEq) {
        std::ostringstream os;
        os << "decomposition is stale: perturbation (" << dv << ", " << dz
           << ") exceeds validated radius " << delta;
        throw stale_decomposition(os.str());
    }
}

void Decomposition::require_base_point(const PlSignal& u, double z0) const {
    if (sup_norm(subtract(u, base_u)) > 1e-10 || std::abs(z0 - base_z0) > 1e-10)
        throw stale_decomposition("directional derivative requires the decomposition's base point");
}

namespace {

// min over [lo,hi] of z + r (plus intervals) or r - z (minus): distance to the
// forbidden rail.
double rail_margin(const PlSignal& z, double lo, double hi, double r, IntervalLabel label) {
    IntervalSet window = IntervalSet::interval(lo, hi);
    if (label == IntervalLabel::Plus) return min_over(window, z) + r;
    return r - max_over(window, z);
}

bool interval_keeps_character(const PlSignal& z, double lo, double hi, double r,
                              IntervalLabel label, double tol_active) {
    return rail_margin(z, lo, hi, r, label) > tol_active;
}

}  // namespace

Decomposition local_partition(const PlSignal& u, const PlayConfig& cfg, int n_samples,
                              unsigned seed) {
    if (!(cfg.r > 0.0)) throw std::invalid_argument("local_partition: r > 0 required");
    const double tol_active = default_tol_active(cfg.r);
    RailSets rails = classify_intervals(u, cfg, tol_active);

    // ordered rail components with polarity
    struct RailComp {
        double lo, hi;
        IntervalLabel pol;
    };
    std::vector<RailComp> comps;
    for (const auto& c : rails.iplus.components()) comps.push_back({c.lo, c.hi, IntervalLabel::Plus});
    for (const auto& c : rails.iminus.components()) comps.push_back({c.lo, c.hi, IntervalLabel::Minus});
    std::sort(comps.begin(), comps.end(),
              [](const RailComp& x, const RailComp& y) { return x.lo < y.lo; });

    std::vector<double> cuts;
    for (std::size_t i = 0; i + 1 < comps.size(); ++i) {
        if (comps[i].pol != comps[i + 1].pol)
            cuts.push_back(0.5 * (comps[i].hi + comps[i + 1].lo));
    }

    std::vector<double> partition{u.a()};
    for (double c : cuts)
        if (c > u.a() + kTolEq && c < u.b() - kTolEq) partition.push_back(c);
    partition.push_back(u.b());

    std::vector<IntervalLabel> labels;
    for (std::size_t k = 0; k + 1 < partition.size(); ++k) {
        double lo = partition[k], hi = partition[k + 1];
        IntervalLabel lab = IntervalLabel::Plus;
        for (const auto& c : comps) {
            if (c.hi < lo - kTolEq || c.lo > hi + kTolEq) continue;
            lab = c.pol;
            break;
        }
        labels.push_back(lab);
    }

    double cut_dist = kInf;
    IntervalSet rail_union = IntervalSet::unite(rails.iplus, rails.iminus);
    for (double c : cuts) cut_dist = std::min(cut_dist, rail_union.distance(c));
    double delta = std::min({rails.delta_i / 4.0, cut_dist / 2.0, cfg.r / 2.0});

    PlSignal z_base = play(u, cfg).z;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    for (int attempt = 0; attempt <= 20; ++attempt) {
        bool ok = true;
        // base point, exact rail check
        for (std::size_t k = 0; k < labels.size(); ++k) {
            const IntervalSet& forbidden =
                labels[k] == IntervalLabel::Plus ? rails.iminus : rails.iplus;
            for (const auto& c : forbidden.components()) {
                if (c.hi >= partition[k] - kTolEq && c.lo <= partition[k + 1] + kTolEq) {
                    ok = false;
                    break;
                }
            }
        }
        // Lipschitz margin: a perturbation below delta moves the play by at
        // most 2*delta (input plus initial-state contribution) and the stop
        // by at most 3*delta, so 3*delta must stay under the rail margin.
        if (ok) {
            for (std::size_t k = 0; k < labels.size(); ++k) {
                double margin =
                    rail_margin(z_base, partition[k], partition[k + 1], cfg.r, labels[k]);
                if (!(3.0 * delta < margin - tol_active)) {
                    ok = false;
                    break;
                }
            }
        }
        // sampled perturbations in the delta-ball
        if (ok) {
            for (int s = 0; s < n_samples && ok; ++s) {
                std::vector<double> pv = u.values();
                for (double& x : pv) x += 0.99 * delta * unit(rng);
                PlSignal v(u.grid(), std::move(pv));
                double y0 = cfg.z0 + 0.99 * delta * unit(rng);
                PlSignal zs = play(v, {cfg.r, y0}).z;
                for (std::size_t k = 0; k < labels.size() && ok; ++k) {
                    if (!interval_keeps_character(zs, partition[k], partition[k + 1], cfg.r,
                                                  labels[k], tol_active))
                        ok = false;
                }
            }
        }
        if (ok)
            return Decomposition{std::move(partition), std::move(labels), delta,
                                 rails.delta_i,        rails,             u,
                                 cfg.z0,               cfg};
        delta *= 0.5;
    }
    throw decomposition_error("local_partition: could not validate a stability radius");
}

// --- psi and memory -------------------------------------------------------------

double psi_plus(const PlSignal& v, double p, double t, double t_star, double r) {
    if (t < t_star - kTolEq) throw std::domain_error("psi_plus: t < t_star");
    double wmax = (t <= t_star + kTolEq) ? v.eval(t_star)
                                         : max_over(IntervalSet::interval(t_star, t), v);
    return std::max(p, wmax - r);
}

double psi_minus(const PlSignal& v, double p, double t, double t_star, double r) {
    if (t < t_star - kTolEq) throw std::domain_error("psi_minus: t < t_star");
    double wmin = (t <= t_star + kTolEq) ? v.eval(t_star)
                                         : min_over(IntervalSet::interval(t_star, t), v);
    return std::min(p, wmin + r);
}

MemoryTrace memory_trace(const PlSignal& v, double y0, const Decomposition& dec) {
    dec.require_in_ball(v, y0);
    MemoryTrace tr;
    tr.values.push_back(v.eval(v.a()) - clamp_to(y0, dec.cfg.r));
    for (std::size_t k = 0; k < dec.labels.size(); ++k) {
        double t0 = dec.partition[k], t1 = dec.partition[k + 1];
        double p = tr.values.back();
        tr.values.push_back(dec.labels[k] == IntervalLabel::Plus
                                ? psi_plus(v, p, t1, t0, dec.cfg.r)
                                : psi_minus(v, p, t1, t0, dec.cfg.r));
    }
    return tr;
}

// --- scalar directional derivatives ----------------------------------------------

double pos_part_dd(double x, double q) {
    if (x > kTolEq) return q;
    if (std::abs(x) <= kTolEq && q > 0.0) return q;
    return 0.0;
}

double clamp_dd(double x, double q, double r) {
    if (approx_eq(x, r)) return q < 0.0 ? q : 0.0;
    if (approx_eq(x, -r)) return q > 0.0 ? q : 0.0;
    if (std::abs(x) < r) return q;
    return 0.0;
}

// --- derivative machinery ---------------------------------------------------------

namespace {

using Seg = StepLinSignal::Segment;

void append_clipped(std::vector<Seg>& out, const std::vector<Seg>& in, double lo, double hi) {
    for (const auto& s : in) {
        double t0 = std::max(s.t0, lo), t1 = std::min(s.t1, hi);
        if (t1 - t0 <= 0.0) continue;
        double len = s.t1 - s.t0;
        double v0 = s.v0 + (s.v1 - s.v0) * (t0 - s.t0) / len;
        double v1 = s.v0 + (s.v1 - s.v0) * (t1 - s.t0) / len;
        out.push_back({t0, t1, v0, v1});
    }
}

std::vector<Seg> negate_segments(const std::vector<Seg>& in) {
    std::vector<Seg> out = in;
    for (auto& s : out) {
        s.v0 = -s.v0;
        s.v1 = -s.v1;
    }
    return out;
}

// max(c, segment values) with exact crossing splits
std::vector<Seg> max_with_const(const std::vector<Seg>& in, double c) {
    std::vector<Seg> out;
    for (const auto& s : in) {
        bool over0 = s.v0 >= c, over1 = s.v1 >= c;
        if (over0 && over1) {
            out.push_back(s);
        } else if (!over0 && !over1) {
            out.push_back({s.t0, s.t1, c, c});
        } else {
            double xc = s.t0 + (c - s.v0) / (s.v1 - s.v0) * (s.t1 - s.t0);
            xc = std::clamp(xc, s.t0, s.t1);
            if (over0) {
                if (xc > s.t0) out.push_back({s.t0, xc, s.v0, c});
                if (xc < s.t1) out.push_back({xc, s.t1, c, c});
            } else {
                if (xc > s.t0) out.push_back({s.t0, xc, c, c});
                if (xc < s.t1) out.push_back({xc, s.t1, c, s.v1});
            }
        }
    }
    return out;
}

std::vector<Seg> min_with_const(const std::vector<Seg>& in, double c) {
    return negate_segments(max_with_const(negate_segments(in), -c));
}

// first time the nondecreasing piecewise-linear g exceeds the level L
// strictly; nullopt if it never does.
std::optional<double> gate_on_time(const PlSignal& g, double level) {
    const auto& n = g.grid().nodes();
    const auto& gv = g.values();
    if (!(gv.back() > level)) return std::nullopt;
    double tstar = n.front();
    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
        if (gv[i + 1] <= level) {
            tstar = n[i + 1];
            continue;
        }
        if (gv[i] < level)
            tstar = n[i] + (level - gv[i]) / (gv[i + 1] - gv[i]) * (n[i + 1] - n[i]);
        else
            tstar = std::min(tstar, n[i]);
        break;
    }
    return tstar;
}

struct IntervalEngine {
    PlSignal window;  // v restricted to [t_{k-1}, t_k]
    detail::MaxAnalysis analysis;  // of the window (plus) or its negation (minus)
    IntervalLabel label;
    double level;  // gate level for the running max of the analysis input
    std::optional<double> gate_time;

    // argmax (plus) / argmin (minus) of v on [t_{k-1}, t]
    IntervalSet extremum_set(double t) const { return analysis.argmax_at(t); }
    const PlSignal& gate_fn() const { return analysis.running_max; }
    bool gate_on(double t) const { return gate_fn().eval(t) > level; }
};

IntervalEngine make_engine(const PlSignal& v, double lo, double hi, double p, double r,
                           IntervalLabel label) {
    PlSignal window = restrict_signal(v, lo, hi);
    detail::MaxAnalysis analysis = detail::analyze_running_max(
        label == IntervalLabel::Plus ? window : scale(window, -1.0));
    // plus: max v > p + r     minus: min v < p - r, i.e. max(-v) > r - p
    double level = label == IntervalLabel::Plus ? p + r : r - p;
    std::optional<double> gate_time = gate_on_time(analysis.running_max, level);
    return IntervalEngine{std::move(window), std::move(analysis), label, level, gate_time};
}

LinearRow selection_row(const IntervalSet& support, SelectionRule rule, const PlSignal& h) {
    DiracMeasure mu = select_measure(support, rule);
    std::vector<double> dense(h.node_count(), 0.0);
    const auto& n = h.grid().nodes();
    for (const auto& atom : mu.atoms) {
        std::size_t i = h.grid().segment_index(atom.location);
        double len = n[i + 1] - n[i];
        double theta = std::clamp((atom.location - n[i]) / len, 0.0, 1.0);
        dense[i] += atom.weight * (1.0 - theta);
        dense[i + 1] += atom.weight * theta;
    }
    LinearRow row;
    for (std::size_t i = 0; i < dense.size(); ++i)
        if (dense[i] != 0.0) row.h_coeffs.emplace_back(i, dense[i]);
    return row;
}

}  // namespace

double LinearRow::apply(const PlSignal& h, double q0) const {
    double acc = q_coeff * q0;
    for (const auto& [i, c] : h_coeffs) acc += c * h.values()[i];
    return acc;
}

PlayDerivative play_newton_apply(const PlSignal& v, double y0, const PlSignal& h, double q0,
                                 const Decomposition& dec, SelectionRule rule) {
    if (!(dec.cfg.r > 0.0)) throw std::invalid_argument("play_newton_apply: r > 0 required");
    dec.require_in_ball(v, y0);
    if (!approx_eq(h.a(), v.a()) || !approx_eq(h.b(), v.b()))
        throw std::domain_error("play_newton_apply: direction domain mismatch");
    const double r = dec.cfg.r;

    MemoryTrace mem = memory_trace(v, y0, dec);

    // memory-derivative recursion: qhat_0 = h(a) - S(y0) q0
    double S = std::abs(y0) < r ? 1.0 : 0.0;
    LinearRow qhat;
    qhat.h_coeffs.emplace_back(0, 1.0);
    qhat.q_coeff = -S;

    std::vector<Seg> segs;
    std::vector<std::pair<double, double>> node_values;  // (t_k, qhat_k applied)
    node_values.emplace_back(v.a(), qhat.apply(h, q0));

    std::vector<double> row_times = v.grid().nodes();
    std::vector<LinearRow> rows(row_times.size());
    std::size_t row_idx = 0;
    rows[row_idx++] = qhat;  // value at t = a is qhat_0

    for (std::size_t k = 0; k < dec.labels.size(); ++k) {
        double lo = dec.partition[k], hi = dec.partition[k + 1];
        double p = mem.values[k];
        IntervalEngine e = make_engine(v, lo, hi, p, r, dec.labels[k]);

        double qhat_val = qhat.apply(h, q0);
        PlSignal hw = restrict_signal(h, lo, hi);

        if (!e.gate_time) {
            segs.push_back({lo, hi, qhat_val, qhat_val});
        } else {
            double g = *e.gate_time;
            if (g > lo) segs.push_back({lo, g, qhat_val, qhat_val});
            StepLinSignal sel = detail::selection_apply(e.analysis, hw, rule);
            append_clipped(segs, sel.segments(), g, hi);
        }

        // rows at the grid nodes owned by this interval: (lo, hi]
        while (row_idx < row_times.size() && row_times[row_idx] <= hi + kTolEq) {
            double t = row_times[row_idx];
            if (e.gate_on(t))
                rows[row_idx] = selection_row(e.extremum_set(t), rule, h);
            else
                rows[row_idx] = qhat;
            ++row_idx;
        }

        // memory update at t_k
        if (e.gate_on(hi)) qhat = selection_row(e.extremum_set(hi), rule, h);
        node_values.emplace_back(hi, qhat.apply(h, q0));
    }

    StepLinSignal signal(std::move(segs));
    for (const auto& [t, val] : node_values) signal.set_point_value(t, val);

    return {std::move(signal), std::move(row_times), std::move(rows)};
}

StepLinSignal stop_newton_apply(const PlSignal& v, double y0, const PlSignal& h, double q0,
                                const Decomposition& dec, SelectionRule rule) {
    PlayDerivative pd = play_newton_apply(v, y0, h, q0, dec, rule);
    StepLinSignal out = subtract(h, pd.signal);
    for (const auto& [t, val] : pd.signal.point_values())
        out.set_point_value(t, h.eval(t) - val);
    return out;
}

StepLinSignal play_dir_derivative(const PlSignal& u, double z0, const PlSignal& h, double q0,
                                  const Decomposition& dec) {
    if (!(dec.cfg.r > 0.0)) throw std::invalid_argument("play_dir_derivative: r > 0 required");
    dec.require_base_point(u, z0);
    if (!approx_eq(h.a(), u.a()) || !approx_eq(h.b(), u.b()))
        throw std::domain_error("play_dir_derivative: direction domain mismatch");
    const double r = dec.cfg.r;

    MemoryTrace mem = memory_trace(u, z0, dec);

    double wprime = h.eval(h.a()) - clamp_dd(z0, q0, r);
    std::vector<Seg> segs;
    std::vector<std::pair<double, double>> node_values;
    node_values.emplace_back(u.a(), wprime);

    for (std::size_t k = 0; k < dec.labels.size(); ++k) {
        double lo = dec.partition[k], hi = dec.partition[k + 1];
        double p = mem.values[k];
        IntervalEngine e = make_engine(u, lo, hi, p, r, dec.labels[k]);
        PlSignal hw = restrict_signal(h, lo, hi);

        // directional derivative t -> extremum of h over the argmax/argmin set
        const bool plus = dec.labels[k] == IntervalLabel::Plus;
        StepLinSignal fpd_raw = detail::argmax_max_of(
            e.analysis, plus ? hw : scale(hw, -1.0));
        std::vector<Seg> fpd = plus ? fpd_raw.segments() : negate_segments(fpd_raw.segments());

        // X(t) = gate_fn(t) - level, nondecreasing; the three sign regimes
        // switch at the +-tol crossings of the level.
        const auto& gn = e.gate_fn().grid().nodes();
        const auto& gv = e.gate_fn().values();
        auto first_time_above = [&](double lev) -> double {
            if (!(gv.back() > lev)) return hi;
            for (std::size_t i = 0; i + 1 < gn.size(); ++i) {
                if (gv[i + 1] <= lev) continue;
                if (gv[i] >= lev) return gn[i];
                return gn[i] + (lev - gv[i]) / (gv[i + 1] - gv[i]) * (gn[i + 1] - gn[i]);
            }
            return hi;
        };
        double t_zero = first_time_above(e.level - kTolEq);  // X >= 0 from here on
        double t_pos = first_time_above(e.level + kTolEq);   // X > 0 from here on

        if (t_zero > lo) segs.push_back({lo, t_zero, wprime, wprime});
        if (t_pos > t_zero + kTolEq) {
            // boundary regime X == 0: derivative switches on only toward the rail
            std::vector<Seg> mid;
            append_clipped(mid, fpd, t_zero, t_pos);
            mid = plus ? max_with_const(mid, wprime) : min_with_const(mid, wprime);
            segs.insert(segs.end(), mid.begin(), mid.end());
        }
        append_clipped(segs, fpd, t_pos, hi);

        // memory update
        double X_end = gv.back() - e.level;
        double D = plus ? max_over(e.extremum_set(hi), h) - wprime
                        : min_over(e.extremum_set(hi), h) - wprime;
        if (plus) {
            wprime = wprime + pos_part_dd(X_end, D);
        } else {
            // mirrored boundary rule: switches on when the direction pushes down
            double contrib = 0.0;
            if (X_end > kTolEq)
                contrib = D;
            else if (std::abs(X_end) <= kTolEq)
                contrib = std::min(0.0, D);
            wprime = wprime + contrib;
        }
        node_values.emplace_back(hi, wprime);
    }

    StepLinSignal signal(std::move(segs));
    for (const auto& [t, val] : node_values) signal.set_point_value(t, val);
    return signal;
}

StepLinSignal stop_dir_derivative(const PlSignal& u, double z0, const PlSignal& h, double q0,
                                  const Decomposition& dec) {
    StepLinSignal pd = play_dir_derivative(u, z0, h, q0, dec);
    StepLinSignal out = subtract(h, pd);
    for (const auto& [t, val] : pd.point_values()) out.set_point_value(t, h.eval(t) - val);
    return out;
}

}  // namespace hyst
