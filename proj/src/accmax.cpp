#include "hyst/accmax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hyst {

namespace detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

MaxAnalysis analyze_running_max(const PlSignal& v) {
    const auto& nodes = v.grid().nodes();
    const auto& vals = v.values();

    std::vector<double> rn{nodes[0]};   // refined nodes
    std::vector<double> rv{vals[0]};    // refined input values
    std::vector<double> rm{vals[0]};    // running max values
    std::vector<MaxAnalysis::Cell> cells;

    double cur_max = vals[0];
    double cur_arg = nodes[0];

    auto push = [&](double t, double val, double m, MaxAnalysis::CellKind kind, double anchor) {
        rn.push_back(t);
        rv.push_back(val);
        rm.push_back(m);
        cells.push_back({kind, anchor});
    };

    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        double t0 = nodes[i], t1 = nodes[i + 1];
        double v0 = vals[i], v1 = vals[i + 1];
        bool at_max = v0 >= cur_max - kTolEq;
        if (at_max) {
            if (v1 > v0 + kTolEq) {
                push(t1, v1, v1, MaxAnalysis::CellKind::Rise, 0.0);
                cur_max = v1;
                cur_arg = t1;
            } else if (v1 < v0 - kTolEq) {
                push(t1, v1, cur_max, MaxAnalysis::CellKind::Frozen, t0);
                cur_arg = t0;
            } else {
                cur_max = std::max(cur_max, v1);
                push(t1, v1, cur_max, MaxAnalysis::CellKind::Flat, 0.0);
                cur_arg = t1;
            }
        } else {
            if (v1 > cur_max + kTolEq) {
                // u crosses its running max inside the segment
                double tc = t0 + (cur_max - v0) / (v1 - v0) * (t1 - t0);
                if (tc > t0 && tc < t1) {
                    push(tc, cur_max, cur_max, MaxAnalysis::CellKind::Frozen, cur_arg);
                    push(t1, v1, v1, MaxAnalysis::CellKind::Rise, 0.0);
                } else {
                    // degenerate crossing collapses onto a node
                    push(t1, v1, v1, MaxAnalysis::CellKind::Rise, 0.0);
                }
                cur_max = v1;
                cur_arg = t1;
            } else if (v1 >= cur_max - kTolEq) {
                // touch at t1
                push(t1, v1, cur_max, MaxAnalysis::CellKind::Frozen, cur_arg);
                cur_arg = t1;
            } else {
                push(t1, v1, cur_max, MaxAnalysis::CellKind::Frozen, cur_arg);
            }
        }
    }

    MaxAnalysis out{PlSignal(rn, rv), PlSignal(rn, rm), std::move(cells), false};
    out.final_touch = (out.cells.back().kind == MaxAnalysis::CellKind::Frozen &&
                       rv.back() >= cur_max - kTolEq);
    return out;
}

double MaxAnalysis::m_at(double t) const {
    const auto& n = input.grid().nodes();
    if (t < n.front() - kTolEq || t > n.back() + kTolEq)
        throw std::domain_error("MaxAnalysis::m_at: t outside domain");
    if (t >= n.back() - kTolEq) {
        if (final_touch) return n.back();
        const auto& c = cells.back();
        return c.kind == CellKind::Frozen ? c.anchor : t;
    }
    // right-continuous: a node belongs to the cell on its right
    std::size_t i = 0;
    while (i + 2 < n.size() && t >= n[i + 1] - kTolEq) ++i;
    const auto& c = cells[i];
    return c.kind == CellKind::Frozen ? c.anchor : std::max(t, n[i]);
}

IntervalSet MaxAnalysis::argmax_at(double t) const {
    if (t <= input.a() + kTolEq) return IntervalSet::point(input.a());
    return argmax_set(restrict_signal(input, input.a(), t));
}

namespace {

// Walk state shared by selection_apply and argmax_max_of: the frozen argmax
// components accumulated so far and the active at-max run.
struct Comp {
    double lo, hi;
    double hmax;  // max of h over [lo,hi]
};

void append_pl_pieces(std::vector<StepLinSignal::Segment>& segs, const PlSignal& h,
                      double x0, double x1) {
    std::vector<double> cuts{x0};
    for (double t : h.grid().nodes())
        if (t > x0 + kTolEq && t < x1 - kTolEq) cuts.push_back(t);
    cuts.push_back(x1);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        segs.push_back({cuts[i], cuts[i + 1], h.eval(cuts[i]), h.eval(cuts[i + 1])});
}

void append_const(std::vector<StepLinSignal::Segment>& segs, double x0, double x1, double c) {
    segs.push_back({x0, x1, c, c});
}

// max over [lo,hi] of h, exact
double hmax_on(const PlSignal& h, double lo, double hi) {
    if (hi <= lo) return h.eval(lo);
    return max_over(IntervalSet::interval(lo, hi), h);
}

}  // namespace

StepLinSignal selection_apply(const MaxAnalysis& A, const PlSignal& h, SelectionRule rule) {
    const auto& n = A.input.grid().nodes();
    const auto& cells = A.cells;
    std::vector<StepLinSignal::Segment> segs;

    std::vector<Comp> comps;  // frozen components, left to right
    double moving_lo = n.front();

    if (cells.front().kind == MaxAnalysis::CellKind::Frozen)
        comps.push_back({n.front(), n.front(), h.eval(n.front())});

    for (std::size_t i = 0; i < cells.size(); ++i) {
        double x0 = n[i], x1 = n[i + 1];
        const auto kind = cells[i].kind;

        // boundary transitions
        if (i > 0) {
            const auto prev = cells[i - 1].kind;
            if (kind == MaxAnalysis::CellKind::Rise) {
                comps.clear();
            } else if (kind == MaxAnalysis::CellKind::Flat) {
                if (prev != MaxAnalysis::CellKind::Flat)
                    moving_lo = x0;  // a rise peak, touch or crossing starts a fresh run
            } else {  // Frozen
                if (prev == MaxAnalysis::CellKind::Rise) {
                    comps.push_back({x0, x0, h.eval(x0)});
                } else if (prev == MaxAnalysis::CellKind::Flat) {
                    comps.push_back({moving_lo, x0, hmax_on(h, moving_lo, x0)});
                } else if (A.input.eval(x0) >= A.running_max.eval(x0) - kTolEq) {
                    comps.push_back({x0, x0, h.eval(x0)});  // isolated touch
                }
            }
        } else if (kind == MaxAnalysis::CellKind::Flat) {
            moving_lo = x0;
        }

        switch (kind) {
            case MaxAnalysis::CellKind::Frozen: {
                double val = 0.0;
                switch (rule) {
                    case SelectionRule::Rightmost: val = h.eval(cells[i].anchor); break;
                    case SelectionRule::Leftmost:
                        val = h.eval(comps.empty() ? cells[i].anchor : comps.front().lo);
                        break;
                    case SelectionRule::UniformAtoms: {
                        double acc = 0.0;
                        for (const auto& c : comps) acc += h.eval(c.hi);
                        val = comps.empty() ? h.eval(cells[i].anchor)
                                            : acc / static_cast<double>(comps.size());
                        break;
                    }
                }
                append_const(segs, x0, x1, val);
                break;
            }
            case MaxAnalysis::CellKind::Rise:
                append_pl_pieces(segs, h, x0, x1);  // all rules: M_t = {t}
                break;
            case MaxAnalysis::CellKind::Flat: {
                if (rule == SelectionRule::Rightmost) {
                    append_pl_pieces(segs, h, x0, x1);
                } else if (rule == SelectionRule::Leftmost) {
                    double L = comps.empty() ? moving_lo : comps.front().lo;
                    append_const(segs, x0, x1, h.eval(L));
                } else {
                    // frozen reps plus the moving representative at t
                    double base = 0.0;
                    for (const auto& c : comps) base += h.eval(c.hi);
                    double K = static_cast<double>(comps.size() + 1);
                    std::vector<double> cuts{x0};
                    for (double t : h.grid().nodes())
                        if (t > x0 + kTolEq && t < x1 - kTolEq) cuts.push_back(t);
                    cuts.push_back(x1);
                    for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
                        segs.push_back({cuts[j], cuts[j + 1],
                                        (base + h.eval(cuts[j])) / K,
                                        (base + h.eval(cuts[j + 1])) / K});
                }
                break;
            }
        }
    }

    StepLinSignal out(std::move(segs));
    // exact value at b from a direct query
    DiracMeasure mu = select_measure(A.argmax_at(A.input.b()), rule);
    out.set_point_value(A.input.b(), apply_measure(mu, h));
    return out;
}

StepLinSignal argmax_max_of(const MaxAnalysis& A, const PlSignal& h) {
    const auto& n = A.input.grid().nodes();
    const auto& cells = A.cells;
    std::vector<StepLinSignal::Segment> segs;

    std::vector<Comp> comps;
    double moving_lo = n.front();
    double run_max_h = h.eval(n.front());  // running max of h over the active run

    if (cells.front().kind == MaxAnalysis::CellKind::Frozen)
        comps.push_back({n.front(), n.front(), h.eval(n.front())});

    auto comp_ceiling = [&]() {
        double c = -kInf;
        for (const auto& cc : comps) c = std::max(c, cc.hmax);
        return c;
    };

    for (std::size_t i = 0; i < cells.size(); ++i) {
        double x0 = n[i], x1 = n[i + 1];
        const auto kind = cells[i].kind;

        if (i > 0) {
            const auto prev = cells[i - 1].kind;
            if (kind == MaxAnalysis::CellKind::Rise) {
                comps.clear();
            } else if (kind == MaxAnalysis::CellKind::Flat) {
                if (prev != MaxAnalysis::CellKind::Flat) {
                    moving_lo = x0;
                    run_max_h = h.eval(x0);
                }
            } else {  // Frozen
                if (prev == MaxAnalysis::CellKind::Rise) {
                    comps.push_back({x0, x0, h.eval(x0)});
                } else if (prev == MaxAnalysis::CellKind::Flat) {
                    comps.push_back({moving_lo, x0, run_max_h});
                } else if (A.input.eval(x0) >= A.running_max.eval(x0) - kTolEq) {
                    comps.push_back({x0, x0, h.eval(x0)});
                }
            }
        } else if (kind == MaxAnalysis::CellKind::Flat) {
            moving_lo = x0;
            run_max_h = h.eval(x0);
        }

        switch (kind) {
            case MaxAnalysis::CellKind::Frozen:
                append_const(segs, x0, x1, comp_ceiling());
                break;
            case MaxAnalysis::CellKind::Rise:
                append_pl_pieces(segs, h, x0, x1);
                break;
            case MaxAnalysis::CellKind::Flat: {
                // value(t) = max(ceiling, running max of h over [moving_lo, t])
                double C = comp_ceiling();
                std::vector<double> cuts{x0};
                for (double t : h.grid().nodes())
                    if (t > x0 + kTolEq && t < x1 - kTolEq) cuts.push_back(t);
                cuts.push_back(x1);
                for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
                    double y0 = cuts[j], y1 = cuts[j + 1];
                    double h0 = h.eval(y0), h1 = h.eval(y1);
                    double K = std::max(C, run_max_h);
                    if (h1 > h0 + kTolEq) {
                        if (h0 >= K) {
                            segs.push_back({y0, y1, h0, h1});
                        } else if (h1 <= K) {
                            append_const(segs, y0, y1, K);
                        } else {
                            double xc = y0 + (K - h0) / (h1 - h0) * (y1 - y0);
                            if (xc > y0 + kTolEq) append_const(segs, y0, xc, K);
                            else xc = y0;
                            if (xc < y1 - kTolEq)
                                segs.push_back({xc, y1, K, h1});
                            else
                                segs.back().t1 = y1;
                        }
                        run_max_h = std::max(run_max_h, h1);
                    } else {
                        append_const(segs, y0, y1, K);
                        run_max_h = std::max(run_max_h, h0);
                    }
                }
                break;
            }
        }
    }

    StepLinSignal out(std::move(segs));
    out.set_point_value(A.input.b(), max_over(A.argmax_at(A.input.b()), h));
    return out;
}

}  // namespace detail

// --- public operations --------------------------------------------------------

PlSignal accumulated_max(const PlSignal& u) {
    return detail::analyze_running_max(u).running_max;
}

IntervalSet argmax_to(const PlSignal& u, double t) {
    if (t < u.a() - kTolEq || t > u.b() + kTolEq)
        throw std::domain_error("argmax_to: t outside domain");
    if (t <= u.a() + kTolEq) return IntervalSet::point(u.a());
    return argmax_set(restrict_signal(u, u.a(), t));
}

IntervalSet near_argmax_to(const PlSignal& u, double t, double delta) {
    if (t < u.a() - kTolEq || t > u.b() + kTolEq)
        throw std::domain_error("near_argmax_to: t outside domain");
    if (delta < 0.0) throw std::invalid_argument("near_argmax_to: delta >= 0 required");
    if (t <= u.a() + kTolEq) return IntervalSet::point(u.a());
    return near_argmax_set(restrict_signal(u, u.a(), t), delta);
}

double MaximizerPath::at(double t) const {
    const auto& last = regimes.back();
    if (t >= last.lo - kTolEq) return last.identity ? std::max(t, last.lo) : last.frozen_point;
    for (std::size_t i = 0; i + 1 < regimes.size(); ++i) {
        if (t >= regimes[i].lo - kTolEq && t < regimes[i + 1].lo - kTolEq)
            return regimes[i].identity ? t : regimes[i].frozen_point;
    }
    return regimes.front().identity ? t : regimes.front().frozen_point;
}

MaximizerPath maximizer_path(const PlSignal& u) {
    auto A = detail::analyze_running_max(u);
    const auto& n = A.input.grid().nodes();
    MaximizerPath path;
    for (std::size_t i = 0; i < A.cells.size(); ++i) {
        bool ident = A.cells[i].kind != detail::MaxAnalysis::CellKind::Frozen;
        double anchor = ident ? 0.0 : A.cells[i].anchor;
        if (!path.regimes.empty() && path.regimes.back().identity == ident &&
            (ident || approx_eq(path.regimes.back().frozen_point, anchor))) {
            path.regimes.back().hi = n[i + 1];
        } else {
            path.regimes.push_back({n[i], n[i + 1], ident, anchor});
        }
    }
    if (A.final_touch)
        path.regimes.push_back({u.b(), u.b(), false, u.b()});
    return path;
}

StepLinSignal pointwise_dir_derivative(const PlSignal& u, const PlSignal& h) {
    if (!approx_eq(u.a(), h.a()) || !approx_eq(u.b(), h.b()))
        throw std::domain_error("pointwise_dir_derivative: domain mismatch");
    return detail::argmax_max_of(detail::analyze_running_max(u), h);
}

StepLinSignal newton_apply(const PlSignal& v, const PlSignal& h, SelectionRule rule) {
    if (!approx_eq(v.a(), h.a()) || !approx_eq(v.b(), h.b()))
        throw std::domain_error("newton_apply: domain mismatch");
    return detail::selection_apply(detail::analyze_running_max(v), h, rule);
}

DiracMeasure selection_at(const PlSignal& v, double t, SelectionRule rule) {
    return select_measure(argmax_to(v, t), rule);
}

// --- good set -----------------------------------------------------------------

namespace {

bool inclusion_holds(const PlSignal& u, double t, double delta, double eps) {
    if (t <= u.a() + kTolEq) return true;  // M_{a,delta} = M_a = {a}
    IntervalSet near = near_argmax_to(u, t, delta);
    IntervalSet arg = argmax_to(u, t);
    return near.subset_of_open_neighborhood(arg, eps);
}

}  // namespace

GoodSetReport good_set(const PlSignal& u, double delta, double eps) {
    if (!(delta > 0.0) || !(eps > 0.0))
        throw std::invalid_argument("good_set: delta > 0 and eps > 0 required");

    auto A = detail::analyze_running_max(u);
    const auto& rn = A.input.grid().nodes();
    const PlSignal& phi = A.running_max;

    std::vector<double> events(rn.begin(), rn.end());
    auto add_event = [&](double t, double lo, double hi) {
        if (t > lo + kTolEq && t < hi - kTolEq) events.push_back(t);
    };

    const auto& un = u.grid().nodes();
    const auto& uv = u.values();

    for (std::size_t i = 0; i + 1 < rn.size(); ++i) {
        double T0 = rn[i], T1 = rn[i + 1];
        double f0 = phi.values()[i];
        double sigma = (phi.values()[i + 1] - f0) / (T1 - T0);

        // threshold phi - delta (and the level phi itself) crossing node values
        if (std::abs(sigma) > 0.0) {
            for (double vi : uv) {
                add_event(T0 + (vi + delta - f0) / sigma, T0, T1);
                add_event(T0 + (vi - f0) / sigma, T0, T1);
            }
        }

        // linear position functions p(t) = P0 + s (t - T0): level/sublevel
        // boundaries sliding along the input segments, the current time, and
        // the fixed candidate points (refined nodes)
        struct Line {
            double P0, s;
        };
        std::vector<Line> lines;
        for (std::size_t j = 0; j + 1 < un.size(); ++j) {
            double mj = (uv[j + 1] - uv[j]) / (un[j + 1] - un[j]);
            if (std::abs(mj) <= kTolEq) continue;
            for (double c : {0.0, delta})
                lines.push_back({un[j] + (f0 - c - uv[j]) / mj, sigma / mj});
        }
        lines.push_back({T0, 1.0});  // the moving time point itself
        for (double c : rn) lines.push_back({c, 0.0});

        for (std::size_t p = 0; p < lines.size(); ++p) {
            for (std::size_t q = p + 1; q < lines.size(); ++q) {
                double ds = lines[p].s - lines[q].s;
                if (std::abs(ds) <= kTolEq) continue;
                for (double off : {-eps, 0.0, eps})
                    add_event(T0 + (lines[q].P0 + off - lines[p].P0) / ds, T0, T1);
            }
        }
    }

    std::sort(events.begin(), events.end());
    std::vector<double> ev;
    for (double t : events)
        if (ev.empty() || t > ev.back() + kTolEq) ev.push_back(t);

    std::vector<bool> good_at(ev.size());
    for (std::size_t i = 0; i < ev.size(); ++i)
        good_at[i] = inclusion_holds(u, ev[i], delta, eps);

    IntervalSet good;
    for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
        double mid = 0.5 * (ev[i] + ev[i + 1]);
        if (inclusion_holds(u, mid, delta, eps)) good.add(ev[i], ev[i + 1]);
    }
    for (std::size_t i = 0; i < ev.size(); ++i)
        if (good_at[i] && !good.contains(ev[i])) good.add(ev[i], ev[i]);

    GoodSetReport rep;
    rep.delta = delta;
    rep.eps = eps;
    rep.good_set = good;
    rep.complement_measure = (u.b() - u.a()) - good.measure();
    return rep;
}

// --- remainders ----------------------------------------------------------------

double remainder_lq(const PlSignal& u, const PlSignal& h, DerivativeFlavor flavor,
                    SelectionRule rule, double lq_exponent, double gamma) {
    if (!(lq_exponent >= 1.0)) throw std::invalid_argument("remainder_lq: q >= 1 required");
    if (!(gamma > u.a()) || gamma > u.b() + kTolEq)
        throw std::invalid_argument("remainder_lq: gamma in (a,b] required");
    PlSignal uh = add(u, h);
    PlSignal diff = subtract(accumulated_max(uh), accumulated_max(u));
    StepLinSignal d = (flavor == DerivativeFlavor::Newton)
                          ? newton_apply(uh, h, rule)
                          : pointwise_dir_derivative(u, h);
    return lq_norm(subtract(diff, d), lq_exponent, u.a(), gamma);
}

}  // namespace hyst
