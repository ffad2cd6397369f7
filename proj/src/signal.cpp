#include "hyst/signal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hyst {

namespace {

// Sorted union of two ascending node lists; coordinates closer than tol
// collapse onto the earlier one.
std::vector<double> merge_nodes(const std::vector<double>& x, const std::vector<double>& y,
                                double tol = kTolEq) {
    std::vector<double> out;
    out.reserve(x.size() + y.size());
    std::merge(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    std::vector<double> dedup;
    for (double t : out) {
        if (dedup.empty() || t > dedup.back() + tol) dedup.push_back(t);
    }
    return dedup;
}

}  // namespace

// --- TimeGrid ---------------------------------------------------------------

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw std::invalid_argument("TimeGrid: need at least 2 nodes");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (!(nodes_[i] > nodes_[i - 1]))
            throw std::invalid_argument("TimeGrid: nodes must be strictly increasing");
    }
}

std::size_t TimeGrid::segment_index(double t) const {
    if (t < nodes_.front() - kTolEq || t > nodes_.back() + kTolEq)
        throw std::domain_error("TimeGrid: t outside [a,b]");
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - nodes_.begin());
    if (i == 0) return 0;
    if (i >= nodes_.size()) return nodes_.size() - 2;
    return i - 1;
}

// --- PlSignal ---------------------------------------------------------------

PlSignal::PlSignal(TimeGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw std::invalid_argument("PlSignal: values length must equal node count");
}

PlSignal::PlSignal(std::vector<double> nodes, std::vector<double> values)
    : PlSignal(TimeGrid(std::move(nodes)), std::move(values)) {}

double PlSignal::eval(double t) const {
    std::size_t i = grid_.segment_index(t);
    const auto& n = grid_.nodes();
    double t0 = n[i], t1 = n[i + 1];
    if (t <= t0) return values_[i];
    if (t >= t1) return values_[i + 1];
    double w = (t - t0) / (t1 - t0);
    return values_[i] + w * (values_[i + 1] - values_[i]);
}

double PlSignal::slope(std::size_t segment) const {
    const auto& n = grid_.nodes();
    return (values_[segment + 1] - values_[segment]) / (n[segment + 1] - n[segment]);
}

PlSignal PlSignal::refined(const std::vector<double>& extra_nodes) const {
    std::vector<double> extra = extra_nodes;
    std::sort(extra.begin(), extra.end());
    std::vector<double> nodes = merge_nodes(grid_.nodes(), extra);
    std::vector<double> vals;
    vals.reserve(nodes.size());
    for (double t : nodes) vals.push_back(eval(t));
    return PlSignal(std::move(nodes), std::move(vals));
}

// --- StepLinSignal ----------------------------------------------------------

StepLinSignal::StepLinSignal(std::vector<Segment> segments,
                             std::vector<std::pair<double, double>> point_values)
    : segs_(std::move(segments)), points_(std::move(point_values)) {
    if (segs_.empty()) throw std::invalid_argument("StepLinSignal: no segments");
    for (std::size_t i = 0; i < segs_.size(); ++i) {
        if (!(segs_[i].t1 > segs_[i].t0))
            throw std::invalid_argument("StepLinSignal: degenerate segment");
        if (i > 0 && std::abs(segs_[i].t0 - segs_[i - 1].t1) > kTolEq)
            throw std::invalid_argument("StepLinSignal: segments must tile the domain");
    }
    std::sort(points_.begin(), points_.end());
}

StepLinSignal StepLinSignal::constant(double a, double b, double c) {
    return StepLinSignal({{a, b, c, c}});
}

StepLinSignal StepLinSignal::from_pl(const PlSignal& u) {
    std::vector<Segment> segs;
    const auto& n = u.grid().nodes();
    for (std::size_t i = 0; i + 1 < n.size(); ++i)
        segs.push_back({n[i], n[i + 1], u.values()[i], u.values()[i + 1]});
    return StepLinSignal(std::move(segs));
}

double StepLinSignal::eval_left(double t) const {
    if (t <= a() + kTolEq) return eval_right(a());
    for (const auto& s : segs_) {
        if (t > s.t0 + kTolEq && t <= s.t1 + kTolEq) {
            double w = (std::min(t, s.t1) - s.t0) / (s.t1 - s.t0);
            return s.v0 + w * (s.v1 - s.v0);
        }
    }
    throw std::domain_error("StepLinSignal: t outside domain");
}

double StepLinSignal::eval_right(double t) const {
    if (t >= b() - kTolEq) return eval_left(b());
    for (const auto& s : segs_) {
        if (t >= s.t0 - kTolEq && t < s.t1 - kTolEq) {
            double w = (std::max(t, s.t0) - s.t0) / (s.t1 - s.t0);
            return s.v0 + w * (s.v1 - s.v0);
        }
    }
    throw std::domain_error("StepLinSignal: t outside domain");
}

double StepLinSignal::eval(double t) const {
    for (const auto& p : points_) {
        if (approx_eq(p.first, t)) return p.second;
    }
    if (t >= b() - kTolEq) return eval_left(b());
    return eval_right(t);
}

std::vector<double> StepLinSignal::breakpoints() const {
    std::vector<double> out;
    out.push_back(segs_.front().t0);
    for (const auto& s : segs_) out.push_back(s.t1);
    return out;
}

void StepLinSignal::set_point_value(double t, double v) {
    for (auto& p : points_) {
        if (approx_eq(p.first, t)) {
            p.second = v;
            return;
        }
    }
    points_.emplace_back(t, v);
    std::sort(points_.begin(), points_.end());
}

// --- NormSpec ---------------------------------------------------------------

NormSpec NormSpec::w1p(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("NormSpec::w1p: requires p > 1");
    return {Kind::W1p, p};
}

NormSpec NormSpec::holder(double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("NormSpec::holder: requires 0 < alpha <= 1");
    return {Kind::Holder, alpha};
}

NormSpec NormSpec::lq(double q) {
    if (!(q >= 1.0)) throw std::invalid_argument("NormSpec::lq: requires q >= 1");
    return {Kind::Lq, q};
}

std::string NormSpec::name() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Sup: os << "sup"; break;
        case Kind::W1p: os << "w1p:" << param; break;
        case Kind::Holder: os << "holder:" << param; break;
        case Kind::Lq: os << "lq:" << param; break;
    }
    return os.str();
}

// --- norms ------------------------------------------------------------------

double sup_norm(const PlSignal& u) {
    double m = 0.0;
    for (double v : u.values()) m = std::max(m, std::abs(v));
    return m;
}

namespace {

double w1p_norm_impl(const PlSignal& u, double p) {
    const auto& n = u.grid().nodes();
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
        double len = n[i + 1] - n[i];
        sum += std::pow(std::abs(u.slope(i)), p) * len;
    }
    return std::abs(u.values().front()) + std::pow(sum, 1.0 / p);
}

}  // namespace

double w1p_norm(const PlSignal& u, double p) {
    if (!(p > 1.0)) throw std::invalid_argument("w1p_norm: requires p > 1");
    return w1p_norm_impl(u, p);
}

double w11_norm(const PlSignal& u) { return w1p_norm_impl(u, 1.0); }

namespace {

double holder_ratio(const PlSignal& u, double alpha, double s, double t) {
    double d = std::abs(t - s);
    if (d <= 0.0) return 0.0;
    return std::abs(u.eval(t) - u.eval(s)) / std::pow(d, alpha);
}

// One golden-section pass maximizing y -> |u(y)-u(x)| / |y-x|^alpha.
double golden_refine(const PlSignal& u, double alpha, double x, double lo, double hi) {
    constexpr double invphi = 0.6180339887498949;
    double best = std::max(holder_ratio(u, alpha, x, lo), holder_ratio(u, alpha, x, hi));
    double c = hi - invphi * (hi - lo);
    double d = lo + invphi * (hi - lo);
    double fc = holder_ratio(u, alpha, x, c);
    double fd = holder_ratio(u, alpha, x, d);
    for (int it = 0; it < 48 && hi - lo > 1e-14; ++it) {
        if (fc > fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - invphi * (hi - lo);
            fc = holder_ratio(u, alpha, x, c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + invphi * (hi - lo);
            fd = holder_ratio(u, alpha, x, d);
        }
        best = std::max(best, std::max(fc, fd));
    }
    return best;
}

}  // namespace

double holder_norm(const PlSignal& u, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("holder_norm: requires 0 < alpha <= 1");
    const auto& n = u.grid().nodes();
    if (alpha == 1.0) {
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < n.size(); ++i) m = std::max(m, std::abs(u.slope(i)));
        return std::abs(u.values().front()) + m;
    }
    double semi = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i)
        for (std::size_t j = i + 1; j < n.size(); ++j)
            semi = std::max(semi, holder_ratio(u, alpha, n[i], n[j]));
    // Refine with one endpoint fixed at a node and the other sliding over a
    // segment; interior-interior maxima are bracketed by these passes.
    for (std::size_t i = 0; i < n.size(); ++i) {
        for (std::size_t j = 0; j + 1 < n.size(); ++j) {
            if (n[i] >= n[j] - kTolEq && n[i] <= n[j + 1] + kTolEq) continue;
            semi = std::max(semi, golden_refine(u, alpha, n[i], n[j], n[j + 1]));
        }
    }
    return std::abs(u.values().front()) + semi;
}

double signal_norm(const PlSignal& u, const NormSpec& spec) {
    switch (spec.kind) {
        case NormSpec::Kind::Sup: return sup_norm(u);
        case NormSpec::Kind::W1p:
            return spec.param == 1.0 ? w11_norm(u) : w1p_norm(u, spec.param);
        case NormSpec::Kind::Holder: return holder_norm(u, spec.param);
        case NormSpec::Kind::Lq:
            return lq_norm(StepLinSignal::from_pl(u), spec.param);
    }
    throw std::logic_error("signal_norm: unknown kind");
}

// --- L^q norm of StepLinSignal ----------------------------------------------

namespace {

// integral of |v|^q over a piece where v is linear and of one sign,
// |v| running from va to vb over length len.
double abs_pow_integral(double va, double vb, double len, double q) {
    if (len <= 0.0) return 0.0;
    double hi = std::max(va, vb), lo = std::min(va, vb);
    if (hi - lo <= 1e-12 * std::max(1.0, hi))
        return std::pow(0.5 * (va + vb), q) * len;
    return len * (std::pow(hi, q + 1.0) - std::pow(lo, q + 1.0)) / ((q + 1.0) * (hi - lo));
}

double lq_power_on_segment(double t0, double t1, double v0, double v1, double q) {
    double len = t1 - t0;
    if (len <= 0.0) return 0.0;
    if ((v0 >= 0.0 && v1 >= 0.0) || (v0 <= 0.0 && v1 <= 0.0))
        return abs_pow_integral(std::abs(v0), std::abs(v1), len, q);
    // sign change: split at the zero crossing
    double lz = len * std::abs(v0) / (std::abs(v0) + std::abs(v1));
    return abs_pow_integral(std::abs(v0), 0.0, lz, q) +
           abs_pow_integral(0.0, std::abs(v1), len - lz, q);
}

}  // namespace

double lq_norm(const StepLinSignal& v, double q) {
    return lq_norm(v, q, v.a(), v.b());
}

double lq_norm(const StepLinSignal& v, double q, double window_lo, double window_hi) {
    if (!(q >= 1.0)) throw std::invalid_argument("lq_norm: requires q >= 1");
    if (!(window_hi > window_lo)) throw std::domain_error("lq_norm: empty window");
    double acc = 0.0;
    for (const auto& s : v.segments()) {
        double t0 = std::max(s.t0, window_lo);
        double t1 = std::min(s.t1, window_hi);
        if (t1 <= t0) continue;
        double w0 = s.v0 + (s.v1 - s.v0) * (t0 - s.t0) / (s.t1 - s.t0);
        double w1 = s.v0 + (s.v1 - s.v0) * (t1 - s.t0) / (s.t1 - s.t0);
        acc += lq_power_on_segment(t0, t1, w0, w1, q);
    }
    return std::pow(acc, 1.0 / q);
}

// --- modulus of continuity ---------------------------------------------------

namespace {

// exact min/max of a PlSignal over [x0,x1]
std::pair<double, double> window_minmax(const PlSignal& f, double x0, double x1) {
    double lo = std::min(f.eval(x0), f.eval(x1));
    double hi = std::max(f.eval(x0), f.eval(x1));
    for (double t : f.grid().nodes()) {
        if (t > x0 && t < x1) {
            double v = f.eval(t);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return {lo, hi};
}

}  // namespace

double modulus_of_continuity(const PlSignal& f, double eps) {
    return modulus_of_continuity(f, eps, f.a(), f.b());
}

double modulus_of_continuity(const PlSignal& f, double eps, double window_lo,
                             double window_hi) {
    if (!(eps > 0.0)) throw std::invalid_argument("modulus_of_continuity: eps > 0 required");
    if (eps >= window_hi - window_lo) {
        auto [lo, hi] = window_minmax(f, window_lo, window_hi);
        return hi - lo;
    }
    // g(t) = range of f over [t, t+eps] is convex between events where t or
    // t+eps crosses a node, so the sup is attained at an event.
    std::vector<double> events{window_lo, window_hi - eps};
    for (double t : f.grid().nodes()) {
        if (t > window_lo && t < window_hi - eps) events.push_back(t);
        double s = t - eps;
        if (s > window_lo && s < window_hi - eps) events.push_back(s);
    }
    std::sort(events.begin(), events.end());
    double best = 0.0;
    for (double t : events) {
        auto [lo, hi] = window_minmax(f, t, t + eps);
        best = std::max(best, hi - lo);
    }
    return best;
}

// --- algebra -----------------------------------------------------------------

namespace {

void require_same_domain(double a1, double b1, double a2, double b2) {
    if (!approx_eq(a1, a2) || !approx_eq(b1, b2))
        throw std::domain_error("signal algebra: incompatible domains");
}

}  // namespace

PlSignal add(const PlSignal& u, const PlSignal& v) {
    require_same_domain(u.a(), u.b(), v.a(), v.b());
    std::vector<double> nodes = merge_nodes(u.grid().nodes(), v.grid().nodes());
    std::vector<double> vals;
    vals.reserve(nodes.size());
    for (double t : nodes) vals.push_back(u.eval(t) + v.eval(t));
    return PlSignal(std::move(nodes), std::move(vals));
}

PlSignal subtract(const PlSignal& u, const PlSignal& v) {
    return add(u, scale(v, -1.0));
}

PlSignal scale(const PlSignal& u, double factor) {
    std::vector<double> vals = u.values();
    for (double& x : vals) x *= factor;
    return PlSignal(u.grid(), std::move(vals));
}

PlSignal shift(const PlSignal& u, double offset) {
    std::vector<double> vals = u.values();
    for (double& x : vals) x += offset;
    return PlSignal(u.grid(), std::move(vals));
}

PlSignal restrict_signal(const PlSignal& u, double t0, double t1) {
    if (t0 < u.a() - kTolEq || t1 > u.b() + kTolEq || !(t1 > t0))
        throw std::domain_error("restrict_signal: window outside domain");
    std::vector<double> nodes{t0};
    for (double t : u.grid().nodes())
        if (t > t0 + kTolEq && t < t1 - kTolEq) nodes.push_back(t);
    nodes.push_back(t1);
    std::vector<double> vals;
    vals.reserve(nodes.size());
    for (double t : nodes) vals.push_back(u.eval(t));
    return PlSignal(std::move(nodes), std::move(vals));
}

namespace {

template <typename Left, typename Right>
StepLinSignal combine(const Left& x, const Right& y, double a, double b,
                      const std::vector<double>& bps) {
    std::vector<StepLinSignal::Segment> segs;
    for (std::size_t i = 0; i + 1 < bps.size(); ++i) {
        double t0 = bps[i], t1 = bps[i + 1];
        segs.push_back({t0, t1, x.eval_right(t0) - y.eval_right(t0),
                        x.eval_left(t1) - y.eval_left(t1)});
    }
    (void)a;
    (void)b;
    return StepLinSignal(std::move(segs));
}

struct PlAdaptor {
    const PlSignal& u;
    double eval_right(double t) const { return u.eval(t); }
    double eval_left(double t) const { return u.eval(t); }
};

}  // namespace

StepLinSignal subtract(const StepLinSignal& x, const StepLinSignal& y) {
    require_same_domain(x.a(), x.b(), y.a(), y.b());
    std::vector<double> bps = merge_nodes(x.breakpoints(), y.breakpoints());
    return combine(x, y, x.a(), x.b(), bps);
}

StepLinSignal subtract(const PlSignal& u, const StepLinSignal& y) {
    require_same_domain(u.a(), u.b(), y.a(), y.b());
    std::vector<double> bps = merge_nodes(u.grid().nodes(), y.breakpoints());
    return combine(PlAdaptor{u}, y, u.a(), u.b(), bps);
}

StepLinSignal subtract(const StepLinSignal& x, const PlSignal& u) {
    require_same_domain(x.a(), x.b(), u.a(), u.b());
    std::vector<double> bps = merge_nodes(x.breakpoints(), u.grid().nodes());
    return combine(x, PlAdaptor{u}, x.a(), x.b(), bps);
}

// --- CSV ---------------------------------------------------------------------

PlSignal read_signal_csv(std::istream& in, const std::string& origin) {
    std::string line;
    std::size_t row = 0;
    std::vector<double> nodes, vals;
    auto fail = [&](const std::string& msg) {
        std::ostringstream os;
        os << origin << ": row " << row << ": " << msg;
        throw std::runtime_error(os.str());
    };
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (row == 1) {
            if (line != "t,value") fail("expected header \"t,value\"");
            continue;
        }
        auto comma = line.find(',');
        if (comma == std::string::npos) fail("expected two comma-separated fields");
        double t, v;
        try {
            std::size_t used = 0;
            t = std::stod(line.substr(0, comma), &used);
            if (used != comma) fail("trailing characters in t field");
            std::string rest = line.substr(comma + 1);
            v = std::stod(rest, &used);
            if (used != rest.size()) fail("trailing characters in value field");
        } catch (const std::logic_error&) {
            fail("could not parse number");
            return PlSignal({0, 1}, {0, 0});  // unreachable
        }
        if (!nodes.empty() && !(t > nodes.back())) fail("t must be strictly increasing");
        nodes.push_back(t);
        vals.push_back(v);
    }
    if (nodes.size() < 2) {
        row = nodes.size() + 1;
        fail("need at least 2 data rows");
    }
    return PlSignal(std::move(nodes), std::move(vals));
}

PlSignal read_signal_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(path + ": cannot open");
    return read_signal_csv(in, path);
}

void write_signal_csv(std::ostream& out, const PlSignal& u) {
    out << "t,value\n" << std::setprecision(17);
    const auto& n = u.grid().nodes();
    for (std::size_t i = 0; i < n.size(); ++i)
        out << n[i] << ',' << u.values()[i] << '\n';
}

void write_signal_csv_file(const std::string& path, const PlSignal& u) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    write_signal_csv(out, u);
}

void write_steplin_csv(std::ostream& out, const StepLinSignal& v) {
    out << "t,left,right\n" << std::setprecision(17);
    for (double t : v.breakpoints())
        out << t << ',' << v.eval_left(t) << ',' << v.eval_right(t) << '\n';
}

void write_steplin_csv_file(const std::string& path, const StepLinSignal& v) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    write_steplin_csv(out, v);
}

}  // namespace hyst
