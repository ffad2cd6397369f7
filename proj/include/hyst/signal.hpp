#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "hyst/common.hpp"

namespace hyst {

// Strictly increasing node sequence t_0 = a < ... < t_n = b.
class TimeGrid {
public:
    explicit TimeGrid(std::vector<double> nodes);

    const std::vector<double>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    double a() const { return nodes_.front(); }
    double b() const { return nodes_.back(); }

    // Index i with nodes[i] <= t <= nodes[i+1] (last segment for t = b).
    std::size_t segment_index(double t) const;

private:
    std::vector<double> nodes_;
};

// Continuous piecewise-linear function on [a,b]: node values with linear
// interpolation in between. This is the signal class all operators act on;
// play, stop and the accumulated maximum map it to itself.
class PlSignal {
public:
    PlSignal(TimeGrid grid, std::vector<double> values);
    PlSignal(std::vector<double> nodes, std::vector<double> values);

    const TimeGrid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double a() const { return grid_.a(); }
    double b() const { return grid_.b(); }
    std::size_t node_count() const { return grid_.size(); }

    double eval(double t) const;           // throws std::domain_error outside [a,b]
    double value_at_node(std::size_t i) const { return values_[i]; }
    double slope(std::size_t segment) const;

    // Returns a copy whose grid contains the given extra nodes (values
    // unchanged as a function).
    PlSignal refined(const std::vector<double>& extra_nodes) const;

private:
    TimeGrid grid_;
    std::vector<double> values_;
};

// Piecewise-linear-between-breakpoints function with jumps allowed at
// breakpoints; represents L^q-valued outputs of the derivative formulas.
// Values at breakpoints are representation choices; both one-sided limits
// are stored, and isolated exceptional point values (e.g. the final touch
// of a running maximum at t = b) can be attached on top.
class StepLinSignal {
public:
    struct Segment {
        double t0, t1;  // t0 < t1
        double v0, v1;  // one-sided limits at t0+ and t1-
    };

    StepLinSignal(std::vector<Segment> segments,
                  std::vector<std::pair<double, double>> point_values = {});

    static StepLinSignal constant(double a, double b, double c);
    static StepLinSignal from_pl(const PlSignal& u);

    const std::vector<Segment>& segments() const { return segs_; }
    const std::vector<std::pair<double, double>>& point_values() const { return points_; }

    double a() const { return segs_.front().t0; }
    double b() const { return segs_.back().t1; }

    double eval_left(double t) const;   // limit from the left (right limit at a)
    double eval_right(double t) const;  // limit from the right (left limit at b)
    // Point evaluation: exceptional value if attached; otherwise the right
    // limit (left limit at t = b).
    double eval(double t) const;

    // All breakpoints, ascending, including a and b.
    std::vector<double> breakpoints() const;

    void set_point_value(double t, double v);

private:
    std::vector<Segment> segs_;
    std::vector<std::pair<double, double>> points_;
};

// Norm selector: sup, W^{1,p} (p > 1), C^{0,alpha} (0 < alpha <= 1) or
// L^q (q >= 1). The W^{1,1} variant is deliberately excluded from the
// regular constructor; it exists only as a diagnostic for the maximum
// functional counterexample and for rate studies that demonstrate
// non-convergence.
struct NormSpec {
    enum class Kind { Sup, W1p, Holder, Lq };

    Kind kind = Kind::Sup;
    double param = 0.0;

    static NormSpec sup() { return {Kind::Sup, 0.0}; }
    static NormSpec w1p(double p);      // requires p > 1
    static NormSpec holder(double alpha);  // requires 0 < alpha <= 1
    static NormSpec lq(double q);       // requires q >= 1
    static NormSpec w11_diagnostic() { return {Kind::W1p, 1.0}; }

    std::string name() const;
};

// --- norms and moduli -------------------------------------------------------

double sup_norm(const PlSignal& u);

// |u(a)| + (sum over segments of |slope|^p * length)^{1/p}; exact. p > 1,
// except p = 1 which is admitted for the W^{1,1} diagnostic via
// NormSpec::w11_diagnostic / w11_norm.
double w1p_norm(const PlSignal& u, double p);
double w11_norm(const PlSignal& u);

// |u(a)| + Hoelder seminorm. Exact for alpha = 1 (max |slope|); for
// alpha < 1 the seminorm is maximized over all node pairs plus, per ordered
// segment pair, one golden-section refinement with one endpoint fixed.
// Tests cross-check this against dense brute force.
double holder_norm(const PlSignal& u, double alpha);

double signal_norm(const PlSignal& u, const NormSpec& spec);

// Exact L^q norm over [window_lo, window_hi] (defaults to the full domain).
// Segments are split at sign changes; |linear|^q integrates in closed form.
double lq_norm(const StepLinSignal& v, double q);
double lq_norm(const StepLinSignal& v, double q, double window_lo, double window_hi);

// Exact modulus of continuity sup{|f(t)-f(s)| : |t-s| <= eps} over
// [window_lo, window_hi]. The window-range function is convex between the
// events where t or t+eps crosses a node, so scanning events is exact.
double modulus_of_continuity(const PlSignal& f, double eps);
double modulus_of_continuity(const PlSignal& f, double eps, double window_lo,
                             double window_hi);

// --- signal algebra ----------------------------------------------------------

PlSignal add(const PlSignal& u, const PlSignal& v);         // common domain required
PlSignal subtract(const PlSignal& u, const PlSignal& v);
PlSignal scale(const PlSignal& u, double factor);
PlSignal shift(const PlSignal& u, double offset);           // value offset
PlSignal restrict_signal(const PlSignal& u, double t0, double t1);

StepLinSignal subtract(const StepLinSignal& x, const StepLinSignal& y);
StepLinSignal subtract(const PlSignal& u, const StepLinSignal& y);
StepLinSignal subtract(const StepLinSignal& x, const PlSignal& u);

// --- CSV ---------------------------------------------------------------------

// Format: header "t,value"; rows strictly increasing in t. Parse errors
// report the row number.
PlSignal read_signal_csv(std::istream& in, const std::string& origin = "<csv>");
PlSignal read_signal_csv_file(const std::string& path);
void write_signal_csv(std::ostream& out, const PlSignal& u);
void write_signal_csv_file(const std::string& path, const PlSignal& u);

// Derivative outputs: header "t,left,right", one row per breakpoint.
void write_steplin_csv(std::ostream& out, const StepLinSignal& v);
void write_steplin_csv_file(const std::string& path, const StepLinSignal& v);

}  // namespace hyst
