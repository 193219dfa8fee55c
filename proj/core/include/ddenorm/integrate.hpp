#ifndef DDENORM_INTEGRATE_HPP
#define DDENORM_INTEGRATE_HPP

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ddenorm/model.hpp"

namespace ddenorm {

// History function theta -> x(theta) on [-tau_max, 0].
using HistoryFn = std::function<Vec(double)>;

struct SimulateOptions {
    double dt_max = 0.05;
    // State-norm ceiling 1/abs_tol used for blow-up detection: the integrator
    // throws NonFiniteState once |x|_inf exceeds it (or becomes non-finite).
    double abs_tol = 1e-8;
    // Keep only dense segments with right endpoint >= t_final - keep_window
    // (always at least one delay interval is retained while integrating).
    double keep_window = std::numeric_limits<double>::infinity();
};

// One integration step [t0, t1] with a cubic Hermite interpolant built from
// the endpoint states and derivatives.
struct TrajectorySegment {
    double t0 = 0.0;
    double t1 = 0.0;
    Vec x0, x1; // states at the endpoints
    Vec f0, f1; // right-hand sides at the endpoints
};

struct Trajectory {
    Vec alpha;
    double t_begin = 0.0; // earliest dense-output time still stored
    double t_end = 0.0;
    HistoryFn history;       // valid on [-tau_max, 0]
    double tau_max = 0.0;
    std::vector<TrajectorySegment> segments; // contiguous, increasing

    // Dense-output evaluation; t must lie in [t_begin - tau_max*(t_begin==0),
    // t_end], i.e. the stored span plus the history interval when no segments
    // were dropped.
    Vec eval(double t) const;
    Vec deriv(double t) const;
    bool empty() const { return segments.empty(); }
};

// Fixed-step classical RK4 method of steps with step <= min(dt_max,
// tau_min/4); delayed-argument lookups use the last completed cubic Hermite
// interpolant (or the history function for times <= 0).  t_final == 0 yields
// an empty trajectory.
Trajectory simulate(const DelayModel& model, const Vec& alpha,
                    const HistoryFn& history, double t_final,
                    const SimulateOptions& opts = {});

// Dense-output samples at the requested times (throws InvalidInput when a
// time lies outside the stored span).
std::vector<Vec> sample(const Trajectory& traj, const std::vector<double>& times);

struct Crossing {
    double t;
    Vec x;
};

// Crossings of g(x(t)) = level located by sign-change bracketing on the dense
// output plus bisection to time tolerance 1e-10.  direction > 0 keeps upward
// crossings, < 0 downward, 0 both.
std::vector<Crossing> poincare_crossings(const Trajectory& traj,
                                         const std::function<double(const Vec&)>& g,
                                         double level, int direction);
std::vector<Crossing> poincare_crossings(const Trajectory& traj, int component,
                                         double level, int direction);

// CSV with header t,x1,...,xn sampled uniformly with the given spacing
// (clipped to the stored span); dt <= 0 samples every mesh point.
std::string trajectory_to_csv(const Trajectory& traj, double dt = 0.0);
std::string crossings_to_csv(const std::vector<Crossing>& crossings);

} // namespace ddenorm

#endif
