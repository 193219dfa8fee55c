#include "ddenorm/integrate.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace ddenorm {

namespace {

Vec hermite_eval(const TrajectorySegment& s, double t) {
    const double dt = s.t1 - s.t0;
    const double u = (t - s.t0) / dt;
    const double u2 = u * u, u3 = u2 * u;
    return (2.0 * u3 - 3.0 * u2 + 1.0) * s.x0 + (u3 - 2.0 * u2 + u) * dt * s.f0 +
           (-2.0 * u3 + 3.0 * u2) * s.x1 + (u3 - u2) * dt * s.f1;
}

Vec hermite_deriv(const TrajectorySegment& s, double t) {
    const double dt = s.t1 - s.t0;
    const double u = (t - s.t0) / dt;
    const double u2 = u * u;
    return (6.0 * u2 - 6.0 * u) / dt * s.x0 + (3.0 * u2 - 4.0 * u + 1.0) * s.f0 +
           (-6.0 * u2 + 6.0 * u) / dt * s.x1 + (3.0 * u2 - 2.0 * u) * s.f1;
}

const TrajectorySegment& segment_at(const Trajectory& traj, double t) {
    const auto it = std::upper_bound(
        traj.segments.begin(), traj.segments.end(), t,
        [](double v, const TrajectorySegment& s) { return v < s.t1; });
    return it == traj.segments.end() ? traj.segments.back() : *it;
}

} // namespace

Vec Trajectory::eval(double t) const {
    if (t <= 0.0) {
        if (t < -tau_max - 1e-12 || t_begin > 0.0)
            throw InvalidInput(
                fmt::format("Trajectory::eval: t = {} outside the stored "
                            "span [{}, {}]",
                            t, t_begin > 0.0 ? t_begin : -tau_max, t_end));
        return history(std::max(t, -tau_max));
    }
    if (t < t_begin || t > t_end + 1e-12 || segments.empty())
        throw InvalidInput(fmt::format(
            "Trajectory::eval: t = {} outside the stored span [{}, {}]", t,
            t_begin, t_end));
    return hermite_eval(segment_at(*this, t), std::min(t, t_end));
}

Vec Trajectory::deriv(double t) const {
    if (t < t_begin || t > t_end + 1e-12 || segments.empty())
        throw InvalidInput(fmt::format(
            "Trajectory::deriv: t = {} outside the stored span [{}, {}]", t,
            t_begin, t_end));
    return hermite_deriv(segment_at(*this, t), std::min(t, t_end));
}

Trajectory simulate(const DelayModel& model, const Vec& alpha,
                    const HistoryFn& history, double t_final,
                    const SimulateOptions& opts) {
    if (t_final < 0.0)
        throw InvalidInput("simulate: t_final must be non-negative");
    if (opts.dt_max <= 0.0)
        throw InvalidInput("simulate: dt_max must be positive");

    const std::vector<double> lags = model.delays(alpha);
    double tau_min = std::numeric_limits<double>::infinity();
    double tau_max = 0.0;
    for (const double tau : lags) {
        if (tau <= 0.0) continue;
        tau_min = std::min(tau_min, tau);
        tau_max = std::max(tau_max, tau);
    }

    Trajectory traj;
    traj.alpha = alpha;
    traj.history = history;
    traj.tau_max = tau_max;
    if (t_final == 0.0) return traj;

    const double h_cap = std::min(opts.dt_max, tau_min / 4.0);
    const long nsteps = std::max(1L, std::lround(std::ceil(t_final / h_cap)));
    const double h = t_final / static_cast<double>(nsteps);
    const double blowup = 1.0 / opts.abs_tol;

    // State lookup at times <= the last completed mesh point.
    const auto lookup = [&](double t) -> Vec {
        if (t <= 0.0) return history(std::max(t, -tau_max));
        return hermite_eval(segment_at(traj, t), t);
    };
    const auto rhs_at = [&](double t, const Vec& x) -> Vec {
        HistorySamples X;
        X.values.resize(model.n, static_cast<int>(lags.size()));
        X.values.col(0) = x;
        for (size_t j = 1; j < lags.size(); ++j)
            X.values.col(static_cast<int>(j)) = lookup(t - lags[j]);
        return eval_rhs(model, X, alpha);
    };

    Vec x = history(0.0);
    Vec f = rhs_at(0.0, x);
    size_t keep_from = 0;
    traj.segments.reserve(static_cast<size_t>(
        std::min<double>(static_cast<double>(nsteps), 4.0e6)));
    for (long k = 0; k < nsteps; ++k) {
        const double t0 = static_cast<double>(k) * h;
        const double t1 = static_cast<double>(k + 1) * h;
        const Vec k1 = f;
        const Vec k2 = rhs_at(t0 + 0.5 * h, Vec(x + 0.5 * h * k1));
        const Vec k3 = rhs_at(t0 + 0.5 * h, Vec(x + 0.5 * h * k2));
        const Vec k4 = rhs_at(t1, Vec(x + h * k3));
        const Vec x1 = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x1.allFinite() || x1.cwiseAbs().maxCoeff() > blowup)
            throw NonFiniteState(
                fmt::format("simulate: state blew up at t = {}", t1));

        TrajectorySegment seg;
        seg.t0 = t0;
        seg.t1 = t1;
        seg.x0 = x;
        seg.x1 = x1;
        seg.f0 = k1;
        traj.segments.push_back(std::move(seg));
        // The step is now complete: the endpoint derivative may use it.
        x = x1;
        f = rhs_at(t1, x);
        traj.segments.back().f1 = f;
        traj.t_end = t1;

        // Down-sampled storage: drop segments no longer needed for delayed
        // lookups and outside the requested keep window.
        const double cutoff =
            std::min(t1 - tau_max, t_final - opts.keep_window);
        while (keep_from + 1 < traj.segments.size() &&
               traj.segments[keep_from].t1 < cutoff)
            ++keep_from;
        if (keep_from > 4096) {
            traj.segments.erase(traj.segments.begin(),
                                traj.segments.begin() +
                                    static_cast<long>(keep_from));
            keep_from = 0;
        }
    }
    if (keep_from > 0)
        traj.segments.erase(traj.segments.begin(),
                            traj.segments.begin() + static_cast<long>(keep_from));
    traj.t_begin = traj.segments.front().t0;
    return traj;
}

std::vector<Vec> sample(const Trajectory& traj, const std::vector<double>& times) {
    std::vector<Vec> out;
    out.reserve(times.size());
    for (const double t : times) out.push_back(traj.eval(t));
    return out;
}

std::vector<Crossing> poincare_crossings(
    const Trajectory& traj, const std::function<double(const Vec&)>& g,
    double level, int direction) {
    std::vector<Crossing> out;
    if (traj.segments.empty()) return out;
    constexpr int kSub = 8; // a cubic segment may cross a level twice
    double ta = traj.segments.front().t0;
    double va = g(hermite_eval(traj.segments.front(), ta)) - level;
    for (const TrajectorySegment& seg : traj.segments) {
        for (int i = 1; i <= kSub; ++i) {
            const double tb =
                seg.t0 + (seg.t1 - seg.t0) * static_cast<double>(i) / kSub;
            const double vb = g(hermite_eval(seg, tb)) - level;
            if (va == 0.0 || va * vb < 0.0) {
                const bool upward = vb > va;
                if (direction == 0 || (direction > 0) == upward) {
                    double lo = ta, hi = tb, vlo = va;
                    while (hi - lo > 1e-10) {
                        const double mid = 0.5 * (lo + hi);
                        const double vm = g(hermite_eval(seg, mid)) - level;
                        if (vm == 0.0 || vm * vlo > 0.0) {
                            lo = mid;
                            vlo = vm;
                        } else {
                            hi = mid;
                        }
                    }
                    const double tc = 0.5 * (lo + hi);
                    out.push_back({tc, hermite_eval(seg, tc)});
                }
            }
            ta = tb;
            va = vb;
        }
    }
    return out;
}

std::vector<Crossing> poincare_crossings(const Trajectory& traj, int component,
                                         double level, int direction) {
    return poincare_crossings(
        traj, [component](const Vec& x) { return x(component); }, level,
        direction);
}

std::string trajectory_to_csv(const Trajectory& traj, double dt) {
    std::string out = "t";
    const int n = traj.segments.empty()
                      ? 0
                      : static_cast<int>(traj.segments.front().x0.size());
    for (int i = 0; i < n; ++i) out += fmt::format(",x{}", i + 1);
    out += "\n";
    if (traj.segments.empty()) return out;
    const auto row = [&](double t, const Vec& x) {
        out += fmt::format("{:.17g}", t);
        for (int i = 0; i < n; ++i) out += fmt::format(",{:.17g}", x(i));
        out += "\n";
    };
    if (dt <= 0.0) {
        row(traj.segments.front().t0, traj.segments.front().x0);
        for (const TrajectorySegment& s : traj.segments) row(s.t1, s.x1);
    } else {
        for (double t = traj.t_begin; t <= traj.t_end + 1e-12 * traj.t_end;
             t += dt) {
            const double tc = std::min(t, traj.t_end);
            row(tc, traj.eval(tc));
        }
    }
    return out;
}

std::string crossings_to_csv(const std::vector<Crossing>& crossings) {
    std::string out = "t";
    const int n =
        crossings.empty() ? 0 : static_cast<int>(crossings.front().x.size());
    for (int i = 0; i < n; ++i) out += fmt::format(",x{}", i + 1);
    out += "\n";
    for (const Crossing& c : crossings) {
        out += fmt::format("{:.17g}", c.t);
        for (int i = 0; i < n; ++i) out += fmt::format(",{:.17g}", c.x(i));
        out += "\n";
    }
    return out;
}

} // namespace ddenorm
