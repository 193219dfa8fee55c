#include "ddenorm/continuation.hpp"

#include <cmath>

#include <fmt/format.h>

namespace ddenorm {

namespace {

// Square defining system for one branch problem; the pseudo-arclength
// hyperplane row is appended by the corrector.
struct DefiningSystem {
    const DelayModel* model = nullptr;
    ProblemKind kind = ProblemKind::hopf;
    std::array<int, 2> fp{};
    Vec alpha_base; // template for the fixed parameters
    CVec border;    // eigenvector normalization row (fold: real part used)

    int n() const { return model->n; }

    bool is_equilibrium() const {
        return kind == ProblemKind::equilibrium ||
               kind == ProblemKind::transcritical_equilibrium;
    }

    // Unknown layout:
    //   equilibrium: [x; a0]
    //   fold:        [x; a0; a1; Re q]
    //   hopf:        [x; a0; a1; omega; Re q; Im q]
    int dim() const {
        if (is_equilibrium()) return n() + 1;
        if (kind == ProblemKind::fold) return 2 * n() + 2;
        return 3 * n() + 3;
    }
    int res_dim() const { return dim() - 1; }

    Vec alpha_of(const Vec& u) const {
        Vec a = alpha_base;
        a(fp[0]) = u(n());
        if (!is_equilibrium()) a(fp[1]) = u(n() + 1);
        return a;
    }

    Vec pack(const BranchPoint& p) const {
        Vec u(dim());
        const int nn = n();
        u.head(nn) = p.x;
        u(nn) = p.alpha(fp[0]);
        if (is_equilibrium()) return u;
        u(nn + 1) = p.alpha(fp[1]);
        if (kind == ProblemKind::fold) {
            u.segment(nn + 2, nn) = p.q.real();
        } else {
            u(nn + 2) = p.omega;
            u.segment(nn + 3, nn) = p.q.real();
            u.segment(2 * nn + 3, nn) = p.q.imag();
        }
        return u;
    }

    BranchPoint unpack(const Vec& u) const {
        BranchPoint p;
        const int nn = n();
        p.x = u.head(nn);
        p.alpha = alpha_of(u);
        if (kind == ProblemKind::fold) {
            p.q = u.segment(nn + 2, nn).cast<Cplx>();
        } else if (kind == ProblemKind::hopf) {
            p.omega = u(nn + 2);
            p.q = u.segment(nn + 3, nn).cast<Cplx>() +
                  Cplx(0, 1) * u.segment(2 * nn + 3, nn).cast<Cplx>();
        }
        return p;
    }

    Vec residual(const Vec& u) const {
        const int nn = n();
        const Vec x = u.head(nn);
        const Vec alpha = alpha_of(u);
        const int m1 = model->lag_count(alpha);
        Vec out(res_dim());
        out.head(nn) = model->rhs(x.replicate(1, m1), alpha);
        if (is_equilibrium()) return out;
        const CharLinearization lin = linearize(*model, x, alpha);
        if (kind == ProblemKind::fold) {
            const Vec q = u.segment(nn + 2, nn);
            out.segment(nn, nn) = delta(lin, Cplx(0.0, 0.0)).real() * q;
            out(2 * nn) = border.real().dot(q) - 1.0;
        } else {
            const double omega = u(nn + 2);
            if (omega <= 0.0)
                throw ImaginaryAxisLost(
                    "continue_branch: omega drifted to <= 0");
            const CVec q = u.segment(nn + 3, nn).cast<Cplx>() +
                           Cplx(0, 1) * u.segment(2 * nn + 3, nn).cast<Cplx>();
            const CVec dq = delta(lin, Cplx(0.0, omega)) * q;
            const Cplx nrm = cdot(border, q) - 1.0;
            out.segment(nn, nn) = dq.real();
            out.segment(2 * nn, nn) = dq.imag();
            out(3 * nn) = nrm.real();
            out(3 * nn + 1) = nrm.imag();
        }
        return out;
    }

    // Refresh the normalization row so that border . q = 1 at the last point.
    void rebase_border(const BranchPoint& p) {
        if (is_equilibrium() || p.q.size() != n()) return;
        border = p.q.conjugate() / p.q.squaredNorm();
        if (kind == ProblemKind::fold) border = border.real().cast<Cplx>();
    }

    // Scaled metric used for steps and arclength: unit weights on state and
    // eigen data, user weights on the two free parameters.
    double metric(const Vec& du, const Eigen::Vector2d& w) const {
        Vec d = du;
        d(n()) *= w(0);
        if (!is_equilibrium()) d(n() + 1) *= w(1);
        return d.norm();
    }
    double param_metric(const Vec& du, const Eigen::Vector2d& w) const {
        const double d0 = w(0) * du(n());
        const double d1 = is_equilibrium() ? 0.0 : w(1) * du(n() + 1);
        return std::hypot(d0, d1);
    }
};

struct CorrectorResult {
    Vec u;
    int iters = 0;
    double resid = 0.0;
    bool ok = false;
};

// Newton on [F(u); t . (u - u_ref)] = 0 with finite-difference Jacobian.
CorrectorResult correct_on_hyperplane(const DefiningSystem& sys, Vec u,
                                      const Vec& t, const Vec& u_ref,
                                      int max_iters, double tol) {
    CorrectorResult res;
    try {
        const int d = sys.dim();
        for (int it = 0; it <= max_iters; ++it) {
            const Vec f = sys.residual(u);
            res.resid = f.norm();
            res.iters = it;
            if (res.resid <= tol && it > 0) {
                res.u = u;
                res.ok = true;
                return res;
            }
            if (it == max_iters) break;
            Mat J(d, d);
            for (int j = 0; j < d; ++j) {
                const double h = 1e-7 * (1.0 + std::abs(u(j)));
                Vec up = u, um = u;
                up(j) += h;
                um(j) -= h;
                J.block(0, j, d - 1, 1) =
                    (sys.residual(up) - sys.residual(um)) / (2.0 * h);
            }
            J.row(d - 1) = t.transpose();
            Vec g(d);
            g.head(d - 1) = f;
            g(d - 1) = t.dot(u - u_ref);
            const Eigen::PartialPivLU<Mat> lu(J);
            const Vec du = lu.solve(-g);
            if (!du.allFinite()) break;
            u += du;
        }
    } catch (const Error&) {
        res.ok = false;
    }
    return res;
}

HopfPoint hopf_point_of(const DelayModel& model, const BranchPoint& p) {
    HopfPoint hp;
    hp.eq = {p.x, p.alpha, p.residual};
    hp.omega = p.omega;
    const CharLinearization lin = linearize(model, p.x, p.alpha);
    hp.pair = refine_eigenpair(lin, Cplx(0.0, p.omega));
    hp.omega = hp.pair.lambda.imag();
    return hp;
}

} // namespace

std::string problem_kind_name(ProblemKind k) {
    switch (k) {
    case ProblemKind::equilibrium: return "equilibrium";
    case ProblemKind::fold: return "fold";
    case ProblemKind::hopf: return "hopf";
    case ProblemKind::transcritical_equilibrium:
        return "transcritical-equilibrium";
    }
    return "?";
}

BranchPoint branch_point(const Equilibrium& eq) {
    BranchPoint p;
    p.x = eq.x;
    p.alpha = eq.alpha;
    p.residual = eq.residual;
    return p;
}

BranchPoint branch_point(const FoldPoint& pt) {
    BranchPoint p;
    p.x = pt.eq.x;
    p.alpha = pt.eq.alpha;
    p.q = pt.pair.q;
    p.residual = pt.residual;
    return p;
}

BranchPoint branch_point(const HopfPoint& pt) {
    BranchPoint p;
    p.x = pt.eq.x;
    p.alpha = pt.eq.alpha;
    p.omega = pt.omega;
    p.q = pt.pair.q;
    p.residual = pt.residual;
    return p;
}

Branch continue_branch(const DelayModel& model, ProblemKind problem,
                       const BranchPoint& seed0, const BranchPoint& seed1,
                       std::array<int, 2> free_params,
                       const ContinuationOptions& opts) {
    for (int i : free_params)
        if (i < 0 || i >= model.p)
            throw InvalidInput("continue_branch: bad free parameter index");
    if (free_params[0] == free_params[1] &&
        problem != ProblemKind::equilibrium &&
        problem != ProblemKind::transcritical_equilibrium)
        throw InvalidInput("continue_branch: free parameters must differ");

    DefiningSystem sys;
    sys.model = &model;
    sys.kind = problem;
    sys.fp = free_params;
    sys.alpha_base = seed1.alpha;
    sys.border = seed1.q.size() == model.n
                     ? CVec(seed1.q.conjugate() / seed1.q.squaredNorm())
                     : CVec::Zero(model.n);
    if (problem == ProblemKind::fold) sys.border = sys.border.real().cast<Cplx>();

    Branch br;
    br.problem = problem;
    br.free_params = free_params;
    br.weights = opts.weights;

    const auto finalize_point = [&](BranchPoint& p, const BranchPoint& prev,
                                    const Vec& du) {
        p.arclength = prev.arclength + sys.metric(du, opts.weights);
        if (problem == ProblemKind::hopf && opts.compute_tests)
            p.tests = hopf_tests(model, hopf_point_of(model, p));
    };

    BranchPoint p0 = seed0, p1 = seed1;
    p0.arclength = 0.0;
    if (problem == ProblemKind::hopf && opts.compute_tests) {
        p0.tests = hopf_tests(model, hopf_point_of(model, p0));
    }
    Vec u_prev = sys.pack(p0);
    Vec u_cur = sys.pack(p1);
    finalize_point(p1, p0, u_cur - u_prev);
    br.points.push_back(p0);
    br.points.push_back(p1);

    double h = opts.initial_step;
    int stall = 0;

    while (static_cast<int>(br.points.size()) < opts.max_points) {
        Vec du = u_cur - u_prev;
        const double dn = sys.metric(du, opts.weights);
        if (dn == 0.0) {
            br.stop_reason = "StallDetected";
            break;
        }
        const Vec t = du / dn; // unit secant in the scaled metric
        const Vec u_pred = u_cur + h * t;
        const CorrectorResult res = correct_on_hyperplane(
            sys, u_pred, t, u_pred, opts.max_corrector_iters,
            opts.corrector_tol);
        if (!res.ok) {
            h *= 0.5;
            if (h < opts.min_step) {
                if (++stall >= 3) {
                    br.stop_reason = "StallDetected";
                    break;
                }
                h = opts.min_step;
            }
            continue;
        }
        stall = 0;
        BranchPoint p = sys.unpack(res.u);
        p.newton_iters = res.iters;
        p.residual = res.resid;
        finalize_point(p, br.points.back(), res.u - u_cur);
        br.points.push_back(p);
        sys.rebase_border(p);
        u_prev = u_cur;
        u_cur = sys.pack(p); // repack with the rebased border (layout only)
        if (res.iters <= 3) h = std::min(2.0 * h, opts.max_step);

        for (int i = 0; i < 2; ++i) {
            if (i == 1 && sys.is_equilibrium()) break;
            const double v = p.alpha(free_params[i]);
            if (v < opts.box_lo(i) || v > opts.box_hi(i)) {
                br.stop_reason = fmt::format(
                    "BoxExit(param {} {})", free_params[i],
                    v < opts.box_lo(i) ? "lower" : "upper");
                break;
            }
        }
        if (!br.stop_reason.empty()) break;
    }
    if (br.stop_reason.empty()) br.stop_reason = "MaxPoints";
    return br;
}

Detection detect_special_points(const DelayModel& model, const Branch& branch,
                                const std::vector<Codim2Kind>& which) {
    if (branch.problem != ProblemKind::hopf)
        throw InvalidInput(
            "detect_special_points: requires a Hopf branch with test data");
    Detection det;
    if (branch.points.size() < 2) return det;

    DefiningSystem sys;
    sys.model = &model;
    sys.kind = ProblemKind::hopf;
    sys.fp = branch.free_params;
    sys.alpha_base = branch.points.front().alpha;
    sys.border = CVec::Zero(model.n);

    const auto test_of = [](const HopfTests& t, Codim2Kind k) {
        switch (k) {
        case Codim2Kind::genh: return t.L1;
        case Codim2Kind::zeho:
        case Codim2Kind::thopf: return t.nearest_real_eig;
        case Codim2Kind::hoho: return t.second_pair_re;
        }
        return std::numeric_limits<double>::quiet_NaN();
    };

    const auto eval_tests = [&](const BranchPoint& p) {
        return hopf_tests(model, hopf_point_of(model, p));
    };

    std::vector<Codim2Kind> kinds = which;
    // zeho and thopf share the nearest-real-eigenvalue test.
    for (auto& k : kinds)
        if (k == Codim2Kind::thopf) k = Codim2Kind::zeho;

    for (Codim2Kind kind : kinds) {
        int last = -1;
        double last_val = 0.0;
        for (size_t i = 0; i < branch.points.size(); ++i) {
            const double v = test_of(branch.points[i].tests, kind);
            if (std::isnan(v)) continue;
            if (last >= 0 && last_val * v < 0.0) {
                ++det.raw_crossings;
                // Bisect along the branch between the bracketing points.
                BranchPoint a = branch.points[last];
                BranchPoint b = branch.points[i];
                double va = last_val;
                sys.rebase_border(a);
                Vec ua = sys.pack(a), ub = sys.pack(b);
                int it = 0;
                for (; it < 60; ++it) {
                    if (sys.param_metric(ub - ua, branch.weights) <= 1e-8)
                        break;
                    const Vec um = 0.5 * (ua + ub);
                    const Vec du = ub - ua;
                    const Vec t = du / sys.metric(du, branch.weights);
                    const CorrectorResult res =
                        correct_on_hyperplane(sys, um, t, um, 12, 1e-10);
                    if (!res.ok)
                        throw BisectionFailure(fmt::format(
                            "detect_special_points: corrector failed while "
                            "bisecting a {} crossing",
                            codim2_kind_name(kind)));
                    BranchPoint m = sys.unpack(res.u);
                    const double vm = test_of(eval_tests(m), kind);
                    if (std::isnan(vm))
                        throw BisectionFailure(
                            "detect_special_points: test function lost its "
                            "value inside the bracket");
                    if (va * vm <= 0.0) {
                        ub = res.u;
                    } else {
                        ua = res.u;
                        va = vm;
                    }
                }
                if (it >= 60)
                    throw BisectionFailure(
                        "detect_special_points: no convergence after 60 "
                        "bisections");
                const BranchPoint loc = sys.unpack(ub);
                const Equilibrium eq{loc.x, loc.alpha, loc.residual};
                CodimTwoPoint c2 = classify_codim2(model, eq, 1e-4);
                // Order a detected Hopf-Hopf point's pairs so that the pair
                // crossing the imaginary axis comes first and the branch's
                // own pair second, matching the labelling produced when the
                // point is found on this branch.
                if (c2.kind == Codim2Kind::hoho &&
                    std::abs(c2.omega1 - loc.omega) <
                        std::abs(c2.omega2 - loc.omega)) {
                    std::swap(c2.pair1, c2.pair2);
                    std::swap(c2.omega1, c2.omega2);
                }
                det.points.push_back(std::move(c2));
            }
            last = static_cast<int>(i);
            last_val = v;
        }
    }

    // De-duplicate same-kind points within 1e-4 in the scaled metric.
    std::vector<CodimTwoPoint> unique;
    for (const CodimTwoPoint& p : det.points) {
        bool dup = false;
        for (const CodimTwoPoint& u : unique) {
            if (u.kind != p.kind) continue;
            double d = 0.0;
            for (int i = 0; i < 2; ++i) {
                const int j = branch.free_params[i];
                const double e =
                    branch.weights(i) * (u.eq.alpha(j) - p.eq.alpha(j));
                d += e * e;
            }
            if (std::sqrt(d) < 1e-4) {
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(p);
    }
    det.points = std::move(unique);
    return det;
}

std::string branch_to_csv(const Branch& branch,
                          const std::vector<std::string>& param_names) {
    std::string out;
    const int n = branch.points.empty()
                      ? 0
                      : static_cast<int>(branch.points.front().x.size());
    for (const std::string& pn : param_names) out += pn + ",";
    for (int i = 0; i < n; ++i) out += fmt::format("x{},", i + 1);
    out += "omega,L1,nearest_real_eig,second_pair_re,newton_iters,residual,"
           "arclength\n";
    for (const BranchPoint& p : branch.points) {
        for (int i = 0; i < p.alpha.size(); ++i)
            out += fmt::format("{:.17g},", p.alpha(i));
        for (int i = 0; i < n; ++i) out += fmt::format("{:.17g},", p.x(i));
        out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{},{:.17g},{:.17g}\n",
                           p.omega, p.tests.L1, p.tests.nearest_real_eig,
                           p.tests.second_pair_re, p.newton_iters, p.residual,
                           p.arclength);
    }
    return out;
}

} // namespace ddenorm
