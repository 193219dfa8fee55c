#include "ddenorm/points.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace ddenorm {

namespace {

Mat sum_jacobian(const DelayModel& model, const Vec& x, const Vec& alpha) {
    const CharLinearization lin = linearize(model, x, alpha);
    Mat J = Mat::Zero(model.n, model.n);
    for (const Mat& M : lin.M) J += M;
    return J;
}

// Damped Newton with Armijo backtracking (factor 0.5, minimum step 1e-6)
// on a square system with finite-difference Jacobian.
struct NewtonResult {
    Vec y;
    double residual;
    int iters;
};

NewtonResult damped_newton(const std::function<Vec(const Vec&)>& F, Vec y,
                           int max_iters, double tol,
                           const std::function<Mat(const Vec&)>& jac = nullptr) {
    Vec f = F(y);
    int it = 0;
    bool stalled_near_solution = false;
    for (; it < max_iters; ++it) {
        if (f.norm() <= tol) break;
        Mat J;
        if (jac) {
            J = jac(y);
        } else {
            const int d = static_cast<int>(y.size());
            J.resize(f.size(), d);
            for (int j = 0; j < d; ++j) {
                const double h = 1e-7 * (1.0 + std::abs(y(j)));
                Vec yp = y, ym = y;
                yp(j) += h;
                ym(j) -= h;
                J.col(j) = (F(yp) - F(ym)) / (2.0 * h);
            }
        }
        const Vec dy = J.partialPivLu().solve(-f);
        double step = 1.0;
        const double f0 = f.norm();
        while (step >= 1e-6) {
            const Vec cand = y + step * dy;
            const Vec fc = F(cand);
            if (fc.norm() < (1.0 - 0.25 * step) * f0 || fc.norm() < tol) {
                y = cand;
                f = fc;
                break;
            }
            step *= 0.5;
        }
        if (step < 1e-6) {
            // Within the finite-difference noise floor a strict decrease is
            // unattainable; accept the point if it is essentially converged.
            if (f0 <= 1e4 * tol) {
                stalled_near_solution = true;
                break;
            }
            throw NoConvergence("damped_newton: line search stalled at residual " +
                                std::to_string(f0));
        }
    }
    if (!stalled_near_solution && f.norm() > tol)
        throw NoConvergence("damped_newton: residual " + std::to_string(f.norm()) +
                            " after " + std::to_string(max_iters) + " iterations");
    return {y, f.norm(), it};
}

CVec random_border(int n, bool complex_valued) {
    std::mt19937_64 rng(border_seed() ^ 0x9e3779b97f4a7c15ull);
    std::normal_distribution<double> dist(0.0, 1.0);
    CVec v(n);
    for (int i = 0; i < n; ++i)
        v(i) = Cplx(dist(rng), complex_valued ? dist(rng) : 0.0);
    return v / v.norm();
}

} // namespace

std::string codim2_kind_name(Codim2Kind k) {
    switch (k) {
        case Codim2Kind::genh: return "genh";
        case Codim2Kind::zeho: return "zeho";
        case Codim2Kind::hoho: return "hoho";
        case Codim2Kind::thopf: return "thopf";
    }
    return "?";
}

Equilibrium correct_equilibrium(const DelayModel& model, const Vec& alpha,
                                const Vec& x0) {
    const int m1 = model.lag_count(alpha);
    auto F = [&](const Vec& x) {
        return model.rhs(x.replicate(1, m1), alpha);
    };
    auto J = [&](const Vec& x) { return sum_jacobian(model, x, alpha); };
    const NewtonResult r =
        damped_newton(F, x0, 50, 1e-10 * (1.0 + x0.norm()), J);
    return {r.y, alpha, r.residual};
}

HopfPoint make_hopf_guess(const DelayModel& model, const Vec& alpha,
                          const Vec& x, double omega) {
    HopfPoint g;
    g.eq = {x, alpha, 0.0};
    g.omega = omega;
    (void)model;
    return g;
}

HopfPoint correct_hopf(const DelayModel& model, const HopfPoint& guess,
                       int free_param) {
    const int n = model.n;
    if (free_param < 0 || free_param >= model.p)
        throw InvalidInput("correct_hopf: bad free parameter index");
    const CVec c = random_border(n, true);

    // Initial q from the singular vector of Delta(i omega) if not supplied.
    CVec q0;
    {
        const CharLinearization lin =
            linearize(model, guess.eq.x, guess.eq.alpha);
        if (guess.pair.q.size() == n)
            q0 = guess.pair.q;
        else {
            Eigen::JacobiSVD<CMat> svd(delta(lin, Cplx(0.0, guess.omega)),
                                       Eigen::ComputeFullV);
            q0 = svd.matrixV().col(n - 1);
        }
        q0 /= cdot(c, q0);
    }

    Vec y(3 * n + 2);
    y.head(n) = guess.eq.x;
    y(n) = guess.eq.alpha(free_param);
    y(n + 1) = guess.omega;
    y.segment(n + 2, n) = q0.real();
    y.segment(2 * n + 2, n) = q0.imag();

    const int m1 = model.lag_count(guess.eq.alpha);
    auto F = [&](const Vec& yy) {
        Vec x = yy.head(n);
        Vec alpha = guess.eq.alpha;
        alpha(free_param) = yy(n);
        const double omega = yy(n + 1);
        if (omega <= 0.0)
            throw ImaginaryAxisLost("correct_hopf: omega drifted to <= 0");
        CVec q = yy.segment(n + 2, n).cast<Cplx>() +
                 Cplx(0, 1) * yy.segment(2 * n + 2, n).cast<Cplx>();
        const CharLinearization lin = linearize(model, x, alpha);
        const CVec dq = delta(lin, Cplx(0.0, omega)) * q;
        const Cplx nrm = cdot(c, q) - 1.0;
        Vec out(3 * n + 2);
        out.head(n) = model.rhs(x.replicate(1, m1), alpha);
        out.segment(n, n) = dq.real();
        out.segment(2 * n, n) = dq.imag();
        out(3 * n) = nrm.real();
        out(3 * n + 1) = nrm.imag();
        return out;
    };
    const NewtonResult r = damped_newton(F, y, 50, 1e-10);

    HopfPoint out;
    out.eq.x = r.y.head(n);
    out.eq.alpha = guess.eq.alpha;
    out.eq.alpha(free_param) = r.y(n);
    out.eq.residual = r.residual;
    out.omega = r.y(n + 1);
    out.free_param = free_param;
    out.newton_iters = r.iters;
    out.residual = r.residual;
    const CharLinearization lin = linearize(model, out.eq.x, out.eq.alpha);
    out.pair = refine_eigenpair(lin, Cplx(0.0, out.omega));
    out.omega = out.pair.lambda.imag();
    return out;
}

FoldPoint correct_fold(const DelayModel& model, const FoldPoint& guess,
                       int free_param) {
    const int n = model.n;
    if (free_param < 0 || free_param >= model.p)
        throw InvalidInput("correct_fold: bad free parameter index");
    const Vec c = random_border(n, false).real();

    Vec q0;
    {
        const CharLinearization lin =
            linearize(model, guess.eq.x, guess.eq.alpha);
        if (guess.pair.q.size() == n)
            q0 = guess.pair.q.real();
        else {
            Eigen::JacobiSVD<Mat> svd(delta(lin, Cplx(0.0, 0.0)).real(),
                                      Eigen::ComputeFullV);
            q0 = svd.matrixV().col(n - 1);
        }
        q0 /= c.dot(q0);
    }

    Vec y(2 * n + 1);
    y.head(n) = guess.eq.x;
    y(n) = guess.eq.alpha(free_param);
    y.segment(n + 1, n) = q0;

    const int m1 = model.lag_count(guess.eq.alpha);
    auto F = [&](const Vec& yy) {
        Vec x = yy.head(n);
        Vec alpha = guess.eq.alpha;
        alpha(free_param) = yy(n);
        Vec q = yy.segment(n + 1, n);
        const CharLinearization lin = linearize(model, x, alpha);
        Vec out(2 * n + 1);
        out.head(n) = model.rhs(x.replicate(1, m1), alpha);
        out.segment(n, n) = (delta(lin, Cplx(0.0, 0.0)).real() * q);
        out(2 * n) = c.dot(q) - 1.0;
        return out;
    };
    const NewtonResult r = damped_newton(F, y, 50, 1e-10);

    FoldPoint out;
    out.eq.x = r.y.head(n);
    out.eq.alpha = guess.eq.alpha;
    out.eq.alpha(free_param) = r.y(n);
    out.eq.residual = r.residual;
    out.free_param = free_param;
    out.newton_iters = r.iters;
    out.residual = r.residual;
    const CharLinearization lin = linearize(model, out.eq.x, out.eq.alpha);
    out.pair = refine_eigenpair(lin, Cplx(0.0, 0.0));
    return out;
}

double first_lyapunov(const DelayModel& model, const HopfPoint& pt) {
    const CharLinearization lin = linearize(model, pt.eq.x, pt.eq.alpha);
    const Eigenpair pair = pt.pair.q.size() == model.n
                               ? pt.pair
                               : refine_eigenpair(lin, Cplx(0.0, pt.omega));
    const double w = pair.lambda.imag();
    const MultilinearBundle bundle(model, pt.eq.x, pt.eq.alpha, 3);
    const ExpPoly phi = ExpPoly::single(Cplx(0.0, w), pair.q, CVec::Zero(model.n));
    const CMat Phi = exppoly_lag_samples(phi, lin);
    const CMat Phib = Phi.conjugate();
    const ExpPoly H2000 = resolvent_solve(lin, Cplx(0.0, 2.0 * w),
                                          bundle.B(Phi, Phi), CVec::Zero(model.n));
    const ExpPoly H1100 = resolvent_solve(lin, Cplx(0.0, 0.0),
                                          bundle.B(Phi, Phib), CVec::Zero(model.n));
    const CVec eta = bundle.B(Phib, exppoly_lag_samples(H2000, lin)) +
                     2.0 * bundle.B(Phi, exppoly_lag_samples(H1100, lin)) +
                     bundle.C(Phi, Phi, Phib);
    const Cplx c1 = 0.5 * cdot(pair.p, eta);
    return c1.real() / w;
}

HopfTests hopf_tests(const DelayModel& model, const HopfPoint& pt) {
    HopfTests t;
    t.L1 = first_lyapunov(model, pt);
    const CharLinearization lin = linearize(model, pt.eq.x, pt.eq.alpha);
    const std::vector<Eigenpair> eigs = rightmost(lin, 8);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    t.nearest_real_eig = nan;
    t.second_pair_re = nan;
    // The branch's own pair is the one nearest to i*omega in the complex
    // plane; exclude it (and real eigenvalues) from the second-pair test.
    int own = -1;
    double own_dist = std::numeric_limits<double>::infinity();
    std::vector<int> pair_idx;
    for (int i = 0; i < static_cast<int>(eigs.size()); ++i) {
        const Cplx lam = eigs[i].lambda;
        const double scale = std::max(1.0, std::abs(lam));
        if (std::abs(lam.imag()) < 1e-9 * scale) {
            if (std::isnan(t.nearest_real_eig) ||
                std::abs(lam.real()) < std::abs(t.nearest_real_eig))
                t.nearest_real_eig = lam.real();
            continue;
        }
        pair_idx.push_back(i);
        const double d = std::abs(Cplx(lam.real(), std::abs(lam.imag())) -
                                  Cplx(0.0, pt.omega));
        if (d < own_dist) {
            own_dist = d;
            own = i;
        }
    }
    // Eigenvalues come sorted by real part, so the first remaining pair is
    // the rightmost one.
    for (const int i : pair_idx) {
        if (i == own) continue;
        t.second_pair_re = eigs[i].lambda.real();
        break;
    }
    return t;
}

CodimTwoPoint classify_codim2(const DelayModel& model, const Equilibrium& eq,
                              double l1_tol) {
    const CharLinearization lin = linearize(model, eq.x, eq.alpha);
    const std::vector<Eigenpair> eigs = rightmost(lin, 6);

    std::vector<Eigenpair> crit_pairs;
    std::vector<Eigenpair> crit_zero;
    double min_dist = std::numeric_limits<double>::infinity();
    for (const Eigenpair& e : eigs) {
        const double scale = std::max(1.0, std::abs(e.lambda));
        min_dist = std::min(min_dist, std::abs(e.lambda.real()) / scale);
        if (std::abs(e.lambda.real()) >= 1e-6 * scale) continue;
        if (std::abs(e.lambda.imag()) < 1e-9 * scale)
            crit_zero.push_back(e);
        else
            crit_pairs.push_back(e);
    }

    CodimTwoPoint out;
    out.eq = eq;
    if (crit_zero.size() == 1 && crit_pairs.size() == 1) {
        out.kind =
            model.fixed_equilibrium ? Codim2Kind::thopf : Codim2Kind::zeho;
        out.pair0 = refine_eigenpair(lin, Cplx(0.0, 0.0));
        out.pair1 = crit_pairs[0];
        out.omega0 = out.pair1.lambda.imag();
        return out;
    }
    if (crit_zero.empty() && crit_pairs.size() == 2) {
        out.kind = Codim2Kind::hoho;
        if (crit_pairs[0].lambda.imag() < crit_pairs[1].lambda.imag())
            std::swap(crit_pairs[0], crit_pairs[1]);
        out.pair1 = crit_pairs[0];
        out.pair2 = crit_pairs[1];
        out.omega1 = out.pair1.lambda.imag();
        out.omega2 = out.pair2.lambda.imag();
        // Nonresonance: k w1 != l w2 for 0 < k + l <= 5.
        for (int k = 1; k <= 4; ++k)
            for (int l = 1; k + l <= 5; ++l)
                if (std::abs(k * out.omega1 - l * out.omega2) <
                    1e-4 * std::max(out.omega1, out.omega2))
                    throw ResonanceDetected(
                        "classify_codim2: " + std::to_string(k) + "w1 ~ " +
                        std::to_string(l) + "w2");
        return out;
    }
    if (crit_zero.empty() && crit_pairs.size() == 1) {
        HopfPoint hp;
        hp.eq = eq;
        hp.pair = crit_pairs[0];
        hp.omega = crit_pairs[0].lambda.imag();
        const double L1 = first_lyapunov(model, hp);
        if (std::abs(L1) < l1_tol) {
            out.kind = Codim2Kind::genh;
            out.pair1 = crit_pairs[0];
            out.omega0 = out.pair1.lambda.imag();
            out.L1 = L1;
            return out;
        }
        throw AmbiguousPattern(
            "classify_codim2: single imaginary pair with |L1| = " +
            std::to_string(std::abs(L1)) + " >= " + std::to_string(l1_tol));
    }
    throw AmbiguousPattern(
        "classify_codim2: eigenvalue pattern matches no codim-2 case "
        "(distance of the nearest eigenvalue to the axis: " +
        std::to_string(min_dist) + ")");
}

CodimTwoPoint classify_codim2(const DelayModel& model, const HopfPoint& pt,
                              double l1_tol) {
    return classify_codim2(model, pt.eq, l1_tol);
}
CodimTwoPoint classify_codim2(const DelayModel& model, const FoldPoint& pt,
                              double l1_tol) {
    return classify_codim2(model, pt.eq, l1_tol);
}

} // namespace ddenorm
