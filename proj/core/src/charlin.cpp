#include "ddenorm/charlin.hpp"
#include <limits>

#include <cmath>

namespace ddenorm {

CharLinearization linearize(const DelayModel& model, const Vec& xstar,
                            const Vec& alpha) {
    CharLinearization lin;
    lin.n = model.n;
    lin.tau = model.delays(alpha);
    const int m1 = static_cast<int>(lin.tau.size());
    const Mat X0 = xstar.replicate(1, m1);
    lin.M.resize(m1);
    for (int j = 0; j < m1; ++j) {
        lin.M[j] = Mat::Zero(model.n, model.n);
        for (int l = 0; l < model.n; ++l) {
            Mat U = Mat::Zero(model.n, m1);
            U(l, j) = 1.0;
            Vec col = model.deriv_oracle
                          ? model.deriv_oracle(X0, alpha, {U}, {})
                          : fd_derivative(model, X0, alpha, {U}, {});
            lin.M[j].col(l) = col;
        }
    }
    return lin;
}

CMat delta(const CharLinearization& lin, Cplx z) {
    CMat D = z * CMat::Identity(lin.n, lin.n);
    for (size_t j = 0; j < lin.M.size(); ++j)
        D -= lin.M[j].cast<Cplx>() * std::exp(-z * lin.tau[j]);
    return D;
}

CMat delta_deriv(const CharLinearization& lin, Cplx z, int k) {
    if (k != 1 && k != 2) throw InvalidInput("delta_deriv: k must be 1 or 2");
    CMat D = k == 1 ? CMat(CMat::Identity(lin.n, lin.n))
                    : CMat(CMat::Zero(lin.n, lin.n));
    for (size_t j = 0; j < lin.M.size(); ++j) {
        const double t = lin.tau[j];
        const Cplx w = std::exp(-z * t);
        if (k == 1)
            D += t * w * lin.M[j].cast<Cplx>();
        else
            D -= t * t * w * lin.M[j].cast<Cplx>();
    }
    return D;
}

// ---------------------------------------------------------------------------
// ExpPoly
// ---------------------------------------------------------------------------
ExpPoly ExpPoly::zero(int n) {
    ExpPoly h;
    h.n = n;
    h.head = CVec::Zero(n);
    return h;
}

ExpPoly ExpPoly::single(Cplx z, const CVec& a, const CVec& b) {
    ExpPoly h;
    h.n = static_cast<int>(a.size());
    h.terms.push_back({z, a, b});
    h.head = h.eval(0.0);
    return h;
}

void ExpPoly::add_term(Cplx z, const CVec& a, const CVec& b) {
    for (Term& t : terms) {
        if (std::abs(t.z - z) < 1e-12) {
            t.a += a;
            t.b += b;
            return;
        }
    }
    terms.push_back({z, a, b});
}

CVec ExpPoly::eval(double theta) const {
    CVec v = CVec::Zero(n);
    for (const Term& t : terms)
        v += std::exp(t.z * theta) * (t.a + theta * t.b);
    return v;
}

CVec ExpPoly::deriv_eval(double theta) const {
    CVec v = CVec::Zero(n);
    for (const Term& t : terms)
        v += std::exp(t.z * theta) * (t.z * (t.a + theta * t.b) + t.b);
    return v;
}

ExpPoly ExpPoly::conj() const {
    ExpPoly h;
    h.n = n;
    h.head = head.conjugate();
    for (const Term& t : terms)
        h.terms.push_back({std::conj(t.z), t.a.conjugate(), t.b.conjugate()});
    return h;
}

ExpPoly ExpPoly::operator*(Cplx s) const {
    ExpPoly h;
    h.n = n;
    h.head = s * head;
    for (const Term& t : terms) h.terms.push_back({t.z, s * t.a, s * t.b});
    return h;
}

ExpPoly ExpPoly::operator+(const ExpPoly& other) const {
    ExpPoly h = *this;
    h.head += other.head;
    for (const Term& t : other.terms) h.add_term(t.z, t.a, t.b);
    return h;
}

CMat exppoly_lag_samples(const ExpPoly& h, const CharLinearization& lin) {
    CMat out(h.n, lin.tau.size());
    for (size_t j = 0; j < lin.tau.size(); ++j) out.col(j) = h.eval(-lin.tau[j]);
    return out;
}

// ---------------------------------------------------------------------------
// Linear solves
// ---------------------------------------------------------------------------
CVec solve_bordered_lenient(const CMat& M, const CVec& q, const CVec& p,
                            const CVec& y, Cplx* slack) {
    const int n = static_cast<int>(M.rows());
    CMat A(n + 1, n + 1);
    A.topLeftCorner(n, n) = M;
    A.topRightCorner(n, 1) = q;
    A.bottomLeftCorner(1, n) = p.transpose();
    A(n, n) = 0.0;
    Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(n);
    if (!(smin > 0.0) || smax / smin > 1e12)
        throw SingularBorder("solve_bordered: bordered matrix ill-conditioned");
    CVec rhs(n + 1);
    rhs.head(n) = y;
    rhs(n) = 0.0;
    CVec sol = svd.solve(rhs);
    if (slack) *slack = sol(n);
    return sol.head(n);
}

CVec solve_bordered(const CMat& M, const CVec& q, const CVec& p, const CVec& y) {
    Cplx slack;
    CVec x = solve_bordered_lenient(M, q, p, y, &slack);
    if (std::abs(slack) > 1e-8 * std::max(1e-300, y.norm()))
        throw InconsistentSystem(
            "solve_bordered: right-hand side not in range, slack " +
            std::to_string(std::abs(slack)));
    return x;
}

ExpPoly resolvent_solve(const CharLinearization& lin, Cplx z, const CVec& w0,
                        const CVec& wfun) {
    const CMat D = delta(lin, z);
    Eigen::JacobiSVD<CMat> svd(D, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(lin.n - 1);
    if (!(smin > 0.0) || smax / smin > 1e12)
        throw NearSingularResolvent(
            "resolvent_solve: z near an eigenvalue, condition " +
            std::to_string(smin > 0.0 ? smax / smin
                                      : std::numeric_limits<double>::infinity()));
    if (w0.norm() == 0.0 && wfun.norm() == 0.0) return ExpPoly::zero(lin.n);
    // v(theta) = Delta^{-1}(z) (e^{z theta} w0 + (Delta'(z) - I - theta
    // Delta(z)) w(theta)) with w(theta) = e^{z theta} wfun.
    const CMat D1 = delta_deriv(lin, z, 1);
    CVec a = svd.solve(w0 + (D1 - CMat::Identity(lin.n, lin.n)) * wfun);
    CVec b = -wfun;
    return ExpPoly::single(z, a, b);
}

ExpPoly binv(const CharLinearization& lin, Cplx lambda, const CVec& q,
             const CVec& p, const CVec& eta, Cplx kappa) {
    const Cplx fsc = cdot(p, eta) + kappa;
    const double scale = std::max({1.0, eta.norm(), std::abs(kappa)});
    if (std::abs(fsc) > 1e-8 * scale)
        throw InconsistentSystem("binv: Fredholm solvability violated, residual " +
                                 std::to_string(std::abs(fsc)));
    if (eta.norm() == 0.0 && std::abs(kappa) == 0.0) return ExpPoly::zero(lin.n);
    const CMat D = delta(lin, lambda);
    const CMat D1 = delta_deriv(lin, lambda, 1);
    const CMat D2 = delta_deriv(lin, lambda, 2);
    const CVec xi = solve_bordered(D, q, p, eta + kappa * (D1 * q));
    const Cplx gamma =
        -cdot(p, D1 * xi) + 0.5 * kappa * cdot(p, D2 * q);
    const CVec v0 = xi + gamma * q;
    return ExpPoly::single(lambda, v0, -kappa * q);
}

namespace {

// int_{-tau}^0 e^{c s} ds and int_{-tau}^0 s e^{c s} ds, stable for small c.
void exp_integrals(Cplx c, double tau, Cplx& I0, Cplx& I1) {
    if (std::abs(c) * tau < 1e-4) {
        I0 = 0.0;
        I1 = 0.0;
        Cplx ck(1.0, 0.0);
        double fact = 1.0;
        for (int k = 0; k <= 12; ++k) {
            const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
            I0 += ck / fact * sgn * std::pow(tau, k + 1) / (k + 1.0);
            I1 -= ck / fact * sgn * std::pow(tau, k + 2) / (k + 2.0);
            ck *= c;
            fact *= (k + 1.0);
        }
        return;
    }
    const Cplx em = std::exp(-c * tau);
    I0 = (1.0 - em) / c;
    I1 = tau * em / c + (em - 1.0) / (c * c);
}

} // namespace

Cplx pairing(const CharLinearization& lin, Cplx lambda, const CVec& p,
             const ExpPoly& v) {
    Cplx out = cdot(p, v.head);
    for (size_t j = 1; j < lin.tau.size(); ++j) {
        const double tau = lin.tau[j];
        if (tau == 0.0) continue;
        const CVec pM = left_mul(p, lin.M[j].cast<Cplx>());
        const Cplx w = std::exp(-lambda * tau);
        for (const ExpPoly::Term& t : v.terms) {
            Cplx I0, I1;
            exp_integrals(t.z - lambda, tau, I0, I1);
            out += w * (cdot(pM, t.a) * I0 + cdot(pM, t.b) * I1);
        }
    }
    return out;
}

} // namespace ddenorm
