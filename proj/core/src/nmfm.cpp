#include "ddenorm/nmfm.hpp"

#include <cmath>

#include "ddenorm/charlin.hpp"

namespace ddenorm {

namespace {

void check_unfolding(const DelayModel& model, std::array<int, 2> u) {
    if (u[0] < 0 || u[1] < 0 || u[0] >= model.p || u[1] >= model.p)
        throw InvalidInput("unfolding: parameter index out of range");
    if (u[0] == u[1])
        throw InvalidInput("unfolding: indices must be distinct");
    if (!model.time_rescaled) {
        for (int i : {u[0], u[1]})
            for (int dp : model.delay_params)
                if (i == dp)
                    throw InvalidInput(
                        "unfolding: parameter enters a delay; the expansion "
                        "requires delay-independent unfolding parameters");
    }
}

void check_cond2(const Eigen::Matrix2d& M, const char* what) {
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(M);
    const double smin = svd.singularValues()(1);
    const double smax = svd.singularValues()(0);
    if (!(smin > 0.0) || smax / smin > 1e8)
        throw SingularParameterMatrix(std::string(what) +
                                      ": parameter transversality matrix "
                                      "singular or ill-conditioned");
}

Eigenpair ensure_refined(const CharLinearization& lin, const Eigenpair& pr) {
    if (pr.normalized) return pr;
    return refine_eigenpair(lin, pr.lambda);
}

} // namespace

Vec embed_unfolding(int p, std::array<int, 2> unfolding,
                    const Eigen::Vector2d& v) {
    Vec out = Vec::Zero(p);
    out(unfolding[0]) += v(0);
    out(unfolding[1]) += v(1);
    return out;
}

// ---------------------------------------------------------------------------
// Generalized Hopf
// ---------------------------------------------------------------------------
GenHData genh_normal_form(const DelayModel& model, const CodimTwoPoint& pt,
                          std::array<int, 2> unfolding) {
    if (pt.kind != Codim2Kind::genh)
        throw InvalidInput("genh_normal_form: point is not a generalized Hopf");
    check_unfolding(model, unfolding);

    const CharLinearization lin = linearize(model, pt.eq.x, pt.eq.alpha);
    const int n = lin.n;
    const CVec zero = CVec::Zero(n);
    const MultilinearBundle F(model, pt.eq.x, pt.eq.alpha, 5);

    GenHData d;
    d.alpha0 = pt.eq.alpha;
    d.xstar = pt.eq.x;
    d.unfolding = unfolding;
    d.pair = ensure_refined(lin, pt.pair1);
    const double w0 = d.pair.lambda.imag();
    d.omega0 = w0;
    const Cplx iw(0.0, w0);
    const CVec q = d.pair.q;
    const CVec p = d.pair.p;

    const ExpPoly phi = ExpPoly::single(iw, q, zero);
    const CMat Phi = exppoly_lag_samples(phi, lin);
    const CMat Phib = Phi.conjugate();

    // Quadratic level.
    d.H2000 = resolvent_solve(lin, 2.0 * iw, F.B(Phi, Phi), zero);
    d.H1100 = resolvent_solve(lin, Cplx(0.0), F.B(Phi, Phib), zero);
    const CMat X2000 = exppoly_lag_samples(d.H2000, lin);
    const CMat X2000b = X2000.conjugate();
    const CMat X1100 = exppoly_lag_samples(d.H1100, lin);

    // Cubic level.
    const CVec eta21 =
        F.B(Phib, X2000) + 2.0 * F.B(Phi, X1100) + F.C(Phi, Phi, Phib);
    d.c1 = 0.5 * cdot(p, eta21);
    d.L1 = d.c1.real() / w0;
    d.H2100 = binv(lin, iw, q, p, eta21, -2.0 * d.c1);
    d.H3000 = resolvent_solve(lin, 3.0 * iw,
                              3.0 * F.B(Phi, X2000) + F.C(Phi, Phi, Phi), zero);
    const CMat X2100 = exppoly_lag_samples(d.H2100, lin);
    const CMat X2100b = X2100.conjugate();
    const CMat X3000 = exppoly_lag_samples(d.H3000, lin);

    // Quartic level.
    const CVec eta22 = 2.0 * F.B(Phib, X2100) + 2.0 * F.B(Phi, X2100b) +
                       F.B(X2000b, X2000) + 2.0 * F.B(X1100, X1100) +
                       F.C(Phi, Phi, X2000b) + 4.0 * F.C(Phi, Phib, X1100) +
                       F.C(Phib, Phib, X2000) + F.D(Phi, Phi, Phib, Phib);
    d.H2200 = resolvent_solve(lin, Cplx(0.0), eta22, zero);

    const CVec eta31 = F.B(Phib, X3000) + 3.0 * F.B(Phi, X2100) +
                       3.0 * F.B(X1100, X2000) + 3.0 * F.C(Phi, Phib, X2000) +
                       3.0 * F.C(Phi, Phi, X1100) + F.D(Phi, Phi, Phi, Phib);
    // The right-hand side carries a -6 c1 multiple of H2000 as a function term.
    const Cplx k31 = -6.0 * d.c1;
    // Term-free ExpPolys arise when the forcing vanishes identically (models
    // without quadratic terms); their polynomial coefficient is zero.
    const CVec a2000 = d.H2000.terms.empty() ? CVec(CVec::Zero(model.n))
                                             : d.H2000.terms[0].a;
    d.H3100 = resolvent_solve(lin, 2.0 * iw, eta31 + k31 * a2000, k31 * a2000);
    const CMat X3100 = exppoly_lag_samples(d.H3100, lin);
    const CMat X2200 = exppoly_lag_samples(d.H2200, lin);

    // Quintic resonant coefficient.
    const CVec eta32 =
        2.0 * F.B(Phib, X3100) + 3.0 * F.B(Phi, X2200) +
        F.B(X2000b, X3000) + 6.0 * F.B(X1100, X2100) +
        3.0 * F.B(X2100b, X2000) + 6.0 * F.C(Phib, X1100, X2000) +
        6.0 * F.C(Phi, Phib, X2100) + F.C(Phib, Phib, X3000) +
        3.0 * F.C(Phi, Phi, X2100b) + 3.0 * F.C(Phi, X2000b, X2000) +
        6.0 * F.C(Phi, X1100, X1100) + F.D(Phi, Phi, Phi, X2000b) +
        6.0 * F.D(Phi, Phi, Phib, X1100) + 3.0 * F.D(Phi, Phib, Phib, X2000) +
        F.E(Phi, Phi, Phi, Phib, Phib);
    d.c2 = cdot(p, eta32) / 12.0;
    d.L2 = d.c2.real() / w0;

    // Parameter-dependent part.
    const Mat J1 = F.J1();
    Cplx gamma1[2], gamma2[2];
    for (int mu = 0; mu < 2; ++mu) {
        const Vec vmu =
            embed_unfolding(model.p, unfolding,
                            mu == 0 ? Eigen::Vector2d(1.0, 0.0)
                                    : Eigen::Vector2d(0.0, 1.0));
        const CVec vmuC = vmu.cast<Cplx>();

        d.H00mu[mu] =
            resolvent_solve(lin, Cplx(0.0), (J1 * vmu).cast<Cplx>(), zero);
        const CMat X00 = exppoly_lag_samples(d.H00mu[mu], lin);

        const CVec eta10 = F.A1(Phi, vmuC) + F.B(Phi, X00);
        gamma1[mu] = cdot(p, eta10);
        d.H10mu[mu] = binv(lin, iw, q, p, eta10, -gamma1[mu]);
        const CMat X10 = exppoly_lag_samples(d.H10mu[mu], lin);
        const CMat X10b = X10.conjugate();

        const CVec eta20 = F.A1(X2000, vmuC) + 2.0 * F.B(Phi, X10) +
                           F.B(X2000, X00) + F.B1(Phi, Phi, vmuC) +
                           F.C(Phi, Phi, X00);
        const Cplx k20 = -2.0 * gamma1[mu];
        d.H20mu[mu] =
            resolvent_solve(lin, 2.0 * iw, eta20 + k20 * a2000, k20 * a2000);

        const CVec eta11 = F.A1(X1100, vmuC) + F.B(Phib, X10) +
                           F.B(Phi, X10b) + F.B(X1100, X00) +
                           F.B1(Phi, Phib, vmuC) + F.C(Phi, Phib, X00);
        const Cplx k11(-2.0 * gamma1[mu].real(), 0.0);
        const CVec a1100 = d.H1100.terms.empty() ? CVec(CVec::Zero(model.n))
                                                 : d.H1100.terms[0].a;
        d.H11mu[mu] =
            resolvent_solve(lin, Cplx(0.0), eta11 + k11 * a1100, k11 * a1100);

        const CMat X20 = exppoly_lag_samples(d.H20mu[mu], lin);
        const CMat X11 = exppoly_lag_samples(d.H11mu[mu], lin);
        const CVec eta21mu =
            F.A1(X2100, vmuC) + F.B(Phib, X20) + 2.0 * F.B(Phi, X11) +
            F.B(X2100, X00) + F.B(X2000, X10b) + 2.0 * F.B(X1100, X10) +
            F.B1(X2000, Phib, vmuC) + 2.0 * F.B1(Phi, X1100, vmuC) +
            2.0 * F.C(Phi, Phib, X10) + F.C(X2000, Phib, X00) +
            F.C(Phi, Phi, X10b) + 2.0 * F.C(Phi, X1100, X00) +
            F.C1(Phi, Phi, Phib, vmuC) + F.D(Phi, Phi, Phib, X00);
        gamma2[mu] = 0.5 * cdot(p, eta21mu);
    }
    d.gamma110 = gamma1[0];
    d.gamma101 = gamma1[1];
    d.gamma210 = gamma2[0];
    d.gamma201 = gamma2[1];

    d.R << gamma1[0].real(), gamma1[1].real(), gamma2[0].real(),
        gamma2[1].real();
    check_cond2(d.R, "genh_normal_form");
    d.Rinv = d.R.inverse();
    const Eigen::Vector2d K10 = d.Rinv.col(0);
    const Eigen::Vector2d K01 = d.Rinv.col(1);
    d.omega10 = (gamma1[0] * K10(0) + gamma1[1] * K10(1)).imag();
    d.omega01 = (gamma1[0] * K01(0) + gamma1[1] * K01(1)).imag();
    return d;
}

// ---------------------------------------------------------------------------
// Fold-Hopf / transcritical-Hopf
// ---------------------------------------------------------------------------
ZeHoData zeho_normal_form(const DelayModel& model, const CodimTwoPoint& pt,
                          std::array<int, 2> unfolding) {
    if (pt.kind != Codim2Kind::zeho && pt.kind != Codim2Kind::thopf)
        throw InvalidInput("zeho_normal_form: point is not fold-Hopf type");
    check_unfolding(model, unfolding);

    const CharLinearization lin = linearize(model, pt.eq.x, pt.eq.alpha);
    const int n = lin.n;
    const CVec zero = CVec::Zero(n);
    const MultilinearBundle F(model, pt.eq.x, pt.eq.alpha, 3);

    ZeHoData d;
    d.alpha0 = pt.eq.alpha;
    d.xstar = pt.eq.x;
    d.unfolding = unfolding;
    d.transcritical = (pt.kind == Codim2Kind::thopf);
    d.pair0 = ensure_refined(lin, pt.pair0);
    d.pair1 = ensure_refined(lin, pt.pair1);
    const double w0 = d.pair1.lambda.imag();
    d.omega0 = w0;
    const Cplx iw(0.0, w0);
    const CVec q0 = d.pair0.q;
    const CVec p0 = d.pair0.p;
    const CVec q1 = d.pair1.q;
    const CVec p1 = d.pair1.p;

    const CMat Phi0 =
        exppoly_lag_samples(ExpPoly::single(Cplx(0.0), q0, zero), lin);
    const CMat Phi1 = exppoly_lag_samples(ExpPoly::single(iw, q1, zero), lin);
    const CMat Phi1b = Phi1.conjugate();

    // Quadratic coefficients and the associated center-manifold terms.
    const CVec B00 = F.B(Phi0, Phi0);
    const CVec B01 = F.B(Phi0, Phi1);
    const CVec B11b = F.B(Phi1, Phi1b);
    d.g200 = 0.5 * cdot(p0, B00).real();
    d.g110 = cdot(p1, B01);
    d.g011 = cdot(p0, B11b).real();

    d.H20000 = binv(lin, Cplx(0.0), q0, p0, B00, Cplx(-2.0 * d.g200));
    d.H02000 = resolvent_solve(lin, 2.0 * iw, F.B(Phi1, Phi1), zero);
    d.H11000 = binv(lin, iw, q1, p1, B01, -d.g110);
    d.H01100 = binv(lin, Cplx(0.0), q0, p0, B11b, Cplx(-d.g011));

    const CMat X20000 = exppoly_lag_samples(d.H20000, lin);
    const CMat X02000 = exppoly_lag_samples(d.H02000, lin);
    const CMat X11000 = exppoly_lag_samples(d.H11000, lin);
    const CMat X11000b = X11000.conjugate();
    const CMat X01100 = exppoly_lag_samples(d.H01100, lin);

    // Cubic coefficients.
    d.g300 =
        (cdot(p0, 3.0 * F.B(Phi0, X20000) + F.C(Phi0, Phi0, Phi0)) / 6.0)
            .real();
    d.g111 = cdot(p0, F.B(Phi0, X01100) + F.B(Phi1, X11000b) +
                          F.B(Phi1b, X11000) + F.C(Phi0, Phi1, Phi1b))
                 .real();
    d.g210 = 0.5 * cdot(p1, 2.0 * F.B(Phi0, X11000) + F.B(Phi1, X20000) +
                                F.C(Phi0, Phi0, Phi1));
    d.g021 = 0.5 * cdot(p1, 2.0 * F.B(Phi1, X01100) + F.B(Phi1b, X02000) +
                                F.C(Phi1, Phi1, Phi1b));

    d.s_product = d.g200 * d.g011;
    d.s_sign = d.s_product > 0.0 ? 1 : (d.s_product < 0.0 ? -1 : 0);
    d.theta0 = d.g110.real() / d.g200;
    d.e0 = (d.g210 +
            d.g110 * (d.g021.real() / d.g011 - 1.5 * d.g300 / d.g200 +
                      d.g111 / (2.0 * d.g011)) -
            d.g021 * d.g200 / d.g011)
               .real();

    // Parameter-dependent part.
    const Mat J1 = F.J1();
    const Vec e1 = embed_unfolding(model.p, unfolding, {1.0, 0.0});
    const Vec e2 = embed_unfolding(model.p, unfolding, {0.0, 1.0});

    if (d.transcritical) {
        // The equilibrium persists, so the linear parameter action alone
        // determines the unfolding map.
        Eigen::Matrix2d G;
        G(0, 0) = cdot(p0, F.A1(Phi0, e1.cast<Cplx>())).real();
        G(0, 1) = cdot(p0, F.A1(Phi0, e2.cast<Cplx>())).real();
        G(1, 0) = cdot(p1, F.A1(Phi1, e1.cast<Cplx>())).real();
        G(1, 1) = cdot(p1, F.A1(Phi1, e2.cast<Cplx>())).real();
        check_cond2(G, "zeho_normal_form (transcritical)");
        const Eigen::Matrix2d Ginv = G.inverse();
        d.K10 = Ginv.col(0);
        d.K01 = Ginv.col(1);
        const CVec K10e =
            embed_unfolding(model.p, unfolding, d.K10).cast<Cplx>();
        const CVec K01e =
            embed_unfolding(model.p, unfolding, d.K01).cast<Cplx>();
        d.omega1 = cdot(p1, F.A1(Phi1, K10e)).imag();
        d.omega2 = cdot(p1, F.A1(Phi1, K01e)).imag();
        d.H00010 = ExpPoly::zero(n);
        d.H00001 = ExpPoly::zero(n);
        return d;
    }

    // Generic fold-Hopf: frame (s1, s2) aligned with the fold direction.
    Mat Ju(n, 2);
    Ju.col(0) = J1 * e1;
    Ju.col(1) = J1 * e2;
    const Eigen::Vector2d gam =
        (p0.real().transpose() * Ju).transpose();
    const double g2 = gam.squaredNorm();
    if (g2 < 1e-16)
        throw SingularParameterMatrix(
            "zeho_normal_form: fold transversality vector vanishes");
    d.s1 = gam / g2;
    d.s2 = Eigen::Vector2d(-gam(1), gam(0));

    const CMat D0 = delta(lin, Cplx(0.0));
    auto geninv = [&](const CVec& y) {
        return solve_bordered_lenient(D0, q0, p0, y);
    };
    d.r1 = geninv((Ju * d.s1).cast<Cplx>()).real();
    d.r2 = geninv((Ju * d.s2).cast<Cplx>()).real();
    const Vec xr3 =
        geninv(delta_deriv(lin, Cplx(0.0), 1) * q0).real();
    d.r3 = ExpPoly::single(Cplx(0.0), xr3.cast<Cplx>(), -q0);

    const CVec s1e = embed_unfolding(model.p, unfolding, d.s1).cast<Cplx>();
    const CVec s2e = embed_unfolding(model.p, unfolding, d.s2).cast<Cplx>();
    const CMat Xr2 = d.r2.cast<Cplx>().replicate(1, Phi0.cols());
    const ExpPoly r13 =
        ExpPoly::single(Cplx(0.0), (d.r1 - xr3).cast<Cplx>(), q0);
    const CMat Xr13 = exppoly_lag_samples(r13, lin);

    Eigen::Matrix2d M2;
    M2(0, 0) = (cdot(p0, F.B(Phi0, Xr2)) + cdot(p0, F.A1(Phi0, s2e))).real();
    M2(0, 1) = 2.0 * d.g200;
    M2(1, 0) = (cdot(p1, F.B(Phi1, Xr2)) + cdot(p1, F.A1(Phi1, s2e))).real();
    M2(1, 1) = d.g110.real();
    check_cond2(M2, "zeho_normal_form");

    Eigen::Vector2d rhs1;
    rhs1(0) = -(cdot(p0, F.A1(Phi0, s1e)) + cdot(p0, F.B(Phi0, Xr13))).real();
    rhs1(1) = -(cdot(p1, F.A1(Phi1, s1e)) + cdot(p1, F.B(Phi1, Xr13))).real();
    const Eigen::Vector2d sol1 = M2.colPivHouseholderQr().solve(rhs1);
    const Eigen::Vector2d sol2 =
        M2.colPivHouseholderQr().solve(Eigen::Vector2d(0.0, 1.0));
    const double d1 = sol1(0), d3 = sol1(1);
    const double d2 = sol2(0), d4 = sol2(1);
    d.deltas << d1, d2, d3, d4;

    d.K10 = d.s1 + d1 * d.s2;
    d.K01 = d2 * d.s2;

    const Vec a10 = d.r1 + d1 * d.r2 - xr3 + d3 * q0.real();
    d.H00010 = ExpPoly::single(Cplx(0.0), a10.cast<Cplx>(), q0);
    const Vec a01 = d2 * d.r2 + d4 * q0.real();
    d.H00001 = ExpPoly::single(Cplx(0.0), a01.cast<Cplx>(), zero);

    const CVec K10e = embed_unfolding(model.p, unfolding, d.K10).cast<Cplx>();
    const CVec K01e = embed_unfolding(model.p, unfolding, d.K01).cast<Cplx>();
    d.omega1 = (cdot(p1, F.B(Phi1, exppoly_lag_samples(d.H00010, lin))) +
                cdot(p1, F.A1(Phi1, K10e)))
                   .imag();
    d.omega2 = (cdot(p1, F.B(Phi1, exppoly_lag_samples(d.H00001, lin))) +
                cdot(p1, F.A1(Phi1, K01e)))
                   .imag();
    return d;
}

// ---------------------------------------------------------------------------
// Hopf-Hopf
// ---------------------------------------------------------------------------
HoHoData hoho_normal_form(const DelayModel& model, const CodimTwoPoint& pt,
                          std::array<int, 2> unfolding) {
    if (pt.kind != Codim2Kind::hoho)
        throw InvalidInput("hoho_normal_form: point is not a Hopf-Hopf");
    check_unfolding(model, unfolding);

    const CharLinearization lin = linearize(model, pt.eq.x, pt.eq.alpha);
    const int n = lin.n;
    const CVec zero = CVec::Zero(n);
    const MultilinearBundle F(model, pt.eq.x, pt.eq.alpha, 3);

    HoHoData d;
    d.alpha0 = pt.eq.alpha;
    d.xstar = pt.eq.x;
    d.unfolding = unfolding;
    d.pair1 = ensure_refined(lin, pt.pair1);
    d.pair2 = ensure_refined(lin, pt.pair2);
    const double w1 = d.pair1.lambda.imag();
    const double w2 = d.pair2.lambda.imag();
    d.omega1 = w1;
    d.omega2 = w2;
    const CVec p1 = d.pair1.p;
    const CVec p2 = d.pair2.p;

    const CMat Phi1 = exppoly_lag_samples(
        ExpPoly::single(Cplx(0.0, w1), d.pair1.q, zero), lin);
    const CMat Phi2 = exppoly_lag_samples(
        ExpPoly::single(Cplx(0.0, w2), d.pair2.q, zero), lin);
    const CMat Phi1b = Phi1.conjugate();
    const CMat Phi2b = Phi2.conjugate();

    d.H110000 = resolvent_solve(lin, Cplx(0.0), F.B(Phi1, Phi1b), zero);
    d.H200000 = resolvent_solve(lin, Cplx(0.0, 2.0 * w1), F.B(Phi1, Phi1), zero);
    d.H101000 =
        resolvent_solve(lin, Cplx(0.0, w1 + w2), F.B(Phi1, Phi2), zero);
    d.H001100 = resolvent_solve(lin, Cplx(0.0), F.B(Phi2, Phi2b), zero);
    d.H100100 =
        resolvent_solve(lin, Cplx(0.0, w1 - w2), F.B(Phi1, Phi2b), zero);
    d.H002000 = resolvent_solve(lin, Cplx(0.0, 2.0 * w2), F.B(Phi2, Phi2), zero);

    const CMat X110000 = exppoly_lag_samples(d.H110000, lin);
    const CMat X200000 = exppoly_lag_samples(d.H200000, lin);
    const CMat X101000 = exppoly_lag_samples(d.H101000, lin);
    const CMat X001100 = exppoly_lag_samples(d.H001100, lin);
    const CMat X100100 = exppoly_lag_samples(d.H100100, lin);
    const CMat X100100b = X100100.conjugate();
    const CMat X002000 = exppoly_lag_samples(d.H002000, lin);

    d.g2100 = 0.5 * cdot(p1, 2.0 * F.B(Phi1, X110000) +
                                 F.B(Phi1b, X200000) + F.C(Phi1, Phi1, Phi1b));
    d.g1011 = cdot(p1, F.B(Phi2b, X101000) + F.B(Phi1, X001100) +
                           F.B(Phi2, X100100) + F.C(Phi1, Phi2, Phi2b));
    d.g1110 = cdot(p2, F.B(Phi1b, X101000) + F.B(Phi1, X100100b) +
                           F.B(Phi2, X110000) + F.C(Phi1, Phi1b, Phi2));
    d.g0021 = 0.5 * cdot(p2, 2.0 * F.B(Phi2, X001100) +
                                 F.B(Phi2b, X002000) + F.C(Phi2, Phi2, Phi2b));

    d.theta0 = d.g1011.real() / d.g0021.real();
    d.delta0 = d.g1110.real() / d.g2100.real();

    // Parameter-dependent part.
    const Mat J1 = F.J1();
    const Vec e1 = embed_unfolding(model.p, unfolding, {1.0, 0.0});
    const Vec e2 = embed_unfolding(model.p, unfolding, {0.0, 1.0});
    for (int j = 0; j < 2; ++j) {
        const Vec vj = j == 0 ? e1 : e2;
        const ExpPoly hj =
            resolvent_solve(lin, Cplx(0.0), (J1 * vj).cast<Cplx>(), zero);
        const CMat Xh = exppoly_lag_samples(hj, lin);
        const CVec vjC = vj.cast<Cplx>();
        d.Gamma(0, j) = cdot(p1, F.A1(Phi1, vjC) + F.B(Phi1, Xh));
        d.Gamma(1, j) = cdot(p2, F.A1(Phi2, vjC) + F.B(Phi2, Xh));
    }
    const Eigen::Matrix2d G = d.Gamma.real();
    check_cond2(G, "hoho_normal_form");
    const Eigen::Matrix2d Ginv = G.inverse();
    d.K10 = Ginv.col(0);
    d.K01 = Ginv.col(1);

    double b[2][2];
    for (int j = 0; j < 2; ++j) {
        const Eigen::Vector2d K = j == 0 ? d.K10 : d.K01;
        const Vec Ke = embed_unfolding(model.p, unfolding, K);
        d.H0000mu[j] =
            resolvent_solve(lin, Cplx(0.0), (J1 * Ke).cast<Cplx>(), zero);
        const CMat Xh = exppoly_lag_samples(d.H0000mu[j], lin);
        const CVec KeC = Ke.cast<Cplx>();
        b[0][j] = (cdot(p1, F.A1(Phi1, KeC)) + cdot(p1, F.B(Phi1, Xh))).imag();
        b[1][j] = (cdot(p2, F.A1(Phi2, KeC)) + cdot(p2, F.B(Phi2, Xh))).imag();
    }
    d.b11 = b[0][0];
    d.b12 = b[0][1];
    d.b21 = b[1][0];
    d.b22 = b[1][1];
    return d;
}

} // namespace ddenorm
