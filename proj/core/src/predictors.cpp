#include "ddenorm/predictors.hpp"

#include <cmath>

#include <fmt/format.h>

namespace ddenorm {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

Vec head_re(const ExpPoly& h) { return h.eval(0.0).real(); }

// Cycle profile assembly: sample u(psi) on the mesh and close the curve.
CycleApprox make_cycle(const Vec& alpha, double T, double eps,
                       const std::vector<double>& psi,
                       const std::function<Vec(double)>& u) {
    CycleApprox c;
    c.alpha = alpha;
    c.T = T;
    c.eps = eps;
    c.psi = psi;
    const int n = static_cast<int>(u(0.0).size());
    c.profile.resize(static_cast<int>(psi.size()), n);
    for (size_t i = 0; i < psi.size(); ++i)
        c.profile.row(static_cast<int>(i)) = u(psi[i]).transpose();
    // Enforce exact closure; the formulas are 2 pi periodic already.
    c.profile.row(static_cast<int>(psi.size()) - 1) = c.profile.row(0);
    return c;
}

Predictor finish(Predictor pred, const std::vector<double>& eps_list) {
    pred.points.reserve(eps_list.size());
    for (double e : eps_list) pred.points.push_back(pred.at(e));
    return pred;
}

// alpha(beta) = alpha0 + (K10 beta1 + K01 beta2) embedded in the unfolding
// parameter slots; self-contained so predictor closures stay valid after the
// coefficient data goes out of scope.
struct AlphaMap {
    Vec alpha0;
    std::array<int, 2> unfolding{};
    Eigen::Vector2d K10, K01;

    Vec operator()(const Eigen::Vector2d& beta) const {
        return alpha0 + embed_unfolding(static_cast<int>(alpha0.size()),
                                        unfolding,
                                        Eigen::Vector2d(K10 * beta(0) +
                                                        K01 * beta(1)));
    }
};

} // namespace

std::string predictor_kind_name(PredictorKind k) {
    switch (k) {
    case PredictorKind::hopf: return "hopf";
    case PredictorKind::fold: return "fold";
    case PredictorKind::transcritical: return "transcritical";
    case PredictorKind::lpc: return "lpc";
    case PredictorKind::ns1: return "ns1";
    case PredictorKind::ns2: return "ns2";
    }
    return "?";
}

std::vector<double> default_eps_grid() {
    std::vector<double> g;
    const int per_decade = 20, decades = 3;
    for (int k = 0; k <= per_decade * decades; ++k)
        g.push_back(1e-4 * std::pow(10.0, double(k) / per_decade));
    g.back() = 1e-1;
    return g;
}

std::vector<double> default_psi_mesh(int intervals) {
    std::vector<double> psi(intervals + 1);
    for (int i = 0; i <= intervals; ++i) psi[i] = kTwoPi * i / intervals;
    return psi;
}

// ---------------------------------------------------------------------------
// Generalized Hopf: LPC and Hopf branches.
// ---------------------------------------------------------------------------
PredictorSet genh_predictors(const GenHData& d,
                             const std::vector<double>& eps_list) {
    const double rc2 = d.c2.real();
    if (std::abs(rc2) < 1e-10)
        throw DegenerateL2(fmt::format(
            "genh predictors: Re c2 = {:.3e} below 1e-10", rc2));

    const AlphaMap alpha_of{d.alpha0, d.unfolding, d.Rinv.col(0),
                            d.Rinv.col(1)};
    // H coefficients in the beta_2 direction, assembled from the unfolding
    // parameter directions.
    const ExpPoly H0001 = d.H00mu[0] * Cplx(alpha_of.K01(0)) +
                          d.H00mu[1] * Cplx(alpha_of.K01(1));

    const Vec xstar = d.xstar;
    const CVec q = d.pair.q;
    const Vec h1100 = head_re(d.H1100);
    const Vec h0001 = head_re(H0001);
    const CVec h2000 = d.H2000.eval(0.0);
    const double omega0 = d.omega0, omega01 = d.omega01, imc1 = d.c1.imag();
    const std::vector<double> psi = default_psi_mesh();

    PredictorSet set;

    Predictor hopf;
    hopf.kind = PredictorKind::hopf;
    hopf.name = "hopf";
    hopf.source = Codim2Kind::genh;
    hopf.at = [=](double eps) {
        PredictorPoint pt;
        pt.eps = eps;
        pt.beta = Eigen::Vector2d(0.0, eps);
        pt.alpha = alpha_of(pt.beta);
        pt.x = xstar + eps * h0001;
        return pt;
    };
    set.branches.push_back(finish(std::move(hopf), eps_list));

    Predictor lpc;
    lpc.kind = PredictorKind::lpc;
    lpc.name = "lpc";
    lpc.source = Codim2Kind::genh;
    lpc.at = [=](double eps) {
        PredictorPoint pt;
        pt.eps = eps;
        const double e2 = eps * eps;
        pt.beta = Eigen::Vector2d(rc2 * e2 * e2, -2.0 * rc2 * e2);
        pt.alpha = alpha_of(pt.beta);
        const Vec base2 = h1100 - 2.0 * rc2 * h0001;
        pt.x = xstar + e2 * base2;
        const double T = kTwoPi / (omega0 + (imc1 - 2.0 * rc2 * omega01) * e2);
        pt.cycle = make_cycle(pt.alpha, T, eps, psi, [&](double ps) {
            const Cplx w = std::polar(1.0, ps);
            return Vec(xstar + 2.0 * eps * (w * q).real().matrix() +
                       e2 * (base2 + (w * w * h2000).real().matrix()));
        });
        return pt;
    };
    set.branches.push_back(finish(std::move(lpc), eps_list));
    return set;
}

// ---------------------------------------------------------------------------
// Fold-Hopf: Neimark-Sacker, fold and Hopf branches.
// ---------------------------------------------------------------------------
PredictorSet zeho_predictors(const ZeHoData& d,
                             const std::vector<double>& eps_list) {
    if (d.transcritical)
        throw InvalidInput(
            "zeho_predictors: transcritical data, use thopf_predictors");
    if (std::abs(d.g200) < 1e-10)
        throw Degenerate(fmt::format(
            "zeho predictors: g200 = {:.3e} below 1e-10", d.g200));

    const AlphaMap alpha_of{d.alpha0, d.unfolding, d.K10, d.K01};
    const Vec xstar = d.xstar;
    const Vec q0 = d.pair0.q.real();
    const CVec q1 = d.pair1.q;
    const Vec h00010 = head_re(d.H00010);
    const Vec h00001 = head_re(d.H00001);
    const Vec h20000 = head_re(d.H20000);
    const Vec h01100 = head_re(d.H01100);
    const CVec h02000 = d.H02000.eval(0.0);
    const double g200 = d.g200, g011 = d.g011, g111 = d.g111;
    const double rg110 = d.g110.real(), ig110 = d.g110.imag();
    const double rg021 = d.g021.real(), ig021 = d.g021.imag();
    const double omega0 = d.omega0, omega1 = d.omega1, omega2 = d.omega2;
    const std::vector<double> psi = default_psi_mesh();

    PredictorSet set;

    Predictor fold;
    fold.kind = PredictorKind::fold;
    fold.name = "fold";
    fold.source = Codim2Kind::zeho;
    fold.at = [=](double eps) {
        PredictorPoint pt;
        pt.eps = eps;
        pt.beta = Eigen::Vector2d(0.0, eps);
        pt.alpha = alpha_of(pt.beta);
        pt.x = xstar + eps * h00001;
        return pt;
    };
    set.branches.push_back(finish(std::move(fold), eps_list));

    if (std::abs(rg110) < 1e-10) {
        set.excluded.push_back(
            {"hopf", fmt::format("Re(g110) = {:.3e} vanishes; the Hopf curve "
                                 "beta1 = -g200/Re(g110)^2 eps^2 is undefined",
                                 rg110)});
    } else {
        Predictor hopf;
        hopf.kind = PredictorKind::hopf;
        hopf.name = "hopf";
        hopf.source = Codim2Kind::zeho;
        hopf.at = [=](double eps) {
            PredictorPoint pt;
            pt.eps = eps;
            pt.beta =
                Eigen::Vector2d(-g200 / (rg110 * rg110) * eps * eps, eps);
            pt.alpha = alpha_of(pt.beta);
            const double z0 = -eps / rg110;
            pt.x = xstar + z0 * q0 + pt.beta(0) * h00010 +
                   pt.beta(1) * h00001 + 0.5 * z0 * z0 * h20000;
            return pt;
        };
        set.branches.push_back(finish(std::move(hopf), eps_list));
    }

    const double sign_cond = g011 * rg110;
    if (!(sign_cond < 0.0)) {
        set.excluded.push_back(
            {"ns", fmt::format("g011 * Re(g110) = {:.6e} >= 0 (need < 0 for a "
                               "Neimark-Sacker curve)",
                               sign_cond)});
    } else {
        const double b2c =
            (rg110 * (2.0 * rg021 + g111) - 2.0 * rg021 * g200) / (2.0 * g200);
        const double z0c = -(2.0 * rg021 + g111) / (2.0 * g200);
        Predictor ns;
        ns.kind = PredictorKind::ns1;
        ns.name = "ns";
        ns.source = Codim2Kind::zeho;
        ns.at = [=](double eps) {
            PredictorPoint pt;
            pt.eps = eps;
            const double e2 = eps * eps;
            pt.beta = Eigen::Vector2d(-g011 * e2, b2c * e2);
            pt.alpha = alpha_of(pt.beta);
            const double z0 = z0c * e2;
            const Vec base2 =
                b2c * h00001 - g011 * h00010 + h01100 + z0c * q0;
            pt.x = xstar + e2 * base2;
            const double T =
                kTwoPi / (omega0 + omega1 * pt.beta(0) + omega2 * pt.beta(1) +
                          ig110 * z0 + ig021 * e2);
            pt.cycle = make_cycle(pt.alpha, T, eps, psi, [&](double ps) {
                const Cplx w = std::polar(1.0, ps);
                return Vec(
                    xstar + 2.0 * eps * (w * q1).real().matrix() +
                    e2 * (base2 +
                          (w * w * h02000.conjugate()).real().matrix()));
            });
            return pt;
        };
        set.branches.push_back(finish(std::move(ns), eps_list));
        if (d.e0 > 0.0)
            set.notes.push_back(fmt::format(
                "e(0) = {:.6g} > 0: the predicted invariant tori are unstable",
                d.e0));
    }
    return set;
}

// ---------------------------------------------------------------------------
// Hopf-Hopf: two Neimark-Sacker and two Hopf branches.
// ---------------------------------------------------------------------------
PredictorSet hoho_predictors(const HoHoData& d,
                             const std::vector<double>& eps_list) {
    const AlphaMap alpha_of{d.alpha0, d.unfolding, d.K10, d.K01};
    const Vec xstar = d.xstar;
    const Vec h10 = head_re(d.H0000mu[0]);
    const Vec h01 = head_re(d.H0000mu[1]);
    const std::vector<double> psi = default_psi_mesh();

    PredictorSet set;

    const auto add_hopf = [&](const char* name, bool first) {
        Predictor h;
        h.kind = PredictorKind::hopf;
        h.name = name;
        h.source = Codim2Kind::hoho;
        h.at = [=](double eps) {
            PredictorPoint pt;
            pt.eps = eps;
            pt.beta = first ? Eigen::Vector2d(0.0, eps)
                            : Eigen::Vector2d(eps, 0.0);
            pt.alpha = alpha_of(pt.beta);
            pt.x = xstar + eps * (first ? h01 : h10);
            return pt;
        };
        set.branches.push_back(finish(std::move(h), eps_list));
    };
    add_hopf("hopf1", true);  // beta1 = 0
    add_hopf("hopf2", false); // beta2 = 0

    struct NsSpec {
        const char* name;
        PredictorKind kind;
        double rga, rgb; // beta = (-rga, -rgb) eps^2
        CVec q;
        double omega, ba, bb;
        double g_im;     // Im of the resonant cubic coefficient
        Vec h_res;       // resonant quadratic H at theta = 0 (real part)
        CVec h_osc;      // double-frequency H at theta = 0
    };
    const std::vector<NsSpec> specs = {
        {"ns1", PredictorKind::ns1, d.g2100.real(), d.g1110.real(), d.pair1.q,
         d.omega1, d.b11, d.b12, d.g2100.imag(), head_re(d.H110000),
         d.H200000.eval(0.0)},
        {"ns2", PredictorKind::ns2, d.g1011.real(), d.g0021.real(), d.pair2.q,
         d.omega2, d.b21, d.b22, d.g0021.imag(), head_re(d.H001100),
         d.H002000.eval(0.0)},
    };
    for (const NsSpec& s : specs) {
        const bool is1 = s.kind == PredictorKind::ns1;
        const double semitrivial = is1 ? d.g2100.real() : d.g0021.real();
        if (std::abs(semitrivial) < 1e-10) {
            set.excluded.push_back(
                {s.name, fmt::format("|Re({})| = {:.3e} below 1e-10 "
                                     "(degenerate semitrivial branch)",
                                     is1 ? "g2100" : "g0021", semitrivial)});
            continue;
        }
        Predictor ns;
        ns.kind = s.kind;
        ns.name = s.name;
        ns.source = Codim2Kind::hoho;
        ns.at = [=](double eps) {
            PredictorPoint pt;
            pt.eps = eps;
            const double e2 = eps * eps;
            pt.beta = Eigen::Vector2d(-s.rga * e2, -s.rgb * e2);
            pt.alpha = alpha_of(pt.beta);
            const Vec base2 = -s.rgb * h01 - s.rga * h10 + s.h_res;
            pt.x = xstar + e2 * base2;
            const double T = kTwoPi / (s.omega + s.ba * pt.beta(0) +
                                       s.bb * pt.beta(1) + s.g_im * e2);
            pt.cycle = make_cycle(pt.alpha, T, eps, psi, [&](double ps) {
                const Cplx w = std::polar(1.0, ps);
                return Vec(xstar + 2.0 * eps * (w * s.q).real().matrix() +
                           e2 * (base2 + (w * w * s.h_osc).real().matrix()));
            });
            return pt;
        };
        set.branches.push_back(finish(std::move(ns), eps_list));
    }
    return set;
}

// ---------------------------------------------------------------------------
// Transcritical-Hopf: two Neimark-Sacker branches, two Hopf branches and the
// transcritical branch.
// ---------------------------------------------------------------------------
PredictorSet thopf_predictors(const ZeHoData& d,
                              const std::vector<double>& eps_list) {
    if (!d.transcritical)
        throw InvalidInput(
            "thopf_predictors: generic fold-Hopf data, use zeho_predictors");
    if (std::abs(d.g200) < 1e-10)
        throw Degenerate(fmt::format(
            "thopf predictors: g200 = {:.3e} below 1e-10", d.g200));

    const AlphaMap alpha_of{d.alpha0, d.unfolding, d.K10, d.K01};
    const Vec xstar = d.xstar;
    const Vec q0 = d.pair0.q.real();
    const CVec q1 = d.pair1.q;
    const Vec h00010 = head_re(d.H00010);
    const Vec h00001 = head_re(d.H00001);
    const double g200 = d.g200, g011 = d.g011;
    const double rg110 = d.g110.real(), ig110 = d.g110.imag();
    const double omega0 = d.omega0, omega1 = d.omega1, omega2 = d.omega2;
    const std::vector<double> psi = default_psi_mesh();

    PredictorSet set;

    Predictor tc;
    tc.kind = PredictorKind::transcritical;
    tc.name = "transcritical";
    tc.source = Codim2Kind::thopf;
    tc.at = [=](double eps) {
        PredictorPoint pt;
        pt.eps = eps;
        pt.beta = Eigen::Vector2d(0.0, eps);
        pt.alpha = alpha_of(pt.beta);
        pt.x = xstar + eps * h00001;
        return pt;
    };
    set.branches.push_back(finish(std::move(tc), eps_list));

    // Hopf along the nontrivial equilibrium branch:
    // beta2 = Re(g110)/g200 beta1, equilibrium at z0 = -beta1 / g200.
    Predictor h1;
    h1.kind = PredictorKind::hopf;
    h1.name = "hopf1";
    h1.source = Codim2Kind::thopf;
    h1.at = [=](double eps) {
        PredictorPoint pt;
        pt.eps = eps;
        pt.beta = Eigen::Vector2d(eps, rg110 / g200 * eps);
        pt.alpha = alpha_of(pt.beta);
        const double z0 = -eps / g200;
        pt.x = xstar + z0 * q0 + pt.beta(0) * h00010 + pt.beta(1) * h00001;
        return pt;
    };
    set.branches.push_back(finish(std::move(h1), eps_list));

    // Hopf of the trivial equilibrium: beta2 = 0.
    Predictor h2;
    h2.kind = PredictorKind::hopf;
    h2.name = "hopf2";
    h2.source = Codim2Kind::thopf;
    h2.at = [=](double eps) {
        PredictorPoint pt;
        pt.eps = eps;
        pt.beta = Eigen::Vector2d(eps, 0.0);
        pt.alpha = alpha_of(pt.beta);
        pt.x = xstar + pt.beta(0) * h00010;
        return pt;
    };
    set.branches.push_back(finish(std::move(h2), eps_list));

    const double sign_cond = g011 * rg110;
    const double ratio = g011 / g200;
    std::string reason;
    if (!(sign_cond < 0.0))
        reason = fmt::format("g011 * Re(g110) = {:.6e} >= 0 (need < 0)",
                             sign_cond);
    else if (!(ratio > 0.0))
        reason = fmt::format(
            "g011 * g200 = {:.6e} <= 0: sqrt(g011/g200) is not real",
            g011 * g200);
    if (!reason.empty()) {
        set.excluded.push_back({"ns_plus", reason});
        set.excluded.push_back({"ns_minus", reason});
        return set;
    }

    // Written via z0: beta1 = -2 g200 z0, beta2 = -Re(g110) z0 with
    // z0 = +-sqrt(g011/g200) eps.  For g200 > 0 this is exactly
    // beta1 = -+2 sqrt(g011 g200) eps, beta2 = -+Re(g110) sqrt(g011/g200) eps,
    // and it stays on the correct branch for either eigenvector sign
    // convention (where g200, g011 and g110 flip together).
    const double root = std::sqrt(ratio); // sqrt(g011/g200)
    for (const double sg : {+1.0, -1.0}) {
        Predictor ns;
        ns.kind = sg > 0 ? PredictorKind::ns1 : PredictorKind::ns2;
        ns.name = sg > 0 ? "ns_plus" : "ns_minus";
        ns.source = Codim2Kind::thopf;
        ns.at = [=](double eps) {
            PredictorPoint pt;
            pt.eps = eps;
            const double z0 = sg * root * eps;
            pt.beta = Eigen::Vector2d(-2.0 * g200 * z0, -rg110 * z0);
            pt.alpha = alpha_of(pt.beta);
            pt.x = xstar + z0 * q0;
            const double T = kTwoPi / (omega0 + omega1 * pt.beta(0) +
                                       omega2 * pt.beta(1) + ig110 * z0);
            pt.cycle = make_cycle(pt.alpha, T, eps, psi, [&](double ps) {
                const Cplx w = std::polar(1.0, ps);
                return Vec(xstar + z0 * q0 +
                           2.0 * eps * (w * q1).real().matrix());
            });
            return pt;
        };
        set.branches.push_back(finish(std::move(ns), eps_list));
    }
    return set;
}

} // namespace ddenorm
