#include "ddenorm/model.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace ddenorm {

double tanh_derivative(double u, int k) {
    const double t = std::tanh(u);
    const double s = 1.0 - t * t; // sech^2
    switch (k) {
        case 0: return t;
        case 1: return s;
        case 2: return -2.0 * t * s;
        case 3: return (6.0 * t * t - 2.0) * s;
        case 4: return (16.0 * t - 24.0 * t * t * t) * s;
        case 5: return (16.0 - 120.0 * t * t + 120.0 * t * t * t * t) * s;
        default: throw InvalidInput("tanh_derivative: order must be 0..5");
    }
}

namespace {

double scalar_factor_deriv(const ScalarFactor& f, double u, int k) {
    if (f.tanh_fn) return tanh_derivative(u, k);
    if (k > f.power) return 0.0;
    double c = 1.0;
    for (int i = 0; i < k; ++i) c *= static_cast<double>(f.power - i);
    return c * std::pow(u, f.power - k);
}

double param_factor_value(const ParamFactor& f, const Vec& alpha) {
    return f.c + (f.e.size() ? f.e.dot(alpha) : 0.0);
}

// Exact mixed derivative of a term list in the given directions.
Vec term_derivative(int n, const std::vector<ModelTerm>& terms, const Mat& X,
                    const Vec& alpha, const std::vector<Mat>& U,
                    const std::vector<Vec>& K) {
    const int r = static_cast<int>(U.size());
    const int s = static_cast<int>(K.size());
    Vec out = Vec::Zero(n);
    std::vector<int> sassign(std::max(r, 1), 0);
    std::vector<int> passign(std::max(s, 1), 0);
    for (const ModelTerm& term : terms) {
        const int ns = static_cast<int>(term.sfac.size());
        const int np = static_cast<int>(term.pfac.size());
        if ((r > 0 && ns == 0) || (s > 0 && np == 0) || s > np) continue;
        double total = 0.0;
        // Sum over all ways to distribute the state directions over the
        // scalar factors.
        std::fill(sassign.begin(), sassign.end(), 0);
        while (true) {
            double prod_s = 1.0;
            if (ns > 0) {
                for (int f = 0; f < ns && prod_s != 0.0; ++f) {
                    int cnt = 0;
                    double dirs = 1.0;
                    for (int d = 0; d < r; ++d) {
                        if (sassign[d] == f) {
                            ++cnt;
                            dirs *= U[d](term.sfac[f].comp, term.sfac[f].lag);
                        }
                    }
                    const double u = X(term.sfac[f].comp, term.sfac[f].lag);
                    prod_s *= scalar_factor_deriv(term.sfac[f], u, cnt) * dirs;
                }
            }
            if (prod_s != 0.0) {
                // Sum over injective assignments of parameter directions to
                // the affine parameter factors.
                std::fill(passign.begin(), passign.end(), 0);
                while (true) {
                    bool ok = true;
                    for (int d1 = 0; d1 < s && ok; ++d1)
                        for (int d2 = d1 + 1; d2 < s; ++d2)
                            if (passign[d1] == passign[d2]) { ok = false; break; }
                    if (ok) {
                        double prod_p = 1.0;
                        for (int f = 0; f < np; ++f) {
                            int hit = -1;
                            for (int d = 0; d < s; ++d)
                                if (passign[d] == f) hit = d;
                            if (hit >= 0)
                                prod_p *= term.pfac[f].e.size()
                                              ? term.pfac[f].e.dot(K[hit])
                                              : 0.0;
                            else
                                prod_p *= param_factor_value(term.pfac[f], alpha);
                        }
                        total += prod_s * prod_p;
                    }
                    if (s == 0) break;
                    int d = 0;
                    while (d < s && ++passign[d] == np) passign[d++] = 0;
                    if (d == s) break;
                }
            }
            if (r == 0) break;
            int d = 0;
            while (d < r && ++sassign[d] == ns) sassign[d++] = 0;
            if (d == r) break;
        }
        out(term.row) += term.coef * total;
    }
    return out;
}

Vec term_rhs(int n, const std::vector<ModelTerm>& terms, const Mat& X,
             const Vec& alpha) {
    Vec out = Vec::Zero(n);
    for (const ModelTerm& term : terms) {
        double v = term.coef;
        for (const ParamFactor& f : term.pfac) v *= param_factor_value(f, alpha);
        for (const ScalarFactor& f : term.sfac) {
            const double u = X(f.comp, f.lag);
            v *= f.tanh_fn ? std::tanh(u) : std::pow(u, f.power);
        }
        out(term.row) += v;
    }
    return out;
}

} // namespace

DelayModel make_term_model(std::string name, int n, int p,
                           std::vector<std::string> param_names,
                           std::function<std::vector<double>(const Vec&)> delays,
                           std::vector<ModelTerm> terms) {
    DelayModel model;
    model.name = std::move(name);
    model.n = n;
    model.p = p;
    model.param_names = std::move(param_names);
    model.delays = std::move(delays);
    auto shared = std::make_shared<std::vector<ModelTerm>>(std::move(terms));
    model.rhs = [n, shared](const Mat& X, const Vec& alpha) {
        return term_rhs(n, *shared, X, alpha);
    };
    model.deriv_oracle = [n, shared](const Mat& X, const Vec& alpha,
                                     const std::vector<Mat>& U,
                                     const std::vector<Vec>& K) {
        return term_derivative(n, *shared, X, alpha, U, K);
    };
    return model;
}

Vec eval_rhs(const DelayModel& model, const HistorySamples& X, const Vec& alpha) {
    if (X.values.rows() != model.n ||
        X.values.cols() != model.lag_count(alpha) ||
        alpha.size() != model.p)
        throw InvalidInput("eval_rhs: dimension mismatch for model " + model.name);
    Vec f = model.rhs(X.values, alpha);
    if (f.size() != model.n)
        throw InvalidInput("eval_rhs: rhs returned wrong dimension");
    return f;
}

Vec fd_derivative(const DelayModel& model, const Mat& X0, const Vec& alpha0,
                  const std::vector<Mat>& U, const std::vector<Vec>& K,
                  double step) {
    const int order = static_cast<int>(U.size() + K.size());
    if (order < 1 || order > 5)
        throw InvalidInput("fd_derivative: order must be 1..5");
    if (step <= 0.0) {
        const double scale =
            std::max({1.0, X0.cwiseAbs().maxCoeff(),
                      alpha0.size() ? alpha0.cwiseAbs().maxCoeff() : 0.0});
        step = std::pow(std::numeric_limits<double>::epsilon(),
                        1.0 / (2.0 + order)) *
               scale;
    }
    const int r = static_cast<int>(U.size());
    const int s = static_cast<int>(K.size());
    Vec out = Vec::Zero(model.n);
    const int combos = 1 << order;
    for (int mask = 0; mask < combos; ++mask) {
        Mat X = X0;
        Vec alpha = alpha0;
        double sign = 1.0;
        for (int d = 0; d < order; ++d) {
            const double sg = (mask >> d) & 1 ? 1.0 : -1.0;
            sign *= sg;
            if (d < r)
                X += (sg * step / 2.0) * U[d];
            else
                alpha += (sg * step / 2.0) * K[d - r];
        }
        out += sign * model.rhs(X, alpha);
    }
    return out / std::pow(step, order);
}

MultilinearBundle::MultilinearBundle(const DelayModel& model, const Vec& xstar,
                                     const Vec& alpha, int max_order)
    : model_(&model), xstar_(xstar), alpha_(alpha), max_order_(max_order) {
    if (max_order < 1 || max_order > 5)
        throw InvalidInput("MultilinearBundle: max_order must be 1..5");
    mlags_ = model.lag_count(alpha);
    X0_ = xstar.replicate(1, mlags_);
    const double res = model.rhs(X0_, alpha).norm();
    if (res > 1e-8 * (1.0 + xstar.norm()))
        throw NotAnEquilibrium("MultilinearBundle: base point residual " +
                               std::to_string(res));
}

Vec MultilinearBundle::real_form(const std::vector<Mat>& U,
                                 const std::vector<Vec>& K) const {
    const int order = static_cast<int>(U.size() + K.size());
    if (order > max_order_)
        throw InvalidInput("MultilinearBundle: requested order exceeds max_order");
    if (model_->deriv_oracle) return model_->deriv_oracle(X0_, alpha_, U, K);
    return fd_derivative(*model_, X0_, alpha_, U, K);
}

CVec MultilinearBundle::form(const std::vector<CMat>& U,
                             const std::vector<CVec>& K) const {
    const int r = static_cast<int>(U.size());
    const int s = static_cast<int>(K.size());
    const int order = r + s;
    CVec out = CVec::Zero(model_->n);
    std::vector<Mat> Ur(r);
    std::vector<Vec> Kr(s);
    const int combos = 1 << order;
    for (int mask = 0; mask < combos; ++mask) {
        Cplx factor(1.0, 0.0);
        for (int d = 0; d < r; ++d) {
            if ((mask >> d) & 1) {
                Ur[d] = U[d].imag();
                factor *= Cplx(0.0, 1.0);
            } else {
                Ur[d] = U[d].real();
            }
        }
        for (int d = 0; d < s; ++d) {
            if ((mask >> (r + d)) & 1) {
                Kr[d] = K[d].imag();
                factor *= Cplx(0.0, 1.0);
            } else {
                Kr[d] = K[d].real();
            }
        }
        out += factor * real_form(Ur, Kr).cast<Cplx>();
    }
    return out;
}

Mat MultilinearBundle::J1() const {
    Mat out(model_->n, model_->p);
    for (int k = 0; k < model_->p; ++k) {
        Vec ek = Vec::Zero(model_->p);
        ek(k) = 1.0;
        out.col(k) = real_form({}, {ek});
    }
    return out;
}

CVec MultilinearBundle::B(const CMat& u, const CMat& v) const {
    return form({u, v}, {});
}
CVec MultilinearBundle::C(const CMat& u, const CMat& v, const CMat& w) const {
    return form({u, v, w}, {});
}
CVec MultilinearBundle::D(const CMat& u, const CMat& v, const CMat& w,
                          const CMat& x) const {
    return form({u, v, w, x}, {});
}
CVec MultilinearBundle::E(const CMat& u, const CMat& v, const CMat& w,
                          const CMat& x, const CMat& y) const {
    return form({u, v, w, x, y}, {});
}
CVec MultilinearBundle::A1(const CMat& u, const CVec& k) const {
    return form({u}, {k});
}
CVec MultilinearBundle::B1(const CMat& u, const CMat& v, const CVec& k) const {
    return form({u, v}, {k});
}
CVec MultilinearBundle::C1(const CMat& u, const CMat& v, const CMat& w,
                           const CVec& k) const {
    return form({u, v, w}, {k});
}
Vec MultilinearBundle::J2(const Vec& k1, const Vec& k2) const {
    return real_form({}, {k1, k2});
}

// ---------------------------------------------------------------------------
// Built-in models
// ---------------------------------------------------------------------------
namespace {

Vec unit(int p, int k) {
    Vec e = Vec::Zero(p);
    e(k) = 1.0;
    return e;
}

// FitzHugh-Nagumo with delayed coupling; parameters (beta, alpha, tau).
DelayModel make_fhn() {
    const double b = 0.9, eps = 0.08, c = 2.0528, d = -3.2135;
    const int p = 3;
    std::vector<ModelTerm> terms;
    terms.push_back({0, -1.0 / 3.0, {}, {{0, 0, 3}}});
    terms.push_back({0, 1.0, {{c, unit(p, 1)}}, {{0, 0, 2}}});
    terms.push_back({0, d, {}, {{0, 0, 1}}});
    terms.push_back({0, -1.0, {}, {{1, 0, 1}}});
    terms.push_back({0, 2.0, {{0.0, unit(p, 0)}}, {{0, 1, 1, true}}});
    terms.push_back({1, eps, {}, {{0, 0, 1}}});
    terms.push_back({1, -eps * b, {}, {{1, 0, 1}}});
    DelayModel m = make_term_model(
        "fhn", 2, p, {"beta", "alpha", "tau"},
        [](const Vec& a) { return std::vector<double>{0.0, a(2)}; },
        std::move(terms));
    m.delay_params = {2};
    return m;
}

// Rose-Hindmarsh with delayed self-feedback; parameters (Iapp, S, r, tau).
DelayModel make_rh() {
    const double a = 1.0, b = 3.0, c = 1.0, d = 5.0, chi = -1.6;
    const int p = 4;
    std::vector<ModelTerm> terms;
    terms.push_back({0, 1.0, {}, {{1, 0, 1}}});
    terms.push_back({0, -a, {}, {{0, 0, 3}}});
    terms.push_back({0, b, {}, {{0, 1, 2}}});
    terms.push_back({0, -c, {}, {{2, 0, 1}}});
    terms.push_back({0, 1.0, {{0.0, unit(p, 0)}}, {}});
    terms.push_back({1, c, {}, {}});
    terms.push_back({1, -d, {}, {{0, 0, 2}}});
    terms.push_back({1, -1.0, {}, {{1, 0, 1}}});
    terms.push_back({2, 1.0, {{0.0, unit(p, 2)}, {0.0, unit(p, 1)}}, {{0, 0, 1}}});
    terms.push_back({2, -chi, {{0.0, unit(p, 2)}, {0.0, unit(p, 1)}}, {}});
    terms.push_back({2, -1.0, {{0.0, unit(p, 2)}}, {{2, 0, 1}}});
    DelayModel m = make_term_model(
        "rh", 3, p, {"Iapp", "S", "r", "tau"},
        [](const Vec& a) { return std::vector<double>{0.0, a(3)}; },
        std::move(terms));
    m.delay_params = {3};
    return m;
}

// Active control system, time-rescaled so the delay is 1; parameters
// (zeta, tau).
DelayModel make_acs() {
    const double gu = 0.1, gv = 0.52, bc = 0.1;
    const int p = 2;
    const ParamFactor tau{0.0, unit(p, 1)};
    const ParamFactor zeta{0.0, unit(p, 0)};
    std::vector<ModelTerm> terms;
    terms.push_back({0, 1.0, {tau}, {{1, 0, 1}}});
    terms.push_back({1, -1.0, {tau}, {{0, 0, 1}}});
    terms.push_back({1, -gu, {tau}, {{0, 1, 1}}});
    terms.push_back({1, -2.0, {tau, zeta}, {{1, 0, 1}}});
    terms.push_back({1, -gv, {tau}, {{1, 1, 1}}});
    terms.push_back({1, bc, {tau}, {{0, 1, 3}}});
    DelayModel m = make_term_model(
        "acs", 2, p, {"zeta", "tau"},
        [](const Vec&) { return std::vector<double>{0.0, 1.0}; },
        std::move(terms));
    m.fixed_equilibrium = true;
    m.time_rescaled = true;
    return m;
}

// Delayed Van der Pol oscillator, time-rescaled so the delay is 1;
// parameters (mu1, mu2).
DelayModel make_vdp() {
    const double eps = 0.3;
    const double tau0 = 1.757290761249588;
    const int p = 2;
    const ParamFactor T{tau0, unit(p, 1)};   // tau0 + mu2
    const ParamFactor M1{1.0, unit(p, 0)};   // 1 + mu1
    std::vector<ModelTerm> terms;
    terms.push_back({0, 1.0, {T}, {{1, 0, 1}}});
    terms.push_back({1, -1.0, {T}, {{0, 0, 1}}});
    terms.push_back({1, -eps, {T}, {{0, 0, 2}, {1, 0, 1}}});
    terms.push_back({1, eps, {T}, {{1, 0, 1}}});
    terms.push_back({1, 1.0, {T, M1}, {{0, 1, 1}}});
    terms.push_back({1, -0.2, {T}, {{1, 1, 1}}});
    terms.push_back({1, -0.2, {T}, {{0, 1, 2}}});
    terms.push_back({1, -0.2, {T}, {{0, 1, 1}, {1, 1, 1}}});
    terms.push_back({1, -0.2, {T}, {{1, 1, 2}}});
    terms.push_back({1, 0.5, {T}, {{0, 0, 3}}});
    DelayModel m = make_term_model(
        "vdp", 2, p, {"mu1", "mu2"},
        [](const Vec&) { return std::vector<double>{0.0, 1.0}; },
        std::move(terms));
    m.fixed_equilibrium = true;
    m.time_rescaled = true;
    return m;
}

// Scalar test model x'(t) = -(pi/2) x(t-1).
DelayModel make_scalar() {
    std::vector<ModelTerm> terms;
    terms.push_back({0, -std::numbers::pi / 2.0, {}, {{0, 1, 1}}});
    return make_term_model(
        "scalar", 1, 0, {},
        [](const Vec&) { return std::vector<double>{0.0, 1.0}; },
        std::move(terms));
}

} // namespace

std::vector<std::string> builtin_model_names() {
    return {"fhn", "rh", "acs", "vdp", "scalar"};
}

DelayModel make_model(const std::string& name) {
    if (name == "fhn") return make_fhn();
    if (name == "rh") return make_rh();
    if (name == "acs") return make_acs();
    if (name == "vdp") return make_vdp();
    if (name == "scalar") return make_scalar();
    throw UnknownModel("unknown model '" + name + "'");
}

RHBifurcationValues rh_bifurcation_values(double a, double b, double c,
                                          double d, double chi, double r,
                                          double S) {
    const double disc = (b - d) * (b - d) - 3.0 * a * c * S;
    if (disc < 0.0)
        throw NoBifurcation("rh_bifurcation_values: negative discriminant");
    const double xs = ((b - d) + std::sqrt(disc)) / (3.0 * a);
    const double Iapp =
        xs * xs * (a * xs - b + d) + c * (S * (xs - chi) - 1.0);
    const double A =
        xs * xs * (std::pow(3.0 * a * xs + 2.0 * d, 2) - 4.0 * b * b) -
        2.0 * r * xs * (2.0 * d * xs - 1.0) * (3.0 * a * xs - 2.0 * b + 2.0 * d) +
        r * r * (4.0 * d * xs * (-2.0 * b * xs + d * xs - 1.0) + 1.0);
    const double B = 9.0 * a * a * std::pow(xs, 4) +
                     2.0 * r * xs * (3.0 * a * xs - 2.0 * b + 2.0 * d) -
                     4.0 * b * b * xs * xs - 4.0 * d * xs + r * r + 1.0;
    const double disc2 = B * B - 4.0 * A;
    if (disc2 < 0.0)
        throw NoBifurcation("rh_bifurcation_values: no real Hopf frequency");
    // Roots of u^2 + B u + A = 0, u = omega^2; smallest positive root.
    double omega2 = -1.0;
    for (double sgn : {-1.0, 1.0}) {
        const double u = (-B + sgn * std::sqrt(disc2)) / 2.0;
        if (u > 0.0 && (omega2 < 0.0 || u < omega2)) omega2 = u;
    }
    if (omega2 <= 0.0)
        throw NoBifurcation("rh_bifurcation_values: no positive omega^2 root");
    const double w = std::sqrt(omega2);
    const double Y =
        (w / (2.0 * b)) * (r * (2.0 * b - 2.0 * d - 3.0 * a * xs) / (r * r + w * w) +
                           2.0 * d / (w * w + 1.0) - 1.0 / xs);
    const double Z = (w / (2.0 * b)) *
                     (r * r * (2.0 * b - 2.0 * d - 3.0 * a * xs) / (r * r + w * w) +
                      2.0 * d / (w * w + 1.0) + 3.0 * a * xs);
    if (std::abs(Y) > 1.0)
        throw NoBifurcation("rh_bifurcation_values: |Y| > 1");
    double tau = Z >= 0.0 ? std::asin(Y) / w : (std::numbers::pi - std::asin(Y)) / w;
    while (tau <= 0.0) tau += 2.0 * std::numbers::pi / w;
    return {xs, Iapp, w, tau};
}

} // namespace ddenorm
