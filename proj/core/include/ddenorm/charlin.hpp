#ifndef DDENORM_CHARLIN_HPP
#define DDENORM_CHARLIN_HPP

#include <vector>

#include "ddenorm/model.hpp"

namespace ddenorm {

// Linearization data defining the characteristic matrix
//   Delta(z) = z I - sum_j M_j exp(-z tau_j).
struct CharLinearization {
    int n = 0;
    std::vector<double> tau; // tau_0 = 0 < tau_1 < ... < tau_m
    std::vector<Mat> M;      // M_j = D_{1,j} f at the equilibrium

    double tau_max() const { return tau.empty() ? 0.0 : tau.back(); }
};

// Assemble the linearization of a model at an equilibrium.
CharLinearization linearize(const DelayModel& model, const Vec& xstar,
                            const Vec& alpha);

CMat delta(const CharLinearization& lin, Cplx z);
// k-th derivative in z, k in {1, 2}.
CMat delta_deriv(const CharLinearization& lin, Cplx z, int k);

// Exponential polynomial theta -> sum_k exp(z_k theta) (a_k + theta b_k)
// on [-tau_max, 0], together with a head vector v0 (the X^{sun*} component
// it is paired with in solvability computations).
struct ExpPoly {
    struct Term {
        Cplx z;
        CVec a;
        CVec b; // may be zero
    };
    int n = 0;
    CVec head;
    std::vector<Term> terms;

    static ExpPoly zero(int n);
    static ExpPoly single(Cplx z, const CVec& a, const CVec& b);

    void add_term(Cplx z, const CVec& a, const CVec& b); // merges equal exponents
    CVec eval(double theta) const;
    CVec deriv_eval(double theta) const;
    ExpPoly conj() const;
    ExpPoly operator*(Cplx s) const;
    ExpPoly operator+(const ExpPoly& other) const;
};

// Evaluate at the model lags: column j = h(-tau_j).
CMat exppoly_lag_samples(const ExpPoly& h, const CharLinearization& lin);

// Solve the bordered system [M q; p 0][x; s] = [y; 0]; requires p y ~ 0.
CVec solve_bordered(const CMat& M, const CVec& q, const CVec& p, const CVec& y);

// Same bordered system, but the slack is returned instead of asserted;
// used as the generalized inverse M^INV in the parameter-related systems
// where the null component is absorbed elsewhere.
CVec solve_bordered_lenient(const CMat& M, const CVec& q, const CVec& p,
                            const CVec& y, Cplx* slack = nullptr);

// Solution of (z I - A^{sun*})(v0, v) = (w0, w) for z not an eigenvalue,
// with w(theta) = exp(z theta) wfun (pass wfun = 0 for a plain resolvent
// applied to (w0, 0)).  Returns v with head v0 = v(0).
ExpPoly resolvent_solve(const CharLinearization& lin, Cplx z, const CVec& w0,
                        const CVec& wfun);

// Bordered inverse at a simple eigenvalue (lambda, q, p) normalized with
// p Delta'(lambda) q = 1: solves (lambda I - A^{sun*}) v = (eta, 0) +
// kappa (q, phi) with <phi^sun, v> = 0.
ExpPoly binv(const CharLinearization& lin, Cplx lambda, const CVec& q,
             const CVec& p, const CVec& eta, Cplx kappa);

// Closed-form duality pairing <phi^sun, v> with phi^sun determined by
// (lambda, p): p v(0) + sum_j exp(-lambda tau_j) p M_j
// int_{-tau_j}^0 exp(-lambda s) v(s) ds.
Cplx pairing(const CharLinearization& lin, Cplx lambda, const CVec& p,
             const ExpPoly& v);

// Unconjugated bilinear products.
inline Cplx cdot(const CVec& p, const CVec& y) {
    return (p.array() * y.array()).sum();
}
inline CVec left_mul(const CVec& p, const CMat& M) {
    return (p.transpose() * M).transpose();
}

} // namespace ddenorm

#endif
