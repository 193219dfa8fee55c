#ifndef DDENORM_MODEL_HPP
#define DDENORM_MODEL_HPP

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddenorm/errors.hpp"

namespace ddenorm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Cplx = std::complex<double>;

// State samples at the model's lags: column j holds the candidate state at
// lag -tau_j (column 0 is the current state, tau_0 = 0).
struct HistorySamples {
    Mat values; // n x (m+1)
};

// ---------------------------------------------------------------------------
// Term representation of a right-hand side.
//
// A term contributes
//     coef * prod_k (c_k + e_k . alpha) * prod_l phi_l(X(comp_l, lag_l))
// to one component of f.  phi is either a pure power u^power or tanh(u)
// (power must then be 1).  All built-in models are sums of such terms, which
// makes every mixed derivative available in closed form.
// ---------------------------------------------------------------------------
struct ScalarFactor {
    int comp = 0;         // state component index
    int lag = 0;          // lag index j (column of HistorySamples)
    int power = 1;        // exponent for the power nonlinearity
    bool tanh_fn = false; // phi(u) = tanh(u) instead of u^power
};

struct ParamFactor {
    double c = 0.0; // constant part
    Vec e;          // linear part; factor value = c + e.alpha
};

struct ModelTerm {
    int row = 0;
    double coef = 1.0;
    std::vector<ParamFactor> pfac;
    std::vector<ScalarFactor> sfac;
};

// A discrete-delay DDE  x'(t) = f(x(t), x(t-tau_1), ..., x(t-tau_m), alpha).
struct DelayModel {
    std::string name;
    int n = 0; // state dimension
    int p = 0; // parameter count
    std::vector<std::string> param_names;

    // alpha -> ordered lags tau_0 = 0 < tau_1 < ... < tau_m
    std::function<std::vector<double>(const Vec&)> delays;
    // (X, alpha) -> f
    std::function<Vec(const Mat&, const Vec&)> rhs;
    // Optional analytic evaluator of the mixed directional derivative
    //   D_1^r D_2^s f(X0, alpha0)[U_1..U_r; K_1..K_s]
    // with state directions U_i (n x (m+1)) and parameter directions K_j.
    std::function<Vec(const Mat&, const Vec&, const std::vector<Mat>&,
                      const std::vector<Vec>&)>
        deriv_oracle;

    std::vector<int> delay_params;   // parameter indices that enter the lags
    bool fixed_equilibrium = false;  // equilibrium persists for all parameters
    bool time_rescaled = false;      // delays fixed, time rescaling absorbed

    int lag_count(const Vec& alpha) const {
        return static_cast<int>(delays(alpha).size());
    }
};

// Build a model from a term list; rhs and deriv_oracle are generated.
DelayModel make_term_model(std::string name, int n, int p,
                           std::vector<std::string> param_names,
                           std::function<std::vector<double>(const Vec&)> delays,
                           std::vector<ModelTerm> terms);

// Built-in models: "fhn", "rh", "acs", "vdp", "scalar".
DelayModel make_model(const std::string& name);
std::vector<std::string> builtin_model_names();

Vec eval_rhs(const DelayModel& model, const HistorySamples& X, const Vec& alpha);

// Central-difference mixed directional derivative of f at (X0, alpha0) in the
// given state/parameter directions (order = #U + #K <= 5).  step == 0 selects
// the default eps^(1/(2+order)) scaled by the point magnitude.
Vec fd_derivative(const DelayModel& model, const Mat& X0, const Vec& alpha0,
                  const std::vector<Mat>& U, const std::vector<Vec>& K,
                  double step = 0.0);

// Multilinear forms of f at an equilibrium, complex-linear in each argument.
class MultilinearBundle {
  public:
    MultilinearBundle(const DelayModel& model, const Vec& xstar,
                      const Vec& alpha, int max_order);

    int n() const { return model_->n; }
    int lags() const { return mlags_; }
    const Vec& xstar() const { return xstar_; }
    const Vec& alpha() const { return alpha_; }

    // Generic mixed form; U are n x (m+1) complex lag-sample matrices,
    // K complex parameter directions.
    CVec form(const std::vector<CMat>& U, const std::vector<CVec>& K) const;

    Mat J1() const; // n x p parameter Jacobian D_2 f
    CVec B(const CMat& u, const CMat& v) const;
    CVec C(const CMat& u, const CMat& v, const CMat& w) const;
    CVec D(const CMat& u, const CMat& v, const CMat& w, const CMat& x) const;
    CVec E(const CMat& u, const CMat& v, const CMat& w, const CMat& x,
           const CMat& y) const;
    CVec A1(const CMat& u, const CVec& k) const;
    CVec B1(const CMat& u, const CMat& v, const CVec& k) const;
    CVec C1(const CMat& u, const CMat& v, const CMat& w, const CVec& k) const;
    Vec J2(const Vec& k1, const Vec& k2) const;

  private:
    Vec real_form(const std::vector<Mat>& U, const std::vector<Vec>& K) const;

    const DelayModel* model_;
    Vec xstar_;
    Vec alpha_;
    Mat X0_; // base samples: every column equals xstar
    int mlags_ = 1;
    int max_order_ = 5;
};

// Closed-form fold-Hopf locus of the Rose-Hindmarsh example.
struct RHBifurcationValues {
    double xstar;
    double I_app;
    double omega;
    double tau;
};

RHBifurcationValues rh_bifurcation_values(double a, double b, double c,
                                          double d, double chi, double r,
                                          double S);

// k-th derivative of tanh at u, 0 <= k <= 5.
double tanh_derivative(double u, int k);

} // namespace ddenorm

#endif
