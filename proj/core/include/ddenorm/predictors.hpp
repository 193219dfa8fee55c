#ifndef DDENORM_PREDICTORS_HPP
#define DDENORM_PREDICTORS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ddenorm/nmfm.hpp"

namespace ddenorm {

enum class PredictorKind { hopf, fold, transcritical, lpc, ns1, ns2 };
std::string predictor_kind_name(PredictorKind k);

// Closed-form cycle approximation at one amplitude: profile samples on a
// uniform psi mesh over [0, 2 pi] (first and last rows coincide).
struct CycleApprox {
    Vec alpha;
    double T = 0.0;
    double eps = 0.0;
    std::vector<double> psi; // mesh points, psi.front() = 0, psi.back() = 2 pi
    Mat profile;             // psi.size() x n, real
};

struct PredictorPoint {
    double eps = 0.0;
    Eigen::Vector2d beta = Eigen::Vector2d::Zero();
    Vec alpha; // full parameter vector
    Vec x;     // predicted equilibrium / cycle base state
    std::optional<CycleApprox> cycle;
};

// One emanating codim-1 branch: an amplitude-parametrized family of predicted
// points, evaluable at any eps and pre-sampled on the requested grid.
struct Predictor {
    PredictorKind kind;
    std::string name; // branch label ("lpc", "ns_plus", "hopf1", ...)
    Codim2Kind source;
    double eps_lo = 1e-4, eps_hi = 1e-1; // suggested amplitude range
    std::function<PredictorPoint(double)> at;
    std::vector<PredictorPoint> points;
};

// A branch omitted because an existence inequality fails; the reason records
// the violated inequality with the computed values.
struct ExcludedBranch {
    std::string name;
    std::string reason;
};

struct PredictorSet {
    std::vector<Predictor> branches;
    std::vector<ExcludedBranch> excluded;
    std::vector<std::string> notes; // diagnostics (e.g. torus stability)
};

// Geometric grid, 20 points per decade over [1e-4, 1e-1].
std::vector<double> default_eps_grid();
// Uniform psi mesh with the given number of intervals (mesh_size + 1 points).
std::vector<double> default_psi_mesh(int intervals = 128);

PredictorSet genh_predictors(const GenHData& d,
                             const std::vector<double>& eps_list);
PredictorSet zeho_predictors(const ZeHoData& d,
                             const std::vector<double>& eps_list);
PredictorSet hoho_predictors(const HoHoData& d,
                             const std::vector<double>& eps_list);
PredictorSet thopf_predictors(const ZeHoData& d,
                              const std::vector<double>& eps_list);

} // namespace ddenorm

#endif
