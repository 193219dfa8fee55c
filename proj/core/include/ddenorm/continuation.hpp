#ifndef DDENORM_CONTINUATION_HPP
#define DDENORM_CONTINUATION_HPP

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "ddenorm/points.hpp"

namespace ddenorm {

enum class ProblemKind { equilibrium, fold, hopf, transcritical_equilibrium };
std::string problem_kind_name(ProblemKind k);

struct BranchPoint {
    Vec x;
    Vec alpha; // full parameter vector
    double omega = 0.0;
    CVec q; // defining-system eigenvector (empty for equilibrium problems)
    HopfTests tests{std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN()};
    int newton_iters = 0;
    double residual = 0.0;
    double arclength = 0.0; // cumulative, scaled metric
};

struct ContinuationOptions {
    double initial_step = 5e-3;
    double min_step = 1e-7;
    double max_step = 5e-2;
    int max_points = 2000;
    int max_corrector_iters = 8;
    double corrector_tol = 1e-10;
    // Box in the two free parameters; exit terminates the branch.
    Eigen::Vector2d box_lo =
        Eigen::Vector2d::Constant(-std::numeric_limits<double>::infinity());
    Eigen::Vector2d box_hi =
        Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
    // Per-parameter weights of the scaled parameter metric.
    Eigen::Vector2d weights = Eigen::Vector2d::Ones();
    // Evaluate Hopf test functions at every accepted point (hopf problems).
    bool compute_tests = true;
};

struct Branch {
    ProblemKind problem = ProblemKind::hopf;
    std::array<int, 2> free_params{};
    Eigen::Vector2d weights = Eigen::Vector2d::Ones();
    std::vector<BranchPoint> points;
    // Terminal condition: "BoxExit(param <i> lower|upper)", "StallDetected",
    // "MaxPoints".
    std::string stop_reason;
};

// Seed constructors (points must be corrected beforehand).
BranchPoint branch_point(const Equilibrium& eq);
BranchPoint branch_point(const FoldPoint& pt);
BranchPoint branch_point(const HopfPoint& pt);

// Secant-predictor / Newton-corrector pseudo-arclength continuation from two
// nearby corrected seed points, in the direction seed0 -> seed1.  Equilibrium
// problems vary free_params[0] only; fold/hopf vary both.
Branch continue_branch(const DelayModel& model, ProblemKind problem,
                       const BranchPoint& seed0, const BranchPoint& seed1,
                       std::array<int, 2> free_params,
                       const ContinuationOptions& opts = {});

struct Detection {
    std::vector<CodimTwoPoint> points; // de-duplicated
    int raw_crossings = 0;
};

// Bisection-based codim-2 detection on a Hopf branch: sign changes of L1
// (genh), of the nearest real eigenvalue (zeho/thopf) and of the real part of
// the second imaginary pair (hoho).
Detection detect_special_points(const DelayModel& model, const Branch& branch,
                                const std::vector<Codim2Kind>& which = {
                                    Codim2Kind::genh, Codim2Kind::zeho,
                                    Codim2Kind::hoho});

// One row per point: parameters, state, omega, test-function values.
std::string branch_to_csv(const Branch& branch,
                          const std::vector<std::string>& param_names);

} // namespace ddenorm

#endif
