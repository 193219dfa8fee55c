#ifndef DDENORM_POINTS_HPP
#define DDENORM_POINTS_HPP

#include "ddenorm/spectrum.hpp"

namespace ddenorm {

struct Equilibrium {
    Vec x;
    Vec alpha;
    double residual = 0.0;
};

struct HopfPoint {
    Equilibrium eq;
    double omega = 0.0;
    Eigenpair pair;      // lambda = i omega
    int free_param = -1; // parameter index used for correction
    int newton_iters = 0;
    double residual = 0.0;
};

struct FoldPoint {
    Equilibrium eq;
    Eigenpair pair; // lambda = 0
    int free_param = -1;
    int newton_iters = 0;
    double residual = 0.0;
};

enum class Codim2Kind { genh, zeho, hoho, thopf };
std::string codim2_kind_name(Codim2Kind k);

struct CodimTwoPoint {
    Codim2Kind kind;
    Equilibrium eq;
    // genh: pair1 with lambda = i omega0.
    // zeho/thopf: pair0 (lambda = 0) and pair1 (lambda = i omega0).
    // hoho: pair1 (i omega1), pair2 (i omega2) with omega1 > omega2 > 0.
    Eigenpair pair0, pair1, pair2;
    double omega0 = 0.0, omega1 = 0.0, omega2 = 0.0;
    double L1 = 0.0; // raw first Lyapunov coefficient at classification (genh)
};

struct HopfTests {
    double L1 = 0.0;
    double nearest_real_eig = 0.0; // NaN when no real root in the window
    double second_pair_re = 0.0;   // NaN when no second pair in the window
};

Equilibrium correct_equilibrium(const DelayModel& model, const Vec& alpha,
                                const Vec& x0);

// Newton on (x, alpha[free_param], omega, q): f = 0, Delta(i omega) q = 0,
// c q = 1.
HopfPoint correct_hopf(const DelayModel& model, const HopfPoint& guess,
                       int free_param);
// Same with lambda = 0 and real q.
FoldPoint correct_fold(const DelayModel& model, const FoldPoint& guess,
                       int free_param);

HopfPoint make_hopf_guess(const DelayModel& model, const Vec& alpha,
                          const Vec& x, double omega);

// First Lyapunov coefficient l1 = Re c1 / omega via the order-3 machinery.
double first_lyapunov(const DelayModel& model, const HopfPoint& pt);

HopfTests hopf_tests(const DelayModel& model, const HopfPoint& pt);

CodimTwoPoint classify_codim2(const DelayModel& model, const Equilibrium& eq,
                              double l1_tol = 1e-6);
CodimTwoPoint classify_codim2(const DelayModel& model, const HopfPoint& pt,
                              double l1_tol = 1e-6);
CodimTwoPoint classify_codim2(const DelayModel& model, const FoldPoint& pt,
                              double l1_tol = 1e-6);

} // namespace ddenorm

#endif
