#ifndef DDENORM_NMFM_HPP
#define DDENORM_NMFM_HPP

#include <array>

#include "ddenorm/points.hpp"

namespace ddenorm {

// Parameter-dependent normal form data at a generalized Hopf point.
struct GenHData {
    Vec alpha0;
    Vec xstar;
    std::array<int, 2> unfolding{};
    double omega0 = 0.0;
    Eigenpair pair;

    Cplx c1, c2;
    double L1 = 0.0, L2 = 0.0;

    Cplx gamma110, gamma101, gamma210, gamma201;
    Eigen::Matrix2d R;    // beta = R * alpha (unfolding coordinates)
    Eigen::Matrix2d Rinv; // columns K10, K01: alpha = K10 b1 + K01 b2
    double omega10 = 0.0, omega01 = 0.0; // omega01 = db1/dbeta2

    ExpPoly H2000, H1100, H3000, H2100, H2200, H3100;
    std::array<ExpPoly, 2> H00mu, H10mu, H20mu, H11mu; // mu = (1,0), (0,1)
};

// Fold-Hopf (zero-Hopf) / transcritical-Hopf normal form data.
struct ZeHoData {
    Vec alpha0;
    Vec xstar;
    std::array<int, 2> unfolding{};
    bool transcritical = false;
    double omega0 = 0.0;
    Eigenpair pair0; // lambda = 0, real
    Eigenpair pair1; // lambda = i omega0

    double g200 = 0.0, g011 = 0.0, g300 = 0.0, g111 = 0.0;
    Cplx g110, g210, g021;

    double s_product = 0.0; // g200 * g011
    int s_sign = 0;
    double theta0 = 0.0;
    double e0 = 0.0;

    Eigen::Vector2d s1, s2;       // orthogonal frame (generic case)
    Eigen::Vector4d deltas;       // delta_1..delta_4 (generic case)
    Eigen::Vector2d K10, K01;     // alpha = K10 b1 + K01 b2
    double omega1 = 0.0, omega2 = 0.0;

    Vec r1, r2;
    ExpPoly r3;
    ExpPoly H20000, H02000, H11000, H01100, H00010, H00001;
};

// Hopf-Hopf normal form data.
struct HoHoData {
    Vec alpha0;
    Vec xstar;
    std::array<int, 2> unfolding{};
    double omega1 = 0.0, omega2 = 0.0; // omega1 > omega2 > 0
    Eigenpair pair1, pair2;

    Cplx g2100, g1011, g1110, g0021;
    double theta0 = 0.0, delta0 = 0.0;

    Eigen::Matrix2cd Gamma;
    Eigen::Vector2d K10, K01;
    double b11 = 0.0, b12 = 0.0, b21 = 0.0, b22 = 0.0;

    ExpPoly H110000, H200000, H101000, H001100, H100100, H002000;
    std::array<ExpPoly, 2> H0000mu;
};

GenHData genh_normal_form(const DelayModel& model, const CodimTwoPoint& pt,
                          std::array<int, 2> unfolding);
// Handles both the generic fold-Hopf and the transcritical variant
// (selected by pt.kind).
ZeHoData zeho_normal_form(const DelayModel& model, const CodimTwoPoint& pt,
                          std::array<int, 2> unfolding);
HoHoData hoho_normal_form(const DelayModel& model, const CodimTwoPoint& pt,
                          std::array<int, 2> unfolding);

// Embed a direction in unfolding coordinates into full parameter space.
Vec embed_unfolding(int p, std::array<int, 2> unfolding,
                    const Eigen::Vector2d& v);

} // namespace ddenorm

#endif
