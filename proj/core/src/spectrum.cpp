#include "ddenorm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace ddenorm {

namespace {
std::uint64_t g_border_seed = 0x5dde0123u;

CVec random_complex_vector(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    CVec v(n);
    for (int i = 0; i < n; ++i) v(i) = Cplx(dist(rng), dist(rng));
    return v / v.norm();
}
} // namespace

void set_border_seed(std::uint64_t seed) { g_border_seed = seed; }
std::uint64_t border_seed() { return g_border_seed; }

int default_collocation_size(const CharLinearization& lin) {
    double mmax = 0.0;
    for (const Mat& M : lin.M) mmax = std::max(mmax, M.norm());
    return std::max(20, static_cast<int>(std::ceil(10.0 + 2.0 * lin.tau_max() * mmax)));
}

std::vector<Cplx> spectrum_approx(const CharLinearization& lin, int N) {
    if (N == 0) N = default_collocation_size(lin);
    if (N < 5) throw InvalidInput("spectrum_approx: N must be >= 5");
    const int n = lin.n;
    const double h = lin.tau_max();

    std::vector<Cplx> out;
    if (h == 0.0) {
        // No delays: the generator is the matrix M_0.
        Eigen::EigenSolver<Mat> es(lin.M[0]);
        for (int i = 0; i < n; ++i) out.push_back(es.eigenvalues()(i));
    } else {
        // Chebyshev points theta_i = h (cos(i pi / N) - 1)/2 in [-h, 0],
        // theta_0 = 0; standard differentiation matrix, scaled.
        Vec x(N + 1), theta(N + 1);
        for (int i = 0; i <= N; ++i) {
            x(i) = std::cos(std::numbers::pi * i / N);
            theta(i) = h * (x(i) - 1.0) / 2.0;
        }
        Mat D = Mat::Zero(N + 1, N + 1);
        auto cc = [N](int i) { return (i == 0 || i == N) ? 2.0 : 1.0; };
        for (int i = 0; i <= N; ++i) {
            double diag = 0.0;
            for (int j = 0; j <= N; ++j) {
                if (i == j) continue;
                D(i, j) = (cc(i) / cc(j)) * (((i + j) % 2 == 0) ? 1.0 : -1.0) /
                          (x(i) - x(j));
                diag -= D(i, j);
            }
            D(i, i) = diag;
        }
        D *= 2.0 / h;

        Mat A = Mat::Zero(n * (N + 1), n * (N + 1));
        for (int i = 1; i <= N; ++i)
            for (int j = 0; j <= N; ++j)
                A.block(i * n, j * n, n, n) = D(i, j) * Mat::Identity(n, n);
        // Boundary row: v'(0) = sum_j M_j v(-tau_j) via barycentric
        // interpolation at -tau_j.
        for (size_t jd = 0; jd < lin.tau.size(); ++jd) {
            const double t = -lin.tau[jd];
            // barycentric weights for Chebyshev-Lobatto points
            Vec L = Vec::Zero(N + 1);
            int at_node = -1;
            for (int i = 0; i <= N; ++i)
                if (std::abs(t - theta(i)) < 1e-14 * std::max(1.0, h)) at_node = i;
            if (at_node >= 0) {
                L(at_node) = 1.0;
            } else {
                double denom = 0.0;
                for (int i = 0; i <= N; ++i) {
                    double w = ((i % 2 == 0) ? 1.0 : -1.0) / cc(i);
                    L(i) = w / (t - theta(i));
                    denom += L(i);
                }
                L /= denom;
            }
            for (int i = 0; i <= N; ++i)
                A.block(0, i * n, n, n) += L(i) * lin.M[jd];
        }
        Eigen::EigenSolver<Mat> es(A);
        for (int i = 0; i < A.rows(); ++i) out.push_back(es.eigenvalues()(i));
    }
    std::sort(out.begin(), out.end(),
              [](Cplx a, Cplx b) { return a.real() > b.real(); });
    return out;
}

Eigenpair refine_eigenpair(const CharLinearization& lin, Cplx lambda0) {
    const int n = lin.n;
    std::mt19937_64 rng(g_border_seed);
    const CVec c = random_complex_vector(n, rng);
    const CVec bl = random_complex_vector(n, rng);
    const CVec dl = random_complex_vector(n, rng);

    // Initial right null vector from the smallest singular vector.
    Eigen::JacobiSVD<CMat> svd(delta(lin, lambda0), Eigen::ComputeFullV);
    CVec q = svd.matrixV().col(n - 1);
    Cplx lambda = lambda0;
    {
        const Cplx cq = cdot(c, q);
        if (std::abs(cq) < 1e-12)
            throw NoConvergence("refine_eigenpair: degenerate border");
        q /= cq;
    }

    bool converged = false;
    for (int it = 0; it < 20; ++it) {
        const CMat D = delta(lin, lambda);
        CVec F(n + 1);
        F.head(n) = D * q;
        F(n) = cdot(c, q) - 1.0;
        const double scale = std::max(1.0, D.norm());
        if (F.norm() <= 1e-12 * scale) {
            converged = true;
            break;
        }
        CMat J(n + 1, n + 1);
        J.topLeftCorner(n, n) = D;
        J.topRightCorner(n, 1) = delta_deriv(lin, lambda, 1) * q;
        J.bottomLeftCorner(1, n) = c.transpose();
        J(n, n) = 0.0;
        const CVec du = J.partialPivLu().solve(-F);
        q += du.head(n);
        lambda += du(n);
    }
    if (!converged) {
        const CMat D = delta(lin, lambda);
        if ((D * q).norm() > 1e-10 * std::max(1.0, D.norm()))
            throw NoConvergence("refine_eigenpair: no convergence in 20 iterations");
    }

    // Left null vector by one bordered solve on Delta^T.
    const CMat D = delta(lin, lambda);
    CMat Jt(n + 1, n + 1);
    Jt.topLeftCorner(n, n) = D.transpose();
    Jt.topRightCorner(n, 1) = bl;
    Jt.bottomLeftCorner(1, n) = dl.transpose();
    Jt(n, n) = 0.0;
    CVec rhs = CVec::Zero(n + 1);
    rhs(n) = 1.0;
    CVec p = Jt.partialPivLu().solve(rhs).head(n);

    // Normalization p Delta'(lambda) q = 1, then the phase convention.
    q /= q.norm();
    p /= p.norm();
    const Cplx nu = cdot(p, delta_deriv(lin, lambda, 1) * q);
    if (std::abs(nu) < 1e-10)
        throw DefectiveEigenvalue(
            "refine_eigenpair: p Delta'(lambda) q nearly zero");
    p /= nu;

    int imax = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(q(i)) > std::abs(q(imax))) imax = i;
    const Cplx ph = q(imax) / std::abs(q(imax));
    q /= ph;
    p *= ph;

    if (std::abs(lambda.imag()) < 1e-9 * std::max(1.0, std::abs(lambda))) {
        // Real eigenvalue of a real system: keep everything real.
        lambda = Cplx(lambda.real(), 0.0);
        Vec qr = q.real();
        Vec pr = p.real();
        const CMat D1 = delta_deriv(lin, lambda, 1);
        const double nur = (pr.transpose() * D1.real() * qr)(0, 0);
        pr /= nur;
        q = qr.cast<Cplx>();
        p = pr.cast<Cplx>();
    }
    Eigenpair pair;
    pair.lambda = lambda;
    pair.q = q;
    pair.p = p;
    pair.normalized = true;
    pair.conjugate_pair = lambda.imag() > 1e-9 * std::max(1.0, std::abs(lambda));
    return pair;
}

std::vector<Eigenpair> rightmost(const CharLinearization& lin, int k, int N) {
    if (k < 1) throw InvalidInput("rightmost: k must be >= 1");
    std::vector<Cplx> approx = spectrum_approx(lin, N);
    std::vector<Eigenpair> out;
    for (Cplx z : approx) {
        if (static_cast<int>(out.size()) >= k) break;
        if (z.imag() < -1e-9 * std::max(1.0, std::abs(z))) continue;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) continue;
        Eigenpair pair;
        try {
            pair = refine_eigenpair(lin, z);
        } catch (const NoConvergence&) {
            continue; // spurious discretization eigenvalue
        } catch (const DefectiveEigenvalue&) {
            continue;
        }
        if (pair.lambda.imag() < 0.0) {
            pair.lambda = std::conj(pair.lambda);
            pair.q = pair.q.conjugate();
            pair.p = pair.p.conjugate();
            pair.conjugate_pair = true;
        }
        bool dup = false;
        for (const Eigenpair& prev : out)
            if (std::abs(prev.lambda - pair.lambda) <
                1e-6 * std::max(1.0, std::abs(pair.lambda)))
                dup = true;
        if (!dup) out.push_back(pair);
    }
    std::sort(out.begin(), out.end(), [](const Eigenpair& a, const Eigenpair& b) {
        return a.lambda.real() > b.lambda.real();
    });
    return out;
}

} // namespace ddenorm
