#ifndef DDENORM_SPECTRUM_HPP
#define DDENORM_SPECTRUM_HPP

#include <cstdint>
#include <vector>

#include "ddenorm/charlin.hpp"

namespace ddenorm {

// Normalized eigenvalue triple: Delta(lambda) q = 0, p Delta(lambda) = 0,
// p Delta'(lambda) q = 1; the entry of q with largest modulus is real and
// positive.
struct Eigenpair {
    Cplx lambda;
    CVec q;
    CVec p;
    bool normalized = true;
    bool conjugate_pair = false; // reported once with Im(lambda) > 0
};

// Seed for the fixed random borders used in Newton refinements and defining
// systems (reproducible; recorded in CLI metadata).
void set_border_seed(std::uint64_t seed);
std::uint64_t border_seed();

int default_collocation_size(const CharLinearization& lin);

// Eigenvalues of the N-point Chebyshev pseudospectral discretization of the
// generator on [-tau_max, 0], sorted by descending real part.
std::vector<Cplx> spectrum_approx(const CharLinearization& lin, int N = 0);

Eigenpair refine_eigenpair(const CharLinearization& lin, Cplx lambda0);

// Refined k rightmost distinct roots; conjugate pairs reported once.
std::vector<Eigenpair> rightmost(const CharLinearization& lin, int k, int N = 0);

} // namespace ddenorm

#endif
