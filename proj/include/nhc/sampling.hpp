#pragma once

#include <cstdint>
#include <random>

#include "nhc/geometry.hpp"
#include "nhc/phasespace.hpp"

// Seeded generators for the randomized property suites.
namespace nhc::sampling {

using Rng = std::mt19937_64;

RMat random_symmetric(Rng& rng, Index k, double scale = 1.0);

/// Im B = A A^T / k + 1/2 I, Re B symmetric with entries of size ~ 1/2.
ShapeMatrix random_shape(Rng& rng, Index n);

PhasePoint random_phase_point(Rng& rng, Index n, double scale = 1.0);

/// Random constant H with Re H symmetric and Im H = -C C^T * damping (so
/// Im H is negative semidefinite); the linear term is zero unless requested.
QuadraticHamiltonian random_dissipative_hamiltonian(Rng& rng, Index n, double damping = 0.3,
                                                    bool linear_term = false);

/// exp(t Omega K) for a random real symmetric K; a real symplectic matrix.
RMat random_symplectic(Rng& rng, Index n, double t = 0.5);

}  // namespace nhc::sampling
