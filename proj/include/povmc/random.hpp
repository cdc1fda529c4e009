#pragma once

// Seeded random generators for states, measurements and channels. Used by
// the see-saw initialization and by the test suites.

#include <cstdint>
#include <random>
#include <vector>

#include "povmc/linalg.hpp"

namespace povmc {

using Rng = std::mt19937_64;

/// Entries i.i.d. standard complex Gaussian.
Matrix ginibre(int rows, int cols, Rng& rng);

/// Haar-distributed unitary (QR of a Ginibre matrix with the R-phase fix).
Matrix haar_unitary(int d, Rng& rng);

/// Haar-random unit vector.
Vector haar_vector(int d, Rng& rng);

/// Haar-random pure state on a bipartite space with Schmidt rank at most
/// `rank` (random rank-`rank` coefficient matrix).
Vector random_schmidt_rank_vector(const BipartiteShape& shape, int rank,
                                  Rng& rng);

/// Random full-rank density matrix (induced measure, environment d).
Matrix random_density(int d, Rng& rng);

/// Random full-rank density matrix whose smallest eigenvalue is at least
/// `floor` (mixture with the maximally mixed state).
Matrix random_faithful_density(int d, double floor, Rng& rng);

/// Random POVM with `outcomes` effects, full rank generically.
std::vector<Matrix> random_povm(int d, int outcomes, Rng& rng);

/// Random rank-1 projective measurement (Haar basis).
std::vector<Matrix> random_projective(int d, Rng& rng);

/// Random column-stochastic table p[a] for `outcomes` outcomes.
std::vector<double> random_distribution(int outcomes, Rng& rng);

/// Random CPTP Kraus operators d_in -> d_out with `count` operators, each of
/// rank at most `max_rank`.
std::vector<Matrix> random_kraus(int d_in, int d_out, int count, int max_rank,
                                 Rng& rng);

}  // namespace povmc
