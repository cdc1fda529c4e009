#pragma once

// Shared fixtures for the test suites.

#include <cmath>

#include "povmc/compat.hpp"
#include "povmc/random.hpp"

namespace povmc::testing {

inline Matrix pauli_x() { Matrix m(2, 2); m << 0, 1, 1, 0; return m; }
inline Matrix pauli_y() { Matrix m(2, 2); m << 0, cplx(0, -1), cplx(0, 1), 0; return m; }
inline Matrix pauli_z() { Matrix m(2, 2); m << 1, 0, 0, -1; return m; }

/// {(I + eta s)/2, (I - eta s)/2}.
inline EffectList binary(const Matrix& s, double eta = 1.0) {
  const Matrix i = Matrix::Identity(2, 2);
  return {(i + eta * s) / 2.0, (i - eta * s) / 2.0};
}

/// Jointly measurable set built as a post-processing of a random parent:
/// M_{a|x} = sum_l p(a|x,l) G_l.
inline MeasurementData random_jm_set(int d, int settings, int outcomes, int parent_outcomes, Rng& rng) {
  const auto parent = random_povm(d, parent_outcomes, rng);
  MeasurementData out(settings, EffectList(outcomes, Matrix::Zero(d, d)));
  for (int l = 0; l < parent_outcomes; ++l)
    for (int x = 0; x < settings; ++x) {
      const auto p = random_distribution(outcomes, rng);
      for (int a = 0; a < outcomes; ++a) out[x][a] += p[a] * parent[l];
    }
  return out;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace povmc::testing
