#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>

#include "orbitshape/geometry.hpp"
#include "orbitshape/image.hpp"

namespace orbitshape {

/// Random instance generators shared by the tests, the self-test and `gen`.
/// Every function draws only from the engine it is given.
using Rng = std::mt19937_64;

inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

/// Haar-distributed element of O(k): QR of a Gaussian matrix with the signs of
/// R's diagonal moved into Q.
inline Matrix random_orthogonal(Index k, Rng& rng) {
  const Matrix a = gaussian_matrix(k, k, rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(k, k);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < k; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

/// Haar-distributed element of SO(k).
inline Matrix random_rotation(Index k, Rng& rng) {
  Matrix q = random_orthogonal(k, rng);
  if (q.determinant() < 0.0) q.col(0) = -q.col(0);
  return q;
}

/// Vector with uniformly random direction and length uniform in [0, max_norm].
inline Vector random_vector_in_ball(Index k, double max_norm, Rng& rng) {
  Vector v = gaussian_matrix(k, 1, rng).col(0);
  while (v.norm() == 0.0) v = gaussian_matrix(k, 1, rng).col(0);
  std::uniform_real_distribution<double> radius(0.0, max_norm);
  return v.normalized() * radius(rng);
}

inline MotionElement random_motion(Index k, Rng& rng, double max_translation = 10.0, bool proper_only = false) {
  Matrix q = proper_only ? random_rotation(k, rng) : random_orthogonal(k, rng);
  return {std::move(q), random_vector_in_ball(k, max_translation, rng)};
}

/// n points with independent standard normal coordinates.
inline LabeledImage random_image(Index n, Index k, Rng& rng) { return LabeledImage(gaussian_matrix(n, k, rng)); }

/// n x cols matrix with orthonormal columns, all orthogonal to the all-ones
/// vector. Requires cols <= n - 1.
inline Matrix random_centered_frame(Index n, Index cols, Rng& rng) {
  Matrix a = gaussian_matrix(n, cols, rng);
  a.rowwise() -= a.colwise().mean();
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(n, cols);
}

}  // namespace orbitshape
