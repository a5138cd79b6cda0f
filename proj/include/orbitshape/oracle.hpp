#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "orbitshape/errors.hpp"
#include "orbitshape/image.hpp"
#include "orbitshape/linalg.hpp"

// Brute-force reference computations. None of these go through thin_svd, so
// they can be used to check it.
namespace orbitshape::oracle {

/// Search space of brute_force_min_residual. For k = 2 the rotations are
/// angle_count equally spaced angles on [0, 2pi); for k = 3 they are
/// sample_count rotations from uniformly random unit quaternions.
struct GridSpec {
  std::int64_t angle_count = 100000;
  bool include_reflections = true;
  std::int64_t sample_count = 20000;
  std::uint64_t seed = 0;

  void validate() const {
    if (angle_count < 4) throw InvalidArgument("GridSpec: angle_count must be at least 4");
    if (sample_count < 1) throw InvalidArgument("GridSpec: sample_count must be positive");
  }
};

namespace detail {

inline double residual_under(const Matrix& c1, const Matrix& c2, const Eigen::Ref<const Matrix>& r) {
  double sum = 0.0;
  for (Index i = 0; i < c1.rows(); ++i) {
    for (Index a = 0; a < c1.cols(); ++a) {
      double mapped = 0.0;
      for (Index b = 0; b < c1.cols(); ++b) mapped += r(a, b) * c1(i, b);
      const double diff = mapped - c2(i, a);
      sum += diff * diff;
    }
  }
  return std::sqrt(sum);
}

}  // namespace detail

/// min over the grid of ||center(Y1) R^T - center(Y2)||_F, R ranging over the
/// gridded rotations and, when enabled, their compositions with a reflection.
/// Always an upper bound on the exact Procrustes distance.
inline double brute_force_min_residual(const LabeledImage& y1, const LabeledImage& y2, const GridSpec& spec) {
  spec.validate();
  if (y1.n() != y2.n() || y1.k() != y2.k()) throw ShapeMismatch("brute_force_min_residual: image shapes differ");
  const Index k = y1.k();
  if (k != 2 && k != 3) {
    throw UnsupportedDimension("brute_force_min_residual supports k = 2 or 3, got k = " + std::to_string(k));
  }
  const Matrix c1 = center(y1).points();
  const Matrix c2 = center(y2).points();

  Matrix flip = Matrix::Identity(k, k);
  flip(k - 1, k - 1) = -1.0;

  double best = std::numeric_limits<double>::infinity();
  auto visit = [&](const Matrix& r) {
    best = std::min(best, detail::residual_under(c1, c2, r));
    if (spec.include_reflections) best = std::min(best, detail::residual_under(c1, c2, r * flip));
  };

  if (k == 2) {
    Matrix r(2, 2);
    for (std::int64_t j = 0; j < spec.angle_count; ++j) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(spec.angle_count);
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      r << c, -s, s, c;
      visit(r);
    }
    return best;
  }

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix r(3, 3);
  visit(Matrix::Identity(3, 3));
  for (std::int64_t j = 0; j < spec.sample_count; ++j) {
    double w = normal(rng), x = normal(rng), y = normal(rng), z = normal(rng);
    const double len = std::sqrt(w * w + x * x + y * y + z * z);
    if (len == 0.0) continue;
    w /= len, x /= len, y /= len, z /= len;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    visit(r);
  }
  return best;
}

/// Eigenvalues of a symmetric matrix by the classical cyclic Jacobi method,
/// sorted nonincreasing.
inline Vector jacobi_eigenvalues(const Matrix& s) {
  const Index n = s.rows();
  if (s.cols() != n) throw InvalidArgument("jacobi_eigenvalues: matrix is not square");
  if (!s.allFinite()) throw InvalidArgument("jacobi_eigenvalues: non-finite entries");
  double scale = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) scale += s(i, j) * s(i, j);
  }
  scale = std::sqrt(scale);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < i; ++j) {
      if (std::abs(s(i, j) - s(j, i)) > 1e-12 * (1.0 + scale)) {
        throw InvalidArgument("jacobi_eigenvalues: matrix is not symmetric");
      }
    }
  }

  std::vector<std::vector<double>> a(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(n)));
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) a[i][j] = 0.5 * (s(i, j) + s(j, i));
  }

  const double target = std::numeric_limits<double>::epsilon() * scale;
  auto off_norm = [&] {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (i != j) sum += a[i][j] * a[i][j];
      }
    }
    return std::sqrt(sum);
  };

  int sweep = 0;
  while (off_norm() > target) {
    if (sweep++ >= kMaxJacobiSweeps) {
      throw ConvergenceFailure("jacobi_eigenvalues did not converge within " + std::to_string(kMaxJacobiSweeps) +
                               " sweeps");
    }
    for (std::size_t p = 0; p + 1 < a.size(); ++p) {
      for (std::size_t q = p + 1; q < a.size(); ++q) {
        if (a[p][q] == 0.0) continue;
        // Rotation angle that annihilates a[p][q].
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(1.0, theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = t * c;
        for (std::size_t r = 0; r < a.size(); ++r) {
          const double arp = a[r][p];
          const double arq = a[r][q];
          a[r][p] = c * arp - sn * arq;
          a[r][q] = sn * arp + c * arq;
        }
        for (std::size_t r = 0; r < a.size(); ++r) {
          const double apr = a[p][r];
          const double aqr = a[q][r];
          a[p][r] = c * apr - sn * aqr;
          a[q][r] = sn * apr + c * aqr;
        }
      }
    }
  }

  std::vector<double> values(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) values[i] = a[i][i];
  std::sort(values.begin(), values.end(), std::greater<>());
  return Eigen::Map<Vector>(values.data(), n);
}

}  // namespace orbitshape::oracle
