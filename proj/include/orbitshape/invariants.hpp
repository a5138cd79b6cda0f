#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "orbitshape/errors.hpp"
#include "orbitshape/image.hpp"
#include "orbitshape/linalg.hpp"

namespace orbitshape {

/// The complete motion-group invariant of an n-point image: the n x n Gram
/// matrix A = Y_c Y_c^T of the centred image Y_c.
///
/// It is symmetric positive semidefinite with the all-ones vector in its
/// kernel. The semi-axis lengths of the associated ellipsoid (the singular
/// values of Y_c, s = min(n, k) of them) are carried alongside, because taking
/// square roots of the Gram eigenvalues would lose half the digits of the
/// small ones.
class GramInvariant {
 public:
  /// Validates an externally supplied Gram matrix for an image in R^k_ambient.
  static GramInvariant from_matrix(Matrix gram, Index k_ambient) {
    const Index n = gram.rows();
    if (n < 1 || gram.cols() != n) throw InvalidArgument("Gram matrix must be square and nonempty");
    if (k_ambient < 1) throw InvalidArgument("ambient dimension must be positive");
    if (!gram.allFinite()) throw InvalidArgument("Gram matrix has non-finite entries");
    const double norm = gram.norm();
    if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + norm)) {
      throw InvalidArgument("Gram matrix is not symmetric");
    }
    if ((gram * Vector::Ones(n)).norm() > 1e-10 * (1.0 + norm)) {
      throw InvalidArgument("Gram matrix rows do not sum to zero");
    }
    gram = 0.5 * (gram + gram.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    Vector values = eig.eigenvalues().reverse();
    const double floor = 1e-10 * std::max(gram.trace(), 0.0);
    if (values(n - 1) < -floor) throw InvalidArgument("Gram matrix is not positive semidefinite");
    const Index s = std::min(n, k_ambient);
    const Index max_rank = std::min(n - 1, k_ambient);
    if (max_rank < n && values(max_rank) > floor) {
      throw InvalidArgument("Gram matrix rank exceeds min(n - 1, k)");
    }
    Vector lengths = values.head(s).cwiseMax(0.0).cwiseSqrt();
    return GramInvariant(std::move(gram), k_ambient, std::move(lengths));
  }

  const Matrix& gram() const noexcept { return gram_; }
  Index n() const noexcept { return gram_.rows(); }
  Index k_ambient() const noexcept { return k_ambient_; }
  /// Nonincreasing semi-axis lengths, s = min(n, k_ambient) entries.
  const Vector& axis_lengths() const noexcept { return axis_lengths_; }

 private:
  GramInvariant(Matrix gram, Index k_ambient, Vector axis_lengths)
      : gram_(std::move(gram)), k_ambient_(k_ambient), axis_lengths_(std::move(axis_lengths)) {}

  friend GramInvariant gram_invariant(const LabeledImage& image);
  friend GramInvariant rescaled(const GramInvariant& g, double scale);

  Matrix gram_;
  Index k_ambient_;
  Vector axis_lengths_;
};

inline GramInvariant gram_invariant(const LabeledImage& image) {
  const Matrix yc = center(image).points();
  const Index n = yc.rows();
  Matrix gram(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      const double d = yc.row(i).dot(yc.row(j));
      gram(i, j) = d;
      gram(j, i) = d;
    }
  }
  return GramInvariant(std::move(gram), image.k(), thin_svd(yc).singulars);
}

/// The invariant of the image scaled by 1/scale: Gram divided by scale^2.
inline GramInvariant rescaled(const GramInvariant& g, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidArgument("rescale factor must be positive");
  const double inv = 1.0 / scale;
  return GramInvariant(g.gram_ * (inv * inv), g.k_ambient_, g.axis_lengths_ * inv);
}

/// Semi-axis lengths, their multiplicities and principal directions.
struct EllipsoidSpectrum {
  Vector axis_lengths;  ///< s = min(n, k) nonincreasing values
  MultiplicityBlocks blocks;
  /// n x s orthonormal columns. Within a block of equal lengths only the
  /// spanned subspace is canonical.
  Matrix axes;
};

inline EllipsoidSpectrum ellipsoid_spectrum(const LabeledImage& image, double tol_group_rel = kDefaultGroupTolerance,
                                            double tol_rank_rel = kDefaultRankTolerance) {
  ThinSvd svd = thin_svd(center(image).points());
  EllipsoidSpectrum out;
  out.blocks = group_multiplicities(svd.singulars, tol_group_rel, tol_rank_rel);
  out.axis_lengths = std::move(svd.singulars);
  out.axes = std::move(svd.left);
  return out;
}

/// Builds Y = axes * diag(lengths) * frame^T + 1 translation^T, an image whose
/// ellipsoid has the requested semi-axes.
///
/// `axes` is n x s and `frame` is k x s with s = min(n, k). Columns of `axes`
/// paired with a nonzero length must be orthonormal and orthogonal to the
/// all-ones vector; `frame` must have orthonormal columns.
inline LabeledImage synthesize_image(const Matrix& axes, const Vector& lengths, const Matrix& frame,
                                     const Vector& translation) {
  const Index n = axes.rows();
  const Index k = frame.rows();
  const Index s = std::min(n, k);
  if (axes.cols() != s || frame.cols() != s || lengths.size() != s || translation.size() != k) {
    throw DimensionMismatch("synthesize_image: expected n x s axes, k x s frame and s lengths with s = min(n, k)");
  }
  for (Index i = 0; i < s; ++i) {
    if (!(lengths(i) >= 0.0)) throw InvalidArgument("synthesize_image: lengths must be nonnegative");
    if (i > 0 && lengths(i) > lengths(i - 1)) throw InvalidArgument("synthesize_image: lengths must be nonincreasing");
  }
  constexpr double tol = 1e-9;
  if ((frame.transpose() * frame - Matrix::Identity(s, s)).cwiseAbs().maxCoeff() > tol) {
    throw InvalidArgument("synthesize_image: frame columns are not orthonormal");
  }
  Index used = 0;
  while (used < s && lengths(used) > 0.0) ++used;
  const auto active = axes.leftCols(used);
  if (used > 0 && (active.transpose() * active - Matrix::Identity(used, used)).cwiseAbs().maxCoeff() > tol) {
    throw InvalidArgument("synthesize_image: axes are not orthonormal");
  }
  if (used > 0 && (active.transpose() * Vector::Ones(n)).cwiseAbs().maxCoeff() > tol * std::sqrt(double(n))) {
    throw InvalidArgument("synthesize_image: axes must be orthogonal to the all-ones vector");
  }
  Matrix y = active * lengths.head(used).asDiagonal() * frame.leftCols(used).transpose();
  if (used == 0) y = Matrix::Zero(n, k);
  y.rowwise() += translation.transpose();
  return LabeledImage(std::move(y));
}

enum class NormalizationScheme { MaxAxis, MeanAxis, GeomMeanAxis };

/// Gram invariant of the representative with unit scale, plus the scale c
/// that was divided out (normalized = G / c^2).
struct SimilarityInvariant {
  GramInvariant normalized_gram;
  NormalizationScheme scheme;
  double scale;
};

/// Scale of an ellipsoid under a normalization scheme:
///   MaxAxis      largest semi-axis,
///   MeanAxis     arithmetic mean of all s semi-axes (zeros included),
///   GeomMeanAxis geometric mean of the nonzero semi-axes.
inline double normalization_scale(const Vector& axis_lengths, NormalizationScheme scheme,
                                  double tol_rank_rel = kDefaultRankTolerance) {
  if (axis_lengths.size() == 0 || !(axis_lengths(0) > 0.0)) {
    throw DegenerateImage("all points coincide; the image has no scale");
  }
  switch (scheme) {
    case NormalizationScheme::MaxAxis:
      return axis_lengths(0);
    case NormalizationScheme::MeanAxis:
      return axis_lengths.mean();
    case NormalizationScheme::GeomMeanAxis: {
      const Index rank = numerical_rank(axis_lengths, tol_rank_rel);
      double log_sum = 0.0;
      for (Index i = 0; i < rank; ++i) log_sum += std::log(axis_lengths(i));
      return std::exp(log_sum / static_cast<double>(rank));
    }
  }
  throw InvalidArgument("unknown normalization scheme");
}

inline SimilarityInvariant similarity_normalize(const GramInvariant& g, NormalizationScheme scheme,
                                                double tol_rank_rel = kDefaultRankTolerance) {
  if (g.gram().cwiseAbs().maxCoeff() == 0.0) throw DegenerateImage("all points coincide; the image has no scale");
  const double c = normalization_scale(g.axis_lengths(), scheme, tol_rank_rel);
  return {rescaled(g, c), scheme, c};
}

}  // namespace orbitshape
