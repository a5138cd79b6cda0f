#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>

#include "orbitshape/errors.hpp"
#include "orbitshape/geometry.hpp"
#include "orbitshape/image.hpp"
#include "orbitshape/invariants.hpp"
#include "orbitshape/linalg.hpp"

namespace orbitshape {

inline constexpr double kDefaultEquivalenceTolerance = 1e-8;

enum class GroupTag { Motion, ProperMotion, Similarity };

enum class DistanceKind { GramFrobenius, Procrustes };

/// Best transform carrying Y1 onto Y2: Y2 ~ scale * Y1 Q^T + 1 u^T.
struct AlignmentResult {
  MotionElement transform;
  double scale = 1.0;  ///< 1 unless group_tag is Similarity
  double residual = 0.0;
  GroupTag group_tag = GroupTag::Motion;

  /// Maps an image with the recovered transform (scaling first).
  LabeledImage apply(const LabeledImage& image) const { return act_on_image(transform, scaled(image, scale)); }
};

struct OrbitDistance {
  double value;
  DistanceKind kind;
  GroupTag group_tag;
};

namespace detail {

inline void require_same_shape(const LabeledImage& a, const LabeledImage& b, const char* op) {
  if (a.n() != b.n() || a.k() != b.k()) {
    throw ShapeMismatch(std::string(op) + ": images are " + std::to_string(a.n()) + "x" + std::to_string(a.k()) +
                        " and " + std::to_string(b.n()) + "x" + std::to_string(b.k()));
  }
}

inline bool within_relative(const Matrix& a, const Matrix& b, double tol) {
  return (a - b).norm() <= tol * (1.0 + a.norm());
}

}  // namespace detail

/// Same orbit under O(k) x| R^k: the Gram invariants agree to tol_eq relative.
inline bool motion_equivalent(const LabeledImage& y1, const LabeledImage& y2,
                              double tol_eq = kDefaultEquivalenceTolerance) {
  detail::require_same_shape(y1, y2, "motion_equivalent");
  return detail::within_relative(gram_invariant(y1).gram(), gram_invariant(y2).gram(), tol_eq);
}

/// Least-squares fit of Y2 by a transform of Y1 from `group` (orthogonal
/// Procrustes; with scale for Similarity, det Q = +1 for ProperMotion).
inline AlignmentResult align(const LabeledImage& y1, const LabeledImage& y2, GroupTag group = GroupTag::Motion) {
  detail::require_same_shape(y1, y2, "align");
  const Index k = y1.k();
  const Matrix c1 = center(y1).points();
  const Matrix c2 = center(y2).points();
  // Identical inputs: return the exact identity rather than a rounded one.
  if (y1 == y2 && (group != GroupTag::Similarity || c1.squaredNorm() > 0.0)) {
    return {MotionElement::identity(k), 1.0, 0.0, group};
  }

  const ThinSvd svd = thin_svd(c1.transpose() * c2);
  Matrix v = svd.right;
  Vector sigma = svd.singulars;
  Matrix q = v * svd.left.transpose();
  if (group == GroupTag::ProperMotion && q.determinant() < 0.0) {
    v.col(k - 1) = -v.col(k - 1);
    sigma(k - 1) = -sigma(k - 1);
    q = v * svd.left.transpose();
  }

  double scale = 1.0;
  if (group == GroupTag::Similarity) {
    const double spread = c1.squaredNorm();
    if (spread == 0.0) throw DegenerateImage("align: all points of the source image coincide");
    scale = sigma.sum() / spread;
  }

  Vector u = centroid(y2) - scale * (q * centroid(y1));
  MotionElement transform(std::move(q), std::move(u));
  AlignmentResult out{std::move(transform), scale, 0.0, group};
  out.residual = (out.apply(y1).points() - y2.points()).norm();
  return out;
}

/// Same orbit under SO(k) x| R^k.
///
/// Motion equivalence plus a chirality check. When the centred image has rank
/// below k a reflection fixing its span exists, so any motion can be made
/// proper.
inline bool proper_motion_equivalent(const LabeledImage& y1, const LabeledImage& y2,
                                     double tol_eq = kDefaultEquivalenceTolerance,
                                     double tol_rank_rel = kDefaultRankTolerance) {
  detail::require_same_shape(y1, y2, "proper_motion_equivalent");
  if (!motion_equivalent(y1, y2, tol_eq)) return false;
  if (numerical_rank(thin_svd(center(y1).points()).singulars, tol_rank_rel) < y1.k()) return true;
  return align(y1, y2, GroupTag::Motion).transform.proper();
}

/// Same orbit under motions composed with positive scalings. Both images must
/// have distinct points.
inline bool similarity_equivalent(const LabeledImage& y1, const LabeledImage& y2,
                                  NormalizationScheme scheme = NormalizationScheme::GeomMeanAxis,
                                  double tol_eq = kDefaultEquivalenceTolerance) {
  detail::require_same_shape(y1, y2, "similarity_equivalent");
  const SimilarityInvariant a = similarity_normalize(gram_invariant(y1), scheme);
  const SimilarityInvariant b = similarity_normalize(gram_invariant(y2), scheme);
  return detail::within_relative(a.normalized_gram.gram(), b.normalized_gram.gram(), tol_eq);
}

/// Frobenius distance between Gram invariants. A metric on motion orbits of
/// n-point images; the ambient dimensions may differ.
inline OrbitDistance orbit_distance_gram(const LabeledImage& y1, const LabeledImage& y2) {
  if (y1.n() != y2.n()) {
    throw ShapeMismatch("orbit_distance_gram: point counts differ (" + std::to_string(y1.n()) + " vs " +
                        std::to_string(y2.n()) + ")");
  }
  const double d = (gram_invariant(y1).gram() - gram_invariant(y2).gram()).norm();
  return {d, DistanceKind::GramFrobenius, GroupTag::Motion};
}

/// Frobenius distance between scale-normalized Gram invariants, a metric on
/// similarity orbits. Defined for Motion (same as the two-argument form) and
/// Similarity; the Gram matrix cannot see chirality, so ProperMotion is rejected.
inline OrbitDistance orbit_distance_gram(const LabeledImage& y1, const LabeledImage& y2, GroupTag group,
                                         NormalizationScheme scheme = NormalizationScheme::GeomMeanAxis) {
  switch (group) {
    case GroupTag::Motion:
      return orbit_distance_gram(y1, y2);
    case GroupTag::Similarity: {
      if (y1.n() != y2.n()) throw ShapeMismatch("orbit_distance_gram: point counts differ");
      const Matrix a = similarity_normalize(gram_invariant(y1), scheme).normalized_gram.gram();
      const Matrix b = similarity_normalize(gram_invariant(y2), scheme).normalized_gram.gram();
      return {(a - b).norm(), DistanceKind::GramFrobenius, GroupTag::Similarity};
    }
    case GroupTag::ProperMotion:
      break;
  }
  throw InvalidArgument("the Gram metric does not distinguish proper from improper motions");
}

/// Residual of the best alignment of Y1 onto Y2.
inline OrbitDistance orbit_distance_procrustes(const LabeledImage& y1, const LabeledImage& y2,
                                               GroupTag group = GroupTag::Motion) {
  return {align(y1, y2, group).residual, DistanceKind::Procrustes, group};
}

}  // namespace orbitshape
