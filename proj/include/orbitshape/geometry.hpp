#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>

#include "orbitshape/errors.hpp"
#include "orbitshape/image.hpp"
#include "orbitshape/linalg.hpp"

namespace orbitshape {

inline constexpr double kOrthogonalityTolerance = 1e-9;

/// An element (A, u) of GL(k) x| R^k acting by x -> A x + u.
class AffineElement {
 public:
  AffineElement(Matrix linear, Vector translation)
      : linear_(std::move(linear)), translation_(std::move(translation)) {
    if (linear_.rows() != linear_.cols() || linear_.rows() < 1) {
      throw DimensionMismatch("affine linear part must be square and nonempty, got " +
                              std::to_string(linear_.rows()) + "x" + std::to_string(linear_.cols()));
    }
    if (translation_.size() != linear_.rows()) {
      throw DimensionMismatch("affine translation has length " + std::to_string(translation_.size()) +
                              ", expected " + std::to_string(linear_.rows()));
    }
    if (!linear_.allFinite() || !translation_.allFinite()) {
      throw InvalidArgument("affine element has non-finite entries");
    }
    const Vector sigma = thin_svd(linear_).singulars;
    if (numerical_rank(sigma) < linear_.rows()) {
      throw SingularLinearPart("affine linear part is numerically singular");
    }
  }

  static AffineElement identity(Index k) { return {Matrix::Identity(k, k), Vector::Zero(k)}; }
  static AffineElement translation(Vector u) {
    const Index k = u.size();
    return {Matrix::Identity(k, k), std::move(u)};
  }

  const Matrix& linear() const noexcept { return linear_; }
  const Vector& translation() const noexcept { return translation_; }
  Index dim() const noexcept { return linear_.rows(); }

 private:
  Matrix linear_;
  Vector translation_;
};

/// An element (Q, u) of the motion group O(k) x| R^k.
///
/// `proper()` is true for rotations (det Q = +1) and false for improper
/// motions that include a reflection.
class MotionElement {
 public:
  MotionElement(Matrix rotation, Vector translation)
      : rotation_(std::move(rotation)), translation_(std::move(translation)) {
    const Index k = rotation_.rows();
    if (rotation_.cols() != k || k < 1) throw DimensionMismatch("motion rotation must be square and nonempty");
    if (translation_.size() != k) throw DimensionMismatch("motion translation length does not match rotation");
    if (!rotation_.allFinite() || !translation_.allFinite()) {
      throw InvalidArgument("motion element has non-finite entries");
    }
    const double drift = (rotation_.transpose() * rotation_ - Matrix::Identity(k, k)).cwiseAbs().maxCoeff();
    if (drift > kOrthogonalityTolerance) {
      throw InvalidArgument("motion rotation is not orthogonal (max |Q^T Q - I| = " + std::to_string(drift) + ")");
    }
    const double det = rotation_.determinant();
    if (std::abs(det - 1.0) <= kOrthogonalityTolerance) {
      proper_ = true;
    } else if (std::abs(det + 1.0) <= kOrthogonalityTolerance) {
      proper_ = false;
    } else {
      throw InvalidArgument("motion rotation determinant is not +-1");
    }
  }

  static MotionElement identity(Index k) { return {Matrix::Identity(k, k), Vector::Zero(k)}; }

  const Matrix& rotation() const noexcept { return rotation_; }
  const Vector& translation() const noexcept { return translation_; }
  bool proper() const noexcept { return proper_; }
  Index dim() const noexcept { return rotation_.rows(); }

  AffineElement as_affine() const { return {rotation_, translation_}; }
  operator AffineElement() const { return as_affine(); }

 private:
  Matrix rotation_;
  Vector translation_;
  bool proper_ = true;
};

/// (A, u) o (B, w) = (AB, Aw + u): apply `second` first, then `first`.
inline AffineElement compose(const AffineElement& first, const AffineElement& second) {
  if (first.dim() != second.dim()) throw DimensionMismatch("compose: dimensions differ");
  return {first.linear() * second.linear(), first.linear() * second.translation() + first.translation()};
}

inline MotionElement compose(const MotionElement& first, const MotionElement& second) {
  if (first.dim() != second.dim()) throw DimensionMismatch("compose: dimensions differ");
  return {first.rotation() * second.rotation(),
          first.rotation() * second.translation() + first.translation()};
}

/// (A, u)^{-1} = (A^{-1}, -A^{-1} u).
inline AffineElement inverse(const AffineElement& g) {
  Eigen::FullPivLU<Matrix> lu(g.linear());
  if (!lu.isInvertible()) throw SingularLinearPart("inverse: linear part is singular");
  Matrix inv = lu.inverse();
  Vector t = -(inv * g.translation());
  return {std::move(inv), std::move(t)};
}

inline MotionElement inverse(const MotionElement& g) {
  Matrix qt = g.rotation().transpose();
  Vector t = -(qt * g.translation());
  return {std::move(qt), std::move(t)};
}

inline Vector apply_to_point(const AffineElement& g, const Vector& x) {
  if (x.size() != g.dim()) {
    throw DimensionMismatch("apply_to_point: point has dimension " + std::to_string(x.size()) +
                            ", transform has " + std::to_string(g.dim()));
  }
  return g.linear() * x + g.translation();
}

/// Left action on images: every point is mapped by g, i.e. Y A^T + 1 u^T.
/// The right action Y -> (Y - 1 u^T) A^{-T} is act_on_image(inverse(g), Y);
/// both have the same orbits.
inline LabeledImage act_on_image(const AffineElement& g, const LabeledImage& image) {
  if (image.k() != g.dim()) {
    throw DimensionMismatch("act_on_image: image has dimension " + std::to_string(image.k()) +
                            ", transform has " + std::to_string(g.dim()));
  }
  Matrix out = image.points() * g.linear().transpose();
  out.rowwise() += g.translation().transpose();
  return LabeledImage(std::move(out));
}

/// The (k+1) x (k+1) homogeneous matrix [[A, u], [0, 1]].
inline Matrix embed_homogeneous(const AffineElement& g) {
  const Index k = g.dim();
  Matrix h = Matrix::Zero(k + 1, k + 1);
  h.topLeftCorner(k, k) = g.linear();
  h.topRightCorner(k, 1) = g.translation();
  h(k, k) = 1.0;
  return h;
}

}  // namespace orbitshape
