#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>

#include "orbitshape/errors.hpp"

namespace orbitshape {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// An ordered list of n labeled points in R^k stored as an n x k matrix.
///
/// Row i holds the coordinates of point i. Row order carries the labels, so
/// nothing in the library ever permutes rows.
class LabeledImage {
 public:
  explicit LabeledImage(Matrix points) : points_(std::move(points)) {
    if (points_.rows() < 1 || points_.cols() < 1) {
      throw InvalidArgument("image needs at least one point and one dimension, got " +
                            std::to_string(points_.rows()) + "x" + std::to_string(points_.cols()));
    }
    if (!points_.allFinite()) throw InvalidArgument("image has non-finite coordinates");
  }

  const Matrix& points() const noexcept { return points_; }
  Index n() const noexcept { return points_.rows(); }
  Index k() const noexcept { return points_.cols(); }
  Vector point(Index i) const { return points_.row(i).transpose(); }

  friend bool operator==(const LabeledImage& a, const LabeledImage& b) {
    return a.points_.rows() == b.points_.rows() && a.points_.cols() == b.points_.cols() &&
           a.points_ == b.points_;
  }

 private:
  Matrix points_;
};

/// Uniform scaling a*Y.
inline LabeledImage scaled(const LabeledImage& image, double factor) {
  return LabeledImage(factor * image.points());
}

}  // namespace orbitshape
