#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "orbitshape/errors.hpp"
#include "orbitshape/image.hpp"

namespace orbitshape {

inline constexpr double kDefaultRankTolerance = 1e-10;
inline constexpr double kDefaultGroupTolerance = 1e-8;
inline constexpr int kMaxJacobiSweeps = 100;

/// Centre of gravity of the points.
inline Vector centroid(const LabeledImage& image) {
  return image.points().colwise().mean().transpose();
}

/// The translate of `image` whose centroid is the origin, (I - 11^T/n) Y.
///
/// A column whose centred values are all at rounding level (every point shares
/// that coordinate) is returned as exact zeros, so coincident points give an
/// exactly zero result.
inline LabeledImage center(const LabeledImage& image) {
  const Matrix& y = image.points();
  const Vector mean = centroid(image);
#ifdef ORBITSHAPE_MUTATE_CENTERING
  // Deliberately wrong centring; only the mutation-check build defines this.
  Matrix out = y.rowwise() + mean.transpose();
#else
  Matrix out = y.rowwise() - mean.transpose();
#endif
  const double noise = 4.0 * static_cast<double>(y.rows() + 1) * std::numeric_limits<double>::epsilon();
  for (Index j = 0; j < out.cols(); ++j) {
    const double scale = y.col(j).cwiseAbs().maxCoeff();
    if (out.col(j).cwiseAbs().maxCoeff() <= noise * scale) out.col(j).setZero();
  }
  return LabeledImage(std::move(out));
}

/// Thin singular value decomposition M = left * diag(singulars) * right^T.
///
/// With s = min(rows, cols): left is rows x s, right is cols x s, both with
/// orthonormal columns; singulars are nonincreasing and nonnegative. The
/// largest-magnitude entry of every left column is positive (lowest index
/// wins ties), which makes the factorization deterministic.
struct ThinSvd {
  Matrix left;
  Vector singulars;
  Matrix right;
};

namespace detail {

// Hestenes one-sided Jacobi: rotates the columns of `work` (rows >= cols)
// until they are mutually orthogonal, accumulating the rotations in `frame`.
// Columns with norm at or below `negligible` are rounding debris and are left
// alone; rotating them against a parallel column only rescales them.
inline void orthogonalize_columns(Matrix& work, Matrix& frame, double negligible) {
  const Index cols = work.cols();
  frame.setIdentity(cols, cols);
  const double threshold = static_cast<double>(work.rows()) * std::numeric_limits<double>::epsilon();

  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p + 1 < cols; ++p) {
      for (Index q = p + 1; q < cols; ++q) {
        const double alpha = work.col(p).squaredNorm();
        const double beta = work.col(q).squaredNorm();
        if (std::sqrt(alpha) <= negligible || std::sqrt(beta) <= negligible) continue;
        const double gamma = work.col(p).dot(work.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= threshold * std::sqrt(alpha) * std::sqrt(beta)) continue;
        rotated = true;

        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::hypot(1.0, zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Index i = 0; i < work.rows(); ++i) {
          const double wp = work(i, p);
          const double wq = work(i, q);
          work(i, p) = c * wp - s * wq;
          work(i, q) = s * wp + c * wq;
        }
        for (Index i = 0; i < cols; ++i) {
          const double fp = frame(i, p);
          const double fq = frame(i, q);
          frame(i, p) = c * fp - s * fq;
          frame(i, q) = s * fp + c * fq;
        }
      }
    }
    if (!rotated) return;
  }
  throw ConvergenceFailure("one-sided Jacobi SVD did not converge within " +
                           std::to_string(kMaxJacobiSweeps) + " sweeps");
}

// Fills the columns of `basis` flagged in `missing` with unit vectors
// orthogonal to every other column. Each new column is the standard basis
// vector with the largest residual after projection (lowest index on ties).
inline void complete_orthonormal(Matrix& basis, const std::vector<bool>& missing) {
  const Index dim = basis.rows();
  std::vector<bool> filled(missing.size());
  for (std::size_t i = 0; i < missing.size(); ++i) filled[i] = !missing[i];

  auto residual = [&](Index candidate) {
    Vector v = Vector::Unit(dim, candidate);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < filled.size(); ++j) {
        if (!filled[j]) continue;
        const auto col = basis.col(static_cast<Index>(j));
        v -= col.dot(v) * col;
      }
    }
    return v;
  };

  for (std::size_t col = 0; col < missing.size(); ++col) {
    if (!missing[col]) continue;
    Vector best;
    double best_norm = 0.0;
    for (Index candidate = 0; candidate < dim; ++candidate) {
      Vector v = residual(candidate);
      const double norm = v.norm();
      if (norm > best_norm) {
        best_norm = norm;
        best = std::move(v);
      }
    }
    if (best_norm <= 0.0) throw ConvergenceFailure("could not complete an orthonormal basis");
    basis.col(static_cast<Index>(col)) = best / best_norm;
    filled[col] = true;
  }
}

}  // namespace detail

inline ThinSvd thin_svd(const Matrix& m) {
  if (!m.allFinite()) throw InvalidArgument("thin_svd: matrix has non-finite entries");
  const bool transposed = m.rows() < m.cols();
  Matrix work = transposed ? Matrix(m.transpose()) : m;
  const Index tall = work.rows();
  const Index s = work.cols();

  const double negligible = std::numeric_limits<double>::epsilon() * m.norm();
  Matrix frame;
  detail::orthogonalize_columns(work, frame, negligible);

  std::vector<double> norms(static_cast<std::size_t>(s));
  for (Index j = 0; j < s; ++j) norms[static_cast<std::size_t>(j)] = work.col(j).norm();
  std::vector<Index> order(static_cast<std::size_t>(s));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return norms[static_cast<std::size_t>(a)] > norms[static_cast<std::size_t>(b)];
  });

  // Columns this small carry no direction information; their left vectors are
  // replaced by an orthonormal completion.
  const double tiny = std::max(negligible, std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon());
  Matrix tall_basis(tall, s);
  Matrix short_basis(s, s);
  Vector singulars(s);
  std::vector<bool> missing(static_cast<std::size_t>(s), false);
  for (Index i = 0; i < s; ++i) {
    const Index src = order[static_cast<std::size_t>(i)];
    const double sigma = norms[static_cast<std::size_t>(src)];
    singulars(i) = sigma;
    short_basis.col(i) = frame.col(src);
    if (sigma > tiny) {
      tall_basis.col(i) = work.col(src) / sigma;
    } else {
      tall_basis.col(i).setZero();
      missing[static_cast<std::size_t>(i)] = true;
    }
  }
  detail::complete_orthonormal(tall_basis, missing);

  ThinSvd out;
  out.singulars = std::move(singulars);
  if (transposed) {
    out.left = std::move(short_basis);
    out.right = std::move(tall_basis);
  } else {
    out.left = std::move(tall_basis);
    out.right = std::move(short_basis);
  }

  for (Index i = 0; i < s; ++i) {
    Index pivot = 0;
    for (Index r = 1; r < out.left.rows(); ++r) {
      if (std::abs(out.left(r, i)) > std::abs(out.left(pivot, i))) pivot = r;
    }
    if (out.left(pivot, i) < 0.0) {
      out.left.col(i) = -out.left.col(i);
      out.right.col(i) = -out.right.col(i);
    }
  }
  return out;
}

/// Number of singular values above tol_rank_rel * singulars[0].
inline Index numerical_rank(const Vector& singulars, double tol_rank_rel = kDefaultRankTolerance) {
  if (singulars.size() == 0 || singulars(0) <= 0.0) return 0;
  const double cutoff = tol_rank_rel * singulars(0);
  Index rank = 0;
  for (Index i = 0; i < singulars.size(); ++i) {
    if (singulars(i) > cutoff) ++rank;
  }
  return rank;
}

/// Groups of numerically equal nonzero singular values, largest first.
struct MultiplicityBlocks {
  struct Block {
    double value;
    Index multiplicity;
  };
  std::vector<Block> blocks;
  Index zero_count = 0;

  /// Index of the first singular value belonging to block `b`.
  Index offset(std::size_t b) const {
    Index off = 0;
    for (std::size_t i = 0; i < b; ++i) off += blocks[i].multiplicity;
    return off;
  }
};

/// Greedy left-to-right grouping of a nonincreasing sequence.
///
/// A value joins the current block when it is within tol_group_rel * singulars[0]
/// of the block's first member; the reported block value is the mean of its
/// members. Values at or below the rank cutoff are only counted in zero_count.
inline MultiplicityBlocks group_multiplicities(const Vector& singulars,
                                               double tol_group_rel = kDefaultGroupTolerance,
                                               double tol_rank_rel = kDefaultRankTolerance) {
  MultiplicityBlocks out;
  const Index rank = numerical_rank(singulars, tol_rank_rel);
  out.zero_count = singulars.size() - rank;
  if (rank == 0) return out;

  const double window = tol_group_rel * singulars(0);
  double first = 0.0;
  double sum = 0.0;
  for (Index i = 0; i < rank; ++i) {
    const double v = singulars(i);
    if (out.blocks.empty() || std::abs(v - first) > window) {
      if (!out.blocks.empty()) out.blocks.back().value = sum / static_cast<double>(out.blocks.back().multiplicity);
      out.blocks.push_back({v, 0});
      first = v;
      sum = 0.0;
    }
    sum += v;
    ++out.blocks.back().multiplicity;
  }
  out.blocks.back().value = sum / static_cast<double>(out.blocks.back().multiplicity);
  return out;
}

}  // namespace orbitshape
