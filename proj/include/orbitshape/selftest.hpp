#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "orbitshape/equivalence.hpp"
#include "orbitshape/geometry.hpp"
#include "orbitshape/invariants.hpp"
#include "orbitshape/linalg.hpp"
#include "orbitshape/oracle.hpp"
#include "orbitshape/random.hpp"

namespace orbitshape {

struct PropertyReport {
  std::string name;
  std::int64_t passed = 0;
  std::int64_t trials = 0;

  bool ok() const { return passed == trials; }
};

namespace detail {

inline Index uniform_index(Index lo, Index hi, Rng& rng) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

// Adds a perturbation of Frobenius norm rel * ||center(Y)||_F in a random direction.
inline LabeledImage perturbed(const LabeledImage& y, double rel, Rng& rng) {
  Matrix e = gaussian_matrix(y.n(), y.k(), rng);
  const double spread = center(y).points().norm();
  const double size = rel * (spread > 0.0 ? spread : 1.0);
  return LabeledImage(y.points() + e * (size / e.norm()));
}

inline bool motion_invariance(Rng& rng) {
  const LabeledImage y = random_image(uniform_index(1, 8, rng), uniform_index(1, 5, rng), rng);
  const MotionElement g = random_motion(y.k(), rng);
  const Matrix a = gram_invariant(y).gram();
  const Matrix b = gram_invariant(act_on_image(g, y)).gram();
  return (a - b).norm() <= 1e-10 * (1.0 + a.norm());
}

inline bool alignment_round_trip(Rng& rng) {
  const LabeledImage y = random_image(uniform_index(1, 8, rng), uniform_index(1, 5, rng), rng);
  const LabeledImage moved = act_on_image(random_motion(y.k(), rng), y);
  const AlignmentResult fit = align(y, moved);
  return motion_equivalent(y, moved) && fit.residual <= 1e-9 * (1.0 + y.points().norm());
}

inline bool scaling_law(Rng& rng) {
  const LabeledImage y = random_image(uniform_index(2, 8, rng), uniform_index(1, 5, rng), rng);
  const double a = std::exp(std::uniform_real_distribution<double>(std::log(0.1), std::log(10.0))(rng));
  const Matrix g = gram_invariant(y).gram();
  const Matrix ga = gram_invariant(scaled(y, a)).gram();
  return (ga - a * a * g).norm() <= 1e-12 * a * a * g.norm();
}

inline bool similarity_schemes_agree(Rng& rng) {
  const LabeledImage y = random_image(uniform_index(3, 8, rng), uniform_index(1, 5, rng), rng);
  const bool make_equivalent = std::bernoulli_distribution(0.5)(rng);
  const double a = std::exp(std::uniform_real_distribution<double>(std::log(0.1), std::log(10.0))(rng));
  LabeledImage other = scaled(act_on_image(random_motion(y.k(), rng), y), a);
  if (!make_equivalent) other = perturbed(other, 1e-2, rng);
  const bool max = similarity_equivalent(y, other, NormalizationScheme::MaxAxis);
  const bool mean = similarity_equivalent(y, other, NormalizationScheme::MeanAxis);
  const bool gmean = similarity_equivalent(y, other, NormalizationScheme::GeomMeanAxis);
  return max == mean && mean == gmean && max == make_equivalent;
}

inline bool gram_triangle_inequality(Rng& rng) {
  const Index n = uniform_index(1, 8, rng);
  const LabeledImage a = random_image(n, uniform_index(1, 5, rng), rng);
  const LabeledImage b = random_image(n, uniform_index(1, 5, rng), rng);
  const LabeledImage c = random_image(n, uniform_index(1, 5, rng), rng);
  const double ab = orbit_distance_gram(a, b).value;
  const double bc = orbit_distance_gram(b, c).value;
  const double ac = orbit_distance_gram(a, c).value;
  return ac <= ab + bc + 1e-12 && ab == orbit_distance_gram(b, a).value;
}

inline bool zero_set_agreement(Rng& rng) {
  const LabeledImage y = random_image(uniform_index(2, 8, rng), uniform_index(1, 5, rng), rng);
  const bool make_equivalent = std::bernoulli_distribution(0.5)(rng);
  LabeledImage other = act_on_image(random_motion(y.k(), rng), y);
  if (!make_equivalent) other = perturbed(other, 1e-3, rng);
  const bool gram_zero = orbit_distance_gram(y, other).value <= 1e-9;
  const bool procrustes_zero = orbit_distance_procrustes(y, other).value <= 1e-8;
  const bool verdict = motion_equivalent(y, other);
  return gram_zero == procrustes_zero && procrustes_zero == verdict && verdict == make_equivalent;
}

inline bool svd_matches_jacobi(Rng& rng) {
  const Matrix m = gaussian_matrix(uniform_index(1, 8, rng), uniform_index(1, 8, rng), rng);
  const Vector sigma = thin_svd(m).singulars;
  const Vector lambda = oracle::jacobi_eigenvalues(m.transpose() * m);
  const double scale = std::max(lambda(0), 1e-300);
  for (Index i = 0; i < sigma.size(); ++i) {
    if (std::abs(sigma(i) * sigma(i) - lambda(i)) > 1e-9 * scale) return false;
  }
  return true;
}

inline bool procrustes_matches_grid(Rng& rng) {
  constexpr std::int64_t angles = 4096;
  const Index n = uniform_index(2, 8, rng);
  const LabeledImage y1 = random_image(n, 2, rng);
  const LabeledImage y2 = perturbed(act_on_image(random_motion(2, rng), y1), 0.3, rng);
  const double exact = align(y1, y2).residual;
  const double grid = oracle::brute_force_min_residual(y1, y2, {angles, true, 1, 0});
  const double bound = 2.0 * std::numbers::pi * center(y1).points().norm() / static_cast<double>(angles);
  return grid >= exact - 1e-10 && grid <= exact + bound + 1e-12;
}

}  // namespace detail

/// Randomized property sweeps over the whole library. Deterministic in `seed`.
inline std::vector<PropertyReport> run_selftest(std::int64_t trials, std::uint64_t seed) {
  using Check = bool (*)(Rng&);
  const std::vector<std::pair<std::string, Check>> checks = {
      {"motion_invariance", detail::motion_invariance},
      {"alignment_round_trip", detail::alignment_round_trip},
      {"scaling_law", detail::scaling_law},
      {"similarity_schemes_agree", detail::similarity_schemes_agree},
      {"gram_triangle_inequality", detail::gram_triangle_inequality},
      {"zero_set_agreement", detail::zero_set_agreement},
      {"svd_matches_jacobi", detail::svd_matches_jacobi},
      {"procrustes_matches_grid", detail::procrustes_matches_grid},
  };
  std::vector<PropertyReport> reports;
  for (std::size_t c = 0; c < checks.size(); ++c) {
    Rng rng(seed + 0x9E3779B97F4A7C15ULL * (c + 1));
    PropertyReport report{checks[c].first, 0, trials};
    for (std::int64_t t = 0; t < trials; ++t) {
      bool ok = false;
      try {
        ok = checks[c].second(rng);
      } catch (const Error&) {
        ok = false;
      }
      if (ok) ++report.passed;
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace orbitshape
