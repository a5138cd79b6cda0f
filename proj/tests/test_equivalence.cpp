#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "orbitshape/equivalence.hpp"
#include "orbitshape/oracle.hpp"
#include "orbitshape/random.hpp"
#include "test_support.hpp"

namespace orbitshape {
namespace {

using testing::near;

LabeledImage triangle() {
  Matrix y(3, 2);
  y << 0, 0, 1, 0, 0, 2;
  return LabeledImage(y);
}

LabeledImage mirror_x(const LabeledImage& y) {
  Matrix m = y.points();
  m.col(0) *= -1.0;
  return LabeledImage(m);
}

LabeledImage pad_zero_column(const LabeledImage& y) {
  Matrix m = Matrix::Zero(y.n(), y.k() + 1);
  m.leftCols(y.k()) = y.points();
  return LabeledImage(m);
}

LabeledImage perturbed(const LabeledImage& y, double rel, Rng& rng) {
  const Matrix e = gaussian_matrix(y.n(), y.k(), rng);
  const double spread = center(y).points().norm();
  return LabeledImage(y.points() + e * (rel * (spread > 0 ? spread : 1.0) / e.norm()));
}

// Rotation-only minimum residual of the mirrored triangle, from a 200000-angle
// grid and the closed form ||c1||^2 + ||c2||^2 - 2 (s1 - s2) evaluated in numpy.
constexpr double kMirroredTriangleProperResidual = 1.3635486665491685;

TEST(MotionEquivalent, InvarianceSweep) {
  Rng rng(61);
  std::uniform_int_distribution<Index> pn(1, 8), pk(1, 5);
  for (int t = 0; t < 500; ++t) {
    const LabeledImage y = random_image(pn(rng), pk(rng), rng);
    EXPECT_TRUE(motion_equivalent(y, act_on_image(random_motion(y.k(), rng), y), 1e-8));
  }
}

TEST(MotionEquivalent, PerturbedCoordinateIsRejected) {
  Rng rng(62);
  Matrix base = gaussian_matrix(5, 3, rng);
  base.rowwise() -= base.colwise().mean();
  base /= base.norm();  // ||Y_norm|| = 1
  Matrix moved = base;
  moved(2, 1) += 0.1;
  // Gram entry (2,2) alone changes by 2*0.1*y21 + 0.01*(1 - 1/n)^2-ish; the full
  // Frobenius change is far above 1e-8 * (1 + 1).
  const double delta =
      (gram_invariant(LabeledImage(base)).gram() - gram_invariant(LabeledImage(moved)).gram()).norm();
  ASSERT_GT(delta, 1e-3);
  EXPECT_FALSE(motion_equivalent(LabeledImage(base), LabeledImage(moved), 1e-8));
}

TEST(MotionEquivalent, SelfAndShapeMismatch) {
  Rng rng(63);
  const LabeledImage y = random_image(4, 3, rng);
  EXPECT_TRUE(motion_equivalent(y, y));
  EXPECT_THROW(motion_equivalent(y, random_image(5, 3, rng)), ShapeMismatch);
  EXPECT_THROW(motion_equivalent(y, random_image(4, 2, rng)), ShapeMismatch);
}

TEST(ProperMotionEquivalent, MirroredTriangleInThePlane) {
  const LabeledImage y = triangle();
  const LabeledImage m = mirror_x(y);
  EXPECT_TRUE(motion_equivalent(y, m));
  EXPECT_FALSE(proper_motion_equivalent(y, m));

  // Brute-force oracle: no rotation brings the mirror image within 0.5.
  const double grid = oracle::brute_force_min_residual(y, m, {100000, false, 1, 0});
  EXPECT_GT(grid, 0.5);
  EXPECT_NEAR(grid, kMirroredTriangleProperResidual, 1e-6);
}

TEST(ProperMotionEquivalent, MirroredTriangleInSpace) {
  const LabeledImage y = pad_zero_column(triangle());
  const LabeledImage m = pad_zero_column(mirror_x(triangle()));
  EXPECT_TRUE(proper_motion_equivalent(y, m));
  // Half turn about the x-axis composed with the mirror... explicitly: the
  // rotation diag(-1, 1, -1) maps (x, y, 0) to (-x, y, 0).
  Matrix r = Matrix::Identity(3, 3);
  r(0, 0) = -1;
  r(2, 2) = -1;
  const MotionElement half_turn(r, Vector::Zero(3));
  ASSERT_TRUE(half_turn.proper());
  EXPECT_EQ(act_on_image(half_turn, y), m);
  const AlignmentResult fit = align(y, m, GroupTag::ProperMotion);
  EXPECT_TRUE(fit.transform.proper());
  EXPECT_LE(fit.residual, 1e-12);
}

TEST(ProperMotionEquivalent, RotatedCopyAccepted) {
  Rng rng(64);
  for (int t = 0; t < 100; ++t) {
    const LabeledImage y = random_image(6, 3, rng);
    EXPECT_TRUE(proper_motion_equivalent(y, act_on_image(random_motion(3, rng, 10.0, true), y)));
  }
}

TEST(ProperMotionEquivalent, ChiralityOfFullRankConfigurations) {
  Rng rng(65);
  for (int t = 0; t < 100; ++t) {
    const LabeledImage y = random_image(6, 3, rng);
    Matrix flip = Matrix::Identity(3, 3);
    flip(1, 1) = -1;
    const LabeledImage mirrored = act_on_image(MotionElement(random_rotation(3, rng) * flip, Vector::Zero(3)), y);
    EXPECT_TRUE(motion_equivalent(y, mirrored));
    EXPECT_FALSE(proper_motion_equivalent(y, mirrored));
  }
}

TEST(SimilarityEquivalent, SimilaritySweep) {
  Rng rng(66);
  std::uniform_int_distribution<Index> pn(2, 8), pk(1, 5);
  std::uniform_real_distribution<double> pa(0.1, 10);
  for (int t = 0; t < 300; ++t) {
    const LabeledImage y = random_image(pn(rng), pk(rng), rng);
    const LabeledImage z = scaled(act_on_image(random_motion(y.k(), rng), y), pa(rng));
    for (auto scheme :
         {NormalizationScheme::MaxAxis, NormalizationScheme::MeanAxis, NormalizationScheme::GeomMeanAxis}) {
      EXPECT_TRUE(similarity_equivalent(y, z, scheme, 1e-8));
    }
  }
}

TEST(SimilarityEquivalent, DifferentAxisRatiosRejected) {
  Matrix a(4, 2), b(4, 2);
  a << 2, 0, -2, 0, 0, 1, 0, -1;  // semi-axis ratio 2 : 1
  b << 3, 0, -3, 0, 0, 1, 0, -1;  // semi-axis ratio 3 : 1
  const LabeledImage ya(a), yb(b);
  for (auto scheme :
       {NormalizationScheme::MaxAxis, NormalizationScheme::MeanAxis, NormalizationScheme::GeomMeanAxis}) {
    const Vector la = similarity_normalize(gram_invariant(ya), scheme).normalized_gram.axis_lengths();
    const Vector lb = similarity_normalize(gram_invariant(yb), scheme).normalized_gram.axis_lengths();
    EXPECT_GT((la - lb).norm(), 0.1);
    EXPECT_FALSE(similarity_equivalent(ya, yb, scheme));
  }
  EXPECT_TRUE(similarity_equivalent(ya, ya));
}

TEST(SimilarityEquivalent, Errors) {
  Rng rng(67);
  Matrix same(3, 2);
  same << 1, 1, 1, 1, 1, 1;
  EXPECT_THROW(similarity_equivalent(random_image(3, 2, rng), LabeledImage(same)), DegenerateImage);
  EXPECT_THROW(similarity_equivalent(random_image(3, 2, rng), random_image(4, 2, rng)), ShapeMismatch);
}

TEST(Align, RecoversRandomMotions) {
  Rng rng(68);
  std::uniform_int_distribution<Index> pn(1, 8), pk(1, 5);
  for (int t = 0; t < 500; ++t) {
    const LabeledImage y = random_image(pn(rng), pk(rng), rng);
    const LabeledImage z = act_on_image(random_motion(y.k(), rng), y);
    const AlignmentResult fit = align(y, z);
    const double bound = 1e-9 * (1 + y.points().norm());
    EXPECT_LE(fit.residual, bound);
    EXPECT_TRUE(near(fit.apply(y).points(), z.points(), bound));
    EXPECT_NEAR(fit.residual, (fit.apply(y).points() - z.points()).norm(), 1e-10);
  }
}

TEST(Align, SegmentQuarterTurn) {
  Matrix a(2, 2), b(2, 2);
  a << 1, 0, -1, 0;
  b << 0, 1, 0, -1;
  const AlignmentResult fit = align(LabeledImage(a), LabeledImage(b));
  EXPECT_LE(fit.residual, 1e-15);
  EXPECT_TRUE(near(fit.transform.rotation() * Vector::Unit(2, 0), Vector::Unit(2, 1), 1e-15));
}

TEST(Align, MatchesBruteForceGridInThePlane) {
  Rng rng(69);
  constexpr std::int64_t angles = 100000;
  for (int t = 0; t < 10; ++t) {
    const LabeledImage y = random_image(6, 2, rng);
    const LabeledImage z = perturbed(act_on_image(random_motion(2, rng), y), 0.3, rng);
    const double exact = align(y, z).residual;
    const double grid = oracle::brute_force_min_residual(y, z, {angles, true, 1, 0});
    EXPECT_GE(grid, exact - 1e-10);
    EXPECT_LE(grid - exact, 1e-4 * exact);
  }
}

TEST(Align, SimilarityRecoversScale) {
  Rng rng(70);
  for (int t = 0; t < 100; ++t) {
    const LabeledImage y = random_image(5, 3, rng);
    const double a = std::uniform_real_distribution<double>(0.1, 10)(rng);
    const MotionElement g = random_motion(3, rng);
    const LabeledImage z = act_on_image(g, scaled(y, a));
    const AlignmentResult fit = align(y, z, GroupTag::Similarity);
    EXPECT_NEAR(fit.scale, a, 1e-10 * a);
    EXPECT_LE(fit.residual, 1e-9 * (1 + z.points().norm()));
  }
}

TEST(Align, ProperMotionNeverReflects) {
  Rng rng(71);
  for (int t = 0; t < 100; ++t) {
    const LabeledImage y = random_image(5, 3, rng);
    const LabeledImage z = random_image(5, 3, rng);
    const AlignmentResult free_fit = align(y, z, GroupTag::Motion);
    const AlignmentResult proper_fit = align(y, z, GroupTag::ProperMotion);
    EXPECT_TRUE(proper_fit.transform.proper());
    EXPECT_GE(proper_fit.residual, free_fit.residual - 1e-12);
  }
}

TEST(Align, Errors) {
  Rng rng(72);
  Matrix same(3, 2);
  same << 1, 1, 1, 1, 1, 1;
  EXPECT_THROW(align(LabeledImage(same), random_image(3, 2, rng), GroupTag::Similarity), DegenerateImage);
  EXPECT_THROW(align(random_image(3, 2, rng), random_image(3, 3, rng)), ShapeMismatch);
}

TEST(OrbitDistanceGram, Examples) {
  Rng rng(73);
  const LabeledImage y = random_image(5, 3, rng);
  EXPECT_LE(orbit_distance_gram(y, act_on_image(random_motion(3, rng), y)).value, 1e-9);

  Matrix a(2, 2);
  a << -1, 0, 1, 0;
  const LabeledImage y1(a);
  // G1 = [[1,-1],[-1,1]] with ||G1|| = 2; G2 = 4 G1, so the distance is 3 * 2.
  EXPECT_NEAR(orbit_distance_gram(y1, scaled(y1, 2.0)).value, 6.0, 1e-14);
}

TEST(OrbitDistanceGram, MetricAxioms) {
  Rng rng(74);
  std::uniform_int_distribution<Index> pk(1, 5);
  for (int t = 0; t < 1000; ++t) {
    const LabeledImage a = random_image(4, pk(rng), rng);
    const LabeledImage b = random_image(4, pk(rng), rng);
    const LabeledImage c = random_image(4, pk(rng), rng);
    const double ab = orbit_distance_gram(a, b).value;
    EXPECT_EQ(ab, orbit_distance_gram(b, a).value);
    EXPECT_LE(orbit_distance_gram(a, c).value, ab + orbit_distance_gram(b, c).value + 1e-12);
    EXPECT_GT(ab, 1e-7);
  }
  EXPECT_THROW(orbit_distance_gram(random_image(3, 2, rng), random_image(4, 2, rng)), ShapeMismatch);
}

TEST(OrbitDistanceGram, BiInvariant) {
  Rng rng(75);
  for (int t = 0; t < 100; ++t) {
    const LabeledImage a = random_image(5, 3, rng), b = random_image(5, 3, rng);
    const double base = orbit_distance_gram(a, b).value;
    const double moved =
        orbit_distance_gram(act_on_image(random_motion(3, rng), a), act_on_image(random_motion(3, rng), b)).value;
    EXPECT_NEAR(moved, base, 1e-9);
  }
}

TEST(OrbitDistanceGram, SimilarityVariant) {
  Rng rng(76);
  const LabeledImage y = random_image(5, 3, rng);
  const LabeledImage z = scaled(act_on_image(random_motion(3, rng), y), 3.7);
  EXPECT_LE(orbit_distance_gram(y, z, GroupTag::Similarity).value, 1e-10);
  EXPECT_GT(orbit_distance_gram(y, z, GroupTag::Motion).value, 1.0);
  EXPECT_THROW(orbit_distance_gram(y, z, GroupTag::ProperMotion), InvalidArgument);
}

TEST(OrbitDistanceProcrustes, MirroredTriangle) {
  const LabeledImage y = triangle(), m = mirror_x(triangle());
  EXPECT_LE(orbit_distance_procrustes(y, m, GroupTag::Motion).value, 1e-12);
  EXPECT_NEAR(orbit_distance_procrustes(y, m, GroupTag::ProperMotion).value, kMirroredTriangleProperResidual, 1e-12);
}

TEST(OrbitDistanceProcrustes, SymmetricForMotions) {
  Rng rng(77);
  for (int t = 0; t < 200; ++t) {
    const LabeledImage a = random_image(6, 3, rng), b = random_image(6, 3, rng);
    EXPECT_NEAR(orbit_distance_procrustes(a, b).value, orbit_distance_procrustes(b, a).value, 1e-10);
    EXPECT_NEAR(orbit_distance_procrustes(a, b, GroupTag::ProperMotion).value,
                orbit_distance_procrustes(b, a, GroupTag::ProperMotion).value, 1e-10);
  }
}

TEST(OrbitDistance, ZeroSetsAgree) {
  Rng rng(78);
  std::uniform_int_distribution<Index> pn(2, 8), pk(1, 5);
  for (int t = 0; t < 400; ++t) {
    const LabeledImage y = random_image(pn(rng), pk(rng), rng);
    const bool equivalent = t % 2 == 0;
    LabeledImage z = act_on_image(random_motion(y.k(), rng), y);
    if (!equivalent) z = perturbed(z, 1e-3, rng);
    const bool gram_zero = orbit_distance_gram(y, z).value <= 1e-9;
    const bool procrustes_zero = orbit_distance_procrustes(y, z).value <= 1e-8;
    EXPECT_EQ(gram_zero, equivalent);
    EXPECT_EQ(procrustes_zero, equivalent);
    EXPECT_EQ(motion_equivalent(y, z), equivalent);
  }
}

}  // namespace
}  // namespace orbitshape
