// Recovers a hidden rigid motion from two labeled point sets and shows that
// the mirrored configuration is motion- but not proper-motion-equivalent.
#include <iostream>

#include "orbitshape/orbitshape.hpp"

int main() {
  using namespace orbitshape;

  Matrix pts(4, 2);
  pts << 0, 0,
         2, 0,
         2, 1,
         0, 3;
  const LabeledImage shape(pts);

  Rng rng(42);
  const MotionElement hidden = random_motion(2, rng, 5.0, /*proper_only=*/true);
  const LabeledImage moved = act_on_image(hidden, shape);

  const AlignmentResult fit = align(shape, moved);
  std::cout << "recovered rotation:\n" << fit.transform.rotation() << "\n"
            << "true rotation:\n" << hidden.rotation() << "\n"
            << "residual: " << fit.residual << "\n";

  Matrix mirror = pts;
  mirror.col(0) *= -1.0;
  const LabeledImage mirrored(mirror);
  std::cout << std::boolalpha << "mirror motion-equivalent: " << motion_equivalent(shape, mirrored) << "\n"
            << "mirror proper-motion-equivalent: " << proper_motion_equivalent(shape, mirrored) << "\n";

  const EllipsoidSpectrum spectrum = ellipsoid_spectrum(shape);
  std::cout << "semi-axes: " << spectrum.axis_lengths.transpose() << "\n";
  return 0;
}
