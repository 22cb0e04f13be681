#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "aol/imaging.hpp"

namespace aol {

namespace {

struct Ellipse {
  double intensity;
  double a;
  double b;
  double x0;
  double y0;
  double phi_deg;
};

// Modified Shepp-Logan (Toft): higher contrast than the original table.
constexpr std::array<Ellipse, 10> kEllipses{{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
    {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
    {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
    {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
    {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
    {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
    {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
    {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
}};

}  // namespace

GrayImage shepp_logan(Index size) {
  if (size < 2) throw Error(ErrorCode::InvalidArgument, "phantom size must be >= 2");
  Matrix px = Matrix::Zero(size, size);
  const double step = 2.0 / static_cast<double>(size - 1);
  for (Index r = 0; r < size; ++r) {
    const double y = 1.0 - step * static_cast<double>(r);
    for (Index c = 0; c < size; ++c) {
      const double x = -1.0 + step * static_cast<double>(c);
      double v = 0.0;
      for (const Ellipse& e : kEllipses) {
        const double phi = e.phi_deg * std::numbers::pi / 180.0;
        const double dx = x - e.x0;
        const double dy = y - e.y0;
        const double u = dx * std::cos(phi) + dy * std::sin(phi);
        const double w = -dx * std::sin(phi) + dy * std::cos(phi);
        if ((u * u) / (e.a * e.a) + (w * w) / (e.b * e.b) <= 1.0) v += e.intensity;
      }
      // overlapping intensities cancel to about -1e-16 outside the skull
      px(r, c) = 255.0 * std::clamp(v, 0.0, 1.0);
    }
  }
  return GrayImage(std::move(px));
}

}  // namespace aol
