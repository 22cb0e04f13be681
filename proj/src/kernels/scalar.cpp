#include <cmath>

#include "aol/kernels.hpp"

namespace aol::kernels::scalar {

double abs_sum(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(x[i]);
  return s;
}

void soft_threshold(const double* x, double* out, std::size_t n, double alpha) {
  for (std::size_t i = 0; i < n; ++i) {
    const double b = x[i];
    if (std::fabs(b) >= alpha) {
      out[i] = b - alpha * (b > 0.0 ? 1.0 : -1.0);
    } else {
      out[i] = 0.0;
    }
  }
}

std::size_t dead_zone_sign(const double* x, double* out, std::size_t n, double tol) {
  std::size_t zeros = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x[i];
    if (v > tol) {
      out[i] = 1.0;
    } else if (v < -tol) {
      out[i] = -1.0;
    } else {
      out[i] = 0.0;
      ++zeros;
    }
  }
  return zeros;
}

std::size_t count_small(const double* x, std::size_t n, double tol) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += std::fabs(x[i]) <= tol ? 1 : 0;
  return c;
}

CosupportSums cosupport_sums(const double* z0, const double* dz, std::size_t n, double tol) {
  CosupportSums s;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = z0[i];
    const double d = dz[i];
    if (std::fabs(z) <= tol) {
      s.on_cosupport += std::fabs(d);
    } else {
      s.off_cosupport += std::fabs(d);
      s.sign_dot += z > 0.0 ? d : -d;
    }
  }
  return s;
}

}  // namespace aol::kernels::scalar
