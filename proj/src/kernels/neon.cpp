#include <arm_neon.h>

#include <cmath>

#include "aol/kernels.hpp"

namespace aol::kernels::neon {

double abs_sum(const double* x, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vabsq_f64(vld1q_f64(x + i)));
    acc1 = vaddq_f64(acc1, vabsq_f64(vld1q_f64(x + i + 2)));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += std::fabs(x[i]);
  return s;
}

void soft_threshold(const double* x, double* out, std::size_t n, double alpha) {
  const float64x2_t a = vdupq_n_f64(alpha);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t b = vld1q_f64(x + i);
    const uint64x2_t keep = vcgeq_f64(vabsq_f64(b), a);
    const uint64x2_t neg = vcltq_f64(b, zero);
    const float64x2_t sgn = vbslq_f64(neg, vdupq_n_f64(-1.0), vdupq_n_f64(1.0));
    const float64x2_t shrunk = vsubq_f64(b, vmulq_f64(a, sgn));
    vst1q_f64(out + i, vbslq_f64(keep, shrunk, zero));
  }
  for (; i < n; ++i) {
    const double b = x[i];
    out[i] = std::fabs(b) >= alpha ? b - alpha * (b > 0.0 ? 1.0 : -1.0) : 0.0;
  }
}

std::size_t dead_zone_sign(const double* x, double* out, std::size_t n, double tol) {
  std::size_t zeros = 0;
  const float64x2_t pt = vdupq_n_f64(tol);
  const float64x2_t nt = vdupq_n_f64(-tol);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    const uint64x2_t gt = vcgtq_f64(v, pt);
    const uint64x2_t lt = vcltq_f64(v, nt);
    float64x2_t s = vbslq_f64(gt, vdupq_n_f64(1.0), vdupq_n_f64(0.0));
    s = vbslq_f64(lt, vdupq_n_f64(-1.0), s);
    vst1q_f64(out + i, s);
    const uint64x2_t live = vorrq_u64(gt, lt);
    zeros += (vgetq_lane_u64(live, 0) ? 0 : 1) + (vgetq_lane_u64(live, 1) ? 0 : 1);
  }
  for (; i < n; ++i) {
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
  const float64x2_t t = vdupq_n_f64(tol);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t le = vcleq_f64(vabsq_f64(vld1q_f64(x + i)), t);
    c += (vgetq_lane_u64(le, 0) ? 1 : 0) + (vgetq_lane_u64(le, 1) ? 1 : 0);
  }
  for (; i < n; ++i) c += std::fabs(x[i]) <= tol ? 1 : 0;
  return c;
}

CosupportSums cosupport_sums(const double* z0, const double* dz, std::size_t n, double tol) {
  const float64x2_t t = vdupq_n_f64(tol);
  const float64x2_t zero = vdupq_n_f64(0.0);
  float64x2_t on = zero, off = zero, dot = zero;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t z = vld1q_f64(z0 + i);
    const float64x2_t d = vld1q_f64(dz + i);
    const float64x2_t ad = vabsq_f64(d);
    const uint64x2_t small = vcleq_f64(vabsq_f64(z), t);
    on = vaddq_f64(on, vbslq_f64(small, ad, zero));
    off = vaddq_f64(off, vbslq_f64(small, zero, ad));
    const float64x2_t signed_d = vbslq_f64(vcltq_f64(z, zero), vnegq_f64(d), d);
    dot = vaddq_f64(dot, vbslq_f64(small, zero, signed_d));
  }
  CosupportSums s{vaddvq_f64(on), vaddvq_f64(off), vaddvq_f64(dot)};
  for (; i < n; ++i) {
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

}  // namespace aol::kernels::neon
