#include <immintrin.h>

#include <cmath>

#include "aol/kernels.hpp"

namespace aol::kernels::avx2 {

namespace {

inline __m256d abs_pd(__m256d v) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double abs_sum(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    acc0 = _mm256_add_pd(acc0, abs_pd(_mm256_loadu_pd(x + i)));
    acc1 = _mm256_add_pd(acc1, abs_pd(_mm256_loadu_pd(x + i + 4)));
    acc2 = _mm256_add_pd(acc2, abs_pd(_mm256_loadu_pd(x + i + 8)));
    acc3 = _mm256_add_pd(acc3, abs_pd(_mm256_loadu_pd(x + i + 12)));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, abs_pd(_mm256_loadu_pd(x + i)));
  double s = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
  for (; i < n; ++i) s += std::fabs(x[i]);
  return s;
}

void soft_threshold(const double* x, double* out, std::size_t n, double alpha) {
  const __m256d a = _mm256_set1_pd(alpha);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d b = _mm256_loadu_pd(x + i);
    const __m256d keep = _mm256_cmp_pd(abs_pd(b), a, _CMP_GE_OQ);
    const __m256d sgn = _mm256_or_pd(_mm256_and_pd(b, sign_mask), one);
    const __m256d shrunk = _mm256_sub_pd(b, _mm256_mul_pd(a, sgn));
    _mm256_storeu_pd(out + i, _mm256_and_pd(shrunk, keep));
  }
  for (; i < n; ++i) {
    const double b = x[i];
    out[i] = std::fabs(b) >= alpha ? b - alpha * (b > 0.0 ? 1.0 : -1.0) : 0.0;
  }
}

std::size_t dead_zone_sign(const double* x, double* out, std::size_t n, double tol) {
  const __m256d pos_tol = _mm256_set1_pd(tol);
  const __m256d neg_tol = _mm256_set1_pd(-tol);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d minus_one = _mm256_set1_pd(-1.0);
  std::size_t zeros = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d gt = _mm256_cmp_pd(v, pos_tol, _CMP_GT_OQ);
    const __m256d lt = _mm256_cmp_pd(v, neg_tol, _CMP_LT_OQ);
    const __m256d s = _mm256_or_pd(_mm256_and_pd(gt, one), _mm256_and_pd(lt, minus_one));
    _mm256_storeu_pd(out + i, s);
    const int live = _mm256_movemask_pd(_mm256_or_pd(gt, lt));
    zeros += 4 - static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(live)));
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
  const __m256d t = _mm256_set1_pd(tol);
  std::size_t c = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d le = _mm256_cmp_pd(abs_pd(_mm256_loadu_pd(x + i)), t, _CMP_LE_OQ);
    c += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(le))));
  }
  for (; i < n; ++i) c += std::fabs(x[i]) <= tol ? 1 : 0;
  return c;
}

CosupportSums cosupport_sums(const double* z0, const double* dz, std::size_t n, double tol) {
  const __m256d t = _mm256_set1_pd(tol);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d on = _mm256_setzero_pd();
  __m256d off = _mm256_setzero_pd();
  __m256d dot = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d z = _mm256_loadu_pd(z0 + i);
    const __m256d d = _mm256_loadu_pd(dz + i);
    const __m256d ad = abs_pd(d);
    const __m256d small = _mm256_cmp_pd(abs_pd(z), t, _CMP_LE_OQ);
    on = _mm256_add_pd(on, _mm256_and_pd(small, ad));
    off = _mm256_add_pd(off, _mm256_andnot_pd(small, ad));
    // sgn(z) * d == d with its sign bit flipped when z < 0.
    const __m256d signed_d = _mm256_xor_pd(d, _mm256_and_pd(z, sign_mask));
    dot = _mm256_add_pd(dot, _mm256_andnot_pd(small, signed_d));
  }
  CosupportSums s{hsum(on), hsum(off), hsum(dot)};
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

}  // namespace aol::kernels::avx2
