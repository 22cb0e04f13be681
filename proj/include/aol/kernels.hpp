#pragma once

// Element-wise inner loops shared by the solvers. Each kernel has a scalar
// reference implementation and vector variants (AVX2 on x86-64, NEON on
// AArch64); the widest variant the running CPU supports is selected once at
// startup. Set AOL_KERNELS=scalar to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace aol::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

// Sums of |dz| split by the cosupport of a reference vector z0, plus the
// inner product of dz with sgn(z0) (sgn taken as 0 on the cosupport).
struct CosupportSums {
  double on_cosupport = 0.0;   // sum over |z0| <= tol of |dz|
  double off_cosupport = 0.0;  // sum over |z0| >  tol of |dz|
  double sign_dot = 0.0;       // sum over |z0| >  tol of sgn(z0) * dz
};

struct KernelTable {
  Isa isa;
  // sum_i |x_i|
  double (*abs_sum)(const double* x, std::size_t n);
  // out_i = x_i - alpha sgn(x_i) if |x_i| >= alpha, else 0
  void (*soft_threshold)(const double* x, double* out, std::size_t n, double alpha);
  // out_i = sgn(x_i) if |x_i| > tol, else 0. Returns how many were zeroed.
  std::size_t (*dead_zone_sign)(const double* x, double* out, std::size_t n, double tol);
  // #{i : |x_i| <= tol}
  std::size_t (*count_small)(const double* x, std::size_t n, double tol);
  CosupportSums (*cosupport_sums)(const double* z0, const double* dz, std::size_t n, double tol);
};

bool supported(Isa isa);
// Table for a specific ISA; throws InvalidArgument if the CPU lacks it.
const KernelTable& table(Isa isa);
// Table picked at startup (respecting AOL_KERNELS).
const KernelTable& active();

// Span conveniences over the active table.
double abs_sum(std::span<const double> x);
void soft_threshold(std::span<const double> x, std::span<double> out, double alpha);
std::size_t dead_zone_sign(std::span<const double> x, std::span<double> out, double tol);
std::size_t count_small(std::span<const double> x, double tol);
CosupportSums cosupport_sums(std::span<const double> z0, std::span<const double> dz, double tol);

namespace scalar {
double abs_sum(const double* x, std::size_t n);
void soft_threshold(const double* x, double* out, std::size_t n, double alpha);
std::size_t dead_zone_sign(const double* x, double* out, std::size_t n, double tol);
std::size_t count_small(const double* x, std::size_t n, double tol);
CosupportSums cosupport_sums(const double* z0, const double* dz, std::size_t n, double tol);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double abs_sum(const double* x, std::size_t n);
void soft_threshold(const double* x, double* out, std::size_t n, double alpha);
std::size_t dead_zone_sign(const double* x, double* out, std::size_t n, double tol);
std::size_t count_small(const double* x, std::size_t n, double tol);
CosupportSums cosupport_sums(const double* z0, const double* dz, std::size_t n, double tol);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double abs_sum(const double* x, std::size_t n);
void soft_threshold(const double* x, double* out, std::size_t n, double alpha);
std::size_t dead_zone_sign(const double* x, double* out, std::size_t n, double tol);
std::size_t count_small(const double* x, std::size_t n, double tol);
CosupportSums cosupport_sums(const double* z0, const double* dz, std::size_t n, double tol);
}  // namespace neon
#endif

}  // namespace aol::kernels
