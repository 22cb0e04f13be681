#include <cstdlib>
#include <string>

#include "aol/error.hpp"
#include "aol/kernels.hpp"

namespace aol::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, scalar::abs_sum, scalar::soft_threshold,
                              scalar::dead_zone_sign, scalar::count_small,
                              scalar::cosupport_sums};

#if defined(__x86_64__) || defined(_M_X64)
constexpr KernelTable kAvx2{Isa::Avx2, avx2::abs_sum, avx2::soft_threshold, avx2::dead_zone_sign,
                            avx2::count_small, avx2::cosupport_sums};
#endif

#if defined(__aarch64__)
constexpr KernelTable kNeon{Isa::Neon, neon::abs_sum, neon::soft_threshold, neon::dead_zone_sign,
                            neon::count_small, neon::cosupport_sums};
#endif

const KernelTable& select() {
  if (const char* env = std::getenv("AOL_KERNELS"); env != nullptr && std::string(env) == "scalar") {
    return kScalar;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (supported(Isa::Avx2)) return kAvx2;
#endif
#if defined(__aarch64__)
  return kNeon;
#endif
  return kScalar;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) {
    throw Error(ErrorCode::InvalidArgument,
                "kernel ISA not supported on this CPU: " + std::string(to_string(isa)));
  }
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2: return kAvx2;
#endif
#if defined(__aarch64__)
    case Isa::Neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const KernelTable& active() {
  static const KernelTable& t = select();
  return t;
}

double abs_sum(std::span<const double> x) { return active().abs_sum(x.data(), x.size()); }

void soft_threshold(std::span<const double> x, std::span<double> out, double alpha) {
  active().soft_threshold(x.data(), out.data(), x.size(), alpha);
}

std::size_t dead_zone_sign(std::span<const double> x, std::span<double> out, double tol) {
  return active().dead_zone_sign(x.data(), out.data(), x.size(), tol);
}

std::size_t count_small(std::span<const double> x, double tol) {
  return active().count_small(x.data(), x.size(), tol);
}

CosupportSums cosupport_sums(std::span<const double> z0, std::span<const double> dz, double tol) {
  return active().cosupport_sums(z0.data(), dz.data(), z0.size(), tol);
}

}  // namespace aol::kernels
