#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "msv/simd.hpp"

namespace msv::simd {
namespace {

constexpr KernelTable kScalarTable{Isa::kScalar, &scalar::blend, &scalar::nearest_seed_2d,
                                   &scalar::nearest_center_5d};
#if defined(MSV_HAVE_AVX2)
constexpr KernelTable kAvx2Table{Isa::kAvx2, &avx2::blend, &avx2::nearest_seed_2d,
                                 &avx2::nearest_center_5d};
#endif

bool cpu_has_avx2() {
#if defined(MSV_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("MSV_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &kScalarTable;
#if defined(MSV_HAVE_AVX2)
    if (want == "avx2" && cpu_has_avx2()) return &kAvx2Table;
#endif
  }
#if defined(MSV_HAVE_AVX2)
  if (cpu_has_avx2()) return &kAvx2Table;
#endif
  return &kScalarTable;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
      return cpu_has_avx2();
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("SIMD variant not available: " + std::string(to_string(isa)));
  }
#if defined(MSV_HAVE_AVX2)
  if (isa == Isa::kAvx2) return kAvx2Table;
#endif
  return kScalarTable;
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void force_isa(Isa isa) { current().store(&table_for(isa), std::memory_order_release); }

}  // namespace msv::simd
