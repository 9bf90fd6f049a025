#include <cstdlib>
#include <string>

#include "variants.hpp"

namespace ioncrystal::kernels {

namespace detail {
#if !IONCRYSTAL_HAVE_AVX2
const CoulombKernels* avx2_table() { return nullptr; }
#endif
#if !IONCRYSTAL_HAVE_NEON
const CoulombKernels* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if IONCRYSTAL_HAVE_AVX2 && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const CoulombKernels& select() {
  const auto all = available_kernels();
  const CoulombKernels* widest = all.back();
  const char* env = std::getenv("IONCRYSTAL_SIMD");
  if (env == nullptr || *env == '\0') return *widest;
  const std::string want(env);
  for (const auto* k : all) {
    if (isa_name(k->isa) == want) return *k;
  }
  return scalar_kernels();
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

std::vector<const CoulombKernels*> available_kernels() {
  std::vector<const CoulombKernels*> out{&scalar_kernels()};
  if (const auto* k = detail::avx2_table(); k != nullptr && cpu_has_avx2()) out.push_back(k);
  if (const auto* k = detail::neon_table(); k != nullptr) out.push_back(k);
  return out;
}

const CoulombKernels& active_kernels() {
  static const CoulombKernels& chosen = select();
  return chosen;
}

}  // namespace ioncrystal::kernels
