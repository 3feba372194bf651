#include "tvdeblur/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace tvdeblur::kernels {

#ifdef TVDEBLUR_HAVE_AVX2_TU
namespace {
bool cpu_has_avx2() {
#if defined(__GNUC__) || defined(__clang__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}
}  // namespace
#endif

namespace {

struct Dispatch {
  Backend backend = Backend::scalar;
  const KernelTable* tab = &scalar_impl::kTable;
};

Backend detect_backend() {
#ifdef TVDEBLUR_HAVE_AVX2_TU
  if (const char* env = std::getenv("TVDEBLUR_KERNEL")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Backend::avx2;
    if (std::strcmp(env, "auto") != 0) return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
#else
  return Backend::scalar;
#endif
}

const KernelTable* table_for(Backend b) {
#ifdef TVDEBLUR_HAVE_AVX2_TU
  if (b == Backend::avx2) return &avx2_impl::kTable;
#endif
  (void)b;
  return &scalar_impl::kTable;
}

Dispatch& dispatch() {
  static Dispatch d = [] {
    Dispatch init;
    init.backend = detect_backend();
    init.tab = table_for(init.backend);
    return init;
  }();
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
  }
  return "?";
}

bool backend_available(Backend b) {
  if (b == Backend::scalar) return true;
#ifdef TVDEBLUR_HAVE_AVX2_TU
  if (b == Backend::avx2) return cpu_has_avx2();
#endif
  return false;
}

void set_backend(Backend b) {
  if (!backend_available(b))
    throw std::invalid_argument(std::string("kernel backend unavailable: ") + backend_name(b));
  dispatch().backend = b;
  dispatch().tab = table_for(b);
}

void reset_backend() {
  dispatch().backend = detect_backend();
  dispatch().tab = table_for(dispatch().backend);
}

const KernelTable& table() { return *dispatch().tab; }

}  // namespace tvdeblur::kernels
