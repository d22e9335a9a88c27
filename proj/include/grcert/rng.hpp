#ifndef GRCERT_RNG_HPP
#define GRCERT_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace grcert {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-splittable random stream: (master_seed, stream_id) fully determines the
// sequence, so work distributed over streams is independent of scheduling order.
// Variates are generated from raw engine bits rather than std:: distributions,
// whose output is implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : engine_(splitmix64(splitmix64(master_seed) + stream_id * 0x9e3779b97f4a7c15ULL)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [0, n). Negligible modulo bias is irrelevant here; n is tiny.
  int uniform_int(int n) {
    int v = static_cast<int>(uniform01() * n);
    return v < n ? v : n - 1;
  }

  // Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double gaussian() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace grcert

#endif
