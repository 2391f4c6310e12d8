#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace taxo {

// Counter-based deterministic PRNG (splitmix64 core). All randomness in the
// engine flows from one seed through this class so runs are reproducible
// across platforms; std::random distributions are avoided on purpose since
// their output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). n must be positive.
  int uniform_int(int n) {
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t nn = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % nn;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<int>(x % nn);
  }

  // Box-Muller. Two fresh uniforms per draw; no cached spare so the stream
  // position is a pure function of the call count.
  double gaussian(double mean, double stddev) {
    double u1 = 1.0 - uniform();  // (0, 1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(6.283185307179586476925286766559 * u2);
  }

  // Derives an independent substream; deterministic in (current state, tag).
  Rng fork(std::uint64_t tag) const {
    Rng child(state_ ^ (0xD1B54A32D192ED03ull * (tag + 1)));
    child.next_u64();
    return child;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(static_cast<int>(i)));
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct elements drawn uniformly, emitted in draw order.
  template <class T>
  std::vector<T> sample(std::vector<T> pool, std::size_t k) {
    std::vector<T> out;
    out.reserve(k);
    while (out.size() < k && !pool.empty()) {
      std::size_t j = static_cast<std::size_t>(uniform_int(static_cast<int>(pool.size())));
      out.push_back(pool[j]);
      pool[j] = pool.back();
      pool.pop_back();
    }
    return out;
  }

 private:
  std::uint64_t state_;
};

}  // namespace taxo
