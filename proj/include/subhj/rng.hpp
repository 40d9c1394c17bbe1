#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace subhj {

/// Seeded random source with fully specified output. The raw generator is
/// std::mt19937_64 (bit-exact across platforms); the derived draws below avoid
/// std-distributions, whose output is implementation defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * unit(); }

  /// Uniform integer in [0, n), rejection sampled to stay unbiased.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("below(0)");
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = gen_();
    while (v >= limit) v = gen_();
    return v % n;
  }

  std::vector<double> point_in_box(const std::vector<double>& lo,
                                   const std::vector<double>& hi) {
    std::vector<double> p(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) p[i] = uniform(lo[i], hi[i]);
    return p;
  }

 private:
  std::mt19937_64 gen_;
};

} // namespace subhj
