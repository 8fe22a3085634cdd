#ifndef SSNMF_RANDOM_HPP
#define SSNMF_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "ssnmf/types.hpp"

namespace ssnmf {

// Standard normal sampler with a fixed algorithm: Box-Muller over the raw
// mt19937 stream. std::normal_distribution is implementation-defined, so it
// would break run-to-run reproducibility across standard libraries; this
// sampler emits the same sequence for the same seed everywhere.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint32_t seed) : gen_(seed) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = kTwoPi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  static constexpr double kTwoPi = 6.283185307179586476925286766559;

  // Uniform on (0, 1): offsetting by half an ulp of the 32-bit lattice keeps
  // log(u1) finite for every generator output, including 0.
  double next_uniform() {
    return (static_cast<double>(gen_()) + 0.5) * 0x1p-32;
  }

  std::mt19937 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// |N(0, 1)| entries, filled column by column so the draw order is part of the
// format.
inline Matrix abs_normal_matrix(Index rows, Index cols, NormalSampler& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = std::abs(rng.next());
  return m;
}

}  // namespace ssnmf

#endif
