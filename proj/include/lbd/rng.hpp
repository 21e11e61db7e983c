#pragma once

#include <cstdint>
#include <limits>

namespace lbd {

//! Counter-based 64-bit generator.
//!
//! Draw k of a stream is mix(key + (k + 1) * golden), so the sequence is a pure
//! function of (seed, stream, counter). `split` derives an independent key
//! and is the only supported way to parallelize: a stream must never be
//! shared between threads.
class Rng
{
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0) noexcept
    : key_(derive_key(seed, stream))
  {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept
  {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept
  {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
  }

  //! New generator whose key depends on this key and `stream` only, not on
  //! how many draws have been taken from this one.
  Rng split(std::uint64_t stream) const noexcept
  {
    Rng child;
    child.key_ = derive_key(key_, stream + 1);
    return child;
  }

  //! Uniform on the open interval (0, 1), 53 bits.
  double uniform() noexcept
  {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal(double mean, double sd);
  //! Gamma with shape/rate parameterization.
  double gamma(double shape, double rate);
  double beta(double a, double b);

  std::uint64_t counter() const noexcept { return counter_; }

private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept
  {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t derive_key(std::uint64_t seed,
                                            std::uint64_t stream) noexcept
  {
    return mix(mix(seed ^ 0x6A09E667F3BCC909ULL) + stream * 0xD1B54A32D192ED03ULL);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

} // namespace lbd
