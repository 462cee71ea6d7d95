#pragma once

// Counter-based random numbers (Philox4x64-10, Salmon et al. 2011).
// A stream is identified by (seed, stream_id); draws are a pure function of
// (seed, stream_id, draw index), so results do not depend on which worker
// thread produced them.

#include <array>
#include <cstdint>

namespace sivsim {

class Philox4x64 {
 public:
  using Block = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Block encrypt(Block counter, Key key) noexcept;
};

/// Sequential uniform stream over Philox blocks for one trajectory.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform double in the open interval (0, 1).
  double uniform() noexcept;
  /// Exponential variate with unit mean.
  double exponential() noexcept;

 private:
  Philox4x64::Key key_;
  Philox4x64::Block counter_{};
  Philox4x64::Block buffer_{};
  int buffer_pos_ = 4;
};

}  // namespace sivsim
