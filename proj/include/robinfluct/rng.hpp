#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace robinfluct {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3", SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMulA = 0xD2511F53u;
  constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  constexpr std::uint32_t kWeylA = 0x9E3779B9u;
  constexpr std::uint32_t kWeylB = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

/// Independent stream families. Each (seed, replica, particle, purpose)
/// addresses a distinct Philox counter range.
enum class Purpose : std::uint32_t {
  kMotion = 1,
  kThreshold = 2,
  kInitial = 3,
  kBootstrap = 4,
  kGaussian = 5,
  kTest = 6,
};

struct StreamId {
  std::uint64_t seed = 0;
  std::uint32_t replica = 0;
  std::uint32_t particle = 0;
  Purpose purpose = Purpose::kTest;
};

/// Uniform on the open interval (0, 1) from 32 random bits.
inline double to_unit_open(std::uint32_t bits) {
  return (static_cast<double>(bits) + 0.5) * (1.0 / 4294967296.0);
}

/// Four raw words for block `block` of a stream. Block indices up to 2^56.
inline std::array<std::uint32_t, 4> stream_block(const StreamId& id, std::uint64_t block) {
  const std::array<std::uint32_t, 4> ctr = {
      id.particle, id.replica, static_cast<std::uint32_t>(block),
      (static_cast<std::uint32_t>(id.purpose) << 24) |
          static_cast<std::uint32_t>((block >> 32) & 0xFFFFFFu)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(id.seed),
                                            static_cast<std::uint32_t>(id.seed >> 32)};
  return philox4x32(ctr, key);
}

/// Four standard normals from one block (two Box-Muller pairs).
inline std::array<double, 4> normal_block(const StreamId& id, std::uint64_t block) {
  const auto w = stream_block(id, block);
  std::array<double, 4> out;
  for (int pair = 0; pair < 2; ++pair) {
    const double r = std::sqrt(-2.0 * std::log(to_unit_open(w[2 * pair])));
    const double theta = 2.0 * std::numbers::pi * to_unit_open(w[2 * pair + 1]);
    out[2 * pair] = r * std::cos(theta);
    out[2 * pair + 1] = r * std::sin(theta);
  }
  return out;
}

/// The i-th standard normal of a stream; random access.
inline double normal_at(const StreamId& id, std::uint64_t index) {
  return normal_block(id, index / 4)[index % 4];
}

/// The i-th uniform (0,1) of a stream; random access.
inline double uniform_at(const StreamId& id, std::uint64_t index) {
  return to_unit_open(stream_block(id, index / 4)[index % 4]);
}

/// Sequential reader over a normal stream. Yields exactly the values of
/// normal_at(id, 0), normal_at(id, 1), ...
class NormalStream {
 public:
  explicit NormalStream(StreamId id, std::uint64_t start = 0) : id_(id), next_(start) {}

  double next() {
    const std::uint64_t block = next_ / 4;
    if (block != cached_block_) {
      cache_ = normal_block(id_, block);
      cached_block_ = block;
    }
    return cache_[next_++ % 4];
  }

  std::uint64_t position() const { return next_; }

 private:
  StreamId id_;
  std::uint64_t next_ = 0;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  std::array<double, 4> cache_{};
};

/// Sequential reader over a uniform stream.
class UniformStream {
 public:
  explicit UniformStream(StreamId id, std::uint64_t start = 0) : id_(id), next_(start) {}

  double next() {
    const std::uint64_t block = next_ / 4;
    if (block != cached_block_) {
      cache_ = stream_block(id_, block);
      cached_block_ = block;
    }
    return to_unit_open(cache_[next_++ % 4]);
  }

 private:
  StreamId id_;
  std::uint64_t next_ = 0;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  std::array<std::uint32_t, 4> cache_{};
};

}  // namespace robinfluct
