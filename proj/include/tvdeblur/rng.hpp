#pragma once

#include <cstdint>
#include <span>

namespace tvdeblur {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Every (seed, chain, purpose, block, cycle) tuple names an independent
/// stream; draws within a stream are counted by a 32-bit index. Because a
/// stream is addressed rather than advanced, block updates consume random
/// numbers independently of worker count and scheduling order, which is
/// what makes the parallel sampler bit-reproducible.
struct StreamId {
  uint64_t seed = 0;
  uint32_t chain = 0;
  uint32_t purpose = 0;  // one of the stream_purpose constants
  uint32_t block = 0;    // block id (or 0 for global updates)
  uint32_t cycle = 0;    // cycle / iteration number
};

namespace stream_purpose {
inline constexpr uint32_t block_update = 0;  // proposal noise + accept uniform
inline constexpr uint32_t data_noise = 1;    // synthetic observation noise
inline constexpr uint32_t power_iter = 2;    // dominance-check start vectors
inline constexpr uint32_t init_state = 3;    // chain initialization helpers
}  // namespace stream_purpose

class RngStream {
 public:
  explicit RngStream(const StreamId& id);

  /// Uniform draw in the open interval (0, 1).
  double uniform01();

  /// Standard normal draws (Box-Muller; consumes a whole pair even for the
  /// last element of odd-length fills, keeping consumption deterministic).
  void fill_normals(std::span<double> out);
  double normal();

 private:
  void next_block();

  uint32_t key_[2];
  uint32_t base_[3];  // cycle, block|purpose, chain
  uint32_t idx_ = 0;  // 128-bit blocks consumed so far
  uint32_t buf_[4];
  int buf_pos_ = 4;   // next unread 32-bit word in buf_
  uint32_t next_u32();
};

}  // namespace tvdeblur
