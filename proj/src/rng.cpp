#include "tvdeblur/rng.hpp"

#include <cmath>

namespace tvdeblur {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& lo, uint32_t& hi) {
  const uint64_t p = static_cast<uint64_t>(a) * b;
  lo = static_cast<uint32_t>(p);
  hi = static_cast<uint32_t>(p >> 32);
}

inline void philox_round(uint32_t c[4], const uint32_t k[2]) {
  uint32_t lo0, hi0, lo1, hi1;
  mulhilo(kPhiloxM0, c[0], lo0, hi0);
  mulhilo(kPhiloxM1, c[2], lo1, hi1);
  const uint32_t r0 = hi1 ^ c[1] ^ k[0];
  const uint32_t r1 = lo1;
  const uint32_t r2 = hi0 ^ c[3] ^ k[1];
  const uint32_t r3 = lo0;
  c[0] = r0;
  c[1] = r1;
  c[2] = r2;
  c[3] = r3;
}

inline void philox4x32_10(const uint32_t counter[4], const uint32_t key[2], uint32_t out[4]) {
  uint32_t c[4] = {counter[0], counter[1], counter[2], counter[3]};
  uint32_t k[2] = {key[0], key[1]};
  for (int round = 0; round < 10; ++round) {
    philox_round(c, k);
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
  }
  out[0] = c[0];
  out[1] = c[1];
  out[2] = c[2];
  out[3] = c[3];
}

}  // namespace

RngStream::RngStream(const StreamId& id) {
  key_[0] = static_cast<uint32_t>(id.seed);
  key_[1] = static_cast<uint32_t>(id.seed >> 32);
  base_[0] = id.cycle;
  base_[1] = (id.block & 0x00FFFFFFu) | (id.purpose << 24);
  base_[2] = id.chain;
}

void RngStream::next_block() {
  const uint32_t counter[4] = {idx_++, base_[0], base_[1], base_[2]};
  philox4x32_10(counter, key_, buf_);
  buf_pos_ = 0;
}

uint32_t RngStream::next_u32() {
  if (buf_pos_ >= 4) next_block();
  return buf_[buf_pos_++];
}

double RngStream::uniform01() {
  const uint32_t lo = next_u32();
  const uint32_t hi = next_u32();
  const uint64_t v = (static_cast<uint64_t>(hi) << 32) | lo;
  // 53 significant bits, offset by half an ulp so 0 and 1 are excluded.
  return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
}

void RngStream::fill_normals(std::span<double> out) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  size_t i = 0;
  while (i < out.size()) {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double a = two_pi * u2;
    out[i++] = rad * std::cos(a);
    if (i < out.size()) out[i++] = rad * std::sin(a);
  }
}

double RngStream::normal() {
  double v[1];
  fill_normals(std::span<double>(v, 1));
  return v[0];
}

}  // namespace tvdeblur
