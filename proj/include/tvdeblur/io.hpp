#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tvdeblur/image.hpp"

namespace tvdeblur {

/// Binary 8-bit PGM (P5). Loading rescales to [0,1]; writing clamps to
/// [0,1] and quantizes to 255 levels (clamping happens only here, never
/// inside the samplers). Non-square images are rejected.
Image read_pgm(const std::string& path);
void write_pgm(const std::string& path, const Image& img);

/// Flat little-endian float64 dump with a 32-byte header:
///   bytes 0..7   magic "TVDBLRF1"
///   u32 version (1), u32 n, u32 n_saved, u32 chain_id, u32 thin, u32 zero
/// followed by n_saved * n^2 doubles (sample-major, column-major pixels).
struct F64Dump {
  uint32_t n = 0;
  uint32_t n_saved = 0;
  uint32_t chain_id = 0;
  uint32_t thin = 1;
  std::vector<double> data;
};

void write_f64(const std::string& path, const F64Dump& dump);
F64Dump read_f64(const std::string& path);

/// Single image convenience wrappers around the dump format.
void write_f64_image(const std::string& path, const Image& img);
Image read_f64_image(const std::string& path);

/// Reads either format by extension (.f64 exact, .pgm quantized).
Image read_image_any(const std::string& path);

uint64_t fnv1a64(const void* data, size_t len);
uint64_t fnv1a64_file(const std::string& path);

std::string hex64(uint64_t v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace tvdeblur
