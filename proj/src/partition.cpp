#include "tvdeblur/partition.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tvdeblur {

BlockPartition make_partition(int n, int m, int r) {
  if (n <= 0 || m <= 0) throw std::invalid_argument("make_partition: n and m must be positive");
  if (r < 0) throw std::invalid_argument("make_partition: PSF radius must be non-negative");
  if (n % m != 0)
    throw std::invalid_argument("make_partition: block side m=" + std::to_string(m) +
                                " does not divide image side n=" + std::to_string(n));
  if (m <= 2 * r)
    throw std::invalid_argument("make_partition: require m > 2r (got m=" + std::to_string(m) +
                                ", r=" + std::to_string(r) + ")");
  BlockPartition part;
  part.n = n;
  part.m = m;
  part.r = r;
  part.bgrid = n / m;
  part.b = part.bgrid * part.bgrid;
  part.q = m * m;
  return part;
}

int frame_radius(const BlockPartition& part, FrameKind kind) {
  switch (kind) {
    case FrameKind::plus1: return 1;
    case FrameKind::plus_r: return part.r;
    case FrameKind::plus_2r: return 2 * part.r;
  }
  return 0;
}

ExtendedBlock extended_block(const BlockPartition& part, int block_id, FrameKind kind) {
  if (block_id < 0 || block_id >= part.b)
    throw std::invalid_argument("extended_block: block_id out of range");
  ExtendedBlock eb;
  eb.block_id = block_id;
  eb.kind = kind;
  const Rect core = part.block_rect(block_id);
  eb.rect = core.grown(frame_radius(part, kind)).clipped(part.n);

  eb.pixel_indices.reserve(eb.rect.size());
  for (int c = eb.rect.c0; c < eb.rect.c1(); ++c)
    for (int row = eb.rect.r0; row < eb.rect.r1(); ++row)
      eb.pixel_indices.push_back(Image::index(part.n, row, c));

  eb.interior_offsets.reserve(part.q);
  for (int c = core.c0; c < core.c1(); ++c)
    for (int row = core.r0; row < core.r1(); ++row)
      eb.interior_offsets.push_back(eb.rect.local_index(row, c));
  return eb;
}

SelectionMap SelectionMap::complement() const {
  std::vector<char> taken(source_size, 0);
  for (int idx : index_table) taken[idx] = 1;
  SelectionMap out;
  out.source_size = source_size;
  out.target_size = source_size - target_size;
  out.index_table.reserve(out.target_size);
  for (int i = 0; i < source_size; ++i)
    if (!taken[i]) out.index_table.push_back(i);
  return out;
}

SelectionMap image_selection(const ExtendedBlock& eb, int n) {
  SelectionMap map;
  map.source_size = n * n;
  map.target_size = static_cast<int>(eb.pixel_indices.size());
  map.index_table = eb.pixel_indices;
  return map;
}

SelectionMap core_selection(const ExtendedBlock& eb) {
  SelectionMap map;
  map.source_size = static_cast<int>(eb.pixel_indices.size());
  map.target_size = static_cast<int>(eb.interior_offsets.size());
  map.index_table = eb.interior_offsets;
  return map;
}

std::vector<double> gather(const Image& img, const SelectionMap& map) {
  std::vector<double> out(map.target_size);
  for (int k = 0; k < map.target_size; ++k) {
    const int src = map.index_table[k];
    assert(src >= 0 && src < static_cast<int>(img.data.size()));
    out[k] = img.data[src];
  }
  return out;
}

std::vector<double> gather(const Image& img, const ExtendedBlock& eb) {
  std::vector<double> out(eb.pixel_indices.size());
  for (size_t k = 0; k < eb.pixel_indices.size(); ++k) out[k] = img.data[eb.pixel_indices[k]];
  return out;
}

void scatter(const std::vector<double>& values, const SelectionMap& map, Image& img) {
  if (static_cast<int>(values.size()) != map.target_size)
    throw std::invalid_argument("scatter: value count does not match selection size");
  for (int k = 0; k < map.target_size; ++k) img.data[map.index_table[k]] = values[k];
}

}  // namespace tvdeblur
