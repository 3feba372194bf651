#pragma once

#include <vector>

#include "tvdeblur/image.hpp"

namespace tvdeblur {

/// Geometry of the tiling of an n-by-n image into (n/m)^2 square blocks of
/// side m. Blocks are numbered column-major over the block grid: block
/// (brow, bcol) has id bcol*(n/m) + brow. The PSF radius r is carried along
/// because it fixes the frame geometry of the extended blocks.
struct BlockPartition {
  int n = 0;     // image side
  int m = 0;     // block side
  int r = 0;     // PSF radius
  int bgrid = 0; // blocks per image side, n/m
  int b = 0;     // block count, bgrid^2
  int q = 0;     // pixels per block, m^2

  int block_row(int id) const { return id % bgrid; }
  int block_col(int id) const { return id / bgrid; }
  int block_id(int brow, int bcol) const { return bcol * bgrid + brow; }

  Rect block_rect(int id) const {
    return Rect{block_row(id) * m, block_col(id) * m, m, m};
  }
};

enum class FrameKind { plus1, plus_r, plus_2r };

/// A block extended by a frame of pixels (radius 1, r, or 2r), clipped at
/// the image boundary. pixel_indices lists the covered global pixel indices
/// column-major over the clipped rect; interior_offsets locates the core
/// block pixels inside pixel_indices, in core column-major order.
struct ExtendedBlock {
  int block_id = 0;
  FrameKind kind = FrameKind::plus_2r;
  Rect rect;                          // clipped frame rectangle
  std::vector<int> pixel_indices;     // extended-local -> global
  std::vector<int> interior_offsets;  // core-local -> extended-local
};

/// Injective index map realizing the paper-style component selection
/// matrices matrix-free: target position k selects source position
/// index_table[k].
struct SelectionMap {
  int source_size = 0;
  int target_size = 0;
  std::vector<int> index_table;

  /// Selection of all source positions NOT selected by this map, ascending.
  /// Acts as the complementary orthogonal projector in index form.
  SelectionMap complement() const;
};

BlockPartition make_partition(int n, int m, int r);

ExtendedBlock extended_block(const BlockPartition& part, int block_id, FrameKind kind);

int frame_radius(const BlockPartition& part, FrameKind kind);

/// Selection of the extended block's pixels out of the full image
/// (the U_i^{+frame} selector, image -> extended block).
SelectionMap image_selection(const ExtendedBlock& eb, int n);

/// Selection of the core block out of the extended block (the paper's U_i
/// resp. W_i, extended block -> core block).
SelectionMap core_selection(const ExtendedBlock& eb);

std::vector<double> gather(const Image& img, const SelectionMap& map);
std::vector<double> gather(const Image& img, const ExtendedBlock& eb);

void scatter(const std::vector<double>& values, const SelectionMap& map, Image& img);

}  // namespace tvdeblur
