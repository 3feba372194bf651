#pragma once

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tvdeblur {

/// Square grayscale image stored as a flat column-major vector:
/// pixel (row a, col b) lives at index b*n + a. All algorithms in this
/// library assume this layout; it is part of the file formats as well.
struct Image {
  int n = 0;                 // side length in pixels
  std::vector<double> data;  // n*n intensities

  Image() = default;
  explicit Image(int side, double fill = 0.0) : n(side), data(static_cast<size_t>(side) * side, fill) {
    if (side <= 0) throw std::invalid_argument("Image: side length must be positive");
  }
  Image(int side, std::vector<double> values) : n(side), data(std::move(values)) {
    if (side <= 0) throw std::invalid_argument("Image: side length must be positive");
    if (data.size() != static_cast<size_t>(side) * side)
      throw std::invalid_argument("Image: data length must equal n^2");
  }

  int num_pixels() const { return n * n; }

  static int index(int n, int row, int col) { return col * n + row; }
  int index(int row, int col) const { return col * n + row; }

  double& at(int row, int col) { return data[static_cast<size_t>(col) * n + row]; }
  double at(int row, int col) const { return data[static_cast<size_t>(col) * n + row]; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Axis-aligned pixel rectangle: rows [r0, r0+rows), cols [c0, c0+cols).
struct Rect {
  int r0 = 0, c0 = 0, rows = 0, cols = 0;

  int size() const { return rows * cols; }
  int r1() const { return r0 + rows; }  // exclusive
  int c1() const { return c0 + cols; }  // exclusive

  bool contains(int row, int col) const {
    return row >= r0 && row < r1() && col >= c0 && col < c1();
  }

  Rect grown(int margin) const { return {r0 - margin, c0 - margin, rows + 2 * margin, cols + 2 * margin}; }

  /// Intersection with the n-by-n image grid.
  Rect clipped(int n) const {
    const int rr0 = std::max(r0, 0), cc0 = std::max(c0, 0);
    const int rr1 = std::min(r0 + rows, n), cc1 = std::min(c0 + cols, n);
    return {rr0, cc0, std::max(0, rr1 - rr0), std::max(0, cc1 - cc0)};
  }

  /// Column-major offset of (row, col) inside this rect.
  int local_index(int row, int col) const {
    assert(contains(row, col));
    return (col - c0) * rows + (row - r0);
  }

  bool operator==(const Rect& o) const = default;
};

}  // namespace tvdeblur
