#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace shelfmem {

/// Grid cell in the 2D footprint map: r indexes depth (row 0 is the open
/// shelf front), c indexes width.
struct CellIdx {
  int r = 0;
  int c = 0;
  friend bool operator==(const CellIdx&, const CellIdx&) = default;
  friend auto operator<=>(const CellIdx&, const CellIdx&) = default;
};

/// Voxel in the 3D occupancy grid; k indexes height above the shelf board.
struct VoxelIdx {
  int r = 0;
  int c = 0;
  int k = 0;
  friend bool operator==(const VoxelIdx&, const VoxelIdx&) = default;
  friend auto operator<=>(const VoxelIdx&, const VoxelIdx&) = default;
};

/// Shared shape of the belief and ground-truth grids. The world frame has
/// x along the shelf width (columns), y along the depth (rows, y=0 at the
/// open front), z up from the shelf board (levels).
struct GridSpec {
  int rows = 82;
  int cols = 157;
  int levels = 40;
  double resolution = 0.005;  // meters per cell
  int n_classes = 12;         // class 0 is free space

  int cell_count() const { return rows * cols; }
  std::size_t voxel_count() const {
    return static_cast<std::size_t>(rows) * cols * levels;
  }
  bool in_bounds(int r, int c) const {
    return r >= 0 && r < rows && c >= 0 && c < cols;
  }
  bool in_bounds(int r, int c, int k) const {
    return in_bounds(r, c) && k >= 0 && k < levels;
  }
  double width() const { return cols * resolution; }
  double depth() const { return rows * resolution; }
  double height() const { return levels * resolution; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

template <typename T>
class Grid2 {
 public:
  Grid2() = default;
  Grid2(int rows, int cols, T init = T{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, init) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const T& at(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  T& at(CellIdx i) { return at(i.r, i.c); }
  const T& at(CellIdx i) const { return at(i.r, i.c); }

  bool in_bounds(int r, int c) const {
    return r >= 0 && r < rows_ && c >= 0 && c < cols_;
  }

  void fill(const T& v) { data_.assign(data_.size(), v); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  friend bool operator==(const Grid2&, const Grid2&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

template <typename T>
class Grid3 {
 public:
  Grid3() = default;
  Grid3(int rows, int cols, int levels, T init = T{})
      : rows_(rows),
        cols_(cols),
        levels_(levels),
        data_(static_cast<std::size_t>(rows) * cols * levels, init) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int levels() const { return levels_; }

  std::size_t index(int r, int c, int k) const {
    return (static_cast<std::size_t>(r) * cols_ + c) * levels_ + k;
  }

  T& at(int r, int c, int k) { return data_[index(r, c, k)]; }
  const T& at(int r, int c, int k) const { return data_[index(r, c, k)]; }
  T& at(VoxelIdx i) { return at(i.r, i.c, i.k); }
  const T& at(VoxelIdx i) const { return at(i.r, i.c, i.k); }

  /// Column of `levels` consecutive values at footprint cell (r, c).
  std::span<T> column(int r, int c) {
    return {&data_[index(r, c, 0)], static_cast<std::size_t>(levels_)};
  }
  std::span<const T> column(int r, int c) const {
    return {&data_[index(r, c, 0)], static_cast<std::size_t>(levels_)};
  }

  bool in_bounds(int r, int c, int k) const {
    return r >= 0 && r < rows_ && c >= 0 && c < cols_ && k >= 0 && k < levels_;
  }

  void fill(const T& v) { data_.assign(data_.size(), v); }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  friend bool operator==(const Grid3&, const Grid3&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  int levels_ = 0;
  std::vector<T> data_;
};

}  // namespace shelfmem
