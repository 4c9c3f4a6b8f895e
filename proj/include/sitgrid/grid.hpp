#pragma once

#include <array>

namespace sitgrid {

inline constexpr int kSensorCount = 32;
inline constexpr int kGridSize = 8;

enum class Mat { seat, back };

/// Raw readings of one 32-sensor pressure mat. Values are unitless ADC-style
/// counts; raw frames are non-negative, normalized frames may go negative.
struct PressureFrame {
  Mat mat = Mat::seat;
  std::array<double, kSensorCount> values{};

  bool operator==(const PressureFrame&) const = default;
};

/// 1-based grid coordinate, row 1 at the top.
struct GridCell {
  int row = 0;
  int col = 0;

  bool operator==(const GridCell&) const = default;
};

/// Fixed projection of the 32 sensor indices onto an 8x8 checkerboard:
/// a cell (r, c) is occupied iff (r + c) is even, and each sensor index
/// 0..31 owns exactly one occupied cell.
class GridMapping {
 public:
  static const std::array<GridCell, kSensorCount>& cells();

  /// Cell of a sensor index (0..31).
  static GridCell cell_of(int sensor);

  /// Sensor index at (row, col), or -1 when the cell is unoccupied.
  static int sensor_at(int row, int col);

  static bool occupied(int row, int col) { return (row + col) % 2 == 0; }
};

/// Dense 8x8 view, indexed [row-1][col-1].
using Grid = std::array<std::array<double, kGridSize>, kGridSize>;

/// Places each sensor value on its grid cell; unoccupied cells are 0.
Grid map_to_grid(const PressureFrame& frame);

/// Exact inverse of map_to_grid. Throws NonZeroUnoccupiedCell if any
/// unoccupied cell carries a nonzero value.
PressureFrame grid_to_frame(const Grid& grid, Mat mat = Mat::seat);

}  // namespace sitgrid
