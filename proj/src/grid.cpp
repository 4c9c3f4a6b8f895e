#include "sitgrid/grid.hpp"

#include <string>

#include "sitgrid/errors.hpp"

namespace sitgrid {

namespace {

// Sensor index -> (row, col), row 1 = top. Indexed by sensor.
constexpr std::array<GridCell, kSensorCount> kCells = {{
    {8, 8},  // 0
    {2, 6},  // 1
    {7, 7},  // 2
    {4, 6},  // 3
    {6, 8},  // 4
    {6, 6},  // 5
    {5, 7},  // 6
    {8, 6},  // 7
    {4, 8},  // 8
    {1, 5},  // 9
    {3, 7},  // 10
    {3, 5},  // 11
    {2, 8},  // 12
    {7, 5},  // 13
    {1, 7},  // 14
    {5, 5},  // 15
    {1, 1},  // 16
    {6, 4},  // 17
    {3, 1},  // 18
    {8, 4},  // 19
    {5, 1},  // 20
    {4, 4},  // 21
    {7, 1},  // 22
    {2, 4},  // 23
    {2, 2},  // 24
    {7, 3},  // 25
    {4, 2},  // 26
    {5, 3},  // 27
    {6, 2},  // 28
    {3, 3},  // 29
    {8, 2},  // 30
    {1, 3},  // 31
}};

constexpr std::array<std::array<int, kGridSize>, kGridSize> build_reverse() {
  std::array<std::array<int, kGridSize>, kGridSize> rev{};
  for (auto& row : rev) row.fill(-1);
  for (int s = 0; s < kSensorCount; ++s) {
    rev[kCells[s].row - 1][kCells[s].col - 1] = s;
  }
  return rev;
}

constexpr auto kReverse = build_reverse();

}  // namespace

const std::array<GridCell, kSensorCount>& GridMapping::cells() { return kCells; }

GridCell GridMapping::cell_of(int sensor) { return kCells.at(static_cast<std::size_t>(sensor)); }

int GridMapping::sensor_at(int row, int col) {
  if (row < 1 || row > kGridSize || col < 1 || col > kGridSize) return -1;
  return kReverse[row - 1][col - 1];
}

Grid map_to_grid(const PressureFrame& frame) {
  Grid grid{};
  for (int s = 0; s < kSensorCount; ++s) {
    const GridCell c = kCells[s];
    grid[c.row - 1][c.col - 1] = frame.values[s];
  }
  return grid;
}

PressureFrame grid_to_frame(const Grid& grid, Mat mat) {
  PressureFrame frame;
  frame.mat = mat;
  for (int r = 1; r <= kGridSize; ++r) {
    for (int c = 1; c <= kGridSize; ++c) {
      const int s = GridMapping::sensor_at(r, c);
      if (s >= 0) {
        frame.values[s] = grid[r - 1][c - 1];
      } else if (grid[r - 1][c - 1] != 0.0) {
        throw NonZeroUnoccupiedCell("unoccupied cell (" + std::to_string(r) + ", " +
                                    std::to_string(c) + ") carries nonzero value");
      }
    }
  }
  return frame;
}

}  // namespace sitgrid
