// Brute-force reference implementations used by the unit and acceptance
// suites. Everything here is independent of the library's computation paths:
// the projection table is restated literally and the tree oracle enumerates
// every (feature, midpoint) split.
#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "sitgrid/features.hpp"
#include "sitgrid/grid.hpp"

namespace oracle {

// kTable[r][c] is the sensor index at (row r+1, col c+1), or -1 when empty.
constexpr int kTable[8][8] = {
    {16, -1, 31, -1, 9, -1, 14, -1},
    {-1, 24, -1, 23, -1, 1, -1, 12},
    {18, -1, 29, -1, 11, -1, 10, -1},
    {-1, 26, -1, 21, -1, 3, -1, 8},
    {20, -1, 27, -1, 15, -1, 6, -1},
    {-1, 28, -1, 17, -1, 5, -1, 4},
    {22, -1, 25, -1, 13, -1, 2, -1},
    {-1, 30, -1, 19, -1, 7, -1, 0},
};

inline sitgrid::CenterOfMass center_of_mass(const sitgrid::PressureFrame& f) {
  double total = 0, row = 0, col = 0;
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      const int s = kTable[r][c];
      if (s < 0) continue;
      const double m = f.values[s] > 0.0 ? f.values[s] : 0.0;
      total += m;
      row += m * (r + 1);
      col += m * (c + 1);
    }
  }
  if (total < 1e-9) return {4.5, 4.5, true};
  return {row / total, col / total, false};
}

inline sitgrid::QuadrantSums quadrant_sums(const sitgrid::PressureFrame& f) {
  sitgrid::QuadrantSums q;
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      const int s = kTable[r][c];
      if (s < 0) continue;
      if (r < 4 && c < 4) q.tl += f.values[s];
      if (r < 4 && c >= 4) q.tr += f.values[s];
      if (r >= 4 && c < 4) q.bl += f.values[s];
      if (r >= 4 && c >= 4) q.br += f.values[s];
    }
  }
  return q;
}

inline sitgrid::EdgeSums edge_sums(const sitgrid::PressureFrame& f) {
  sitgrid::EdgeSums e;
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) {
      const int s = kTable[r][c];
      if (s < 0) continue;
      if (r <= 1) e.top += f.values[s];
      if (r >= 6) e.bottom += f.values[s];
      if (c <= 1) e.left += f.values[s];
      if (c >= 6) e.right += f.values[s];
    }
  }
  return e;
}

// --- exhaustive CART (gini, midpoint thresholds, lowest feature/threshold
// tie-break, majority leaves) ---

struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1, right = -1, leaf = -1;
};

inline double gini(const std::vector<int>& counts, int n) {
  double g = 1.0;
  for (int c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    g -= p * p;
  }
  return g;
}

inline int build_tree(const sitgrid::FeatureMatrix& fm, const std::vector<int>& y, int n_classes,
                      const std::vector<std::size_t>& rows, std::vector<TreeNode>& nodes) {
  std::vector<int> counts(n_classes, 0);
  for (std::size_t i : rows) ++counts[y[i]];
  const int n = static_cast<int>(rows.size());
  const double parent = gini(counts, n);
  const int me = static_cast<int>(nodes.size());
  nodes.emplace_back();

  int best_feature = -1;
  double best_threshold = 0.0, best_decrease = -1.0;
  if (parent > 0.0) {
    for (std::size_t f = 0; f < fm.n_cols; ++f) {
      std::vector<double> sorted;
      for (std::size_t i : rows) sorted.push_back(fm.at(i, f));
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
        double threshold = sorted[k] + (sorted[k + 1] - sorted[k]) / 2.0;
        if (threshold >= sorted[k + 1]) threshold = sorted[k];
        std::vector<int> lc(n_classes, 0), rc(n_classes, 0);
        int nl = 0, nr = 0;
        for (std::size_t i : rows) {
          if (fm.at(i, f) <= threshold) {
            ++lc[y[i]];
            ++nl;
          } else {
            ++rc[y[i]];
            ++nr;
          }
        }
        if (nl == 0 || nr == 0) continue;
        const double weighted =
            (nl * gini(lc, nl) + nr * gini(rc, nr)) / static_cast<double>(n);
        const double decrease = parent - weighted;
        if (decrease > best_decrease ||
            (decrease == best_decrease &&
             (static_cast<int>(f) < best_feature ||
              (static_cast<int>(f) == best_feature && threshold < best_threshold)))) {
          best_decrease = decrease;
          best_feature = static_cast<int>(f);
          best_threshold = threshold;
        }
      }
    }
  }
  if (best_feature < 0) {
    int leaf = 0;
    for (int c = 1; c < n_classes; ++c) {
      if (counts[c] > counts[leaf]) leaf = c;
    }
    nodes[me].leaf = leaf;
    return me;
  }
  std::vector<std::size_t> left_rows, right_rows;
  for (std::size_t i : rows) {
    (fm.at(i, best_feature) <= best_threshold ? left_rows : right_rows).push_back(i);
  }
  nodes[me].feature = best_feature;
  nodes[me].threshold = best_threshold;
  nodes[me].left = build_tree(fm, y, n_classes, left_rows, nodes);
  nodes[me].right = build_tree(fm, y, n_classes, right_rows, nodes);
  return me;
}

inline int predict_tree(const std::vector<TreeNode>& nodes, std::span<const double> row) {
  int at = 0;
  while (nodes[at].leaf < 0) {
    at = row[nodes[at].feature] <= nodes[at].threshold ? nodes[at].left : nodes[at].right;
  }
  return nodes[at].leaf;
}

}  // namespace oracle
