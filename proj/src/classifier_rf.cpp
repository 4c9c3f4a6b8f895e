#include <algorithm>
#include <cmath>
#include <numeric>

#include "classifier_impl.hpp"
#include "sitgrid/rng.hpp"

namespace sitgrid::impl {

namespace {

double gini(const std::vector<int>& counts, int n) {
  double g = 1.0;
  for (int c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    g -= p * p;
  }
  return g;
}

int majority_class(const std::vector<int>& counts) {
  int best = 0;
  for (int c = 1; c < static_cast<int>(counts.size()); ++c) {
    if (counts[c] > counts[best]) best = c;  // tie keeps the lowest class index
  }
  return best;
}

struct BestSplit {
  bool found = false;
  double decrease = -1.0;
  int feature = -1;
  double threshold = 0.0;
};

struct TreeBuilder {
  const Problem& problem;
  const RfParams& params;
  SplitMix64& rng;
  std::vector<double>* importance;
  double n_root;
  Tree nodes;
  std::vector<std::pair<double, int>> scratch;  // (value, label) sort buffer

  // Best midpoint split of one feature over the rows; candidates are scanned
  // in sorted order so ties resolve to the lowest threshold.
  void scan_feature(int feature, const std::vector<std::size_t>& rows,
                    const std::vector<int>& node_counts, double node_gini, BestSplit& best) {
    const FeatureMatrix& fm = *problem.fm;
    scratch.clear();
    for (std::size_t i : rows) {
      scratch.emplace_back(fm.at(i, feature), problem.y[i]);
    }
    std::sort(scratch.begin(), scratch.end());
    const int n = static_cast<int>(scratch.size());
    if (scratch.front().first == scratch.back().first) return;

    std::vector<int> left_counts(problem.n_classes, 0);
    std::vector<int> right_counts = node_counts;
    for (int k = 0; k + 1 < n; ++k) {
      const int label = scratch[k].second;
      ++left_counts[label];
      --right_counts[label];
      const double lo = scratch[k].first;
      const double hi = scratch[k + 1].first;
      if (lo == hi) continue;
      double threshold = lo + (hi - lo) / 2.0;
      if (threshold >= hi) threshold = lo;  // fp midpoint collapse guard
      const int nl = k + 1;
      const int nr = n - nl;
      const double weighted =
          (nl * gini(left_counts, nl) + nr * gini(right_counts, nr)) / static_cast<double>(n);
      const double decrease = node_gini - weighted;
      if (!best.found || decrease > best.decrease ||
          (decrease == best.decrease &&
           (feature < best.feature ||
            (feature == best.feature && threshold < best.threshold)))) {
        best.found = true;
        best.decrease = decrease;
        best.feature = feature;
        best.threshold = threshold;
      }
    }
  }

  std::int32_t build(std::vector<std::size_t>& rows, int depth) {
    const FeatureMatrix& fm = *problem.fm;
    std::vector<int> counts(problem.n_classes, 0);
    for (std::size_t i : rows) ++counts[problem.y[i]];
    const int n = static_cast<int>(rows.size());
    const double node_gini = gini(counts, n);

    const std::int32_t index = static_cast<std::int32_t>(nodes.size());
    nodes.emplace_back();

    const bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;
    if (node_gini == 0.0 || depth_capped) {
      nodes[index].leaf_class = majority_class(counts);
      return index;
    }

    const int d = static_cast<int>(fm.n_cols);
    int mtry = params.mtry > 0 ? std::min(params.mtry, d)
                               : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
    std::vector<int> feature_order(d);
    std::iota(feature_order.begin(), feature_order.end(), 0);
    shuffle(feature_order, rng);

    BestSplit best;
    for (int k = 0; k < d; ++k) {
      // Scan the sampled subset first; keep going through the remaining
      // features only while nothing splittable has been found, so an impure
      // node never turns into a mixed leaf just because of the draw.
      if (k >= mtry && best.found) break;
      scan_feature(feature_order[k], rows, counts, node_gini, best);
    }
    if (!best.found) {
      nodes[index].leaf_class = majority_class(counts);
      return index;
    }

    std::vector<std::size_t> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (std::size_t i : rows) {
      (fm.at(i, best.feature) <= best.threshold ? left_rows : right_rows).push_back(i);
    }
    if (importance != nullptr) {
      (*importance)[best.feature] += (n / n_root) * best.decrease;
    }
    rows.clear();
    rows.shrink_to_fit();

    nodes[index].feature = best.feature;
    nodes[index].threshold = best.threshold;
    nodes[index].left = build(left_rows, depth + 1);
    nodes[index].right = build(right_rows, depth + 1);
    return index;
  }
};

}  // namespace

RfModelParams rf_fit(const Problem& problem, const RfParams& params, std::uint64_t seed,
                     std::vector<double>* importance_out) {
  if (params.n_trees < 1) throw ConfigError("rf requires n_trees >= 1");
  if (params.max_depth < 0) throw ConfigError("rf max_depth must be >= 0 (0 = unlimited)");
  if (params.mtry < 0) throw ConfigError("rf mtry must be >= 0 (0 = ceil(sqrt(d)))");
  RfModelParams model;
  model.trees.reserve(params.n_trees);
  const std::size_t n = problem.n();
  for (int t = 0; t < params.n_trees; ++t) {
    SplitMix64 rng(derive_stream(seed, {0x8full, static_cast<std::uint64_t>(t)}));
    std::vector<std::size_t> rows;
    rows.reserve(n);
    if (params.bootstrap) {
      for (std::size_t i = 0; i < n; ++i) rows.push_back(rng.next_index(n));
    } else {
      rows.resize(n);
      std::iota(rows.begin(), rows.end(), 0);
    }
    TreeBuilder builder{problem, params, rng, importance_out, static_cast<double>(rows.size()),
                        {}, {}};
    builder.build(rows, 0);
    model.trees.push_back(std::move(builder.nodes));
  }
  return model;
}

void rf_votes(const RfModelParams& model, std::span<const double> row, int n_classes,
              std::vector<double>& out) {
  out.assign(n_classes, 0.0);
  for (const Tree& tree : model.trees) {
    std::int32_t node = 0;
    while (tree[node].leaf_class < 0) {
      node = row[tree[node].feature] <= tree[node].threshold ? tree[node].left : tree[node].right;
    }
    out[tree[node].leaf_class] += 1.0;
  }
  const double total = static_cast<double>(model.trees.size());
  for (double& v : out) v /= total;
}

}  // namespace sitgrid::impl
