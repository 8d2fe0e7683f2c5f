#include <algorithm>
#include <cmath>
#include <numeric>

#include "alkit/errors.hpp"
#include "alkit/models.hpp"
#include "alkit/rng.hpp"

namespace alkit::models {

namespace detail {
void check_fit_inputs(const Matrix& x, std::span<const int> y);
}

namespace {

struct BuildItem {
  int node;
  int begin;
  int end;
};

struct SplitChoice {
  bool valid = false;
  int feature = -1;
  double threshold = 0.0;
  double child_impurity = 0.0;  // weighted Gini of the two children
};

double gini_weighted(int l0, int l1, int r0, int r1) {
  const double nl = l0 + l1, nr = r0 + r1;
  const double gl = 1.0 - (static_cast<double>(l0) * l0 + static_cast<double>(l1) * l1) / (nl * nl);
  const double gr = 1.0 - (static_cast<double>(r0) * r0 + static_cast<double>(r1) * r1) / (nr * nr);
  return (nl * gl + nr * gr) / (nl + nr);
}

}  // namespace

int DecisionTree::leaf_for(std::span<const double> x) const {
  int i = 0;
  while (nodes[i].feature >= 0) {
    i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
  }
  return i;
}

double DecisionTree::proba0(std::span<const double> x) const {
  const TreeNode& leaf = nodes[leaf_for(x)];
  return static_cast<double>(leaf.count0) / static_cast<double>(leaf.count0 + leaf.count1);
}

int DecisionTree::vote(std::span<const double> x) const {
  const TreeNode& leaf = nodes[leaf_for(x)];
  return leaf.count0 >= leaf.count1 ? 0 : 1;
}

void RandomForest::fit(const Matrix& x, std::span<const int> y) {
  detail::check_fit_inputs(x, y);
  if (cfg_.tree_count < 1) throw DomainError("random forest: tree_count must be >= 1");
  n_features_ = x.cols();
  n_train_ = x.rows();
  const int n = x.rows();
  const int d = x.cols();
  const int mtry = std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d)))));

  trees_.assign(cfg_.tree_count, {});
  std::vector<int> rows;
  std::vector<int> feature_ids(d);
  std::vector<std::pair<double, int>> sorted;  // (value, label)

  for (int t = 0; t < cfg_.tree_count; ++t) {
    SplitMix64 rng(SeedSeq(cfg_.seed).mix("tree").mix(static_cast<uint64_t>(t)).value());
    DecisionTree& tree = trees_[t];
    tree.bootstrap.resize(n);
    for (int i = 0; i < n; ++i) tree.bootstrap[i] = static_cast<int>(rng.next_below(n));

    rows = tree.bootstrap;
    tree.nodes.clear();
    tree.nodes.push_back({});
    std::vector<BuildItem> stack{{0, 0, n}};

    while (!stack.empty()) {
      BuildItem item = stack.back();
      stack.pop_back();
      const int m = item.end - item.begin;

      int c0 = 0;
      for (int i = item.begin; i < item.end; ++i) c0 += y[rows[i]] == 0 ? 1 : 0;
      const int c1 = m - c0;
      tree.nodes[item.node].count0 = c0;
      tree.nodes[item.node].count1 = c1;
      if (c0 == 0 || c1 == 0 || m < 2 * cfg_.min_leaf) continue;  // leaf

      // sample mtry distinct candidate features; evaluate in ascending order
      std::iota(feature_ids.begin(), feature_ids.end(), 0);
      for (int i = 0; i < mtry; ++i) {
        const int j = i + static_cast<int>(rng.next_below(static_cast<uint64_t>(d - i)));
        std::swap(feature_ids[i], feature_ids[j]);
      }
      std::sort(feature_ids.begin(), feature_ids.begin() + mtry);

      SplitChoice best;
      for (int fi = 0; fi < mtry; ++fi) {
        const int f = feature_ids[fi];
        sorted.clear();
        for (int i = item.begin; i < item.end; ++i) sorted.emplace_back(x.at(rows[i], f), y[rows[i]]);
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        int l0 = 0, l1 = 0;
        for (int i = 0; i + 1 < m; ++i) {
          if (sorted[i].second == 0) ++l0;
          else ++l1;
          if (!(sorted[i + 1].first > sorted[i].first)) continue;
          const int nl = i + 1;
          if (nl < cfg_.min_leaf || m - nl < cfg_.min_leaf) continue;
          const double imp = gini_weighted(l0, l1, c0 - l0, c1 - l1);
          if (!best.valid || imp < best.child_impurity) {
            best.valid = true;
            best.feature = f;
            best.threshold = sorted[i].first + 0.5 * (sorted[i + 1].first - sorted[i].first);
            best.child_impurity = imp;
          }
        }
      }
      if (!best.valid) continue;  // all candidate features constant here

      auto mid = std::partition(rows.begin() + item.begin, rows.begin() + item.end,
                                [&](int r) { return x.at(r, best.feature) <= best.threshold; });
      const int split_at = static_cast<int>(mid - rows.begin());
      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.push_back({});
      tree.nodes.push_back({});
      tree.nodes[item.node].feature = best.feature;
      tree.nodes[item.node].threshold = best.threshold;
      tree.nodes[item.node].left = left;
      tree.nodes[item.node].right = left + 1;
      stack.push_back({left, item.begin, split_at});
      stack.push_back({left + 1, split_at, item.end});
    }
  }
}

double RandomForest::predict_proba_row(std::span<const double> x) const {
  if (trees_.empty()) throw DomainError("predict: model not fitted");
  if (static_cast<int>(x.size()) != n_features_) throw DomainError("predict: feature width mismatch");
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.proba0(x);
  return sum / static_cast<double>(trees_.size());
}

std::unique_ptr<RandomForest> fit_random_forest(const Matrix& x, std::span<const int> y, RandomForestConfig cfg) {
  auto model = std::make_unique<RandomForest>(cfg);
  model->fit(x, y);
  return model;
}

OobResult oob_accuracy(const RandomForest& model, const Matrix& x, std::span<const int> y) {
  if (!model.fitted()) throw DomainError("oob_accuracy: model not fitted");
  const int n = x.rows();
  if (n != model.train_rows() || n != static_cast<int>(y.size())) {
    throw DomainError("oob_accuracy: rows must be the fitting rows");
  }
  std::vector<int> votes0(n, 0), votes_total(n, 0);
  std::vector<char> in_bag(n);
  for (const auto& tree : model.trees()) {
    std::fill(in_bag.begin(), in_bag.end(), 0);
    for (int r : tree.bootstrap) in_bag[r] = 1;
    for (int r = 0; r < n; ++r) {
      if (in_bag[r]) continue;
      ++votes_total[r];
      if (tree.vote(x.row(r)) == 0) ++votes0[r];
    }
  }
  int covered = 0, correct = 0;
  for (int r = 0; r < n; ++r) {
    if (votes_total[r] == 0) continue;
    ++covered;
    const int pred = 2 * votes0[r] >= votes_total[r] ? 0 : 1;  // tie -> class 0
    if (pred == y[r]) ++correct;
  }
  if (covered == 0) throw DomainError("oob_accuracy: no row is out-of-bag for any tree");
  OobResult res;
  res.accuracy = static_cast<double>(correct) / static_cast<double>(covered);
  res.coverage = static_cast<double>(covered) / static_cast<double>(n);
  return res;
}

}  // namespace alkit::models
