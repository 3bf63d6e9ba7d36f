#include "scout/pairmodel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "scout/error.hpp"
#include "scout/random.hpp"

namespace scout {

std::string_view to_string(ClassLabel label) {
  switch (label) {
    case ClassLabel::kBetterPlus: return "better+";
    case ClassLabel::kBetter: return "better";
    case ClassLabel::kFair: return "fair";
    case ClassLabel::kWorse: return "worse";
    case ClassLabel::kWorsePlus: return "worse+";
  }
  return "?";
}

ClassLabel discretize_label(double ratio) {
  if (!std::isfinite(ratio) || !(ratio > 0.0))
    throw Error(ErrorCode::kInvalidRatio, "ratio must be finite and > 0");
  if (ratio <= kClassCutPoints[0]) return ClassLabel::kBetterPlus;
  if (ratio <= kClassCutPoints[1]) return ClassLabel::kBetter;
  if (ratio < kClassCutPoints[2]) return ClassLabel::kFair;
  if (ratio < kClassCutPoints[3]) return ClassLabel::kWorse;
  return ClassLabel::kWorsePlus;
}

double probability_of_improvement(const ClassDistribution& d) {
  return d[ClassLabel::kBetterPlus] + d[ClassLabel::kBetter];
}

std::vector<PairwiseSample> build_training_set(const PerfDatabase& db,
                                               std::string_view exclude_workload,
                                               Objective objective,
                                               std::optional<std::size_t> max_pairs_per_workload,
                                               std::uint64_t seed) {
  const ConfigSpace& space = db.space();
  const std::size_t n = space.size();
  const std::size_t dim_metrics = db.metric_dimension();
  std::vector<ConfigFeatures> features;
  features.reserve(n);
  for (const CloudConfig& c : space.configs()) features.push_back(encode_config(c, space));

  const std::size_t pairs = n < 2 ? 0 : n * (n - 1);
  std::vector<PairwiseSample> out;
  for (std::size_t w = 0; w < db.workloads().size(); ++w) {
    const std::string& workload = db.workloads()[w];
    if (workload == exclude_workload) continue;

    std::vector<double> values(n);
    for (std::size_t c = 0; c < n; ++c) values[c] = objective_value(db.at(w, c), space, objective);

    std::vector<std::size_t> chosen(pairs);
    std::iota(chosen.begin(), chosen.end(), 0);
    if (max_pairs_per_workload && *max_pairs_per_workload < pairs) {
      Rng rng(hash_values(seed, hash_string(workload)));
      const std::size_t k = *max_pairs_per_workload;
      for (std::size_t i = 0; i < k; ++i) std::swap(chosen[i], chosen[i + rng.index(pairs - i)]);
      chosen.resize(k);
      std::sort(chosen.begin(), chosen.end());
    }

    for (std::size_t p : chosen) {
      const std::size_t i = p / (n - 1);
      const std::size_t jj = p % (n - 1);
      const std::size_t j = jj >= i ? jj + 1 : jj;
      PairwiseSample s;
      s.features = build_pair_features(features[i], features[j], db.at(w, i).metrics, dim_metrics);
      s.label = discretize_label(values[j] / values[i]);
      s.source_workload = workload;
      out.push_back(std::move(s));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training

namespace {

using Counts = std::array<std::uint32_t, kClassCount>;

double weighted_gini(const Counts& c, std::uint32_t n) {
  if (n == 0) return 0.0;
  double sq = 0.0;
  for (std::uint32_t v : c) sq += static_cast<double>(v) * v;
  return static_cast<double>(n) - sq / n;
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<double>& columns, const std::vector<std::uint8_t>& labels,
              std::size_t dim, std::size_t min_leaf, std::size_t max_features, std::uint64_t seed)
      : columns_(columns),
        labels_(labels),
        n_(labels.size()),
        dim_(dim),
        min_leaf_(min_leaf),
        max_features_(max_features),
        rng_(seed),
        index_(n_),
        features_(dim) {
    std::iota(index_.begin(), index_.end(), 0u);
    std::iota(features_.begin(), features_.end(), 0u);
  }

  PairwiseModel::Tree build() {
    grow(0, n_);
    return std::move(nodes_);
  }

 private:
  double value(std::size_t feature, std::uint32_t sample) const {
    return columns_[feature * n_ + sample];
  }

  std::int32_t make_leaf(const Counts& counts, std::size_t size) {
    PairwiseModel::Node node;
    node.count = static_cast<std::uint32_t>(size);
    for (std::size_t k = 0; k < kClassCount; ++k)
      node.probs[k] = size ? static_cast<double>(counts[k]) / static_cast<double>(size) : 0.0;
    nodes_.push_back(node);
    return static_cast<std::int32_t>(nodes_.size() - 1);
  }

  std::int32_t grow(std::size_t begin, std::size_t end) {
    const std::size_t size = end - begin;
    Counts counts{};
    for (std::size_t i = begin; i < end; ++i) ++counts[labels_[index_[i]]];
    const bool pure = std::count_if(counts.begin(), counts.end(),
                                    [](std::uint32_t c) { return c > 0; }) <= 1;
    if (pure || size < 2 * min_leaf_) return make_leaf(counts, size);

    std::size_t best_feature = dim_;
    double best_threshold = 0.0;
    double best_score = 0.0;
    std::size_t drawn = 0;
    for (std::size_t k = 0; k < dim_ && drawn < max_features_; ++k) {
      std::swap(features_[k], features_[k + rng_.index(dim_ - k)]);
      const std::size_t f = features_[k];
      double lo = value(f, index_[begin]);
      double hi = lo;
      for (std::size_t i = begin + 1; i < end; ++i) {
        const double v = value(f, index_[i]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (!(hi > lo)) continue;  // constant here; does not use up a draw
      ++drawn;
      double threshold = lo + rng_.uniform() * (hi - lo);
      if (threshold >= hi) threshold = lo;

      Counts left{};
      std::uint32_t n_left = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const std::uint32_t s = index_[i];
        if (value(f, s) <= threshold) {
          ++left[labels_[s]];
          ++n_left;
        }
      }
      const std::uint32_t n_right = static_cast<std::uint32_t>(size) - n_left;
      if (n_left < min_leaf_ || n_right < min_leaf_) continue;
      Counts right{};
      for (std::size_t c = 0; c < kClassCount; ++c) right[c] = counts[c] - left[c];
      const double score = weighted_gini(left, n_left) + weighted_gini(right, n_right);
      if (best_feature == dim_ || score < best_score) {
        best_feature = f;
        best_threshold = threshold;
        best_score = score;
      }
    }
    if (best_feature == dim_) return make_leaf(counts, size);

    auto mid_it = std::partition(index_.begin() + static_cast<std::ptrdiff_t>(begin),
                                 index_.begin() + static_cast<std::ptrdiff_t>(end),
                                 [&](std::uint32_t s) {
                                   return value(best_feature, s) <= best_threshold;
                                 });
    const std::size_t mid = static_cast<std::size_t>(mid_it - index_.begin());

    const std::int32_t self = make_leaf(counts, size);
    nodes_[self].feature = static_cast<std::int32_t>(best_feature);
    nodes_[self].threshold = best_threshold;
    const std::int32_t left = grow(begin, mid);
    const std::int32_t right = grow(mid, end);
    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
  }

  const std::vector<double>& columns_;
  const std::vector<std::uint8_t>& labels_;
  std::size_t n_;
  std::size_t dim_;
  std::size_t min_leaf_;
  std::size_t max_features_;
  Rng rng_;
  std::vector<std::uint32_t> index_;
  std::vector<std::uint32_t> features_;
  PairwiseModel::Tree nodes_;
};

}  // namespace

PairwiseModel::PairwiseModel(std::size_t dim, std::vector<Tree> trees, bool constant)
    : dim_(dim), trees_(std::move(trees)), constant_(constant) {
  if (trees_.empty()) throw Error(ErrorCode::kModelFormat, "model has no trees");
  for (const Tree& tree : trees_) {
    if (tree.empty()) throw Error(ErrorCode::kModelFormat, "empty tree");
    const auto size = static_cast<std::int32_t>(tree.size());
    for (std::int32_t i = 0; i < size; ++i) {
      const Node& node = tree[static_cast<std::size_t>(i)];
      if (node.is_leaf()) continue;
      if (static_cast<std::size_t>(node.feature) >= dim_ || node.left <= i || node.right <= i ||
          node.left >= size || node.right >= size)
        throw Error(ErrorCode::kModelFormat, "malformed tree node");
    }
  }
}

ClassDistribution PairwiseModel::predict_distribution(std::span<const double> x) const {
  if (x.size() != dim_)
    throw Error(ErrorCode::kDimensionMismatch,
                "feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                    std::to_string(dim_));
  ClassDistribution d;
  for (const Tree& tree : trees_) {
    std::size_t i = 0;
    while (!tree[i].is_leaf())
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(tree[i].feature)] <= tree[i].threshold
                                       ? tree[i].left
                                       : tree[i].right);
    for (std::size_t k = 0; k < kClassCount; ++k) d.probs[k] += tree[i].probs[k];
  }
  double total = 0.0;
  for (double p : d.probs) total += p;
  for (double& p : d.probs) p /= total;
  return d;
}

PairwiseModel train(std::span<const PairwiseSample> samples, const ModelParams& params) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "no training samples");
  if (params.n_trees < 1 || params.min_leaf < 1)
    throw Error(ErrorCode::kInvalidArgument, "n_trees and min_leaf must be >= 1");
  const std::size_t dim = samples.front().features.size();
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "samples have no features");
  const std::size_t max_features =
      params.max_features.value_or(static_cast<std::size_t>(std::ceil(std::sqrt(double(dim)))));
  if (max_features < 1 || max_features > dim)
    throw Error(ErrorCode::kInvalidArgument, "max_features must be in [1, dim]");

  const std::size_t n = samples.size();
  std::vector<double> columns(dim * n);
  std::vector<std::uint8_t> labels(n);
  Counts totals{};
  for (std::size_t i = 0; i < n; ++i) {
    const PairwiseSample& s = samples[i];
    if (s.features.size() != dim)
      throw Error(ErrorCode::kDimensionMismatch, "training samples differ in feature length");
    for (std::size_t f = 0; f < dim; ++f) columns[f * n + i] = s.features[f];
    labels[i] = static_cast<std::uint8_t>(s.label);
    ++totals[labels[i]];
  }

  const auto distinct = std::count_if(totals.begin(), totals.end(),
                                      [](std::uint32_t c) { return c > 0; });
  if (n < 2 || distinct < 2) {
    PairwiseModel::Node leaf;
    leaf.count = static_cast<std::uint32_t>(n);
    for (std::size_t k = 0; k < kClassCount; ++k)
      leaf.probs[k] = static_cast<double>(totals[k]) / static_cast<double>(n);
    return PairwiseModel(dim, {PairwiseModel::Tree{leaf}}, true);
  }

  std::vector<PairwiseModel::Tree> trees(params.n_trees);
  auto build_one = [&](std::size_t t) {
    TreeBuilder builder(columns, labels, dim, params.min_leaf, max_features,
                        hash_values(params.seed, t));
    trees[t] = builder.build();
  };
  const std::size_t threads = std::clamp<std::size_t>(params.threads, 1, params.n_trees);
  if (threads == 1) {
    for (std::size_t t = 0; t < params.n_trees; ++t) build_one(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < threads; ++k)
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < params.n_trees; t = next++) build_one(t);
      });
  }
  return PairwiseModel(dim, std::move(trees), false);
}

}  // namespace scout
