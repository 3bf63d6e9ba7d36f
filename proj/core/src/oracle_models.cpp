#include <algorithm>

#include "scout/error.hpp"
#include "scout/pairmodel.hpp"

namespace scout {

PerfectModel::PerfectModel(const PerfDatabase& db, std::string_view workload,
                           Objective objective)
    : dim_(pair_feature_dim(db.metric_dimension())) {
  const std::size_t w = db.workload_index(workload);
  const ConfigSpace& space = db.space();
  values_.resize(space.size());
  for (std::size_t c = 0; c < space.size(); ++c) {
    values_[c] = objective_value(db.at(w, c), space, objective);
    index_.emplace(encode_config(space.at(c), space), c);
  }
}

std::size_t PerfectModel::decode(std::span<const double> f) const {
  ConfigFeatures key{};
  std::copy(f.begin(), f.end(), key.begin());
  auto it = index_.find(key);
  if (it == index_.end())
    throw Error(ErrorCode::kUnknownConfig, "pair features do not encode a config in the space");
  return it->second;
}

ClassDistribution PerfectModel::predict_distribution(std::span<const double> x) const {
  if (x.size() != dim_) throw Error(ErrorCode::kDimensionMismatch, "wrong pair feature length");
  const std::size_t i = decode(x.subspan(0, kConfigFeatureCount));
  const std::size_t j = decode(x.subspan(kConfigFeatureCount, kConfigFeatureCount));
  ClassDistribution d;
  d.probs[static_cast<std::size_t>(discretize_label(values_[j] / values_[i]))] = 1.0;
  return d;
}

ConstantModel::ConstantModel(std::size_t dim, ClassDistribution distribution)
    : dim_(dim), distribution_(distribution) {}

ClassDistribution ConstantModel::predict_distribution(std::span<const double> x) const {
  if (x.size() != dim_) throw Error(ErrorCode::kDimensionMismatch, "wrong pair feature length");
  return distribution_;
}

}  // namespace scout
