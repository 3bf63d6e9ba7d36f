#include "scout/searchers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "scout/error.hpp"
#include "scout/featurize.hpp"
#include "scout/gaussian_process.hpp"
#include "scout/random.hpp"

namespace scout {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kScout: return "scout";
    case Method::kRandomK: return "random";
    case Method::kCoordDescent: return "coord_descent";
    case Method::kBayesOpt: return "bayesopt";
  }
  return "?";
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kBelowThreshold: return "BelowThreshold";
    case StopReason::kMispredictionLimit: return "MispredictionLimit";
    case StopReason::kSpaceExhausted: return "SpaceExhausted";
    case StopReason::kBudgetExhausted: return "BudgetExhausted";
    case StopReason::kEiBelowThreshold: return "EiBelowThreshold";
    case StopReason::kLocalMinimum: return "LocalMinimum";
  }
  return "?";
}

std::optional<StopReason> parse_stop_reason(std::string_view s) {
  for (StopReason r : {StopReason::kBelowThreshold, StopReason::kMispredictionLimit,
                       StopReason::kSpaceExhausted, StopReason::kBudgetExhausted,
                       StopReason::kEiBelowThreshold, StopReason::kLocalMinimum})
    if (to_string(r) == s) return r;
  return std::nullopt;
}

SearchState::SearchState(const PerfDatabase& db, std::string_view workload, Objective objective)
    : db_(db),
      workload_(db.workload_index(workload)),
      objective_(objective),
      evaluated_(db.space().size(), false) {}

bool SearchState::evaluate(std::size_t config_index) {
  if (config_index >= evaluated_.size() || evaluated_[config_index])
    throw Error(ErrorCode::kInvalidArgument, "config evaluated twice or out of range");
  const Measurement& m = db_.at(workload_, config_index);
  const double v = objective_value(m, db_.space(), objective_);
  evaluated_[config_index] = true;
  steps_.push_back({m.config, v});
  order_.push_back(config_index);
  const bool improved = steps_.size() == 1 || v < steps_[best_].value;
  if (improved) best_ = steps_.size() - 1;
  return improved && steps_.size() > 1;
}

SearchTrace SearchState::finish(Method method, StopReason reason) const {
  SearchTrace t;
  t.workload_id = db_.workloads()[workload_];
  t.method = method;
  t.steps = steps_;
  t.best = steps_.at(best_);
  t.stop_reason = reason;
  return t;
}

std::size_t default_beta(const ConfigSpace& space) { return space.size() <= 24 ? 3 : 4; }

SearchTrace scout_search(const PairPredictor& model, const PerfDatabase& db,
                         std::string_view workload, Objective objective,
                         const ScoutParams& params) {
  const ConfigSpace& space = db.space();
  SearchState state(db, workload, objective);
  if (!(params.alpha > 0.0 && params.alpha <= 1.0))
    throw Error(ErrorCode::kInvalidArgument, "alpha must be in (0, 1]");
  const std::size_t beta = params.beta.value_or(default_beta(space));
  if (beta < 1) throw Error(ErrorCode::kInvalidArgument, "beta must be >= 1");
  const std::size_t metric_dim = db.metric_dimension();
  if (model.dim() != pair_feature_dim(metric_dim))
    throw Error(ErrorCode::kDimensionMismatch, "model dimension does not match the database");

  const std::size_t start = [&] {
    if (!params.start) return space.midpoint_index();
    auto idx = space.index_of(*params.start);
    if (!idx)
      throw Error(ErrorCode::kStartOutsideSpace,
                  "start config not in space: " + to_string(*params.start));
    return *idx;
  }();

  std::vector<ConfigFeatures> features;
  features.reserve(space.size());
  for (const CloudConfig& c : space.configs()) features.push_back(encode_config(c, space));
  std::vector<double> buffer(pair_feature_dim(metric_dim));

  state.evaluate(start);
  std::size_t current = start;
  std::size_t misses = 0;
  while (true) {
    if (state.unevaluated_count() == 0) return state.finish(Method::kScout, StopReason::kSpaceExhausted);
    const std::vector<double>& li = state.measurement(current).metrics;
    double best_pi = -1.0;
    std::size_t next = space.size();
    for (std::size_t j = 0; j < space.size(); ++j) {
      if (state.is_evaluated(j)) continue;
      fill_pair_features(features[current], features[j], li, buffer);
      const double pi = probability_of_improvement(model.predict_distribution(buffer));
      if (pi > best_pi) {
        best_pi = pi;
        next = j;
      }
    }
    if (best_pi < params.alpha) return state.finish(Method::kScout, StopReason::kBelowThreshold);
    const bool improved = state.evaluate(next);
    current = next;
    misses = improved ? 0 : misses + 1;
    if (misses == beta) return state.finish(Method::kScout, StopReason::kMispredictionLimit);
  }
}

SearchTrace random_search(const PerfDatabase& db, std::string_view workload, Objective objective,
                          std::size_t k, std::uint64_t seed) {
  SearchState state(db, workload, objective);
  const std::size_t n = db.space().size();
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
  if (k > n)
    throw Error(ErrorCode::kKTooLarge,
                "k = " + std::to_string(k) + " exceeds space size " + std::to_string(n));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(perm[i], perm[i + rng.index(n - i)]);
    state.evaluate(perm[i]);
  }
  return state.finish(Method::kRandomK, StopReason::kBudgetExhausted);
}

SearchTrace coordinate_descent(const PerfDatabase& db, std::string_view workload,
                               Objective objective, const CloudConfig& start, std::uint64_t seed) {
  const ConfigSpace& space = db.space();
  SearchState state(db, workload, objective);
  auto start_idx = space.index_of(start);
  if (!start_idx)
    throw Error(ErrorCode::kStartOutsideSpace, "start config not in space: " + to_string(start));

  std::array<int, 3> axes{0, 1, 2};  // family, size, node count
  Rng rng(seed);
  for (std::size_t i = 0; i + 1 < axes.size(); ++i)
    std::swap(axes[i], axes[i + rng.index(axes.size() - i)]);

  auto differs_only_in = [](const CloudConfig& a, const CloudConfig& b, int axis) {
    const bool family = a.family == b.family;
    const bool size = a.size == b.size;
    const bool nodes = a.node_count == b.node_count;
    switch (axis) {
      case 0: return !family && size && nodes;
      case 1: return family && !size && nodes;
      default: return family && size && !nodes;
    }
  };

  state.evaluate(*start_idx);
  std::size_t incumbent = *start_idx;
  while (true) {
    bool changed = false;
    for (int axis : axes) {
      const CloudConfig& inc = space.at(incumbent);
      for (std::size_t j = 0; j < space.size(); ++j)
        if (!state.is_evaluated(j) && differs_only_in(inc, space.at(j), axis)) state.evaluate(j);
      if (state.best_index() != incumbent) {
        incumbent = state.best_index();
        changed = true;
      }
    }
    if (!changed) return state.finish(Method::kCoordDescent, StopReason::kLocalMinimum);
  }
}

SearchTrace bo_search(const PerfDatabase& db, std::string_view workload, Objective objective,
                      const BoParams& params) {
  const ConfigSpace& space = db.space();
  SearchState state(db, workload, objective);
  const std::size_t n = space.size();
  if (params.n_init < 2) throw Error(ErrorCode::kInvalidArgument, "n_init must be >= 2");
  if (params.n_init > n)
    throw Error(ErrorCode::kKTooLarge, "n_init exceeds space size " + std::to_string(n));
  if (!(params.ei_stop >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "ei_stop must be >= 0");

  // Standardize every feature column over the whole space; constant columns drop to zero.
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(kConfigFeatureCount));
  for (std::size_t c = 0; c < n; ++c) {
    const ConfigFeatures f = encode_config(space.at(c), space);
    for (std::size_t k = 0; k < kConfigFeatureCount; ++k)
      x(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(k)) = f[k];
  }
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const double mean = x.col(k).mean();
    const double sd = std::sqrt((x.col(k).array() - mean).square().mean());
    if (sd > 0.0)
      x.col(k) = (x.col(k).array() - mean) / sd;
    else
      x.col(k).setZero();
  }

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(params.seed);
  for (std::size_t i = 0; i < params.n_init; ++i) {
    std::swap(perm[i], perm[i + rng.index(n - i)]);
    state.evaluate(perm[i]);
  }

  while (state.unevaluated_count() > 0) {
    const auto m = static_cast<Eigen::Index>(state.evaluated_count());
    Eigen::MatrixXd inputs(m, x.cols());
    Eigen::VectorXd targets(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::size_t c = state.order()[static_cast<std::size_t>(i)];
      inputs.row(i) = x.row(static_cast<Eigen::Index>(c));
      targets(i) = std::log(state.steps()[static_cast<std::size_t>(i)].value);
    }
    const GaussianProcess gp = GaussianProcess::fit(inputs, targets);
    const double incumbent = std::log(state.best().value);

    double best_ei = -1.0;
    std::size_t next = n;
    for (std::size_t c = 0; c < n; ++c) {
      if (state.is_evaluated(c)) continue;
      const auto p = gp.predict(x.row(static_cast<Eigen::Index>(c)).transpose());
      const double ei = expected_improvement(p.mean, p.stddev, incumbent);
      if (ei > best_ei) {
        best_ei = ei;
        next = c;
      }
    }
    if (best_ei < params.ei_stop && state.evaluated_count() >= params.min_samples)
      return state.finish(Method::kBayesOpt, StopReason::kEiBelowThreshold);
    state.evaluate(next);
  }
  return state.finish(Method::kBayesOpt, StopReason::kSpaceExhausted);
}

double convergence_speed(const SearchTrace& trace) {
  if (trace.steps.size() < 2)
    throw Error(ErrorCode::kTraceTooShort, "convergence speed needs at least two steps");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < trace.steps.size(); ++i)
    sum += (trace.steps[i].value - trace.steps[i + 1].value) / trace.steps[i].value;
  return sum / static_cast<double>(trace.steps.size() - 1);
}

nlohmann::json trace_to_json(const SearchTrace& trace) {
  nlohmann::json steps = nlohmann::json::array();
  for (const Step& s : trace.steps) steps.push_back({{"config", to_string(s.config)}, {"value", s.value}});
  return {
      {"workload_id", trace.workload_id},
      {"method", to_string(trace.method)},
      {"steps", std::move(steps)},
      {"best", {{"config", to_string(trace.best.config)}, {"value", trace.best.value}}},
      {"stop_reason", to_string(trace.stop_reason)},
  };
}

}  // namespace scout
