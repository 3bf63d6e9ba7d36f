#pragma once

// Scout search and the baseline searchers. All of them replay measurements
// from a PerfDatabase instead of running workloads.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "scout/pairmodel.hpp"
#include "scout/perfdb.hpp"

namespace scout {

enum class Method { kScout, kRandomK, kCoordDescent, kBayesOpt };

enum class StopReason {
  kBelowThreshold,
  kMispredictionLimit,
  kSpaceExhausted,
  kBudgetExhausted,
  kEiBelowThreshold,
  kLocalMinimum,
};

std::string_view to_string(Method method);
std::string_view to_string(StopReason reason);
std::optional<StopReason> parse_stop_reason(std::string_view s);

struct Step {
  CloudConfig config;
  double value = 0.0;

  bool operator==(const Step&) const = default;
};

struct SearchTrace {
  std::string workload_id;
  Method method = Method::kScout;
  std::vector<Step> steps;
  Step best;
  StopReason stop_reason = StopReason::kSpaceExhausted;
};

// Evaluated / unevaluated bookkeeping for one search over one workload.
class SearchState {
 public:
  SearchState(const PerfDatabase& db, std::string_view workload, Objective objective);

  // Measures config_index; returns true when it strictly improves the best.
  bool evaluate(std::size_t config_index);

  bool is_evaluated(std::size_t config_index) const { return evaluated_[config_index]; }
  std::size_t evaluated_count() const { return steps_.size(); }
  std::size_t unevaluated_count() const { return evaluated_.size() - steps_.size(); }
  const std::vector<Step>& steps() const { return steps_; }
  const std::vector<std::size_t>& order() const { return order_; }
  const Step& best() const { return steps_.at(best_); }
  std::size_t best_index() const { return order_.at(best_); }
  const Measurement& measurement(std::size_t config_index) const {
    return db_.at(workload_, config_index);
  }

  SearchTrace finish(Method method, StopReason reason) const;

 private:
  const PerfDatabase& db_;
  std::size_t workload_;
  Objective objective_;
  std::vector<bool> evaluated_;
  std::vector<Step> steps_;
  std::vector<std::size_t> order_;  // config index per step
  std::size_t best_ = 0;
};

// Misprediction tolerance default: 3 for spaces of at most 24 configs, else 4.
std::size_t default_beta(const ConfigSpace& space);

struct ScoutParams {
  double alpha = 0.5;
  std::optional<std::size_t> beta;       // default_beta(space) when unset
  std::optional<CloudConfig> start;      // space midpoint when unset
};

// Each step scores every unevaluated config by the probability of improvement
// relative to the most recently evaluated config and measures the argmax.
// Throws UnknownWorkload, StartOutsideSpace, DimensionMismatch, InvalidArgument.
SearchTrace scout_search(const PairPredictor& model, const PerfDatabase& db,
                         std::string_view workload, Objective objective,
                         const ScoutParams& params);

// Throws KTooLarge when k > |space|, InvalidArgument when k == 0.
SearchTrace random_search(const PerfDatabase& db, std::string_view workload, Objective objective,
                          std::size_t k, std::uint64_t seed);

// Axes are visited in a seeded random order of {family, size, node count}.
SearchTrace coordinate_descent(const PerfDatabase& db, std::string_view workload,
                               Objective objective, const CloudConfig& start, std::uint64_t seed);

struct BoParams {
  std::size_t n_init = 3;
  double ei_stop = 0.10;
  // EI may only stop the search once this many configs have been measured.
  std::size_t min_samples = 6;
  std::uint64_t seed = 0;
};

// GP on standardized config features against log objective values; stops once
// the best expected improvement (in log units, i.e. expected fractional gain)
// drops below ei_stop and at least min_samples configs are measured.
SearchTrace bo_search(const PerfDatabase& db, std::string_view workload, Objective objective,
                      const BoParams& params);

// Mean over consecutive steps of (v_i - v_{i+1}) / v_i. Throws TraceTooShort.
double convergence_speed(const SearchTrace& trace);

nlohmann::json trace_to_json(const SearchTrace& trace);

}  // namespace scout
