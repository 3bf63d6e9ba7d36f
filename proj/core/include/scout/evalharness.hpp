#pragma once

// Leave-one-workload-out replay evaluation of searchers over a PerfDatabase.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "scout/pairmodel.hpp"
#include "scout/perfdb.hpp"
#include "scout/searchers.hpp"

namespace scout {

enum class StartPolicy { kMidpoint, kRandom };

struct ScoutMethod {
  double alpha = 0.5;
  std::optional<std::size_t> beta;
  StartPolicy start_policy = StartPolicy::kRandom;
};
struct RandomMethod {
  std::size_t k = 4;
};
struct CoordDescentMethod {};
struct BayesOptMethod {
  std::size_t n_init = 3;
  double ei_stop = 0.10;
  std::size_t min_samples = 6;
};

using MethodSpec = std::variant<ScoutMethod, RandomMethod, CoordDescentMethod, BayesOptMethod>;

// "scout", "random-<k>", "coord_descent", "bayesopt"
std::string method_name(const MethodSpec& spec);
nlohmann::json method_params(const MethodSpec& spec);

struct EvalConfig {
  std::vector<MethodSpec> methods;
  Objective objective = Objective::kTime;
  std::size_t repeats = 100;
  std::uint64_t master_seed = 0;
  std::optional<std::size_t> max_pairs_per_workload = 1000;
  ModelParams model;
  std::size_t threads = 1;  // never changes the report

  void validate() const;  // throws InvalidArgument
};

// Scout (random starts), Random-4/6/8, coordinate descent and BO.
EvalConfig default_eval_config();

// JSON keys: objective, repeats, master_seed, max_pairs_per_workload (null
// for all pairs), model {n_trees, min_leaf, max_features, seed}, methods
// [{name: scout|random|coord_descent|bayesopt, ...method fields}].
EvalConfig parse_eval_config(const nlohmann::json& j);
EvalConfig load_eval_config(const std::filesystem::path& path);

struct RunRecord {
  std::uint64_t seed = 0;
  double normalized_perf = 1.0;
  std::size_t steps = 0;
  StopReason stop_reason = StopReason::kSpaceExhausted;
  std::optional<double> convergence_speed;  // empty for single-step traces

  bool operator==(const RunRecord&) const = default;
};

struct WorkloadRuns {
  std::string workload_id;
  std::vector<RunRecord> runs;
  double median_normalized_perf = 1.0;

  bool operator==(const WorkloadRuns&) const = default;
};

struct Summary {
  double mean = 0.0;
  double p10 = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;

  bool operator==(const Summary&) const = default;
};

struct MethodReport {
  std::string name;
  nlohmann::json params;
  std::vector<WorkloadRuns> per_workload;
  Summary normalized_perf;
  Summary steps;
  double frac_within_10pct = 0.0;
  std::optional<double> mean_convergence_speed;

  bool operator==(const MethodReport&) const = default;
};

struct EvalReport {
  ConfigSpace space = default_space();
  Objective objective = Objective::kTime;
  std::vector<MethodReport> methods;

  bool operator==(const EvalReport&) const = default;
};

// Test hooks. model_factory replaces training for Scout (e.g. with a
// PerfectModel); run_seed replaces the derived per-run seed.
struct EvalHooks {
  std::function<std::unique_ptr<PairPredictor>(const PerfDatabase&, const std::string& workload,
                                               Objective)>
      model_factory;
  std::function<std::uint64_t(std::uint64_t master_seed, const std::string& workload,
                              std::size_t method_index, std::size_t repeat)>
      run_seed;
};

std::uint64_t derive_run_seed(std::uint64_t master_seed, const std::string& workload,
                              std::size_t method_index, std::size_t repeat);

// Throws TooFewWorkloads, InvalidArgument, and anything a searcher throws.
EvalReport evaluate(const PerfDatabase& db, const EvalConfig& cfg, const EvalHooks& hooks = {});

// best / optimal; throws InvalidValues if either is <= 0 or best < optimal.
double normalized_performance(double best_value, double optimal_value);

// Nearest rank: ascending sort, element ceil(p/100 * n) clamped to [1, n].
// Throws EmptyList, InvalidArgument for p outside [0, 100].
double percentile(std::span<const double> values, double p);

Summary summarize(std::span<const double> values);

enum class ReportFormat { kJson, kCsv };

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);
std::string report_to_csv(const EvalReport& report);
// Throws IoError.
void emit_report(const EvalReport& report, const std::filesystem::path& path,
                 ReportFormat format);

}  // namespace scout
