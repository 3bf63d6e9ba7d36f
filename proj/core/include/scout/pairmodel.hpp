#pragma once

// Pairwise performance model: given (features of the measured config,
// features of a candidate, low-level metrics of the measurement), predict
// the ordinal class of phi(candidate) / phi(measured).

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scout/featurize.hpp"
#include "scout/perfdb.hpp"

namespace scout {

enum class ClassLabel : std::uint8_t { kBetterPlus, kBetter, kFair, kWorse, kWorsePlus };

inline constexpr std::size_t kClassCount = 5;
inline constexpr std::array<double, 4> kClassCutPoints{0.8, 0.95, 1.05, 1.2};

std::string_view to_string(ClassLabel label);

// ratio <= 0.8 BetterPlus, (0.8, 0.95] Better, (0.95, 1.05) Fair,
// [1.05, 1.2) Worse, >= 1.2 WorsePlus. Throws InvalidRatio.
ClassLabel discretize_label(double ratio);

struct ClassDistribution {
  std::array<double, kClassCount> probs{};

  double operator[](ClassLabel label) const { return probs[static_cast<std::size_t>(label)]; }
};

// Mass on the strictly improving classes: P(BetterPlus) + P(Better).
double probability_of_improvement(const ClassDistribution& d);

// Anything that maps pair features to a class distribution.
class PairPredictor {
 public:
  virtual ~PairPredictor() = default;
  virtual std::size_t dim() const = 0;
  virtual ClassDistribution predict_distribution(std::span<const double> x) const = 0;
};

struct PairwiseSample {
  std::vector<double> features;
  ClassLabel label = ClassLabel::kFair;
  std::string source_workload;
};

// All ordered pairs (i != j) of every workload except exclude_workload
// (absent or empty means use all), optionally subsampled per workload.
std::vector<PairwiseSample> build_training_set(const PerfDatabase& db,
                                               std::string_view exclude_workload,
                                               Objective objective,
                                               std::optional<std::size_t> max_pairs_per_workload,
                                               std::uint64_t seed);

struct ModelParams {
  std::size_t n_trees = 100;
  std::size_t min_leaf = 5;
  std::optional<std::size_t> max_features;  // default ceil(sqrt(dim))
  std::uint64_t seed = 0;
  std::size_t threads = 1;  // does not change the result
};

class PairwiseModel final : public PairPredictor {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    std::int32_t left = -1;
    std::int32_t right = -1;
    double threshold = 0.0;     // go left when x[feature] <= threshold
    std::array<double, kClassCount> probs{};
    std::uint32_t count = 0;    // training samples that reached this node

    bool is_leaf() const { return feature < 0; }
    bool operator==(const Node&) const = default;
  };
  using Tree = std::vector<Node>;  // root at index 0

  // Throws ModelFormat when a tree is structurally invalid for dim.
  PairwiseModel(std::size_t dim, std::vector<Tree> trees, bool constant);

  std::size_t dim() const override { return dim_; }
  ClassDistribution predict_distribution(std::span<const double> x) const override;

  // True when training saw fewer than two samples or a single label.
  bool is_constant() const { return constant_; }
  const std::vector<Tree>& trees() const { return trees_; }

  bool operator==(const PairwiseModel& other) const {
    return dim_ == other.dim_ && constant_ == other.constant_ && trees_ == other.trees_;
  }

 private:
  std::size_t dim_;
  std::vector<Tree> trees_;
  bool constant_;
};

// Extremely-randomized trees on the full sample set.
// Throws EmptyTrainingSet, DimensionMismatch, InvalidArgument.
PairwiseModel train(std::span<const PairwiseSample> samples, const ModelParams& params);

inline constexpr std::string_view kModelMagic = "SCOUT-PAIRMODEL";
inline constexpr int kModelFormatVersion = 1;

void write_model(std::ostream& out, const PairwiseModel& model);
PairwiseModel read_model(std::istream& in);  // throws ModelFormat
void save_model(const std::filesystem::path& path, const PairwiseModel& model);
PairwiseModel load_model(const std::filesystem::path& path);

// Test oracle: decodes both configs from the pair features and returns the
// one-hot true class of their objective ratio for one workload.
class PerfectModel final : public PairPredictor {
 public:
  PerfectModel(const PerfDatabase& db, std::string_view workload, Objective objective);

  std::size_t dim() const override { return dim_; }
  ClassDistribution predict_distribution(std::span<const double> x) const override;

 private:
  std::size_t decode(std::span<const double> f) const;

  std::size_t dim_;
  std::vector<double> values_;  // objective value per config index
  std::map<ConfigFeatures, std::size_t> index_;
};

// Returns the same distribution for every input.
class ConstantModel final : public PairPredictor {
 public:
  ConstantModel(std::size_t dim, ClassDistribution distribution);

  std::size_t dim() const override { return dim_; }
  ClassDistribution predict_distribution(std::span<const double> x) const override;

 private:
  std::size_t dim_;
  ClassDistribution distribution_;
};

}  // namespace scout
