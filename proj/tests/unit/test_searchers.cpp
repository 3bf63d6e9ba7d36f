#include <gtest/gtest.h>

#include <iostream>
#include <set>

#include "fixtures.hpp"
#include "scout/error.hpp"
#include "scout/featurize.hpp"
#include "scout/pairmodel.hpp"
#include "scout/random.hpp"
#include "scout/searchers.hpp"
#include "scout/synthgen.hpp"

namespace scout {
namespace {

using test::make_db;
using test::make_space;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected scout::Error";
  return ErrorCode::kInvalidArgument;
}

void check_trace_invariants(const SearchTrace& t, const PerfDatabase& db, Objective obj) {
  ASSERT_FALSE(t.steps.empty());
  EXPECT_LE(t.steps.size(), db.space().size());
  std::set<CloudConfig> seen;
  double best = t.steps.front().value;
  for (const Step& s : t.steps) {
    EXPECT_TRUE(seen.insert(s.config).second) << "config evaluated twice: " << to_string(s.config);
    EXPECT_EQ(s.value, objective_value(db.lookup(t.workload_id, s.config), db.space(), obj));
    best = std::min(best, s.value);
  }
  EXPECT_EQ(t.best.value, best);
  EXPECT_GE(t.best.value, optimal(db, t.workload_id, obj).value);
}

const PerfDatabase& noiseless_db() {
  static const PerfDatabase db = generate_database(test::noiseless_params(12, 31), default_space());
  return db;
}

TEST(SearchState, CardinalityAndDoubleEvaluation) {
  const ConfigSpace space = make_space({Family::kC}, {Size::kLarge}, {4, 6, 8});
  const PerfDatabase db = make_db(space, {{"w", {3, 2, 4}}});
  SearchState st(db, "w", Objective::kTime);
  EXPECT_FALSE(st.evaluate(0));
  EXPECT_EQ(st.evaluated_count() + st.unevaluated_count(), 3u);
  EXPECT_TRUE(st.evaluate(1));
  EXPECT_FALSE(st.evaluate(2));
  EXPECT_EQ(st.evaluated_count() + st.unevaluated_count(), 3u);
  EXPECT_EQ(st.best_index(), 1u);
  EXPECT_THROW(st.evaluate(1), Error);
  EXPECT_EQ(code_of([&] { SearchState(db, "nope", Objective::kTime); }), ErrorCode::kUnknownWorkload);
}

TEST(DefaultBeta, BySpaceSize) {
  EXPECT_EQ(default_beta(default_space()), 4u);
  EXPECT_EQ(default_beta(make_space({Family::kC, Family::kM}, {Size::kLarge, Size::kXLarge},
                                    {4, 6, 8, 10, 12, 16})),
            3u);
}

TEST(ScoutSearch, PerfectModelFindsOptimumWithImprovingSteps) {
  const PerfDatabase& db = noiseless_db();
  for (const std::string& w : db.workloads()) {
    const PerfectModel oracle(db, w, Objective::kTime);
    for (std::size_t start = 0; start < db.space().size(); start += 5) {
      ScoutParams p;
      p.start = db.space().at(start);
      const SearchTrace t = scout_search(oracle, db, w, Objective::kTime, p);
      check_trace_invariants(t, db, Objective::kTime);
      EXPECT_EQ(t.method, Method::kScout);
      for (std::size_t i = 1; i < t.steps.size(); ++i)
        EXPECT_LT(t.steps[i].value, t.steps[i - 1].value);
      // Every step under the perfect model improves by at least 5%.
      for (std::size_t i = 1; i < t.steps.size(); ++i)
        EXPECT_LE(t.steps[i].value / t.steps[i - 1].value, 0.95);
      EXPECT_EQ(t.stop_reason, StopReason::kBelowThreshold);
      EXPECT_LE(t.best.value / optimal(db, w, Objective::kTime).value, 1.0 / 0.95);
    }
  }
}

TEST(ScoutSearch, StartAtOptimumStopsImmediately) {
  const PerfDatabase& db = noiseless_db();
  for (const std::string& w : db.workloads()) {
    const PerfectModel oracle(db, w, Objective::kTime);
    ScoutParams p;
    p.start = optimal(db, w, Objective::kTime).config;
    const SearchTrace t = scout_search(oracle, db, w, Objective::kTime, p);
    EXPECT_EQ(t.steps.size(), 1u);
    EXPECT_EQ(t.stop_reason, StopReason::kBelowThreshold);
  }
}

TEST(ScoutSearch, AdversarialConstantModelHitsMispredictionLimit) {
  const ConfigSpace space = default_space();
  std::vector<double> rising(space.size());
  for (std::size_t i = 0; i < rising.size(); ++i) rising[i] = 100.0 + static_cast<double>(i);
  const PerfDatabase db = make_db(space, {{"w", rising}});
  const ConstantModel always(pair_feature_dim(2), {{1, 0, 0, 0, 0}});
  for (std::size_t beta : {1u, 3u, 4u}) {
    ScoutParams p;
    p.beta = beta;
    p.start = space.at(0);
    const SearchTrace t = scout_search(always, db, "w", Objective::kTime, p);
    EXPECT_EQ(t.steps.size(), 1 + beta);
    EXPECT_EQ(t.stop_reason, StopReason::kMispredictionLimit);
    for (std::size_t i = 0; i < t.steps.size(); ++i) EXPECT_EQ(t.steps[i].config, space.at(i));
  }
}

TEST(ScoutSearch, MissCounterResetsOnImprovement) {
  const ConfigSpace space = make_space({Family::kC}, {Size::kLarge}, {4, 6, 8, 10, 12, 16, 20});
  // start, worse, better (reset), worse, worse -> stops at beta = 2 after 5 steps.
  const PerfDatabase db = make_db(space, {{"w", {10, 11, 9, 12, 13, 1, 1}}});
  const ConstantModel always(pair_feature_dim(2), {{0, 1, 0, 0, 0}});
  ScoutParams p;
  p.beta = 2;
  p.start = space.at(0);
  const SearchTrace t = scout_search(always, db, "w", Objective::kTime, p);
  EXPECT_EQ(t.steps.size(), 5u);
  EXPECT_EQ(t.stop_reason, StopReason::kMispredictionLimit);
}

TEST(ScoutSearch, SpaceExhaustedAndThresholdAndErrors) {
  const ConfigSpace space = make_space({Family::kC}, {Size::kLarge}, {4, 6});
  const PerfDatabase db = make_db(space, {{"w", {2, 1}}});
  const ConstantModel yes(pair_feature_dim(2), {{1, 0, 0, 0, 0}});
  const ConstantModel no(pair_feature_dim(2), {{0.2, 0.2, 0.6, 0, 0}});
  ScoutParams p;
  p.start = space.at(0);
  EXPECT_EQ(scout_search(yes, db, "w", Objective::kTime, p).stop_reason, StopReason::kSpaceExhausted);
  EXPECT_EQ(scout_search(no, db, "w", Objective::kTime, p).steps.size(), 1u);
  p.alpha = 0.4;
  EXPECT_EQ(scout_search(no, db, "w", Objective::kTime, p).steps.size(), 2u);

  ScoutParams outside;
  outside.start = CloudConfig{Family::kR, Size::kLarge, 4};
  EXPECT_EQ(code_of([&] { scout_search(yes, db, "w", Objective::kTime, outside); }),
            ErrorCode::kStartOutsideSpace);
  EXPECT_EQ(code_of([&] { scout_search(yes, db, "x", Objective::kTime, {}); }),
            ErrorCode::kUnknownWorkload);
  const ConstantModel wrong_dim(5, {{1, 0, 0, 0, 0}});
  EXPECT_EQ(code_of([&] { scout_search(wrong_dim, db, "w", Objective::kTime, {}); }),
            ErrorCode::kDimensionMismatch);
}

TEST(ScoutSearch, DefaultStartIsMidpoint) {
  const PerfDatabase& db = noiseless_db();
  const std::string& w = db.workloads().front();
  const SearchTrace t = scout_search(PerfectModel(db, w, Objective::kCost), db, w, Objective::kCost, {});
  EXPECT_EQ(t.steps.front().config, db.space().at(db.space().midpoint_index()));
}

TEST(RandomSearch, Examples) {
  const PerfDatabase& db = noiseless_db();
  const std::string& w = db.workloads()[3];
  const std::size_t n = db.space().size();
  const SearchTrace all = random_search(db, w, Objective::kTime, n, 4);
  EXPECT_EQ(all.best.value, optimal(db, w, Objective::kTime).value);
  EXPECT_EQ(all.stop_reason, StopReason::kBudgetExhausted);
  check_trace_invariants(all, db, Objective::kTime);

  const SearchTrace one = random_search(db, w, Objective::kTime, 1, 4);
  ASSERT_EQ(one.steps.size(), 1u);
  EXPECT_EQ(one.best, one.steps[0]);

  const SearchTrace a = random_search(db, w, Objective::kTime, 6, 99);
  const SearchTrace b = random_search(db, w, Objective::kTime, 6, 99);
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_NE(a.steps, random_search(db, w, Objective::kTime, 6, 100).steps);
  check_trace_invariants(a, db, Objective::kTime);

  EXPECT_EQ(code_of([&] { random_search(db, w, Objective::kTime, n + 1, 0); }), ErrorCode::kKTooLarge);
  EXPECT_EQ(code_of([&] { random_search(db, w, Objective::kTime, 0, 0); }), ErrorCode::kInvalidArgument);
}

// Family x size trap: the best single-axis moves from c4.large end at c4.xlarge,
// while the optimum is m4.2xlarge.
PerfDatabase trap_db() {
  const ConfigSpace space = make_space({Family::kC, Family::kM}, {Size::kLarge, Size::kXLarge, Size::kTwoXLarge}, {4});
  return make_db(space, {{"trap", {10, 5, 7, 12, 20, 2}}});
}

TEST(CoordinateDescent, FallsIntoTrap) {
  const PerfDatabase db = trap_db();
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    const SearchTrace t =
        coordinate_descent(db, "trap", Objective::kTime, {Family::kC, Size::kLarge, 4}, seed);
    EXPECT_EQ(t.best.config, (CloudConfig{Family::kC, Size::kXLarge, 4}));
    EXPECT_EQ(t.best.value, 5.0);
    EXPECT_NE(t.best.config, optimal(db, "trap", Objective::kTime).config);
    EXPECT_EQ(t.stop_reason, StopReason::kLocalMinimum);
    check_trace_invariants(t, db, Objective::kTime);
  }
}

TEST(CoordinateDescent, SeparableObjectiveReachesOptimum) {
  const std::vector<int> nodes{4, 6, 8, 10, 12};
  const ConfigSpace space = make_space({Family::kC, Family::kM, Family::kR},
                                       {Size::kLarge, Size::kXLarge, Size::kTwoXLarge}, nodes);
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    double a[3], b[3], c[5];
    for (double& x : a) x = rng.uniform(0, 50);
    for (double& x : b) x = rng.uniform(0, 50);
    for (double& x : c) x = rng.uniform(0, 50);
    std::vector<double> values;
    for (const CloudConfig& cfg : space.configs()) {
      const auto n = std::find(nodes.begin(), nodes.end(), cfg.node_count) - nodes.begin();
      values.push_back(1.0 + a[static_cast<int>(cfg.family)] + b[static_cast<int>(cfg.size)] + c[n]);
    }
    const PerfDatabase db = make_db(space, {{"sep", values}});
    const double brute = *std::min_element(values.begin(), values.end());
    for (std::size_t start = 0; start < space.size(); start += 4) {
      const SearchTrace t = coordinate_descent(db, "sep", Objective::kTime, space.at(start),
                                               static_cast<std::uint64_t>(trial * 100 + start));
      EXPECT_EQ(t.best.value, brute);
      EXPECT_EQ(t.stop_reason, StopReason::kLocalMinimum);
    }
  }
}

TEST(CoordinateDescent, SingleConfigAndBadStart) {
  const ConfigSpace one = make_space({Family::kR}, {Size::kLarge}, {4});
  const PerfDatabase db = make_db(one, {{"w", {3}}});
  const SearchTrace t = coordinate_descent(db, "w", Objective::kTime, one.at(0), 0);
  EXPECT_EQ(t.steps.size(), 1u);
  EXPECT_EQ(t.stop_reason, StopReason::kLocalMinimum);
  EXPECT_EQ(code_of([&] { coordinate_descent(db, "w", Objective::kTime, {Family::kC, Size::kLarge, 4}, 0); }),
            ErrorCode::kStartOutsideSpace);
}

TEST(CoordinateDescent, NeverAbandonsBest) {
  const PerfDatabase& db = noiseless_db();
  for (const std::string& w : db.workloads()) {
    const SearchTrace t = coordinate_descent(db, w, Objective::kCost, db.space().at(7), 3);
    check_trace_invariants(t, db, Objective::kCost);
  }
}

TEST(ScoutVersusCoordinateDescent, SearchCostWhereBothReachOptimum) {
  const PerfDatabase& db = noiseless_db();
  std::size_t both = 0, violations = 0;
  for (const std::string& w : db.workloads()) {
    const PerfectModel oracle(db, w, Objective::kTime);
    const double opt = optimal(db, w, Objective::kTime).value;
    for (std::size_t start = 0; start < db.space().size(); start += 9) {
      ScoutParams p;
      p.start = db.space().at(start);
      const SearchTrace s = scout_search(oracle, db, w, Objective::kTime, p);
      const SearchTrace c = coordinate_descent(db, w, Objective::kTime, db.space().at(start), start);
      if (s.best.value != opt || c.best.value != opt) continue;
      ++both;
      if (s.steps.size() > c.steps.size()) {
        ++violations;
        std::cout << "[report] " << w << " from " << to_string(db.space().at(start)) << ": scout "
                  << s.steps.size() << " steps, coord_descent " << c.steps.size() << "\n";
      }
    }
  }
  std::cout << "[report] scout cheaper-or-equal in " << both - violations << "/" << both
            << " instances where both reach the optimum\n";
  EXPECT_GT(both, 0u);
}

TEST(BoSearch, DeterministicAndValid) {
  const PerfDatabase& db = noiseless_db();
  for (const std::string& w : db.workloads()) {
    BoParams p;
    p.seed = 11;
    const SearchTrace a = bo_search(db, w, Objective::kTime, p);
    const SearchTrace b = bo_search(db, w, Objective::kTime, p);
    EXPECT_EQ(a.steps, b.steps);
    check_trace_invariants(a, db, Objective::kTime);
    EXPECT_GE(a.steps.size(), p.min_samples);
    EXPECT_EQ(a.stop_reason, StopReason::kEiBelowThreshold);
    EXPECT_EQ(a.method, Method::kBayesOpt);
  }
}

TEST(BoSearch, ZeroThresholdRunsLongerAndEdgeCases) {
  const ConfigSpace space = make_space({Family::kC, Family::kM}, {Size::kLarge}, {4, 6, 8});
  const PerfDatabase db = make_db(space, {{"w", {9, 7, 8, 3, 5, 4}}});
  BoParams p;
  p.n_init = 6;
  EXPECT_EQ(bo_search(db, "w", Objective::kTime, p).stop_reason, StopReason::kSpaceExhausted);
  p.n_init = 7;
  EXPECT_EQ(code_of([&] { bo_search(db, "w", Objective::kTime, p); }), ErrorCode::kKTooLarge);
  p.n_init = 1;
  EXPECT_EQ(code_of([&] { bo_search(db, "w", Objective::kTime, p); }), ErrorCode::kInvalidArgument);
  p.n_init = 2;
  p.ei_stop = 0.0;
  p.min_samples = 0;
  EXPECT_EQ(bo_search(db, "w", Objective::kTime, p).steps.size(), 6u);
}

TEST(ConvergenceSpeed, HandComputed) {
  auto trace = [](std::vector<double> values) {
    SearchTrace t;
    for (double v : values) t.steps.push_back({CloudConfig{}, v});
    return t;
  };
  EXPECT_EQ(convergence_speed(trace({100, 50})), 0.5);
  EXPECT_EQ(convergence_speed(trace({100, 100, 100})), 0.0);
  EXPECT_EQ(convergence_speed(trace({100, 150, 75})), 0.0);
  EXPECT_EQ(code_of([&] { convergence_speed(trace({100})); }), ErrorCode::kTraceTooShort);
}

TEST(TraceJson, Shape) {
  const ConfigSpace space = make_space({Family::kC}, {Size::kLarge}, {4, 6});
  const PerfDatabase db = make_db(space, {{"w", {2, 1}}});
  const SearchTrace t = random_search(db, "w", Objective::kTime, 2, 0);
  const nlohmann::json j = trace_to_json(t);
  EXPECT_EQ(j.at("workload_id"), "w");
  EXPECT_EQ(j.at("method"), "random");
  EXPECT_EQ(j.at("stop_reason"), "BudgetExhausted");
  EXPECT_EQ(j.at("steps").size(), 2u);
  EXPECT_EQ(j.at("best").at("config"), "c4.large:6");
  EXPECT_EQ(parse_stop_reason("LocalMinimum"), StopReason::kLocalMinimum);
  EXPECT_FALSE(parse_stop_reason("Nope"));
}

}  // namespace
}  // namespace scout
