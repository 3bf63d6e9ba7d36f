#include "scout/evalharness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <thread>

#include "scout/error.hpp"
#include "scout/random.hpp"

namespace scout {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

SearchTrace run_method(const MethodSpec& spec, const PairPredictor* model, const PerfDatabase& db,
                       const std::string& workload, Objective objective, std::uint64_t seed) {
  const ConfigSpace& space = db.space();
  Rng rng(seed);
  return std::visit(
      Overloaded{
          [&](const ScoutMethod& m) {
            ScoutParams p;
            p.alpha = m.alpha;
            p.beta = m.beta;
            p.start = m.start_policy == StartPolicy::kMidpoint
                          ? space.at(space.midpoint_index())
                          : space.at(rng.index(space.size()));
            return scout_search(*model, db, workload, objective, p);
          },
          [&](const RandomMethod& m) { return random_search(db, workload, objective, m.k, seed); },
          [&](const CoordDescentMethod&) {
            const CloudConfig start = space.at(rng.index(space.size()));
            return coordinate_descent(db, workload, objective, start, rng.next());
          },
          [&](const BayesOptMethod& m) {
            return bo_search(db, workload, objective, BoParams{m.n_init, m.ei_stop, m.min_samples, seed});
          },
      },
      spec);
}

}  // namespace

std::string method_name(const MethodSpec& spec) {
  return std::visit(Overloaded{
                        [](const ScoutMethod&) { return std::string("scout"); },
                        [](const RandomMethod& m) { return "random-" + std::to_string(m.k); },
                        [](const CoordDescentMethod&) { return std::string("coord_descent"); },
                        [](const BayesOptMethod&) { return std::string("bayesopt"); },
                    },
                    spec);
}

nlohmann::json method_params(const MethodSpec& spec) {
  return std::visit(
      Overloaded{
          [](const ScoutMethod& m) {
            return nlohmann::json{
                {"alpha", m.alpha},
                {"beta", m.beta ? nlohmann::json(*m.beta) : nlohmann::json(nullptr)},
                {"start_policy", m.start_policy == StartPolicy::kMidpoint ? "midpoint" : "random"}};
          },
          [](const RandomMethod& m) { return nlohmann::json{{"k", m.k}}; },
          [](const CoordDescentMethod&) { return nlohmann::json::object(); },
          [](const BayesOptMethod& m) {
            return nlohmann::json{{"n_init", m.n_init}, {"ei_stop", m.ei_stop}, {"min_samples", m.min_samples}};
          },
      },
      spec);
}

void EvalConfig::validate() const {
  if (repeats < 1) throw Error(ErrorCode::kInvalidArgument, "repeats must be >= 1");
  if (methods.empty()) throw Error(ErrorCode::kInvalidArgument, "at least one method is required");
  if (model.n_trees < 1 || model.min_leaf < 1)
    throw Error(ErrorCode::kInvalidArgument, "model n_trees and min_leaf must be >= 1");
  for (const MethodSpec& m : methods) {
    if (auto* s = std::get_if<ScoutMethod>(&m)) {
      if (!(s->alpha > 0.0 && s->alpha <= 1.0))
        throw Error(ErrorCode::kInvalidArgument, "scout alpha must be in (0, 1]");
      if (s->beta && *s->beta < 1) throw Error(ErrorCode::kInvalidArgument, "scout beta must be >= 1");
    } else if (auto* r = std::get_if<RandomMethod>(&m)) {
      if (r->k < 1) throw Error(ErrorCode::kInvalidArgument, "random k must be >= 1");
    } else if (auto* b = std::get_if<BayesOptMethod>(&m)) {
      if (b->n_init < 2) throw Error(ErrorCode::kInvalidArgument, "bayesopt n_init must be >= 2");
      if (!(b->ei_stop >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "ei_stop must be >= 0");
    }
  }
}

EvalConfig default_eval_config() {
  EvalConfig cfg;
  cfg.methods = {ScoutMethod{}, RandomMethod{4}, RandomMethod{6}, RandomMethod{8},
                 CoordDescentMethod{}, BayesOptMethod{}};
  return cfg;
}

EvalConfig parse_eval_config(const nlohmann::json& j) {
  auto fail = [](const std::string& what) -> void { throw Error(ErrorCode::kParseError, what); };
  if (!j.is_object()) fail("eval config must be a JSON object");
  EvalConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "objective") {
        auto o = parse_objective(value.get<std::string>());
        if (!o) fail("unknown objective " + value.get<std::string>());
        cfg.objective = *o;
      } else if (key == "repeats") {
        cfg.repeats = value.get<std::size_t>();
      } else if (key == "master_seed") {
        cfg.master_seed = value.get<std::uint64_t>();
      } else if (key == "max_pairs_per_workload") {
        cfg.max_pairs_per_workload =
            value.is_null() ? std::nullopt : std::optional<std::size_t>(value.get<std::size_t>());
      } else if (key == "threads") {
        cfg.threads = value.get<std::size_t>();
      } else if (key == "model") {
        for (const auto& [mk, mv] : value.items()) {
          if (mk == "n_trees") cfg.model.n_trees = mv.get<std::size_t>();
          else if (mk == "min_leaf") cfg.model.min_leaf = mv.get<std::size_t>();
          else if (mk == "max_features")
            cfg.model.max_features =
                mv.is_null() ? std::nullopt : std::optional<std::size_t>(mv.get<std::size_t>());
          else if (mk == "seed") cfg.model.seed = mv.get<std::uint64_t>();
          else fail("unknown model key " + mk);
        }
      } else if (key == "methods") {
        if (!value.is_array()) fail("methods must be an array");
        for (const auto& m : value) {
          const std::string name = m.at("name").get<std::string>();
          if (name == "scout") {
            ScoutMethod s;
            s.alpha = m.value("alpha", s.alpha);
            if (m.contains("beta") && !m["beta"].is_null()) s.beta = m["beta"].get<std::size_t>();
            const std::string policy = m.value("start_policy", std::string("random"));
            if (policy == "midpoint") s.start_policy = StartPolicy::kMidpoint;
            else if (policy == "random") s.start_policy = StartPolicy::kRandom;
            else fail("unknown start_policy " + policy);
            cfg.methods.emplace_back(s);
          } else if (name == "random") {
            cfg.methods.emplace_back(RandomMethod{m.at("k").get<std::size_t>()});
          } else if (name == "coord_descent") {
            cfg.methods.emplace_back(CoordDescentMethod{});
          } else if (name == "bayesopt") {
            BayesOptMethod b;
            b.n_init = m.value("n_init", b.n_init);
            b.ei_stop = m.value("ei_stop", b.ei_stop);
            b.min_samples = m.value("min_samples", b.min_samples);
            cfg.methods.emplace_back(b);
          } else {
            fail("unknown method " + name);
          }
        }
      } else {
        fail("unknown eval config key " + key);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("eval config: ") + e.what());
  }
  if (cfg.methods.empty()) cfg.methods = default_eval_config().methods;
  cfg.validate();
  return cfg;
}

EvalConfig load_eval_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open eval config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("eval config: ") + e.what());
  }
  return parse_eval_config(j);
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, const std::string& workload,
                              std::size_t method_index, std::size_t repeat) {
  return hash_values(master_seed, hash_string(workload), method_index, repeat);
}

double normalized_performance(double best_value, double optimal_value) {
  if (!(best_value > 0.0) || !(optimal_value > 0.0) || best_value < optimal_value)
    throw Error(ErrorCode::kInvalidValues,
                "normalized performance needs 0 < optimal <= best");
  return best_value / optimal_value;
}

double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::kEmptyList, "percentile of an empty list");
  if (!(p >= 0.0 && p <= 100.0)) throw Error(ErrorCode::kInvalidArgument, "p must be in [0, 100]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  const auto rank = static_cast<std::size_t>(std::ceil(p * n / 100.0));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  s.p10 = percentile(values, 10);
  s.p50 = percentile(values, 50);
  s.p90 = percentile(values, 90);
  return s;
}

EvalReport evaluate(const PerfDatabase& db, const EvalConfig& cfg, const EvalHooks& hooks) {
  cfg.validate();
  const auto& workloads = db.workloads();
  if (workloads.size() < 2)
    throw Error(ErrorCode::kTooFewWorkloads, "leave-one-out evaluation needs >= 2 workloads");
  const bool needs_model = std::any_of(cfg.methods.begin(), cfg.methods.end(), [](const auto& m) {
    return std::holds_alternative<ScoutMethod>(m);
  });

  const std::size_t n_methods = cfg.methods.size();
  std::vector<std::vector<WorkloadRuns>> results(workloads.size(),
                                                 std::vector<WorkloadRuns>(n_methods));
  std::vector<std::exception_ptr> errors(workloads.size());

  auto run_workload = [&](std::size_t w) {
    const std::string& id = workloads[w];
    const double opt = optimal(db, id, cfg.objective).value;
    std::unique_ptr<PairPredictor> model;
    if (needs_model) {
      if (hooks.model_factory) {
        model = hooks.model_factory(db, id, cfg.objective);
      } else {
        const auto samples = build_training_set(db, id, cfg.objective, cfg.max_pairs_per_workload,
                                                hash_values(cfg.master_seed, hash_string(id), 1));
        ModelParams params = cfg.model;
        params.seed = hash_values(cfg.model.seed, hash_string(id));
        params.threads = 1;
        model = std::make_unique<PairwiseModel>(train(samples, params));
      }
    }
    for (std::size_t m = 0; m < n_methods; ++m) {
      WorkloadRuns& out = results[w][m];
      out.workload_id = id;
      std::vector<double> perf;
      for (std::size_t r = 0; r < cfg.repeats; ++r) {
        const std::uint64_t seed = hooks.run_seed ? hooks.run_seed(cfg.master_seed, id, m, r)
                                                  : derive_run_seed(cfg.master_seed, id, m, r);
        const SearchTrace trace = run_method(cfg.methods[m], model.get(), db, id, cfg.objective, seed);
        RunRecord rec;
        rec.seed = seed;
        rec.normalized_perf = normalized_performance(trace.best.value, opt);
        rec.steps = trace.steps.size();
        rec.stop_reason = trace.stop_reason;
        if (trace.steps.size() >= 2) rec.convergence_speed = convergence_speed(trace);
        perf.push_back(rec.normalized_perf);
        out.runs.push_back(rec);
      }
      out.median_normalized_perf = percentile(perf, 50);
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(cfg.threads, 1, workloads.size());
  auto guarded = [&](std::size_t w) {
    try {
      run_workload(w);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (threads == 1) {
    for (std::size_t w = 0; w < workloads.size(); ++w) guarded(w);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t w = next++; w < workloads.size(); w = next++) guarded(w);
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  EvalReport report;
  report.space = db.space();
  report.objective = cfg.objective;
  for (std::size_t m = 0; m < n_methods; ++m) {
    MethodReport mr;
    mr.name = method_name(cfg.methods[m]);
    mr.params = method_params(cfg.methods[m]);
    std::vector<double> perf, steps, speeds;
    std::size_t within = 0;
    for (std::size_t w = 0; w < workloads.size(); ++w) {
      for (const RunRecord& r : results[w][m].runs) {
        perf.push_back(r.normalized_perf);
        steps.push_back(static_cast<double>(r.steps));
        if (r.normalized_perf < 1.1) ++within;
        if (r.convergence_speed) speeds.push_back(*r.convergence_speed);
      }
      mr.per_workload.push_back(std::move(results[w][m]));
    }
    mr.normalized_perf = summarize(perf);
    mr.steps = summarize(steps);
    mr.frac_within_10pct = static_cast<double>(within) / static_cast<double>(perf.size());
    if (!speeds.empty()) {
      double sum = 0.0;
      for (double s : speeds) sum += s;
      mr.mean_convergence_speed = sum / static_cast<double>(speeds.size());
    }
    report.methods.push_back(std::move(mr));
  }
  return report;
}

}  // namespace scout
