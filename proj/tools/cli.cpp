#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "scout/error.hpp"
#include "scout/evalharness.hpp"
#include "scout/featurize.hpp"
#include "scout/pairmodel.hpp"
#include "scout/perfdb.hpp"
#include "scout/searchers.hpp"
#include "scout/synthgen.hpp"

namespace scout::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string exit_code_table() {
  std::ostringstream s;
  s << "Environment: every flag --some-flag may also be set as SCOUT_SOME_FLAG.\n"
    << "Exit codes: 0 ok, 1 internal error, 2 UsageError";
  for (int c = 0; c < kErrorCodeCount; ++c)
    s << ", " << kExitErrorBase + c << ' ' << error_code_name(static_cast<ErrorCode>(c));
  s << ".";
  return s.str();
}

std::string env_name(const std::string& flag) {
  std::string name = "SCOUT_";
  for (char c : flag) name += c == '-' ? '_' : static_cast<char>(std::toupper(c));
  return name;
}

template <typename T>
CLI::Option* flag_opt(CLI::App* app, const std::string& name, T& var, const std::string& desc) {
  return app->add_option("--" + name, var, desc)->envname(env_name(name));
}

Objective objective_from(const std::string& s) {
  auto o = parse_objective(s);
  if (!o) throw UsageError("unknown objective '" + s + "' (time, cost, time_cost)");
  return *o;
}

ConfigSpace space_from(const std::string& path) {
  return path.empty() ? default_space() : load_space(path);
}

void write_text(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kIoError, "cannot write " + path);
  f << content;
  if (!f) throw Error(ErrorCode::kIoError, "write failed for " + path);
}

struct GenArgs {
  std::string params, space, out;
};
struct TrainArgs {
  std::string db, space, exclude, objective = "time", model_out;
  std::uint64_t seed = 0;
  std::size_t max_pairs = 1000, n_trees = 100, min_leaf = 5, max_features = 0, threads = 1;
};
struct SearchArgs {
  std::string db, space, model, workload, method = "scout", objective = "time", start, trace_out;
  bool train_exclude_self = false;
  double alpha = 0.5, ei_stop = 0.10;
  std::size_t beta = 0, k = 8, n_init = 3, min_samples = 6, max_pairs = 1000, n_trees = 100, min_leaf = 5,
              threads = 1;
  std::uint64_t seed = 0;
};
struct EvalArgs {
  std::string db, space, config, out, format = "json";
  std::size_t threads = 1, repeats = 0;
  std::optional<std::uint64_t> seed;
};
struct AggregateArgs {
  std::string samples, space, out;
  double sample_period = 5.0;
};

ModelParams model_params(std::size_t n_trees, std::size_t min_leaf, std::size_t max_features,
                         std::uint64_t seed, std::size_t threads) {
  ModelParams p;
  p.n_trees = n_trees;
  p.min_leaf = min_leaf;
  if (max_features > 0) p.max_features = max_features;
  p.seed = seed;
  p.threads = threads;
  return p;
}

std::optional<std::size_t> pairs_cap(std::size_t max_pairs) {
  return max_pairs == 0 ? std::nullopt : std::optional<std::size_t>(max_pairs);
}

int do_gen(const GenArgs& a, std::ostream& out) {
  const ConfigSpace space = space_from(a.space);
  const GenParams params = a.params.empty() ? GenParams{} : load_gen_params(a.params);
  const PerfDatabase db = generate_database(params, space);
  std::ostringstream s;
  write_database(s, db);
  write_text(a.out, s.str(), out);
  return kExitOk;
}

int do_train(const TrainArgs& a, std::ostream&) {
  if (a.model_out.empty()) throw UsageError("--model-out is required");
  const PerfDatabase db = load_database(a.db, space_from(a.space));
  if (!a.exclude.empty() && !db.has_workload(a.exclude))
    throw Error(ErrorCode::kUnknownWorkload, "unknown workload " + a.exclude);
  const Objective obj = objective_from(a.objective);
  const auto samples = build_training_set(db, a.exclude, obj, pairs_cap(a.max_pairs), a.seed);
  const PairwiseModel model =
      train(samples, model_params(a.n_trees, a.min_leaf, a.max_features, a.seed, a.threads));
  save_model(a.model_out, model);
  return kExitOk;
}

int do_search(const SearchArgs& a, std::ostream& out) {
  const Objective obj = objective_from(a.objective);
  std::optional<CloudConfig> start;
  if (!a.start.empty()) {
    start = parse_config(a.start);
    if (!start) throw UsageError("bad --start '" + a.start + "' (expected e.g. m4.large:24)");
  }
  if (a.method == "scout" && a.model.empty() && !a.train_exclude_self)
    throw UsageError("search --method scout needs --model or --train-exclude-self");
  if (a.method != "scout" && a.method != "random" && a.method != "coord_descent" &&
      a.method != "bayesopt")
    throw UsageError("unknown --method '" + a.method + "'");

  const PerfDatabase db = load_database(a.db, space_from(a.space));
  if (!db.has_workload(a.workload))
    throw Error(ErrorCode::kUnknownWorkload, "unknown workload " + a.workload);
  const ConfigSpace& space = db.space();

  SearchTrace trace;
  if (a.method == "scout") {
    std::unique_ptr<PairwiseModel> model;
    if (!a.model.empty()) {
      model = std::make_unique<PairwiseModel>(load_model(a.model));
    } else {
      const auto samples = build_training_set(db, a.workload, obj, pairs_cap(a.max_pairs), a.seed);
      model = std::make_unique<PairwiseModel>(
          train(samples, model_params(a.n_trees, a.min_leaf, 0, a.seed, a.threads)));
    }
    ScoutParams p;
    p.alpha = a.alpha;
    if (a.beta > 0) p.beta = a.beta;
    p.start = start;
    trace = scout_search(*model, db, a.workload, obj, p);
  } else if (a.method == "random") {
    trace = random_search(db, a.workload, obj, a.k, a.seed);
  } else if (a.method == "coord_descent") {
    trace = coordinate_descent(db, a.workload, obj, start.value_or(space.at(space.midpoint_index())),
                               a.seed);
  } else {
    trace = bo_search(db, a.workload, obj, BoParams{a.n_init, a.ei_stop, a.min_samples, a.seed});
  }
  write_text(a.trace_out, trace_to_json(trace).dump(2) + "\n", out);
  return kExitOk;
}

int do_eval(const EvalArgs& a, std::ostream&) {
  if (a.out.empty()) throw UsageError("--out is required");
  ReportFormat format;
  if (a.format == "json") format = ReportFormat::kJson;
  else if (a.format == "csv") format = ReportFormat::kCsv;
  else throw UsageError("unknown --format '" + a.format + "' (json, csv)");
  const PerfDatabase db = load_database(a.db, space_from(a.space));
  EvalConfig cfg = a.config.empty() ? default_eval_config() : load_eval_config(a.config);
  cfg.threads = a.threads;
  if (a.repeats > 0) cfg.repeats = a.repeats;
  if (a.seed) cfg.master_seed = *a.seed;
  emit_report(evaluate(db, cfg), a.out, format);
  return kExitOk;
}

int do_aggregate(const AggregateArgs& a, std::ostream& out) {
  std::ifstream in(a.samples);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open sample file " + a.samples);
  const PerfDatabase db = aggregate_sample_file(in, space_from(a.space), a.sample_period);
  std::ostringstream s;
  write_database(s, db);
  write_text(a.out, s.str(), out);
  return kExitOk;
}

int do_space(const std::string& path, std::ostream& out) {
  std::ostringstream s;
  write_space(s, default_space());
  write_text(path, s.str(), out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model-guided cloud configuration search over a replayed performance database."};
  app.name("scout");
  app.footer(exit_code_table());
  app.require_subcommand(1);

  const std::string space_help = "Space CSV (default: built-in 72-config grid)";

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic performance database");
  flag_opt(gen_cmd, "params", gen.params, "Generator params file (key = value); defaults if omitted");
  flag_opt(gen_cmd, "space", gen.space, space_help);
  flag_opt(gen_cmd, "out", gen.out, "Output database CSV ('-' for stdout)")->required();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train and save a pairwise model");
  flag_opt(train_cmd, "db", tr.db, "Database CSV")->required();
  flag_opt(train_cmd, "space", tr.space, space_help);
  flag_opt(train_cmd, "exclude", tr.exclude, "Workload left out of training (default: none)");
  flag_opt(train_cmd, "objective", tr.objective, "time | cost | time_cost")->capture_default_str();
  flag_opt(train_cmd, "model-out", tr.model_out, "Model output path")->required();
  flag_opt(train_cmd, "seed", tr.seed, "Seed for sampling and trees")->capture_default_str();
  flag_opt(train_cmd, "max-pairs", tr.max_pairs, "Pairs sampled per workload (0 = all)")
      ->capture_default_str();
  flag_opt(train_cmd, "n-trees", tr.n_trees, "Trees in the ensemble")
      ->check(CLI::PositiveNumber)->capture_default_str();
  flag_opt(train_cmd, "min-leaf", tr.min_leaf, "Minimum samples per leaf")
      ->check(CLI::PositiveNumber)->capture_default_str();
  flag_opt(train_cmd, "max-features", tr.max_features,
           "Candidate features per split (0 = ceil(sqrt(dim)))")->capture_default_str();
  flag_opt(train_cmd, "threads", tr.threads, "Training threads")
      ->check(CLI::PositiveNumber)->capture_default_str();

  SearchArgs se;
  auto* search_cmd = app.add_subcommand("search", "Run one search for one workload");
  flag_opt(search_cmd, "db", se.db, "Database CSV")->required();
  flag_opt(search_cmd, "space", se.space, space_help);
  flag_opt(search_cmd, "workload", se.workload, "Target workload id")->required();
  flag_opt(search_cmd, "method", se.method, "scout | random | coord_descent | bayesopt")
      ->capture_default_str();
  flag_opt(search_cmd, "model", se.model, "Saved pairwise model (scout)");
  search_cmd->add_flag("--train-exclude-self", se.train_exclude_self,
                       "Train a model on every other workload first (scout)")
      ->envname("SCOUT_TRAIN_EXCLUDE_SELF");
  flag_opt(search_cmd, "objective", se.objective, "time | cost | time_cost")->capture_default_str();
  flag_opt(search_cmd, "alpha", se.alpha, "Probability threshold (scout)")
      ->check(CLI::Range(0.0, 1.0))->capture_default_str();
  flag_opt(search_cmd, "beta", se.beta,
           "Misprediction tolerance (scout; 0 = 3 for <=24 configs, else 4)")->capture_default_str();
  flag_opt(search_cmd, "k", se.k, "Configs sampled (random)")->capture_default_str();
  flag_opt(search_cmd, "n-init", se.n_init, "Initial samples (bayesopt)")->capture_default_str();
  flag_opt(search_cmd, "min-samples", se.min_samples,
           "Configs measured before EI may stop the search (bayesopt)")->capture_default_str();
  flag_opt(search_cmd, "ei-stop", se.ei_stop, "EI stopping threshold (bayesopt)")
      ->capture_default_str();
  flag_opt(search_cmd, "start", se.start,
           "Start config, e.g. m4.large:24 (scout, coord_descent; default: space midpoint)");
  flag_opt(search_cmd, "seed", se.seed, "Seed")->capture_default_str();
  flag_opt(search_cmd, "trace-out", se.trace_out, "Trace JSON path (default: stdout)");
  flag_opt(search_cmd, "max-pairs", se.max_pairs,
           "Pairs per workload with --train-exclude-self (0 = all)")->capture_default_str();
  flag_opt(search_cmd, "n-trees", se.n_trees, "Trees with --train-exclude-self")
      ->check(CLI::PositiveNumber)->capture_default_str();
  flag_opt(search_cmd, "min-leaf", se.min_leaf, "Minimum leaf size with --train-exclude-self")
      ->check(CLI::PositiveNumber)->capture_default_str();
  flag_opt(search_cmd, "threads", se.threads, "Training threads")
      ->check(CLI::PositiveNumber)->capture_default_str();

  EvalArgs ev;
  std::uint64_t eval_seed = 0;
  auto* eval_cmd = app.add_subcommand("eval", "Leave-one-workload-out evaluation of all methods");
  flag_opt(eval_cmd, "db", ev.db, "Database CSV")->required();
  flag_opt(eval_cmd, "space", ev.space, space_help);
  flag_opt(eval_cmd, "config", ev.config,
           "Eval config JSON (default: scout, random-4/6/8, coord_descent, bayesopt; 100 repeats)");
  flag_opt(eval_cmd, "out", ev.out, "Report path")->required();
  flag_opt(eval_cmd, "format", ev.format, "json | csv")->capture_default_str();
  flag_opt(eval_cmd, "threads", ev.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  flag_opt(eval_cmd, "repeats", ev.repeats, "Override repeats per (workload, method); 0 = config");
  auto* eval_seed_opt = flag_opt(eval_cmd, "seed", eval_seed, "Override master seed");

  AggregateArgs ag;
  auto* agg_cmd = app.add_subcommand("aggregate", "Aggregate raw metric samples into a database");
  flag_opt(agg_cmd, "samples", ag.samples, "Raw sample CSV")->required();
  flag_opt(agg_cmd, "space", ag.space, space_help);
  flag_opt(agg_cmd, "out", ag.out, "Output database CSV ('-' for stdout)")->required();
  flag_opt(agg_cmd, "sample-period", ag.sample_period, "Seconds per sample")
      ->check(CLI::PositiveNumber)->capture_default_str();

  std::string space_out;
  auto* space_cmd = app.add_subcommand("space", "Write the built-in configuration space CSV");
  flag_opt(space_cmd, "out", space_out, "Output path ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "UsageError: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return do_gen(gen, out);
    if (*train_cmd) return do_train(tr, out);
    if (*search_cmd) return do_search(se, out);
    if (*eval_cmd) {
      if (*eval_seed_opt) ev.seed = eval_seed;
      return do_eval(ev, out);
    }
    if (*agg_cmd) return do_aggregate(ag, out);
    if (*space_cmd) return do_space(space_out, out);
    err << "UsageError: no subcommand\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "UsageError: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << error_code_name(e.code()) << ": " << e.what() << '\n';
    return kExitErrorBase + static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "InternalError: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace scout::cli
