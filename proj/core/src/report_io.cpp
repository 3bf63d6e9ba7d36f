#include <fstream>
#include <map>
#include <sstream>

#include "scout/error.hpp"
#include "scout/evalharness.hpp"
#include "text.hpp"

namespace scout {
namespace {

using nlohmann::json;

json space_to_json(const ConfigSpace& space) {
  std::vector<InstanceKey> order;
  std::map<InstanceKey, std::vector<int>> counts;
  for (const CloudConfig& c : space.configs()) {
    InstanceKey key{c.family, c.size};
    if (!counts.contains(key)) order.push_back(key);
    counts[key].push_back(c.node_count);
  }
  for (const auto& [key, spec] : space.instance_specs())
    if (!counts.contains(key)) order.push_back(key);
  json types = json::array();
  for (const InstanceKey& key : order) {
    const InstanceSpec& spec = space.instance_specs().at(key);
    types.push_back({{"family", to_string(key.first)},
                     {"size", to_string(key.second)},
                     {"vcpus_per_node", spec.vcpus_per_node},
                     {"mem_gb_per_node", spec.mem_gb_per_node},
                     {"price_per_node_hour", spec.price_per_node_hour},
                     {"node_counts", counts[key]}});
  }
  return {{"size", space.size()}, {"instance_types", std::move(types)}};
}

ConfigSpace space_from_json(const json& j) {
  std::vector<CloudConfig> configs;
  std::map<InstanceKey, InstanceSpec> specs;
  for (const json& t : j.at("instance_types")) {
    auto family = parse_family(t.at("family").get<std::string>());
    auto size = parse_size(t.at("size").get<std::string>());
    if (!family || !size) throw Error(ErrorCode::kParseError, "bad instance type in report");
    specs[{*family, *size}] = {t.at("vcpus_per_node").get<int>(),
                               t.at("mem_gb_per_node").get<double>(),
                               t.at("price_per_node_hour").get<double>()};
    for (int n : t.at("node_counts").get<std::vector<int>>()) configs.push_back({*family, *size, n});
  }
  return ConfigSpace(std::move(configs), std::move(specs));
}

json summary_to_json(const Summary& s) {
  return {{"mean", s.mean}, {"p10", s.p10}, {"p50", s.p50}, {"p90", s.p90}};
}

Summary summary_from_json(const json& j) {
  return {j.at("mean").get<double>(), j.at("p10").get<double>(), j.at("p50").get<double>(),
          j.at("p90").get<double>()};
}

}  // namespace

nlohmann::json report_to_json(const EvalReport& report) {
  json methods = json::array();
  for (const MethodReport& m : report.methods) {
    json per_workload = json::array();
    for (const WorkloadRuns& w : m.per_workload) {
      json runs = json::array();
      for (const RunRecord& r : w.runs) {
        runs.push_back({{"seed", r.seed},
                        {"normalized_perf", r.normalized_perf},
                        {"steps", r.steps},
                        {"stop_reason", to_string(r.stop_reason)},
                        {"convergence_speed",
                         r.convergence_speed ? json(*r.convergence_speed) : json(nullptr)}});
      }
      per_workload.push_back({{"workload_id", w.workload_id},
                              {"median_normalized_perf", w.median_normalized_perf},
                              {"runs", std::move(runs)}});
    }
    methods.push_back(
        {{"name", m.name},
         {"params", m.params},
         {"per_workload", std::move(per_workload)},
         {"aggregates",
          {{"normalized_perf", summary_to_json(m.normalized_perf)},
           {"steps", summary_to_json(m.steps)},
           {"frac_within_10pct", m.frac_within_10pct},
           {"convergence_speed_mean", m.mean_convergence_speed ? json(*m.mean_convergence_speed)
                                                               : json(nullptr)}}}});
  }
  return {{"space", space_to_json(report.space)},
          {"objective", to_string(report.objective)},
          {"methods", std::move(methods)}};
}

EvalReport report_from_json(const nlohmann::json& j) {
  try {
    EvalReport report;
    report.space = space_from_json(j.at("space"));
    auto objective = parse_objective(j.at("objective").get<std::string>());
    if (!objective) throw Error(ErrorCode::kParseError, "bad objective in report");
    report.objective = *objective;
    for (const json& m : j.at("methods")) {
      MethodReport mr;
      mr.name = m.at("name").get<std::string>();
      mr.params = m.at("params");
      for (const json& w : m.at("per_workload")) {
        WorkloadRuns wr;
        wr.workload_id = w.at("workload_id").get<std::string>();
        wr.median_normalized_perf = w.at("median_normalized_perf").get<double>();
        for (const json& r : w.at("runs")) {
          RunRecord rec;
          rec.seed = r.at("seed").get<std::uint64_t>();
          rec.normalized_perf = r.at("normalized_perf").get<double>();
          rec.steps = r.at("steps").get<std::size_t>();
          auto reason = parse_stop_reason(r.at("stop_reason").get<std::string>());
          if (!reason) throw Error(ErrorCode::kParseError, "bad stop_reason in report");
          rec.stop_reason = *reason;
          if (!r.at("convergence_speed").is_null())
            rec.convergence_speed = r.at("convergence_speed").get<double>();
          wr.runs.push_back(rec);
        }
        mr.per_workload.push_back(std::move(wr));
      }
      const json& agg = m.at("aggregates");
      mr.normalized_perf = summary_from_json(agg.at("normalized_perf"));
      mr.steps = summary_from_json(agg.at("steps"));
      mr.frac_within_10pct = agg.at("frac_within_10pct").get<double>();
      if (!agg.at("convergence_speed_mean").is_null())
        mr.mean_convergence_speed = agg.at("convergence_speed_mean").get<double>();
      report.methods.push_back(std::move(mr));
    }
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("report: ") + e.what());
  }
}

std::string report_to_csv(const EvalReport& report) {
  using text::format_double;
  std::ostringstream out;
  out << "method,workload_id,run,seed,normalized_perf,steps,stop_reason,convergence_speed\n";
  for (const MethodReport& m : report.methods)
    for (const WorkloadRuns& w : m.per_workload)
      for (std::size_t r = 0; r < w.runs.size(); ++r) {
        const RunRecord& rec = w.runs[r];
        out << m.name << ',' << w.workload_id << ',' << r << ',' << rec.seed << ','
            << format_double(rec.normalized_perf) << ',' << rec.steps << ','
            << to_string(rec.stop_reason) << ','
            << (rec.convergence_speed ? format_double(*rec.convergence_speed) : "") << '\n';
      }
  out << "\nmethod,metric,mean,p10,p50,p90\n";
  for (const MethodReport& m : report.methods) {
    for (const auto& [metric, s] : {std::pair{"normalized_perf", m.normalized_perf},
                                    std::pair{"steps", m.steps}}) {
      out << m.name << ',' << metric << ',' << format_double(s.mean) << ','
          << format_double(s.p10) << ',' << format_double(s.p50) << ','
          << format_double(s.p90) << '\n';
    }
  }
  out << "\nmethod,frac_within_10pct,convergence_speed_mean\n";
  for (const MethodReport& m : report.methods)
    out << m.name << ',' << format_double(m.frac_within_10pct) << ','
        << (m.mean_convergence_speed ? format_double(*m.mean_convergence_speed) : "") << '\n';
  return out.str();
}

void emit_report(const EvalReport& report, const std::filesystem::path& path,
                 ReportFormat format) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write report " + path.string());
  if (format == ReportFormat::kJson)
    out << report_to_json(report).dump(2) << '\n';
  else
    out << report_to_csv(report);
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace scout
