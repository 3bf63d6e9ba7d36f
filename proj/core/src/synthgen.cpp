#include "scout/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "scout/error.hpp"
#include "scout/random.hpp"
#include "text.hpp"

namespace scout {
namespace {

constexpr std::size_t kCanonicalMetrics = 6;

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

std::uint64_t config_seed(std::uint64_t profile_seed, const CloudConfig& c, std::uint64_t salt) {
  return hash_values(profile_seed, static_cast<std::uint64_t>(c.family),
                     static_cast<std::uint64_t>(c.size),
                     static_cast<std::uint64_t>(c.node_count), salt);
}

struct RangeField {
  const char* name;
  Range ProfileRanges::*member;
};

constexpr RangeField kRangeFields[] = {
    {"work_core_s", &ProfileRanges::work_core_s},
    {"serial_frac", &ProfileRanges::serial_frac},
    {"mem_demand_gb_per_core", &ProfileRanges::mem_demand_gb_per_core},
    {"cpu_speed_weight", &ProfileRanges::cpu_speed_weight},
    {"shuffle_coef", &ProfileRanges::shuffle_coef},
    {"noise_sigma", &ProfileRanges::noise_sigma},
};

}  // namespace

void WorkloadProfile::validate() const {
  require(!workload_id.empty(), "workload_id must be non-empty");
  require(std::isfinite(work_core_s) && work_core_s > 0.0, "work_core_s must be > 0");
  require(serial_frac >= 0.0 && serial_frac <= 1.0, "serial_frac must be in [0,1]");
  require(std::isfinite(mem_demand_gb_per_core) && mem_demand_gb_per_core >= 0.0,
          "mem_demand_gb_per_core must be >= 0");
  require(cpu_speed_weight >= 0.0 && cpu_speed_weight <= 1.0,
          "cpu_speed_weight must be in [0,1]");
  require(std::isfinite(shuffle_coef) && shuffle_coef >= 0.0, "shuffle_coef must be >= 0");
  require(std::isfinite(noise_sigma) && noise_sigma >= 0.0, "noise_sigma must be >= 0");
}

void GenParams::validate(const ConfigSpace& space) const {
  require(metric_dimension >= kCanonicalMetrics, "metric_dimension must be >= 6");
  require(std::isfinite(mem_penalty_coef) && mem_penalty_coef >= 0.0,
          "mem_penalty_coef must be >= 0");
  for (const auto& [family, speed] : family_speed)
    require(std::isfinite(speed) && speed > 0.0,
            "family_speed." + std::string(to_string(family)) + " must be > 0");
  for (const CloudConfig& c : space.configs())
    require(family_speed.contains(c.family),
            "family_speed missing for " + std::string(to_string(c.family)));
  for (const RangeField& f : kRangeFields) {
    const Range& r = ranges.*(f.member);
    require(std::isfinite(r.min) && std::isfinite(r.max) && r.min <= r.max,
            std::string("range.") + f.name + " must satisfy min <= max");
  }
  require(ranges.work_core_s.min > 0.0, "range.work_core_s must be positive");
  require(ranges.serial_frac.min >= 0.0 && ranges.serial_frac.max <= 1.0,
          "range.serial_frac must lie in [0,1]");
  require(ranges.cpu_speed_weight.min >= 0.0 && ranges.cpu_speed_weight.max <= 1.0,
          "range.cpu_speed_weight must lie in [0,1]");
  require(ranges.mem_demand_gb_per_core.min >= 0.0, "range.mem_demand_gb_per_core must be >= 0");
  require(ranges.shuffle_coef.min >= 0.0, "range.shuffle_coef must be >= 0");
  require(ranges.noise_sigma.min >= 0.0, "range.noise_sigma must be >= 0");
}

GenParams read_gen_params(std::istream& in) {
  GenParams params;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = text::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    const auto key = text::trim(view.substr(0, eq));
    const auto value = text::trim(view.substr(eq + 1));

    auto as_double = [&]() {
      double v = 0.0;
      if (!text::parse_double(value, v)) fail("bad number for " + std::string(key));
      return v;
    };
    auto as_count = [&]() {
      long long v = 0;
      if (!text::parse_int(value, v) || v < 0) fail("bad count for " + std::string(key));
      return static_cast<std::size_t>(v);
    };

    if (key == "n_workloads") {
      params.n_workloads = as_count();
    } else if (key == "metric_dimension") {
      params.metric_dimension = as_count();
    } else if (key == "master_seed") {
      if (!text::parse_u64(value, params.master_seed)) fail("bad master_seed");
    } else if (key == "mem_penalty_coef") {
      params.mem_penalty_coef = as_double();
    } else if (key.starts_with("family_speed.")) {
      auto family = parse_family(key.substr(13));
      if (!family) fail("unknown family in " + std::string(key));
      params.family_speed[*family] = as_double();
    } else if (key.starts_with("range.")) {
      const auto field = key.substr(6);
      const RangeField* match = nullptr;
      for (const RangeField& f : kRangeFields)
        if (field == f.name) match = &f;
      if (!match) fail("unknown range field " + std::string(field));
      auto parts = text::split(value, ',');
      Range r;
      if (parts.size() != 2 || !text::parse_double(parts[0], r.min) ||
          !text::parse_double(parts[1], r.max))
        fail("range values must be 'min, max'");
      params.ranges.*(match->member) = r;
    } else {
      fail("unknown key " + std::string(key));
    }
  }
  return params;
}

GenParams load_gen_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open params file " + path.string());
  return read_gen_params(in);
}

void write_gen_params(std::ostream& out, const GenParams& params) {
  out << "n_workloads = " << params.n_workloads << '\n'
      << "master_seed = " << params.master_seed << '\n'
      << "metric_dimension = " << params.metric_dimension << '\n'
      << "mem_penalty_coef = " << text::format_double(params.mem_penalty_coef) << '\n';
  for (const auto& [family, speed] : params.family_speed)
    out << "family_speed." << to_string(family) << " = " << text::format_double(speed) << '\n';
  for (const RangeField& f : kRangeFields) {
    const Range& r = params.ranges.*(f.member);
    out << "range." << f.name << " = " << text::format_double(r.min) << ", "
        << text::format_double(r.max) << '\n';
  }
}

TimeBreakdown time_breakdown(const WorkloadProfile& p, const CloudConfig& c,
                             const ConfigSpace& space, const GenParams& params) {
  if (!space.contains(c))
    throw Error(ErrorCode::kUnknownConfig, "config not in space: " + to_string(c));
  const InstanceSpec& spec = space.spec(c);
  auto speed_it = params.family_speed.find(c.family);
  if (speed_it == params.family_speed.end())
    throw Error(ErrorCode::kInvalidArgument,
                "family_speed missing for " + std::string(to_string(c.family)));

  TimeBreakdown b;
  b.cores = static_cast<std::size_t>(c.node_count) * static_cast<std::size_t>(spec.vcpus_per_node);
  const double speed = (1.0 - p.cpu_speed_weight) + p.cpu_speed_weight * speed_it->second;
  b.mem_per_core_gb = spec.mem_gb_per_node / spec.vcpus_per_node;
  b.mem_penalty = b.mem_per_core_gb >= p.mem_demand_gb_per_core
                      ? 1.0
                      : 1.0 + params.mem_penalty_coef *
                                  (p.mem_demand_gb_per_core / b.mem_per_core_gb - 1.0);
  const double cores = static_cast<double>(b.cores);
  b.serial_s = p.work_core_s * p.serial_frac / speed;
  b.compute_s = p.work_core_s * (1.0 - p.serial_frac) / (cores * speed);
  b.parallel_s = b.compute_s * b.mem_penalty;
  b.shuffle_s = p.shuffle_coef * c.node_count;
  return b;
}

double simulate_time(const WorkloadProfile& p, const CloudConfig& c, const ConfigSpace& space,
                     const GenParams& params) {
  const double t0 = time_breakdown(p, c, space, params).total();
  if (p.noise_sigma <= 0.0) return t0;
  Rng rng(config_seed(p.seed, c, 0));
  const double g = rng.normal();
  return t0 * std::exp(g * p.noise_sigma - p.noise_sigma * p.noise_sigma / 2.0);
}

std::vector<double> simulate_metrics(const WorkloadProfile& p, const CloudConfig& c, double t,
                                     const ConfigSpace& space, const GenParams& params) {
  const TimeBreakdown b = time_breakdown(p, c, space, params);
  const double t0 = b.total();
  std::vector<double> m(params.metric_dimension, 0.0);
  m[0] = b.compute_s / t0;
  m[1] = std::min(1.0, p.mem_demand_gb_per_core / b.mem_per_core_gb);
  m[2] = std::max(0.0, p.mem_demand_gb_per_core - b.mem_per_core_gb) * 100.0;
  m[3] = b.shuffle_s / t0;
  m[4] = b.serial_s / t0;
  m[5] = m[0] * static_cast<double>(b.cores);

  // Distractors: smooth mixes of the canonical six plus a little seeded noise.
  // The elapsed time enters only through a weak log term.
  Rng rng(config_seed(p.seed, c, 0xD157AC7));
  const double log_t = std::log(std::max(t, 1e-9));
  for (std::size_t k = kCanonicalMetrics; k < m.size(); ++k) {
    const double base = m[k % kCanonicalMetrics];
    const double other = m[(k * 5 + 1) % kCanonicalMetrics];
    const double a = 0.5 + 0.05 * static_cast<double>((k * 37) % 11);
    const double w = 0.2 * static_cast<double>((k * 13) % 5);
    m[k] = a * base + w * std::sqrt(std::abs(other)) + 0.001 * log_t + 0.01 * rng.normal();
  }
  return m;
}

std::vector<std::string> synthetic_metric_names(std::size_t dimension) {
  static const char* const kCanonical[kCanonicalMetrics] = {
      "cpu_util", "mem_util", "paging_rate", "net_frac", "serial_stall", "cores_busy"};
  std::vector<std::string> names;
  for (std::size_t k = 0; k < dimension; ++k) {
    if (k < kCanonicalMetrics) {
      names.emplace_back(kCanonical[k]);
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "aux_%02zu", k);
      names.emplace_back(buf);
    }
  }
  return names;
}

std::vector<WorkloadProfile> draw_profiles(const GenParams& params) {
  const ProfileRanges& r = params.ranges;
  std::vector<WorkloadProfile> profiles;
  profiles.reserve(params.n_workloads);
  for (std::size_t i = 0; i < params.n_workloads; ++i) {
    Rng rng(hash_values(params.master_seed, i));
    WorkloadProfile p;
    char id[24];
    std::snprintf(id, sizeof id, "wl%03zu", i);
    p.workload_id = id;
    p.work_core_s = std::exp(rng.uniform(std::log(r.work_core_s.min), std::log(r.work_core_s.max)));
    p.serial_frac = rng.uniform(r.serial_frac.min, r.serial_frac.max);
    p.mem_demand_gb_per_core =
        rng.uniform(r.mem_demand_gb_per_core.min, r.mem_demand_gb_per_core.max);
    p.cpu_speed_weight = rng.uniform(r.cpu_speed_weight.min, r.cpu_speed_weight.max);
    p.shuffle_coef = rng.uniform(r.shuffle_coef.min, r.shuffle_coef.max);
    p.noise_sigma = rng.uniform(r.noise_sigma.min, r.noise_sigma.max);
    p.seed = rng.next();
    profiles.push_back(std::move(p));
  }
  return profiles;
}

PerfDatabase generate_database(const std::vector<WorkloadProfile>& profiles,
                               const GenParams& params, const ConfigSpace& space) {
  params.validate(space);
  std::vector<Measurement> records;
  records.reserve(profiles.size() * space.size());
  for (const WorkloadProfile& p : profiles) {
    p.validate();
    for (const CloudConfig& c : space.configs()) {
      const double t = simulate_time(p, c, space, params);
      records.push_back({p.workload_id, c, t, simulate_metrics(p, c, t, space, params)});
    }
  }
  return PerfDatabase(space, synthetic_metric_names(params.metric_dimension), std::move(records));
}

PerfDatabase generate_database(const GenParams& params, const ConfigSpace& space) {
  params.validate(space);
  return generate_database(draw_profiles(params), params, space);
}

}  // namespace scout
