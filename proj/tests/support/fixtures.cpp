#include "fixtures.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace scout::test {

ConfigSpace make_space(const std::vector<Family>& families, const std::vector<Size>& sizes,
                       const std::vector<int>& node_counts) {
  const ConfigSpace full = default_space();
  std::vector<CloudConfig> configs;
  std::map<InstanceKey, InstanceSpec> specs;
  for (Family f : families)
    for (Size s : sizes) {
      specs[{f, s}] = full.spec(f, s);
      for (int n : node_counts) configs.push_back({f, s, n});
    }
  return ConfigSpace(std::move(configs), std::move(specs));
}

PerfDatabase make_db(const ConfigSpace& space, const std::vector<WorkloadValues>& workloads,
                     std::size_t metric_dim) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < metric_dim; ++k) names.push_back("m" + std::to_string(k));
  std::vector<Measurement> records;
  for (const auto& [id, values] : workloads) {
    if (values.size() != space.size()) throw std::invalid_argument("one value per config");
    for (std::size_t c = 0; c < space.size(); ++c) {
      Measurement m{id, space.at(c), values[c], std::vector<double>(metric_dim)};
      for (std::size_t k = 0; k < metric_dim; ++k)
        m.metrics[k] = values[c] / 100.0 + static_cast<double>(k);
      records.push_back(std::move(m));
    }
  }
  return PerfDatabase(space, names, std::move(records));
}

GenParams noiseless_params(std::size_t n_workloads, std::uint64_t seed) {
  GenParams p;
  p.n_workloads = n_workloads;
  p.master_seed = seed;
  p.ranges.noise_sigma = {0.0, 0.0};
  return p;
}

std::filesystem::path scratch_dir(const std::string& tag) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("scout-test-" + std::to_string(::getpid()) + "-" + tag + "-" +
                    std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace scout::test
