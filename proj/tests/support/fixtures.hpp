#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "scout/perfdb.hpp"
#include "scout/synthgen.hpp"

namespace scout::test {

// Subgrid of the default instance table: every (family, size) x node count.
ConfigSpace make_space(const std::vector<Family>& families, const std::vector<Size>& sizes,
                       const std::vector<int>& node_counts);

using WorkloadValues = std::pair<std::string, std::vector<double>>;

// One elapsed time per config in space order; metrics are a simple function of the value.
PerfDatabase make_db(const ConfigSpace& space, const std::vector<WorkloadValues>& workloads,
                     std::size_t metric_dim = 2);

GenParams noiseless_params(std::size_t n_workloads, std::uint64_t seed);

// Fresh, empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& tag);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace scout::test
