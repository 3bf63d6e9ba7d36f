#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "scout/error.hpp"
#include "scout/pairmodel.hpp"
#include "text.hpp"

namespace scout {
namespace {

[[noreturn]] void format_fail(const std::string& what) {
  throw Error(ErrorCode::kModelFormat, what);
}

std::string next_line(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) format_fail("unexpected end of model file");
  return std::string(text::trim(line));
}

// Reads "<key> <value>" and returns value.
std::string keyed(std::istream& in, std::string_view key) {
  const std::string line = next_line(in);
  if (line.size() <= key.size() + 1 || line.compare(0, key.size(), key) != 0 ||
      line[key.size()] != ' ')
    format_fail("expected '" + std::string(key) + "' line");
  return line.substr(key.size() + 1);
}

std::size_t keyed_count(std::istream& in, std::string_view key) {
  long long v = 0;
  if (!text::parse_int(keyed(in, key), v) || v < 0) format_fail("bad " + std::string(key));
  return static_cast<std::size_t>(v);
}

}  // namespace

// Text layout:
//   SCOUT-PAIRMODEL
//   version 1
//   dim <d>
//   constant <0|1>
//   trees <t>
//   then per tree: "tree <nodes>" followed by one line per node:
//   <feature> <threshold> <left> <right> <count> <p0> .. <p4>
void write_model(std::ostream& out, const PairwiseModel& model) {
  out << kModelMagic << '\n'
      << "version " << kModelFormatVersion << '\n'
      << "dim " << model.dim() << '\n'
      << "constant " << (model.is_constant() ? 1 : 0) << '\n'
      << "trees " << model.trees().size() << '\n';
  for (const auto& tree : model.trees()) {
    out << "tree " << tree.size() << '\n';
    for (const auto& node : tree) {
      out << node.feature << ' ' << text::format_double(node.threshold) << ' ' << node.left
          << ' ' << node.right << ' ' << node.count;
      for (double p : node.probs) out << ' ' << text::format_double(p);
      out << '\n';
    }
  }
}

PairwiseModel read_model(std::istream& in) {
  if (next_line(in) != kModelMagic) format_fail("not a pairwise model file (bad magic)");
  long long version = 0;
  if (!text::parse_int(keyed(in, "version"), version))
    format_fail("bad version line");
  if (version != kModelFormatVersion)
    format_fail("unsupported model format version " + std::to_string(version));
  const std::size_t dim = keyed_count(in, "dim");
  const std::size_t constant = keyed_count(in, "constant");
  const std::size_t n_trees = keyed_count(in, "trees");

  std::vector<PairwiseModel::Tree> trees(n_trees);
  for (auto& tree : trees) {
    tree.resize(keyed_count(in, "tree"));
    for (auto& node : tree) {
      const std::string line = next_line(in);
      auto parts = text::split(line, ' ');
      if (parts.size() != 5 + kClassCount) format_fail("bad node line");
      long long feature = 0, left = 0, right = 0, count = 0;
      if (!text::parse_int(parts[0], feature) || !text::parse_double(parts[1], node.threshold) ||
          !text::parse_int(parts[2], left) || !text::parse_int(parts[3], right) ||
          !text::parse_int(parts[4], count) || count < 0)
        format_fail("bad node line");
      node.feature = static_cast<std::int32_t>(feature);
      node.left = static_cast<std::int32_t>(left);
      node.right = static_cast<std::int32_t>(right);
      node.count = static_cast<std::uint32_t>(count);
      for (std::size_t k = 0; k < kClassCount; ++k)
        if (!text::parse_double(parts[5 + k], node.probs[k])) format_fail("bad node probability");
    }
  }
  return PairwiseModel(dim, std::move(trees), constant != 0);
}

void save_model(const std::filesystem::path& path, const PairwiseModel& model) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write model file " + path.string());
  write_model(out, model);
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

PairwiseModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open model file " + path.string());
  return read_model(in);
}

}  // namespace scout
