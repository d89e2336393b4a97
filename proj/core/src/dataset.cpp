#include "srkit/dataset.hpp"

#include <fstream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "srkit/parse.hpp"
#include "srkit/skeleton.hpp"

namespace srkit {

namespace {

using json = nlohmann::json;

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw DatasetError(DatasetError::Kind::malformed_line, "line " + std::to_string(line) + ": " + what, line);
}

}  // namespace

std::string to_json_line(const DatasetRecord& r) {
  const DataMatrix& m = r.data;
  json points = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (double v : m.row(i)) row.push_back(v);
    row.push_back(m.y[i]);
    points.push_back(std::move(row));
  }
  json j;
  j["id"] = r.equation.id;
  j["expression"] = print(r.equation.expression);
  j["skeleton"] = r.equation.skeleton.canonical_string();
  j["n_vars"] = r.equation.n_vars;
  j["depth"] = r.equation.depth;
  j["split"] = to_string(r.equation.split);
  j["dom"] = m.dom;
  j["distribution"] = to_string(m.distribution);
  j["points"] = std::move(points);
  j["noise_sigma"] = r.noise_sigma;
  return j.dump();
}

DatasetRecord parse_json_line(std::string_view line, std::size_t n) {
  const json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) malformed(n, "not a JSON object");

  DatasetRecord r;
  try {
    r.equation.id = j.at("id").get<std::string>();
    r.equation.expression = parse(j.at("expression").get<std::string>());
    r.equation.skeleton = parse_skeleton(j.at("skeleton").get<std::string>());
    r.equation.n_vars = j.at("n_vars").get<std::size_t>();
    r.equation.depth = j.at("depth").get<std::size_t>();
    const auto split = j.at("split").get<std::string>();
    if (split != "train" && split != "test") malformed(n, "split must be 'train' or 'test'");
    r.equation.split = split == "train" ? Split::train : Split::test;

    r.data.n_vars = r.equation.n_vars;
    r.data.dom = j.at("dom").get<double>();
    const auto dist = distribution_from_string(j.at("distribution").get<std::string>());
    if (!dist) malformed(n, "unknown distribution");
    r.data.distribution = *dist;
    r.noise_sigma = j.at("noise_sigma").get<double>();

    const json& points = j.at("points");
    if (!points.is_array()) malformed(n, "points must be an array");
    r.data.x.reserve(points.size() * r.data.n_vars);
    r.data.y.reserve(points.size());
    for (const json& row : points) {
      if (!row.is_array() || row.size() != r.data.n_vars + 1) {
        malformed(n, "points row width must be n_vars + 1 = " + std::to_string(r.data.n_vars + 1));
      }
      for (std::size_t c = 0; c < r.data.n_vars; ++c) r.data.x.push_back(row[c].get<double>());
      r.data.y.push_back(row[r.data.n_vars].get<double>());
    }
  } catch (const json::exception& e) {
    malformed(n, e.what());
  } catch (const ParseError& e) {
    malformed(n, e.what());
  }
  if (r.equation.expression.arity() > r.equation.n_vars) malformed(n, "expression uses more variables than n_vars");
  if (!(r.equation.skeleton == extract_skeleton(r.equation.expression))) {
    malformed(n, "skeleton does not match expression");
  }
  return r;
}

void write_dataset(std::span<const DatasetRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError(DatasetError::Kind::io_error, "cannot open " + path.string() + " for writing");
  for (const auto& r : records) out << to_json_line(r) << '\n';
  out.flush();
  if (!out) throw DatasetError(DatasetError::Kind::io_error, "write failed for " + path.string());
}

std::vector<DatasetRecord> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(DatasetError::Kind::io_error, "cannot open " + path.string());
  std::vector<DatasetRecord> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_json_line(line, n));
  }
  if (in.bad()) throw DatasetError(DatasetError::Kind::io_error, "read failed for " + path.string());
  return out;
}

CorpusStats corpus_stats(std::span<const DatasetRecord> records) {
  CorpusStats s;
  std::unordered_set<std::string> seen;
  std::unordered_map<std::string, unsigned> split_mask;
  for (const auto& r : records) {
    const auto& eq = r.equation;
    ++s.total;
    (eq.split == Split::train ? s.train : s.test) += 1;
    ++s.depth_histogram[eq.depth];
    ++s.n_vars_histogram[eq.n_vars];

    const FeatureVector f = extract_features(eq.skeleton);
    for (BinaryKind k : f.operators) ++s.operator_usage[std::string(symbol(k))];
    for (UnaryKind k : f.functions) ++s.function_usage[std::string(name(k))];

    const std::string& key = eq.skeleton.canonical_string();
    if (!seen.insert(key).second) ++s.duplicate_skeletons;
    split_mask[key] |= eq.split == Split::train ? 1u : 2u;
  }
  for (const auto& [key, mask] : split_mask) s.split_overlap += mask == 3u;
  return s;
}

std::string to_json(const CorpusStats& s) {
  auto keyed = [](const std::map<std::size_t, std::size_t>& h) {
    json j = json::object();
    for (const auto& [k, v] : h) j[std::to_string(k)] = v;
    return j;
  };
  json j;
  j["total"] = s.total;
  j["train"] = s.train;
  j["test"] = s.test;
  j["depth_histogram"] = keyed(s.depth_histogram);
  j["n_vars_histogram"] = keyed(s.n_vars_histogram);
  j["operator_usage"] = s.operator_usage;
  j["function_usage"] = s.function_usage;
  j["duplicate_skeletons"] = s.duplicate_skeletons;
  j["split_overlap"] = s.split_overlap;
  return j.dump(2);
}

}  // namespace srkit
