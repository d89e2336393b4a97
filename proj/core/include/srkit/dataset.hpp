#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "srkit/generator.hpp"
#include "srkit/sampler.hpp"

namespace srkit {

/// One line of a dataset file: an equation, its data matrix and the noise level
/// used to draw it.
struct DatasetRecord {
  EquationRecord equation;
  DataMatrix data;
  double noise_sigma = 0.0;
};

class DatasetError : public std::runtime_error {
 public:
  enum class Kind { malformed_line, io_error };
  DatasetError(Kind kind, const std::string& message, std::size_t line = 0)
      : std::runtime_error(message), kind_(kind), line_(line) {}
  Kind kind() const noexcept { return kind_; }
  /// 1-based line number for malformed_line, else 0.
  std::size_t line() const noexcept { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

/// Single-line JSON object {id, expression, skeleton, n_vars, depth, split, dom,
/// distribution, points, noise_sigma}. Doubles use shortest round-trip notation.
std::string to_json_line(const DatasetRecord& record);

/// Inverse of to_json_line. Throws DatasetError(malformed_line, ..., line).
DatasetRecord parse_json_line(std::string_view line, std::size_t line_number = 0);

void write_dataset(std::span<const DatasetRecord> records, const std::filesystem::path& path);

/// Blank lines are skipped; anything else must be a complete record.
std::vector<DatasetRecord> read_dataset(const std::filesystem::path& path);

struct CorpusStats {
  std::size_t total = 0;
  std::size_t train = 0;
  std::size_t test = 0;
  std::map<std::size_t, std::size_t> depth_histogram;
  std::map<std::size_t, std::size_t> n_vars_histogram;
  /// Number of records using each operator symbol / function name at least once.
  std::map<std::string, std::size_t> operator_usage;
  std::map<std::string, std::size_t> function_usage;
  /// Records whose canonical skeleton already appeared earlier in the file.
  std::size_t duplicate_skeletons = 0;
  /// Skeletons present in both splits.
  std::size_t split_overlap = 0;
};

CorpusStats corpus_stats(std::span<const DatasetRecord> records);

/// Two-space-indented JSON document.
std::string to_json(const CorpusStats& stats);

}  // namespace srkit
