#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "alkit/csv.hpp"
#include "alkit/matrix.hpp"

namespace alkit::data {

struct ColumnMeta {
  enum class Kind { numeric, categorical };
  Kind kind = Kind::numeric;
  std::string name;
  // Categorical only: distinct values sorted lexicographically. The feature
  // matrix stores the index into this list.
  std::vector<std::string> categories;
};

// A binary-classification table. After load_csv the matrix holds raw numeric
// values and categorical codes; after apply_preprocess it holds the final
// numeric embedding (standardized numerics + one-hot blocks).
struct Dataset {
  std::string name;
  Matrix features;
  std::vector<int> labels;  // values in {0,1}
  std::vector<ColumnMeta> columns;
  std::array<std::string, 2> label_names{};  // raw label strings, lexicographic order

  int rows() const { return features.rows(); }
  int cols() const { return features.cols(); }
  int class_count(int cls) const;
};

// Loads a CSV with a header row. Column kinds are auto-detected: a column
// whose every cell parses as a finite number is numeric, anything else is
// categorical. The two distinct raw label values map to {0,1} by
// lexicographic order of the raw strings. Rows with missing cells (empty or
// "?") are rejected; the error lists the offending row numbers.
Dataset load_csv(const std::filesystem::path& path, const std::string& label_column);
Dataset load_csv_text(std::string_view text, const std::string& dataset_name, const std::string& label_column);

// Inverse of load for raw datasets; used by the synthetic generators.
CsvTable dataset_to_csv(const Dataset& raw);

struct PreprocessSpec {
  struct Column {
    ColumnMeta::Kind kind = ColumnMeta::Kind::numeric;
    std::string name;
    double mean = 0.0;
    double sd = 1.0;  // population sd; constant columns keep 1
    std::vector<std::string> categories;  // fitted categories, sorted
  };
  std::vector<Column> columns;
  int output_width() const;
};

// Fits standardization / one-hot statistics on fit_rows only.
PreprocessSpec fit_preprocess(const Dataset& d, std::span<const int> fit_rows);

// Applies a fitted spec to every row of d. Numeric columns are standardized
// with the fitted statistics; categorical columns expand to one 0/1 column
// per fitted category (unseen categories produce an all-zero block). Output
// column order is the original column order with categories in sorted order.
Dataset apply_preprocess(const PreprocessSpec& spec, const Dataset& d);

struct FoldSplit {
  int fold_count = 0;
  std::vector<int> assignments;  // row -> fold id
  uint64_t seed = 0;

  std::vector<int> fold_rows(int fold) const;
  std::vector<int> complement_rows(int fold) const;
};

// Stratified k-fold assignment: per-fold class counts differ from an exact
// proportional split by at most one example. Deterministic in (d, k, seed).
FoldSplit stratified_kfold(const Dataset& d, int k, uint64_t seed);

// Stratified train/test split; returns (train_rows, test_rows), both in
// ascending row order. Each class contributes at least one row to each side.
std::pair<std::vector<int>, std::vector<int>> stratified_split(std::span<const int> labels, double test_fraction,
                                                               uint64_t seed);

// Draws exactly one uniform index per class from the pool: result[c] has
// label c. Deterministic under the seed.
std::array<int, 2> sample_initial_labels(std::span<const int> pool, std::span<const int> labels, uint64_t seed);

}  // namespace alkit::data
