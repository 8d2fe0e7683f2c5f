#include "alkit/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "alkit/errors.hpp"
#include "alkit/rng.hpp"

namespace alkit::data {

namespace {

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + s.size()) return false;
  if (!std::isfinite(v)) return false;
  out = v;
  return true;
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "?"; }

int resolve_label_column(const std::vector<std::string>& header, const std::string& label_column) {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == label_column) return static_cast<int>(i);
  }
  // not a header name; accept a decimal column index
  if (!label_column.empty() && label_column.find_first_not_of("0123456789") == std::string::npos) {
    int idx = std::atoi(label_column.c_str());
    if (idx >= 0 && idx < static_cast<int>(header.size())) return idx;
    throw DomainError("label column index out of range: " + label_column);
  }
  throw DomainError("label column not found: " + label_column);
}

}  // namespace

int Dataset::class_count(int cls) const {
  int n = 0;
  for (int y : labels)
    if (y == cls) ++n;
  return n;
}

Dataset load_csv_text(std::string_view text, const std::string& dataset_name, const std::string& label_column) {
  CsvTable table = parse_csv(text);
  if (table.header.empty() || table.rows.empty()) throw DomainError("dataset is empty: " + dataset_name);

  const size_t width = table.header.size();
  std::vector<int> bad_rows;
  std::vector<int> missing_rows;
  for (size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != width) {
      std::ostringstream msg;
      msg << "csv row " << (r + 2) << " has " << table.rows[r].size() << " fields, expected " << width;
      throw ParseError(msg.str());
    }
    for (const auto& cell : table.rows[r]) {
      if (is_missing(cell)) {
        missing_rows.push_back(static_cast<int>(r + 2));
        break;
      }
    }
  }
  if (!missing_rows.empty()) {
    std::ostringstream msg;
    msg << "rows with missing cells rejected:";
    for (size_t i = 0; i < missing_rows.size() && i < 20; ++i) msg << ' ' << missing_rows[i];
    if (missing_rows.size() > 20) msg << " ... (" << missing_rows.size() << " total)";
    throw DomainError(msg.str());
  }

  const int label_idx = resolve_label_column(table.header, label_column);

  std::set<std::string> label_values;
  for (const auto& row : table.rows) label_values.insert(row[label_idx]);
  if (label_values.size() != 2) {
    std::ostringstream msg;
    msg << "label column must have exactly 2 distinct values, found " << label_values.size();
    throw DomainError(msg.str());
  }

  Dataset d;
  d.name = dataset_name;
  auto it = label_values.begin();
  d.label_names[0] = *it++;
  d.label_names[1] = *it;

  const int n = static_cast<int>(table.rows.size());
  const int feat_cols = static_cast<int>(width) - 1;
  d.features = Matrix(n, feat_cols);
  d.labels.resize(n);
  for (int r = 0; r < n; ++r) d.labels[r] = table.rows[r][label_idx] == d.label_names[0] ? 0 : 1;

  // detect column kinds
  int out_c = 0;
  for (int c = 0; c < static_cast<int>(width); ++c) {
    if (c == label_idx) continue;
    bool numeric = true;
    double tmp;
    for (const auto& row : table.rows) {
      if (!parse_number(row[c], tmp)) {
        numeric = false;
        break;
      }
    }
    ColumnMeta meta;
    meta.name = table.header[c];
    if (numeric) {
      meta.kind = ColumnMeta::Kind::numeric;
      for (int r = 0; r < n; ++r) {
        parse_number(table.rows[r][c], tmp);
        d.features.at(r, out_c) = tmp;
      }
    } else {
      meta.kind = ColumnMeta::Kind::categorical;
      std::set<std::string> values;
      for (const auto& row : table.rows) values.insert(row[c]);
      meta.categories.assign(values.begin(), values.end());
      for (int r = 0; r < n; ++r) {
        auto pos = std::lower_bound(meta.categories.begin(), meta.categories.end(), table.rows[r][c]);
        d.features.at(r, out_c) = static_cast<double>(pos - meta.categories.begin());
      }
    }
    d.columns.push_back(std::move(meta));
    ++out_c;
  }
  return d;
}

Dataset load_csv(const std::filesystem::path& path, const std::string& label_column) {
  return load_csv_text(read_text_file(path), path.stem().string(), label_column);
}

CsvTable dataset_to_csv(const Dataset& raw) {
  CsvTable t;
  for (const auto& col : raw.columns) t.header.push_back(col.name);
  t.header.push_back("label");
  t.rows.reserve(raw.rows());
  for (int r = 0; r < raw.rows(); ++r) {
    std::vector<std::string> row;
    row.reserve(raw.cols() + 1);
    for (int c = 0; c < raw.cols(); ++c) {
      const auto& meta = raw.columns[c];
      if (meta.kind == ColumnMeta::Kind::numeric) {
        row.push_back(format_double(raw.features.at(r, c)));
      } else {
        row.push_back(meta.categories[static_cast<size_t>(raw.features.at(r, c))]);
      }
    }
    row.push_back(raw.label_names[raw.labels[r]]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

int PreprocessSpec::output_width() const {
  int w = 0;
  for (const auto& col : columns) {
    w += col.kind == ColumnMeta::Kind::numeric ? 1 : static_cast<int>(col.categories.size());
  }
  return w;
}

PreprocessSpec fit_preprocess(const Dataset& d, std::span<const int> fit_rows) {
  if (fit_rows.empty()) throw DomainError("fit_preprocess: fit_rows is empty");
  PreprocessSpec spec;
  spec.columns.resize(d.columns.size());
  const double n = static_cast<double>(fit_rows.size());
  for (size_t c = 0; c < d.columns.size(); ++c) {
    auto& out = spec.columns[c];
    out.kind = d.columns[c].kind;
    out.name = d.columns[c].name;
    if (out.kind == ColumnMeta::Kind::numeric) {
      double sum = 0.0;
      for (int r : fit_rows) sum += d.features.at(r, static_cast<int>(c));
      const double mean = sum / n;
      double ss = 0.0;
      for (int r : fit_rows) {
        const double dv = d.features.at(r, static_cast<int>(c)) - mean;
        ss += dv * dv;
      }
      out.mean = mean;
      const double sd = std::sqrt(ss / n);
      out.sd = sd > 0.0 ? sd : 1.0;
    } else {
      std::set<std::string> seen;
      for (int r : fit_rows) {
        seen.insert(d.columns[c].categories[static_cast<size_t>(d.features.at(r, static_cast<int>(c)))]);
      }
      out.categories.assign(seen.begin(), seen.end());
    }
  }
  return spec;
}

Dataset apply_preprocess(const PreprocessSpec& spec, const Dataset& d) {
  if (spec.columns.size() != d.columns.size()) throw DomainError("apply_preprocess: column count mismatch");
  Dataset out;
  out.name = d.name;
  out.labels = d.labels;
  out.label_names = d.label_names;
  const int width = spec.output_width();
  out.features = Matrix(d.rows(), width);
  out.columns.reserve(width);

  for (size_t c = 0; c < spec.columns.size(); ++c) {
    const auto& col = spec.columns[c];
    if (col.kind == ColumnMeta::Kind::numeric) {
      ColumnMeta meta;
      meta.kind = ColumnMeta::Kind::numeric;
      meta.name = col.name;
      out.columns.push_back(std::move(meta));
    } else {
      for (const auto& cat : col.categories) {
        ColumnMeta meta;
        meta.kind = ColumnMeta::Kind::numeric;
        meta.name = col.name + "=" + cat;
        out.columns.push_back(std::move(meta));
      }
    }
  }

  for (int r = 0; r < d.rows(); ++r) {
    int w = 0;
    for (size_t c = 0; c < spec.columns.size(); ++c) {
      const auto& col = spec.columns[c];
      if (col.kind == ColumnMeta::Kind::numeric) {
        out.features.at(r, w++) = (d.features.at(r, static_cast<int>(c)) - col.mean) / col.sd;
      } else {
        const auto& value = d.columns[c].categories[static_cast<size_t>(d.features.at(r, static_cast<int>(c)))];
        auto pos = std::lower_bound(col.categories.begin(), col.categories.end(), value);
        const int hit = (pos != col.categories.end() && *pos == value)
                            ? static_cast<int>(pos - col.categories.begin())
                            : -1;  // unseen category: all-zero block
        for (size_t k = 0; k < col.categories.size(); ++k) {
          out.features.at(r, w++) = static_cast<int>(k) == hit ? 1.0 : 0.0;
        }
      }
    }
  }
  return out;
}

std::vector<int> FoldSplit::fold_rows(int fold) const {
  std::vector<int> rows;
  for (size_t r = 0; r < assignments.size(); ++r)
    if (assignments[r] == fold) rows.push_back(static_cast<int>(r));
  return rows;
}

std::vector<int> FoldSplit::complement_rows(int fold) const {
  std::vector<int> rows;
  for (size_t r = 0; r < assignments.size(); ++r)
    if (assignments[r] != fold) rows.push_back(static_cast<int>(r));
  return rows;
}

FoldSplit stratified_kfold(const Dataset& d, int k, uint64_t seed) {
  if (k < 2) throw DomainError("stratified_kfold: k must be >= 2");
  for (int cls = 0; cls < 2; ++cls) {
    if (d.class_count(cls) < k) {
      std::ostringstream msg;
      msg << "stratified_kfold: class " << cls << " has " << d.class_count(cls) << " examples, needs >= " << k;
      throw DomainError(msg.str());
    }
  }
  FoldSplit split;
  split.fold_count = k;
  split.seed = seed;
  split.assignments.assign(d.rows(), -1);
  SplitMix64 rng(seed);
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<int> rows;
    for (int r = 0; r < d.rows(); ++r)
      if (d.labels[r] == cls) rows.push_back(r);
    shuffle(rows, rng);
    for (size_t i = 0; i < rows.size(); ++i) split.assignments[rows[i]] = static_cast<int>(i % k);
  }
  return split;
}

std::pair<std::vector<int>, std::vector<int>> stratified_split(std::span<const int> labels, double test_fraction,
                                                               uint64_t seed) {
  if (test_fraction <= 0.0 || test_fraction >= 1.0) throw DomainError("stratified_split: fraction must be in (0,1)");
  std::vector<int> train, test;
  SplitMix64 rng(seed);
  for (int cls = 0; cls < 2; ++cls) {
    std::vector<int> rows;
    for (size_t r = 0; r < labels.size(); ++r)
      if (labels[r] == cls) rows.push_back(static_cast<int>(r));
    if (rows.size() < 2) throw DomainError("stratified_split: each class needs >= 2 examples");
    shuffle(rows, rng);
    int nt = static_cast<int>(std::lround(test_fraction * static_cast<double>(rows.size())));
    nt = std::clamp(nt, 1, static_cast<int>(rows.size()) - 1);
    for (size_t i = 0; i < rows.size(); ++i) {
      (static_cast<int>(i) < nt ? test : train).push_back(rows[i]);
    }
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {std::move(train), std::move(test)};
}

std::array<int, 2> sample_initial_labels(std::span<const int> pool, std::span<const int> labels, uint64_t seed) {
  std::array<std::vector<int>, 2> by_class;
  for (int r : pool) by_class[labels[r]].push_back(r);
  if (by_class[0].empty() || by_class[1].empty()) {
    throw DomainError("sample_initial_labels: pool must contain both classes");
  }
  SplitMix64 rng(seed);
  std::array<int, 2> out{};
  for (int cls = 0; cls < 2; ++cls) out[cls] = by_class[cls][rng.next_below(by_class[cls].size())];
  return out;
}

}  // namespace alkit::data
