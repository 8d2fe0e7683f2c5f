#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <set>

#include "alkit/bench.hpp"
#include "alkit/csv.hpp"
#include "alkit/errors.hpp"

namespace alkit::bench {

namespace {

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out;
}

std::string format_u64(uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%" PRIu64, v);
  return buf;
}

std::string format_fixed(double v, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

int parse_int(const std::string& s, const char* what) {
  try {
    size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("bad integer in ") + what + ": '" + s + "'");
  }
}

double parse_num(const std::string& s, const char* what) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("bad number in ") + what + ": '" + s + "'");
  }
}

uint64_t parse_u64(const std::string& s, const char* what) {
  try {
    size_t pos = 0;
    const uint64_t v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(std::string("bad integer in ") + what + ": '" + s + "'");
  }
}

bool keep(const std::vector<std::string>& allowed, const std::string& v) {
  return allowed.empty() || std::find(allowed.begin(), allowed.end(), v) != allowed.end();
}

std::string curve_file_name(const LearningCurve& c) {
  return sanitize(c.dataset) + "__" + c.model + "__" + c.strategy + "__f" + std::to_string(c.fold) + "_r" +
         std::to_string(c.repeat) + ".csv";
}

std::string pad(const std::string& s, size_t width) {
  std::string out = s;
  while (out.size() < width) out += ' ';
  return out;
}

std::string outcome_id(Outcome o) {
  switch (o) {
    case Outcome::win: return "win";
    case Outcome::tie: return "tie";
    case Outcome::loss: return "loss";
  }
  return "?";
}

}  // namespace

void write_runs_csv(std::span<const RunRecord> runs, const std::filesystem::path& path) {
  CsvTable t;
  t.header = {"dataset", "model", "strategy", "fold", "repeat", "seed", "alc", "truncated_at"};
  for (const auto& r : runs) {
    t.rows.push_back({r.dataset, r.model, r.strategy, std::to_string(r.fold), std::to_string(r.repeat),
                      format_u64(r.seed), format_double(r.alc), std::to_string(r.truncated_at)});
  }
  write_csv_file(path, t);
}

std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv_file(path);
  const std::vector<std::string> expected = {"dataset", "model", "strategy", "fold",
                                             "repeat",  "seed",  "alc",      "truncated_at"};
  if (t.header != expected) throw ParseError("runs csv: unexpected header in " + path.string());
  std::vector<RunRecord> out;
  out.reserve(t.rows.size());
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    RunRecord r;
    r.dataset = row[0];
    r.model = row[1];
    r.strategy = row[2];
    r.fold = parse_int(row[3], "runs csv fold");
    r.repeat = parse_int(row[4], "runs csv repeat");
    r.seed = parse_u64(row[5], "runs csv seed");
    r.alc = parse_num(row[6], "runs csv alc");
    r.truncated_at = parse_int(row[7], "runs csv truncated_at");
    out.push_back(std::move(r));
  }
  if (out.empty()) throw DomainError("runs csv is empty: " + path.string());
  return out;
}

void write_curve_files(std::span<const LearningCurve> curves, const std::filesystem::path& curves_dir) {
  std::filesystem::create_directories(curves_dir);
  CsvTable index;
  index.header = {"file", "dataset", "model", "strategy", "fold", "repeat", "seed", "truncated_at"};
  for (const auto& c : curves) {
    const std::string file = curve_file_name(c);
    CsvTable t;
    t.header = {"budget", "accuracy"};
    for (size_t i = 0; i < c.budgets.size(); ++i) {
      t.rows.push_back({std::to_string(c.budgets[i]), format_double(c.accuracies[i])});
    }
    write_csv_file(curves_dir / file, t);
    index.rows.push_back({file, c.dataset, c.model, c.strategy, std::to_string(c.fold), std::to_string(c.repeat),
                          format_u64(c.seed), std::to_string(c.truncated_at)});
  }
  write_csv_file(curves_dir / "index.csv", index);
}

std::vector<LearningCurve> read_curve_files(const std::filesystem::path& curves_dir) {
  const CsvTable index = read_csv_file(curves_dir / "index.csv");
  std::vector<LearningCurve> out;
  out.reserve(index.rows.size());
  for (const auto& row : index.rows) {
    LearningCurve c;
    c.dataset = row[1];
    c.model = row[2];
    c.strategy = row[3];
    c.fold = parse_int(row[4], "curve index fold");
    c.repeat = parse_int(row[5], "curve index repeat");
    c.seed = parse_u64(row[6], "curve index seed");
    c.truncated_at = parse_int(row[7], "curve index truncated_at");
    const CsvTable t = read_csv_file(curves_dir / row[0]);
    for (const auto& point : t.rows) {
      c.budgets.push_back(parse_int(point[0], "curve budget"));
      c.accuracies.push_back(parse_num(point[1], "curve accuracy"));
    }
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

void write_table4(const ComparisonReport& rep, const std::filesystem::path& out_dir) {
  // machine-readable long format
  CsvTable csv;
  csv.header = {"dataset", "model", "strategy", "mean_alc", "marked", "outcome"};
  for (const auto& dataset : rep.datasets) {
    for (const auto& model : rep.models) {
      for (const auto& strategy : rep.strategies) {
        const auto& cell = rep.cells.at({dataset, model, strategy});
        csv.rows.push_back({dataset, model, strategy, format_double(cell.mean_alc), cell.marked ? "1" : "0",
                            outcome_id(cell.outcome)});
      }
    }
  }
  for (const auto& model : rep.models) {
    for (const auto& strategy : rep.strategies) {
      csv.rows.push_back({"(mean)", model, strategy, format_double(rep.grand_mean.at({model, strategy})), "", ""});
      const auto& wtl = rep.wtl.at({model, strategy});
      csv.rows.push_back({"(win/tie/loss)", model, strategy,
                          std::to_string(wtl.win) + "/" + std::to_string(wtl.tie) + "/" + std::to_string(wtl.loss),
                          "", ""});
    }
  }
  write_csv_file(out_dir / "summary_table4.csv", csv);

  // p-values backing the marks
  CsvTable pv;
  pv.header = {"dataset", "model", "strategy", "mean_alc", "p_vs_best", "marked", "outcome"};
  for (const auto& dataset : rep.datasets) {
    for (const auto& model : rep.models) {
      for (const auto& strategy : rep.strategies) {
        const auto& cell = rep.cells.at({dataset, model, strategy});
        pv.rows.push_back({dataset, model, strategy, format_double(cell.mean_alc), format_double(cell.p_vs_best),
                           cell.marked ? "1" : "0", outcome_id(cell.outcome)});
      }
    }
  }
  write_csv_file(out_dir / "summary_pvalues.csv", pv);

  // plain-text table, datasets + mean row + win/tie/loss row
  const size_t name_w = 28;
  const size_t col_w = 12;
  std::string txt;
  txt += pad("dataset", name_w);
  for (const auto& model : rep.models) {
    for (const auto& strategy : rep.strategies) txt += pad(strategy + "/" + model, col_w);
  }
  txt += '\n';
  for (const auto& dataset : rep.datasets) {
    txt += pad(dataset, name_w);
    for (const auto& model : rep.models) {
      for (const auto& strategy : rep.strategies) {
        const auto& cell = rep.cells.at({dataset, model, strategy});
        txt += pad(format_fixed(cell.mean_alc, 2) + (cell.marked ? "*" : ""), col_w);
      }
    }
    txt += '\n';
  }
  txt += pad("mean", name_w);
  for (const auto& model : rep.models) {
    for (const auto& strategy : rep.strategies) {
      txt += pad(format_fixed(rep.grand_mean.at({model, strategy}), 2), col_w);
    }
  }
  txt += '\n';
  txt += pad("win/tie/loss", name_w);
  for (const auto& model : rep.models) {
    for (const auto& strategy : rep.strategies) {
      const auto& wtl = rep.wtl.at({model, strategy});
      txt += pad(std::to_string(wtl.win) + "/" + std::to_string(wtl.tie) + "/" + std::to_string(wtl.loss), col_w);
    }
  }
  txt += '\n';
  write_text_file(out_dir / "summary_table4.txt", txt);
}

void write_table5(const ComparisonReport& rep, const std::vector<LearningCurve>& curves,
                  std::span<const int> sizes, const std::filesystem::path& out_dir) {
  // curves grouped per cell
  std::map<CellKey, std::vector<LearningCurve>> by_cell;
  for (const auto& c : curves) by_cell[{c.dataset, c.model, c.strategy}].push_back(c);

  auto cell_mean_at = [&](const CellKey& key, int size, double& out_value) -> bool {
    auto it = by_cell.find(key);
    if (it == by_cell.end()) return false;
    double sum = 0.0;
    for (const auto& c : it->second) {
      auto pos = std::lower_bound(c.budgets.begin(), c.budgets.end(), size);
      if (pos == c.budgets.end() || *pos != size) return false;
      sum += c.accuracies[pos - c.budgets.begin()];
    }
    out_value = 100.0 * sum / static_cast<double>(it->second.size());
    return true;
  };

  CsvTable csv;
  csv.header = {"dataset", "model", "strategy", "size", "mean_accuracy"};
  std::string txt;
  for (const auto& model : rep.models) {
    txt += "model=" + model + "\n";
    const size_t name_w = 28;
    const size_t col_w = 12;
    txt += pad("dataset", name_w);
    for (int size : sizes) {
      for (const auto& strategy : rep.strategies) txt += pad(strategy + "@" + std::to_string(size), col_w);
    }
    txt += '\n';
    std::map<std::pair<std::string, int>, std::pair<double, int>> grand;  // (strategy,size) -> (sum, count)
    for (const auto& dataset : rep.datasets) {
      txt += pad(dataset, name_w);
      for (int size : sizes) {
        for (const auto& strategy : rep.strategies) {
          double value = 0.0;
          if (cell_mean_at({dataset, model, strategy}, size, value)) {
            csv.rows.push_back({dataset, model, strategy, std::to_string(size), format_double(value)});
            txt += pad(format_fixed(value, 2), col_w);
            auto& g = grand[{strategy, size}];
            g.first += value;
            g.second += 1;
          } else {
            csv.rows.push_back({dataset, model, strategy, std::to_string(size), "na"});
            txt += pad("na", col_w);
          }
        }
      }
      txt += '\n';
    }
    txt += pad("mean", name_w);
    for (int size : sizes) {
      for (const auto& strategy : rep.strategies) {
        const auto it = grand.find({strategy, size});
        if (it != grand.end() && it->second.second == static_cast<int>(rep.datasets.size())) {
          const double m = it->second.first / static_cast<double>(it->second.second);
          csv.rows.push_back({"(mean)", model, strategy, std::to_string(size), format_double(m)});
          txt += pad(format_fixed(m, 2), col_w);
        } else {
          csv.rows.push_back({"(mean)", model, strategy, std::to_string(size), "na"});
          txt += pad("na", col_w);
        }
      }
    }
    txt += "\n\n";
  }
  write_csv_file(out_dir / "summary_table5.csv", csv);
  write_text_file(out_dir / "summary_table5.txt", txt);
}

}  // namespace

void summarize_from_files(const std::filesystem::path& runs_csv, const std::filesystem::path& curves_dir,
                          const std::filesystem::path& out_dir, const ReportFilter& filter, double significance) {
  std::vector<RunRecord> runs = read_runs_csv(runs_csv);
  std::vector<RunRecord> kept;
  for (auto& r : runs) {
    if (keep(filter.models, r.model) && keep(filter.strategies, r.strategy)) kept.push_back(std::move(r));
  }
  if (kept.empty()) throw DomainError("report: no runs left after filtering");

  std::vector<LearningCurve> curves;
  if (std::filesystem::exists(curves_dir / "index.csv")) {
    for (auto& c : read_curve_files(curves_dir)) {
      if (keep(filter.models, c.model) && keep(filter.strategies, c.strategy)) curves.push_back(std::move(c));
    }
  }

  std::filesystem::create_directories(out_dir);
  const ComparisonReport rep = aggregate_win_tie_loss(kept, significance);
  write_table4(rep, out_dir);
  write_table5(rep, curves, kDefaultSliceSizes, out_dir);
}

}  // namespace alkit::bench
