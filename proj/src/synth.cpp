#include "alkit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alkit/errors.hpp"
#include "alkit/rng.hpp"

namespace alkit::synth {

namespace {

constexpr double kPi = 3.14159265358979323846;

double next_normal(SplitMix64& rng) {
  const double u1 = 1.0 - rng.next_double();  // (0, 1]
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

void standardize_in_place(std::vector<double>& v) {
  double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(v.size()));
  for (double& x : v) x = sd > 0.0 ? (x - mean) / sd : 0.0;
}

// raw table assembled as strings, then loaded through the CSV path so the
// generated datasets exercise exactly what a file on disk would
data::Dataset finish(const std::string& name, CsvTable table) {
  return data::load_csv_text(to_csv(table), name, "label");
}

std::string cat_value(int k) { return "c" + std::to_string(k); }

}  // namespace

data::Dataset make_shaped(const ShapedSpec& spec) {
  if (spec.rows < 8) throw DomainError("make_shaped: too few rows");
  if (spec.numeric_cols < 0 || spec.categorical_cols < 0) throw DomainError("make_shaped: negative column count");
  if (spec.numeric_cols + spec.categorical_cols < 1) throw DomainError("make_shaped: needs at least one column");
  SplitMix64 rng(spec.seed);
  const int n = spec.rows;

  std::vector<double> z1(n), z2(n);
  for (int i = 0; i < n; ++i) {
    z1[i] = next_normal(rng);
    z2[i] = next_normal(rng);
  }

  // annulus score: distance of the squared radius from its median
  std::vector<double> r2(n);
  for (int i = 0; i < n; ++i) r2[i] = z1[i] * z1[i] + z2[i] * z2[i];
  std::vector<double> sorted_r2 = r2;
  std::sort(sorted_r2.begin(), sorted_r2.end());
  const double median_r2 = sorted_r2[n / 2];
  std::vector<double> ring_score(n), linear_score(n);
  for (int i = 0; i < n; ++i) {
    ring_score[i] = -std::abs(r2[i] - median_r2);
    linear_score[i] = z1[i] + 0.4 * z2[i];
  }
  standardize_in_place(ring_score);
  standardize_in_place(linear_score);

  std::vector<double> score(n);
  for (int i = 0; i < n; ++i) {
    score[i] = spec.nonlinearity * ring_score[i] + (1.0 - spec.nonlinearity) * linear_score[i];
  }

  // minority class = top quantile of the blended score, then label noise
  const int minority_count = std::max(2, static_cast<int>(std::lround(spec.minority_fraction * n)));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  });
  std::vector<int> label(n, 0);
  for (int i = 0; i < minority_count; ++i) label[order[i]] = 1;
  for (int i = 0; i < n; ++i) {
    if (rng.next_double() < spec.label_noise) label[i] = 1 - label[i];
  }

  // numeric columns: two latent observations, then random projections, then noise
  std::vector<std::vector<double>> numeric(spec.numeric_cols, std::vector<double>(n));
  const int informative = std::min(spec.numeric_cols, 2 + (spec.numeric_cols - 2) / 2);
  std::vector<double> proj_a(spec.numeric_cols), proj_b(spec.numeric_cols);
  for (int c = 0; c < spec.numeric_cols; ++c) {
    proj_a[c] = next_normal(rng);
    proj_b[c] = next_normal(rng);
  }
  for (int c = 0; c < spec.numeric_cols; ++c) {
    for (int i = 0; i < n; ++i) {
      double v;
      if (c == 0) v = z1[i] + spec.feature_noise * next_normal(rng);
      else if (c == 1 && spec.numeric_cols > 1) v = z2[i] + spec.feature_noise * next_normal(rng);
      else if (c < informative) v = proj_a[c] * z1[i] + proj_b[c] * z2[i] + 0.6 * next_normal(rng);
      else v = next_normal(rng);
      numeric[c][i] = v;
    }
  }

  // categorical columns: first half class-conditional, rest class-independent
  std::vector<std::vector<int>> categorical(spec.categorical_cols, std::vector<int>(n));
  std::vector<int> cat_sizes(spec.categorical_cols);
  for (int c = 0; c < spec.categorical_cols; ++c) {
    const int k = 3 + static_cast<int>(rng.next_below(3));  // 3..5 categories
    cat_sizes[c] = k;
    const bool info = c < (spec.categorical_cols + 1) / 2;
    std::vector<std::vector<double>> cdf(2, std::vector<double>(k));
    for (int cls = 0; cls < 2; ++cls) {
      if (cls == 1 && !info) {
        cdf[1] = cdf[0];
        continue;
      }
      double total = 0.0;
      for (int j = 0; j < k; ++j) {
        cdf[cls][j] = 0.15 + rng.next_double();
        total += cdf[cls][j];
      }
      double acc = 0.0;
      for (int j = 0; j < k; ++j) {
        acc += cdf[cls][j] / total;
        cdf[cls][j] = acc;
      }
    }
    for (int i = 0; i < n; ++i) {
      const double u = rng.next_double();
      int j = 0;
      while (j + 1 < k && u > cdf[label[i]][j]) ++j;
      categorical[c][i] = j;
    }
  }

  CsvTable table;
  for (int c = 0; c < spec.numeric_cols; ++c) table.header.push_back("num" + std::to_string(c));
  for (int c = 0; c < spec.categorical_cols; ++c) table.header.push_back("cat" + std::to_string(c));
  table.header.push_back("label");
  table.rows.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> row;
    row.reserve(table.header.size());
    for (int c = 0; c < spec.numeric_cols; ++c) row.push_back(format_double(numeric[c][i]));
    for (int c = 0; c < spec.categorical_cols; ++c) row.push_back(cat_value(categorical[c][i]));
    row.push_back(label[i] == 1 ? "pos" : "neg");
    table.rows.push_back(std::move(row));
  }
  return finish(spec.name, std::move(table));
}

data::Dataset make_blobs(const std::string& name, int rows, int dims, double separation, double minority_fraction,
                         double label_noise, uint64_t seed) {
  if (rows < 8 || dims < 1) throw DomainError("make_blobs: bad shape");
  SplitMix64 rng(seed);
  const int minority_count = std::max(2, static_cast<int>(std::lround(minority_fraction * rows)));
  std::vector<int> label(rows, 0);
  for (int i = 0; i < minority_count; ++i) label[i] = 1;
  shuffle(label, rng);

  const double shift = 0.5 * separation / std::sqrt(static_cast<double>(dims));
  CsvTable table;
  for (int c = 0; c < dims; ++c) table.header.push_back("num" + std::to_string(c));
  table.header.push_back("label");
  for (int i = 0; i < rows; ++i) {
    int y = label[i];
    if (rng.next_double() < label_noise) y = 1 - y;
    std::vector<std::string> row;
    const double mu = label[i] == 1 ? shift : -shift;
    for (int c = 0; c < dims; ++c) row.push_back(format_double(mu + next_normal(rng)));
    row.push_back(y == 1 ? "pos" : "neg");
    table.rows.push_back(std::move(row));
  }
  return finish(name, std::move(table));
}

data::Dataset make_two_moons(const std::string& name, int rows, double noise, uint64_t seed,
                             int extra_noise_dims) {
  if (rows < 8) throw DomainError("make_two_moons: too few rows");
  SplitMix64 rng(seed);
  CsvTable table;
  for (int c = 0; c < 2 + extra_noise_dims; ++c) table.header.push_back("num" + std::to_string(c));
  table.header.push_back("label");
  for (int i = 0; i < rows; ++i) {
    const int y = i % 2;
    const double t = rng.next_double() * kPi;
    double x0, x1;
    if (y == 0) {
      x0 = std::cos(t);
      x1 = std::sin(t);
    } else {
      x0 = 1.0 - std::cos(t);
      x1 = 0.5 - std::sin(t);
    }
    x0 += noise * next_normal(rng);
    x1 += noise * next_normal(rng);
    std::vector<std::string> row{format_double(x0), format_double(x1)};
    for (int c = 0; c < extra_noise_dims; ++c) row.push_back(format_double(next_normal(rng)));
    row.push_back(y == 1 ? "pos" : "neg");
    table.rows.push_back(std::move(row));
  }
  return finish(name, std::move(table));
}

std::vector<data::Dataset> suite_bench_small(uint64_t seed) {
  std::vector<data::Dataset> out;
  ShapedSpec a;
  a.name = "pair_a";
  a.rows = 260;
  a.numeric_cols = 6;
  a.categorical_cols = 2;
  a.minority_fraction = 0.35;
  a.nonlinearity = 0.5;
  a.seed = SeedSeq(seed).mix("pair_a").value();
  out.push_back(make_shaped(a));
  ShapedSpec b;
  b.name = "pair_b";
  b.rows = 300;
  b.numeric_cols = 8;
  b.categorical_cols = 0;
  b.minority_fraction = 0.25;
  b.nonlinearity = 0.8;
  b.seed = SeedSeq(seed).mix("pair_b").value();
  out.push_back(make_shaped(b));
  return out;
}

std::vector<data::Dataset> suite_table4_small(uint64_t seed) {
  std::vector<data::Dataset> out;
  auto shaped = [&](const char* name, int rows, int num, int cat, double minority, double nonlinearity) {
    ShapedSpec s;
    s.name = name;
    s.rows = rows;
    s.numeric_cols = num;
    s.categorical_cols = cat;
    s.minority_fraction = minority;
    s.nonlinearity = nonlinearity;
    s.label_noise = 0.02;
    s.seed = SeedSeq(seed).mix(name).value();
    out.push_back(make_shaped(s));
  };
  shaped("climate_shape", 540, 20, 0, 0.0852, 0.85);
  shaped("thoracic_shape", 470, 3, 13, 0.1489, 0.6);
  shaped("german_shape", 1000, 7, 13, 0.30, 0.7);
  shaped("qsar_shape", 1052, 41, 0, 0.3365, 0.9);
  shaped("seismic_shape", 2578, 14, 4, 0.0659, 0.8);
  return out;
}

std::vector<data::Dataset> suite_policy_corpus(uint64_t seed) {
  std::vector<data::Dataset> out;
  auto shaped = [&](const char* name, int rows, int num, int cat, double minority, double nonlinearity) {
    ShapedSpec s;
    s.name = name;
    s.rows = rows;
    s.numeric_cols = num;
    s.categorical_cols = cat;
    s.minority_fraction = minority;
    s.nonlinearity = nonlinearity;
    s.label_noise = 0.01;
    s.feature_noise = 0.15;
    s.seed = SeedSeq(seed).mix(name).value();
    out.push_back(make_shaped(s));
  };
  shaped("australian_shape", 690, 6, 8, 0.4449, 0.2);
  shaped("breast_shape", 272, 0, 9, 0.2978, 0.0);
  shaped("diabetes_shape", 768, 8, 0, 0.3490, 0.25);
  shaped("heart_shape", 293, 13, 0, 0.3618, 0.2);
  return out;
}

std::vector<data::Dataset> suite_eval_synth(uint64_t seed) {
  std::vector<data::Dataset> out;
  out.push_back(make_blobs("eval_blobs", 400, 8, 2.4, 0.4, 0.02, SeedSeq(seed).mix("eval_blobs").value()));
  out.push_back(make_two_moons("eval_moons", 400, 0.25, SeedSeq(seed).mix("eval_moons").value(), 4));
  return out;
}

std::vector<std::string> suite_names() {
  return {"bench-small", "table4-small", "policy-corpus", "eval-synth"};
}

std::vector<data::Dataset> make_suite(const std::string& suite, uint64_t seed) {
  if (suite == "bench-small") return suite_bench_small(seed);
  if (suite == "table4-small") return suite_table4_small(seed);
  if (suite == "policy-corpus") return suite_policy_corpus(seed);
  if (suite == "eval-synth") return suite_eval_synth(seed);
  throw DomainError("unknown suite: " + suite);
}

std::filesystem::path write_suite(const std::filesystem::path& dir, const std::vector<data::Dataset>& suite) {
  std::filesystem::create_directories(dir);
  std::string manifest;
  for (const auto& d : suite) {
    const std::string file = d.name + ".csv";
    write_csv_file(dir / file, data::dataset_to_csv(d));
    manifest += d.name + "," + file + ",label\n";
  }
  const auto manifest_path = dir / "manifest.txt";
  write_text_file(manifest_path, manifest);
  return manifest_path;
}

}  // namespace alkit::synth
