#include "alkit/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "alkit/env.hpp"
#include "alkit/errors.hpp"
#include "alkit/rng.hpp"

namespace alkit::bench {

std::string strategy_id(StrategyKind s) {
  switch (s) {
    case StrategyKind::random: return "rnd";
    case StrategyKind::margin: return "margin";
    case StrategyKind::learned: return "learned";
  }
  return "?";
}

std::string model_id(ModelKind m) {
  return m == ModelKind::logistic_regression ? "lr" : "rf";
}

StrategyKind parse_strategy(const std::string& id) {
  if (id == "rnd" || id == "random") return StrategyKind::random;
  if (id == "margin") return StrategyKind::margin;
  if (id == "learned" || id == "lal") return StrategyKind::learned;
  throw DomainError("unknown strategy: " + id);
}

ModelKind parse_model(const std::string& id) {
  if (id == "lr") return ModelKind::logistic_regression;
  if (id == "rf") return ModelKind::random_forest;
  throw DomainError("unknown model: " + id);
}

LearningCurve run_learning_curve(const data::Dataset& raw, const data::FoldSplit& folds, int fold, int repeat,
                                 const CurveParams& params) {
  if (fold < 0 || fold >= folds.fold_count) throw DomainError("run_learning_curve: fold out of range");
  if (params.budget < 2) throw DomainError("run_learning_curve: budget must be >= 2");
  if (params.strategy == StrategyKind::learned && params.artifact == nullptr) {
    throw DomainError("run_learning_curve: learned strategy requires a policy artifact");
  }

  std::vector<int> train = folds.complement_rows(fold);
  std::vector<int> test = folds.fold_rows(fold);
  const bool learned = params.strategy == StrategyKind::learned;
  const int min_train = 2 + (learned ? params.v_size : 0) + 1;
  if (static_cast<int>(train.size()) < min_train) {
    std::ostringstream msg;
    msg << "run_learning_curve: training partition has " << train.size() << " rows; needs >= " << min_train;
    throw DomainError(msg.str());
  }

  data::PreprocessSpec spec = data::fit_preprocess(raw, train);
  data::Dataset ds = data::apply_preprocess(spec, raw);

  // The run seed depends on (master, dataset, fold, repeat) only, so initial
  // instances match across every strategy/model association.
  const uint64_t run_seed =
      SeedSeq(params.master_seed).mix(raw.name).mix("run").mix(static_cast<uint64_t>(fold)).mix(static_cast<uint64_t>(repeat)).value();
  const auto initial = data::sample_initial_labels(train, ds.labels, run_seed);

  std::vector<int> v_rows;
  if (learned) {
    std::vector<int> pool0;
    for (int r : train)
      if (r != initial[0] && r != initial[1]) pool0.push_back(r);
    SplitMix64 v_rng(SeedSeq(run_seed).mix("vset").value());
    shuffle(pool0, v_rng);
    v_rows.assign(pool0.begin(), pool0.begin() + params.v_size);
    std::sort(v_rows.begin(), v_rows.end());
  }

  env::ModelSpec model_spec;
  const uint64_t model_seed = SeedSeq(run_seed).mix("model").mix(model_id(params.model)).value();
  if (params.model == ModelKind::logistic_regression) {
    model_spec.kind = env::ModelSpec::Kind::logistic_regression;
    model_spec.lr.l2_strength = params.lr_l2;
    model_spec.lr.seed = model_seed;
  } else {
    model_spec.kind = env::ModelSpec::Kind::random_forest;
    model_spec.rf.tree_count = params.rf_tree_count;
    model_spec.rf.seed = model_seed;
  }

  env::EpisodeParts parts;
  parts.features = std::make_shared<const Matrix>(std::move(ds.features));
  parts.labels = std::make_shared<const std::vector<int>>(std::move(ds.labels));
  parts.train_rows = train;
  parts.test_rows = test;
  parts.v_rows = v_rows;
  parts.initial_rows = initial;
  parts.model_factory = model_spec.factory();
  env::EpisodeState state = env::EpisodeState::create(std::move(parts));

  // The selection stream depends on (run seed, strategy) but never on the
  // model, so the random strategy queries the same sequence under LR and RF.
  SplitMix64 strategy_rng(SeedSeq(run_seed).mix("strategy").value());

  LearningCurve curve;
  curve.dataset = raw.name;
  curve.model = model_id(params.model);
  curve.strategy = strategy_id(params.strategy);
  curve.fold = fold;
  curve.repeat = repeat;
  curve.seed = run_seed;
  curve.initial_rows = initial;
  curve.budgets.push_back(2);
  curve.accuracies.push_back(state.quality());

  while (static_cast<int>(state.labelled().size()) < params.budget && !state.unlabelled().empty()) {
    int pick = -1;
    switch (params.strategy) {
      case StrategyKind::random: pick = strategies::select_random(state, strategy_rng); break;
      case StrategyKind::margin: pick = strategies::select_margin(state); break;
      case StrategyKind::learned:
        pick = strategies::select_learned(state, *params.artifact, params.candidate_cap, strategy_rng);
        break;
    }
    env::step(state, pick);
    curve.queried_rows.push_back(pick);
    curve.budgets.push_back(static_cast<int>(state.labelled().size()));
    curve.accuracies.push_back(state.quality());
  }
  const int reached = static_cast<int>(state.labelled().size());
  curve.truncated_at = reached < params.budget ? reached : 0;
  return curve;
}

ALCScore compute_alc(const LearningCurve& curve) {
  if (curve.accuracies.empty()) throw DomainError("compute_alc: empty curve");
  double sum = 0.0;
  for (double a : curve.accuracies) sum += a;
  return {100.0 * sum / static_cast<double>(curve.accuracies.size())};
}

RunRecord make_run_record(const LearningCurve& curve) {
  RunRecord rec;
  rec.dataset = curve.dataset;
  rec.model = curve.model;
  rec.strategy = curve.strategy;
  rec.fold = curve.fold;
  rec.repeat = curve.repeat;
  rec.seed = curve.seed;
  rec.alc = compute_alc(curve).value;
  rec.truncated_at = curve.truncated_at;
  return rec;
}

namespace {

void push_unique(std::vector<std::string>& list, const std::string& v) {
  if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
}

}  // namespace

ComparisonReport aggregate_win_tie_loss(std::span<const RunRecord> runs, double significance) {
  if (runs.empty()) throw DomainError("aggregate: no runs");
  ComparisonReport rep;
  rep.significance = significance;

  std::map<CellKey, std::vector<std::tuple<int, int, double>>> keyed;
  for (const auto& r : runs) {
    push_unique(rep.datasets, r.dataset);
    push_unique(rep.models, r.model);
    push_unique(rep.strategies, r.strategy);
    keyed[{r.dataset, r.model, r.strategy}].emplace_back(r.fold, r.repeat, r.alc);
  }

  size_t runs_per_cell = 0;
  for (const auto& dataset : rep.datasets) {
    for (const auto& model : rep.models) {
      for (const auto& strategy : rep.strategies) {
        const CellKey key{dataset, model, strategy};
        auto it = keyed.find(key);
        if (it == keyed.end()) {
          throw DomainError("aggregate: missing cell (" + dataset + ", " + model + ", " + strategy + ")");
        }
        if (runs_per_cell == 0) runs_per_cell = it->second.size();
        if (it->second.size() != runs_per_cell) {
          throw DomainError("aggregate: incomplete cell (" + dataset + ", " + model + ", " + strategy + ")");
        }
        std::sort(it->second.begin(), it->second.end());
        std::vector<double> alcs;
        alcs.reserve(it->second.size());
        for (const auto& [f, rpt, alc] : it->second) alcs.push_back(alc);
        rep.alcs[key] = std::move(alcs);
      }
    }
  }

  for (const auto& dataset : rep.datasets) {
    for (const auto& model : rep.models) {
      // best strategy by mean ALC (ties to the first in strategy order)
      std::string best;
      double best_mean = -std::numeric_limits<double>::infinity();
      std::map<std::string, double> means;
      for (const auto& strategy : rep.strategies) {
        const auto& v = rep.alcs.at({dataset, model, strategy});
        double m = 0.0;
        for (double a : v) m += a;
        m /= static_cast<double>(v.size());
        means[strategy] = m;
        if (m > best_mean) {
          best_mean = m;
          best = strategy;
        }
      }
      const auto& best_vec = rep.alcs.at({dataset, model, best});
      int marked_rivals = 0;
      for (const auto& strategy : rep.strategies) {
        CellSummary cell;
        cell.mean_alc = means[strategy];
        if (strategy == best) {
          cell.p_vs_best = 1.0;
          cell.marked = true;
        } else {
          const auto& v = rep.alcs.at({dataset, model, strategy});
          cell.p_vs_best = rep.strategies.size() < 2 ? 1.0 : paired_t_test(v, best_vec).p;
          cell.marked = cell.p_vs_best >= significance;
          if (cell.marked) ++marked_rivals;
        }
        rep.cells[{dataset, model, strategy}] = cell;
      }
      for (const auto& strategy : rep.strategies) {
        auto& cell = rep.cells.at({dataset, model, strategy});
        if (strategy == best) {
          cell.outcome = marked_rivals == 0 ? Outcome::win : Outcome::tie;
        } else {
          cell.outcome = cell.marked ? Outcome::tie : Outcome::loss;
        }
      }
    }
  }

  for (const auto& model : rep.models) {
    for (const auto& strategy : rep.strategies) {
      double sum = 0.0;
      WinTieLoss wtl;
      for (const auto& dataset : rep.datasets) {
        const auto& cell = rep.cells.at({dataset, model, strategy});
        sum += cell.mean_alc;
        switch (cell.outcome) {
          case Outcome::win: ++wtl.win; break;
          case Outcome::tie: ++wtl.tie; break;
          case Outcome::loss: ++wtl.loss; break;
        }
      }
      rep.grand_mean[{model, strategy}] = sum / static_cast<double>(rep.datasets.size());
      rep.wtl[{model, strategy}] = wtl;
    }
  }
  return rep;
}

std::map<int, double> slice_accuracy_at(std::span<const LearningCurve> curves, std::span<const int> sizes) {
  if (curves.empty()) throw DomainError("slice_accuracy_at: no curves");
  std::map<int, double> out;
  for (int size : sizes) {
    double sum = 0.0;
    for (const auto& curve : curves) {
      auto it = std::lower_bound(curve.budgets.begin(), curve.budgets.end(), size);
      if (it == curve.budgets.end() || *it != size) {
        std::ostringstream msg;
        msg << "slice_accuracy_at: budget " << size << " not recorded for (" << curve.dataset << ", " << curve.model
            << ", " << curve.strategy << ", fold " << curve.fold << ", repeat " << curve.repeat << ")";
        throw DomainError(msg.str());
      }
      sum += curve.accuracies[it - curve.budgets.begin()];
    }
    out[size] = sum / static_cast<double>(curves.size());
  }
  return out;
}

}  // namespace alkit::bench
