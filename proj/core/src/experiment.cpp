#include "fairal/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fairal/errors.hpp"
#include "fairal/metrics.hpp"
#include "fairal/svg_plot.hpp"

namespace fairal {

void ExperimentConfig::validate_and_resolve() {
  dataset.validate();
  if (model.input_dim == 0) model.input_dim = dataset.feature_dim;
  if (model.input_dim != dataset.feature_dim) {
    throw ConfigError("experiment: model input_dim " +
                      std::to_string(model.input_dim) +
                      " does not match dataset feature_dim " +
                      std::to_string(dataset.feature_dim));
  }
  model.validate();
  if (query_size < 1) throw ConfigError("experiment: query_size must be >= 1");
  if (mc_passes < 1) throw ConfigError("experiment: mc_passes must be >= 1");
  if (initial_labelled < 2) {
    throw ConfigError("experiment: initial_labelled must be >= 2");
  }
  if (!(budget_fraction > 0.0) || budget_fraction > 1.0) {
    throw ConfigError("experiment: budget_fraction must be in (0, 1]");
  }
  if (seeds.empty()) throw ConfigError("experiment: seeds must be non-empty");
}

namespace {

Tensor gather_rows(const Tensor& src, std::span<const std::size_t> idx) {
  std::size_t d = src.cols();
  Tensor out({idx.size(), d});
  for (std::size_t r = 0; r < idx.size(); ++r) {
    for (std::size_t c = 0; c < d; ++c) out.at(r, c) = src.at(idx[r], c);
  }
  return out;
}

std::vector<int> gather_ints(const std::vector<int>& src,
                             std::span<const std::size_t> idx) {
  std::vector<int> out(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) out[r] = src[idx[r]];
  return out;
}

}  // namespace

RunResult run_single(const ExperimentConfig& config_in, std::uint64_t seed,
                     const StepObserver& on_step_start) {
  ExperimentConfig config = config_in;
  config.validate_and_resolve();

  DatasetSpec dspec = config.dataset;
  dspec.seed = seed;  // the run seed owns the data
  Dataset dataset = generate(dspec);

  RngStream split_rng = RngStream::named(seed, "split");
  PoolState pools =
      split_pools(dataset, dspec.n_test, config.initial_labelled, split_rng);

  RngStream init_rng = RngStream::named(seed, "init");
  Model model(config.model, init_rng);

  RngStream shuffle_rng = RngStream::named(seed, "shuffle");
  RngStream dropout_rng = RngStream::named(seed, "dropout");

  Tensor x_test = gather_rows(dataset.features, pools.test);
  std::vector<int> y_test = gather_ints(dataset.labels, pools.test);
  std::vector<int> a_test = gather_ints(dataset.groups, pools.test);

  std::size_t pool_size = pools.labelled.size() + pools.unlabelled.size();
  std::size_t budget = static_cast<std::size_t>(
      std::llround(config.budget_fraction * static_cast<double>(pool_size)));

  RunResult result;
  std::size_t step = 0;
  while (true) {
    auto t0 = std::chrono::steady_clock::now();
    model.reset_weights();
    if (on_step_start) on_step_start(StepProbe{step, model, pools, dataset});

    Tensor xl = gather_rows(dataset.features, pools.labelled);
    std::vector<int> yl = gather_ints(dataset.labels, pools.labelled);
    std::vector<int> al = gather_ints(dataset.groups, pools.labelled);
    model.train(xl, yl, al, shuffle_rng, dropout_rng);

    FairnessReport report = evaluate(
        make_eval_batch(model.predict_eval(x_test), y_test, a_test));

    RngStream mc_rng = RngStream::named(seed, "mc_eval", step);
    McPredictions mc = model.mc_predict(x_test, config.mc_passes, mc_rng);
    double epi_gap = epistemic_gap(bald_scores(mc), a_test);

    StepRecord rec;
    rec.strategy = config.strategy;
    rec.lambda = config.model.lambda;
    rec.seed = seed;
    rec.step = step;
    rec.n_labelled = pools.labelled.size();
    rec.accuracy = report.accuracy;
    rec.predictive_parity = report.predictive_parity;
    rec.eq_odds_gap = report.equalized_odds_gap;
    rec.eq_opp_gap = report.equal_opportunity_gap;
    rec.nll = report.nll;
    rec.epistemic_gap = epi_gap;
    for (int a : al) (a == 0 ? rec.labelled_g0 : rec.labelled_g1)++;
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    result.records.push_back(rec);

    if (pools.labelled.size() >= budget) break;
    if (pools.unlabelled.empty()) {
      result.truncated = true;
      break;
    }

    std::size_t k =
        std::min(config.query_size, budget - pools.labelled.size());
    RngStream sel_rng = RngStream::named(seed, "selection", step);
    QueryBatch query;
    switch (config.strategy) {
      case Strategy::kBald: {
        McPredictions preds = model.mc_predict(
            gather_rows(dataset.features, pools.unlabelled),
            config.mc_passes, sel_rng);
        ++result.selection_mc_calls;
        query = select_topk(bald_scores(preds).mutual_information,
                            pools.unlabelled, k);
        break;
      }
      case Strategy::kEntropy: {
        McPredictions preds = model.mc_predict(
            gather_rows(dataset.features, pools.unlabelled),
            config.mc_passes, sel_rng);
        ++result.selection_mc_calls;
        query = select_topk(entropy_scores(preds), pools.unlabelled, k);
        break;
      }
      case Strategy::kUniform:
        query = uniform_select(pools.unlabelled, k, sel_rng);
        break;
      case Strategy::kBalancedUniform:
        query = balanced_uniform_select(pools.unlabelled, k, dataset.groups,
                                        sel_rng);
        break;
    }
    query.strategy = config.strategy;
    query.step = step;

    std::vector<bool> picked(dataset.size(), false);
    for (std::size_t idx : query.indices) picked[idx] = true;
    pools.labelled.insert(pools.labelled.end(), query.indices.begin(),
                          query.indices.end());
    std::erase_if(pools.unlabelled,
                  [&](std::size_t idx) { return picked[idx]; });
    ++step;
  }
  return result;
}

namespace {

MetricStat make_stat(const std::vector<double>& values) {
  MetricStat stat;
  if (values.empty()) return stat;
  double sum = 0.0;
  for (double v : values) sum += v;
  stat.mean = sum / static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - stat.mean) * (v - stat.mean);
    stat.std_dev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    stat.has_std = true;
  }
  return stat;
}

bool same_group(const StepRecord& r, Strategy s, double lambda) {
  return r.strategy == s && r.lambda == lambda;
}

}  // namespace

std::vector<SummaryRow> summarize(std::span<const StepRecord> records) {
  std::vector<SummaryRow> rows;
  for (const StepRecord& r : records) {
    bool known = false;
    for (const auto& row : rows) {
      if (row.strategy == r.strategy && row.lambda == r.lambda) {
        known = true;
        break;
      }
    }
    if (!known) {
      SummaryRow row;
      row.strategy = r.strategy;
      row.lambda = r.lambda;
      rows.push_back(row);
    }
  }

  for (SummaryRow& row : rows) {
    // Final record per seed: the one with the largest step.
    std::map<std::uint64_t, const StepRecord*> finals;
    for (const StepRecord& r : records) {
      if (!same_group(r, row.strategy, row.lambda)) continue;
      auto [it, inserted] = finals.try_emplace(r.seed, &r);
      if (!inserted && r.step > it->second->step) it->second = &r;
    }
    row.seeds_completed = finals.size();
    std::vector<double> acc, par, odds, opp, nll_v, gap;
    for (const auto& [s, rec] : finals) {
      acc.push_back(rec->accuracy);
      par.push_back(rec->predictive_parity);
      odds.push_back(rec->eq_odds_gap);
      opp.push_back(rec->eq_opp_gap);
      nll_v.push_back(rec->nll);
      gap.push_back(rec->epistemic_gap);
    }
    row.accuracy = make_stat(acc);
    row.predictive_parity = make_stat(par);
    row.eq_odds_gap = make_stat(odds);
    row.eq_opp_gap = make_stat(opp);
    row.nll = make_stat(nll_v);
    row.epistemic_gap = make_stat(gap);
  }
  return rows;
}

SuiteResult run_suite(std::span<const ExperimentConfig> configs) {
  if (configs.empty()) throw ConfigError("run_suite: no configs given");
  SuiteResult suite;
  struct Failure {
    Strategy strategy;
    double lambda;
    std::size_t count = 0;
    std::string first_error;
  };
  std::vector<Failure> failures;

  for (const ExperimentConfig& config : configs) {
    ExperimentConfig resolved = config;
    resolved.validate_and_resolve();
    for (std::uint64_t seed : resolved.seeds) {
      try {
        RunResult run = run_single(resolved, seed);
        suite.records.insert(suite.records.end(), run.records.begin(),
                             run.records.end());
      } catch (const Error& e) {
        suite.any_failed = true;
        Failure* slot = nullptr;
        for (auto& f : failures) {
          if (f.strategy == resolved.strategy &&
              f.lambda == resolved.model.lambda) {
            slot = &f;
          }
        }
        if (!slot) {
          failures.push_back(
              {resolved.strategy, resolved.model.lambda, 0, e.what()});
          slot = &failures.back();
        }
        ++slot->count;
      }
    }
  }

  suite.summary = summarize(suite.records);
  for (const auto& f : failures) {
    SummaryRow* row = nullptr;
    for (auto& r : suite.summary) {
      if (r.strategy == f.strategy && r.lambda == f.lambda) row = &r;
    }
    if (!row) {
      SummaryRow fresh;
      fresh.strategy = f.strategy;
      fresh.lambda = f.lambda;
      suite.summary.push_back(fresh);
      row = &suite.summary.back();
    }
    row->seeds_failed = f.count;
    row->first_error = f.first_error;
  }
  return suite;
}

namespace {

std::string format_lambda(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", lambda);
  return buf;
}

}  // namespace

void write_records_csv(std::span<const StepRecord> records,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("records csv: cannot open for write: " + path);
  out << kRecordsCsvHeader << '\n';
  char line[512];
  for (const StepRecord& r : records) {
    std::snprintf(
        line, sizeof(line),
        "%s,%s,%llu,%zu,%zu,%.2f,%.2f,%.2f,%.2f,%.4f,%.4f,%zu,%zu,%lld",
        strategy_name(r.strategy), format_lambda(r.lambda).c_str(),
        static_cast<unsigned long long>(r.seed), r.step, r.n_labelled,
        100.0 * r.accuracy, 100.0 * r.predictive_parity,
        100.0 * r.eq_odds_gap, 100.0 * r.eq_opp_gap, r.nll, r.epistemic_gap,
        r.labelled_g0, r.labelled_g1,
        static_cast<long long>(std::llround(r.wall_ms)));
    out << line << '\n';
  }
  if (!out) throw IoError("records csv: write failed: " + path);
}

std::vector<StepRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("records csv: cannot open for read: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kRecordsCsvHeader) {
    throw IoError("records csv: unexpected header in " + path);
  }
  std::vector<StepRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 14) {
      throw IoError("records csv: line " + std::to_string(line_no) + " has " +
                    std::to_string(fields.size()) + " fields, expected 14");
    }
    try {
      StepRecord r;
      r.strategy = parse_strategy(fields[0]);
      r.lambda = std::stod(fields[1]);
      r.seed = std::stoull(fields[2]);
      r.step = std::stoul(fields[3]);
      r.n_labelled = std::stoul(fields[4]);
      r.accuracy = std::stod(fields[5]) / 100.0;
      r.predictive_parity = std::stod(fields[6]) / 100.0;
      r.eq_odds_gap = std::stod(fields[7]) / 100.0;
      r.eq_opp_gap = std::stod(fields[8]) / 100.0;
      r.nll = std::stod(fields[9]);
      r.epistemic_gap = std::stod(fields[10]);
      r.labelled_g0 = std::stoul(fields[11]);
      r.labelled_g1 = std::stoul(fields[12]);
      r.wall_ms = std::stod(fields[13]);
      records.push_back(r);
    } catch (const std::invalid_argument&) {
      throw IoError("records csv: line " + std::to_string(line_no) +
                    ": unparseable field");
    } catch (const std::out_of_range&) {
      throw IoError("records csv: line " + std::to_string(line_no) +
                    ": field out of range");
    }
  }
  return records;
}

namespace {

std::string stat_cell(const MetricStat& stat, int decimals, double scale) {
  char buf[64];
  if (stat.has_std) {
    std::snprintf(buf, sizeof(buf), "%.*f ± %.*f", decimals,
                  scale * stat.mean, decimals, scale * stat.std_dev);
  } else {
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, scale * stat.mean);
  }
  return buf;
}

}  // namespace

void write_summary_csv(std::span<const SummaryRow> summary,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("summary csv: cannot open for write: " + path);
  out << "strategy,lambda,seeds_completed,seeds_failed,"
         "accuracy_mean,accuracy_std,predictive_parity_mean,"
         "predictive_parity_std,eq_odds_gap_mean,eq_odds_gap_std,"
         "eq_opp_gap_mean,eq_opp_gap_std,nll_mean,nll_std,"
         "epistemic_gap_mean,epistemic_gap_std,error\n";
  auto cell = [](const MetricStat& s, double scale) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f,", scale * s.mean);
    std::string text = buf;
    if (s.has_std) {
      std::snprintf(buf, sizeof(buf), "%.4f", scale * s.std_dev);
      text += buf;
    }
    return text;
  };
  for (const SummaryRow& row : summary) {
    std::string error = row.first_error;
    for (char& c : error) {
      if (c == ',' || c == '\n') c = ';';
    }
    out << strategy_name(row.strategy) << ',' << format_lambda(row.lambda)
        << ',' << row.seeds_completed << ',' << row.seeds_failed << ','
        << cell(row.accuracy, 100.0) << ','
        << cell(row.predictive_parity, 100.0) << ','
        << cell(row.eq_odds_gap, 100.0) << ','
        << cell(row.eq_opp_gap, 100.0) << ',' << cell(row.nll, 1.0) << ','
        << cell(row.epistemic_gap, 1.0) << ',' << error << '\n';
  }
  if (!out) throw IoError("summary csv: write failed: " + path);
}

std::string format_summary_table(std::span<const SummaryRow> summary) {
  std::ostringstream out;
  char line[320];
  std::snprintf(line, sizeof(line),
                "%-18s %-7s %-6s %-16s %-16s %-16s %-16s %-18s %-18s\n",
                "strategy", "lambda", "seeds", "accuracy %", "parity %",
                "eq_odds %", "eq_opp %", "nll (nats)", "epi_gap (nats)");
  out << line;
  for (const SummaryRow& row : summary) {
    std::string seeds = std::to_string(row.seeds_completed);
    if (row.seeds_failed > 0) {
      seeds += "!" + std::to_string(row.seeds_failed);
    }
    std::snprintf(line, sizeof(line),
                  "%-18s %-7s %-6s %-16s %-16s %-16s %-16s %-18s %-18s\n",
                  strategy_name(row.strategy),
                  format_lambda(row.lambda).c_str(), seeds.c_str(),
                  stat_cell(row.accuracy, 2, 100.0).c_str(),
                  stat_cell(row.predictive_parity, 2, 100.0).c_str(),
                  stat_cell(row.eq_odds_gap, 2, 100.0).c_str(),
                  stat_cell(row.eq_opp_gap, 2, 100.0).c_str(),
                  stat_cell(row.nll, 4, 1.0).c_str(),
                  stat_cell(row.epistemic_gap, 4, 1.0).c_str());
    out << line;
    if (!row.first_error.empty()) {
      out << "    failed seeds: " << row.seeds_failed << " ("
          << row.first_error << ")\n";
    }
  }
  return out.str();
}

namespace {

struct CurveMetric {
  const char* key;
  const char* label;
  double scale;
  double (*get)(const StepRecord&);
};

const CurveMetric kCurveMetrics[] = {
    {"accuracy", "accuracy (%)", 100.0,
     [](const StepRecord& r) { return r.accuracy; }},
    {"predictive_parity", "predictive parity (%)", 100.0,
     [](const StepRecord& r) { return r.predictive_parity; }},
    {"eq_odds_gap", "equalized odds gap (%)", 100.0,
     [](const StepRecord& r) { return r.eq_odds_gap; }},
    {"eq_opp_gap", "equal opportunity gap (%)", 100.0,
     [](const StepRecord& r) { return r.eq_opp_gap; }},
    {"nll", "negative log-likelihood (nats)", 1.0,
     [](const StepRecord& r) { return r.nll; }},
    {"epistemic_gap", "epistemic uncertainty gap (nats)", 1.0,
     [](const StepRecord& r) { return r.epistemic_gap; }},
};

std::string series_label(Strategy s, double lambda) {
  std::string label = strategy_name(s);
  if (lambda != 0.0) label += " lambda=" + format_lambda(lambda);
  return label;
}

}  // namespace

std::vector<std::string> write_curves(std::span<const StepRecord> records,
                                      const std::string& out_dir) {
  if (records.empty()) {
    throw ConfigError("write_curves: no records to plot");
  }
  struct GroupKey {
    Strategy strategy;
    double lambda;
  };
  std::vector<GroupKey> groups;
  for (const StepRecord& r : records) {
    bool known = false;
    for (const auto& g : groups) {
      if (g.strategy == r.strategy && g.lambda == r.lambda) known = true;
    }
    if (!known) groups.push_back({r.strategy, r.lambda});
  }

  std::vector<std::string> written;
  for (const CurveMetric& metric : kCurveMetrics) {
    std::vector<PlotSeries> series;
    for (const auto& g : groups) {
      // Values per labelled-set size across seeds.
      std::map<std::size_t, std::vector<double>> by_x;
      for (const StepRecord& r : records) {
        if (r.strategy == g.strategy && r.lambda == g.lambda) {
          by_x[r.n_labelled].push_back(metric.scale * metric.get(r));
        }
      }
      PlotSeries s;
      s.label = series_label(g.strategy, g.lambda);
      for (const auto& [x, values] : by_x) {
        MetricStat stat = make_stat(values);
        s.x.push_back(static_cast<double>(x));
        s.mean.push_back(stat.mean);
        s.band.push_back(stat.has_std ? stat.std_dev : 0.0);
      }
      series.push_back(std::move(s));
    }
    std::string path = out_dir + "/curves_" + metric.key + ".svg";
    write_line_chart_svg(path, std::string(metric.label) +
                                   " vs labelled samples",
                         "labelled samples", metric.label, series);
    written.push_back(path);
  }
  return written;
}

}  // namespace fairal
