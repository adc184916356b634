#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fairal/config_io.hpp"
#include "fairal/datagen.hpp"
#include "fairal/errors.hpp"
#include "fairal/experiment.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_generate(const std::string& spec_path, const std::string& out_path) {
  fairal::DatasetSpec spec = fairal::load_dataset_spec_json(spec_path);
  fairal::Dataset dataset = fairal::generate(spec);
  if (fs::path(out_path).has_parent_path()) {
    fs::create_directories(fs::path(out_path).parent_path());
  }
  fairal::write_dataset_csv(dataset, out_path);
  std::cout << "wrote " << dataset.size() << " samples ("
            << fairal::bias_kind_name(spec.bias_kind)
            << ", d=" << spec.feature_dim << ", seed=" << spec.seed << ") to "
            << out_path << "\n";
  return 0;
}

int cmd_run(const std::string& config_path, std::string out_dir) {
  std::vector<fairal::ExperimentConfig> configs =
      fairal::load_experiment_configs_json(config_path);
  if (out_dir.empty()) {
    for (const auto& c : configs) {
      if (!c.output.empty()) {
        out_dir = c.output;
        break;
      }
    }
  }
  if (out_dir.empty()) {
    throw fairal::ConfigError(
        "run: no output directory (--out or config \"output\")");
  }
  fs::create_directories(out_dir);

  fairal::SuiteResult suite = fairal::run_suite(configs);
  fairal::write_records_csv(suite.records, out_dir + "/records.csv");
  fairal::write_summary_csv(suite.summary, out_dir + "/summary.csv");
  std::cout << fairal::format_summary_table(suite.summary);
  std::cout << "records: " << out_dir << "/records.csv\n";
  if (suite.any_failed) {
    std::cerr << "run: some cells failed; see summary\n";
    return 1;
  }
  return 0;
}

int cmd_report(const std::string& in_dir, bool table, bool curves) {
  std::vector<fairal::StepRecord> records =
      fairal::read_records_csv(in_dir + "/records.csv");
  if (records.empty()) {
    throw fairal::IoError("report: no records in " + in_dir);
  }
  if (table || !curves) {
    std::cout << fairal::format_summary_table(fairal::summarize(records));
  }
  if (curves) {
    for (const std::string& path : fairal::write_curves(records, in_dir)) {
      std::cout << "curve: " << path << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pool-based active learning fairness laboratory"};
  app.require_subcommand(1);

  std::string spec_path, gen_out;
  CLI::App* gen =
      app.add_subcommand("generate", "write a synthetic dataset CSV");
  gen->add_option("--spec", spec_path, "dataset spec JSON")->required();
  gen->add_option("--out", gen_out, "output CSV path")->required();

  std::string config_path, run_out;
  CLI::App* run = app.add_subcommand("run", "run an experiment suite");
  run->add_option("--config", config_path, "experiment config JSON")
      ->required();
  run->add_option("--out", run_out,
                  "output directory (falls back to config \"output\")");

  std::string report_in;
  bool table = false, curves = false;
  CLI::App* report =
      app.add_subcommand("report", "summarize a results directory");
  report->add_option("--in", report_in, "results directory")->required();
  report->add_flag("--table", table, "print the summary table");
  report->add_flag("--curves", curves, "write per-metric SVG curves");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_generate(spec_path, gen_out);
    if (run->parsed()) return cmd_run(config_path, run_out);
    return cmd_report(report_in, table, curves);
  } catch (const fairal::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
