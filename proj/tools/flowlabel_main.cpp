#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flowlabel/pipeline.hpp"

namespace {

flowlabel::VoteWeights parse_weights(const std::string& text) {
  std::vector<double> w;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) w.push_back(std::stod(part));
  if (w.size() != 3)
    throw CLI::ValidationError("--weights", "expected three comma-separated values, got '" +
                                               text + "'");
  return {w[0], w[1], w[2]};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ensemble flow labeling and detection pipeline"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "flowlabel 0.1.0");

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> weights;
  std::optional<double> delta;
  std::optional<std::size_t> optics_subsample;
  std::optional<std::string> output_dir;

  app.add_option("-c,--config", config_path, "run configuration (json)")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "override the run seed");
  app.add_option("--weights", weights, "override vote weights as w_kmeans,w_optics,w_fcm");
  app.add_option("--delta", delta, "override the correlation threshold");
  app.add_option("--optics-subsample", optics_subsample,
                 "override the optics row subsample (0 = exact)");
  app.add_option("-o,--output-dir", output_dir, "override the output directory");

  auto* sub_preprocess =
      app.add_subcommand("preprocess", "load, encode and scale the dataset");
  auto* sub_select = app.add_subcommand("select", "pick features by correlation and lasso");
  auto* sub_label = app.add_subcommand("label", "vote the three clusterers into labels");
  auto* sub_train = app.add_subcommand("train", "train the detector on the voted labels");
  auto* sub_eval = app.add_subcommand("eval", "score the detector, against ground truth if present");
  auto* sub_report = app.add_subcommand("report", "consolidate all stage outputs");

  CLI11_PARSE(app, argc, argv);

  std::string stage = app.get_subcommands().front()->get_name();
  try {
    flowlabel::RunConfig config = flowlabel::load_run_config(config_path);
    if (seed) config.seed = *seed;
    if (weights) config.weights = parse_weights(*weights);
    if (delta) config.select.delta = *delta;
    if (optics_subsample) config.cluster.optics_subsample = *optics_subsample;
    if (output_dir) config.output_dir = *output_dir;

    if (sub_preprocess->parsed()) flowlabel::cmd_preprocess(config, std::cout);
    if (sub_select->parsed()) flowlabel::cmd_select(config, std::cout);
    if (sub_label->parsed()) flowlabel::cmd_label(config, std::cout);
    if (sub_train->parsed()) flowlabel::cmd_train(config, std::cout);
    if (sub_eval->parsed()) flowlabel::cmd_eval(config, std::cout);
    if (sub_report->parsed()) flowlabel::cmd_report(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error [" << stage << "]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
