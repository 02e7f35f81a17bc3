#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flowlabel/classifier.hpp"
#include "flowlabel/clustering.hpp"
#include "flowlabel/dataset.hpp"
#include "flowlabel/ensemble.hpp"
#include "flowlabel/feature_select.hpp"
#include "flowlabel/metrics.hpp"

namespace flowlabel {

struct DatasetConfig {
  std::string path;
  std::string flavor = "generic";  // nsl-kdd | ton-iot | generic
  char delimiter = ',';
  std::optional<bool> has_header;  // unset: flavor default
  std::string label_column;        // empty: flavor default ("label")
  std::string normal_token;        // empty: flavor default
  std::vector<std::string> drop_columns;
  double max_malformed_fraction = 0.001;
};

struct SelectStageConfig {
  double delta = 0.4;
  double alpha_start = 0.1;
  double alpha_stop = 8.0;
  double alpha_step = 0.01;
  std::size_t cv_folds = 10;
  std::string mode = "calibration";  // calibration | pseudo-label
};

struct ClusterStageConfig {
  MbkParams kmeans;
  FcmParams fcm;
  OpticsParams optics;
  double optics_quantile = 0.9;
  std::size_t optics_subsample = 0;  // 0 = exact on all rows
  std::string polarity = "auto";     // auto | calibrate | invert
};

struct RunConfig {
  DatasetConfig dataset;
  std::string output_dir = "run";
  std::uint64_t seed = 42;
  SelectStageConfig select;
  ClusterStageConfig cluster;
  VoteWeights weights;
  MlpConfig mlp;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text);

// Checks file existence, weight sum, delta range. Throws on violation.
void validate(const RunConfig& config);

// Flavor defaults (schema, label column, normal token, dropped columns)
// resolved into an explicit dataset config.
DatasetConfig resolve_flavor(const DatasetConfig& dataset);

struct PreprocessSummary {
  std::size_t rows_kept = 0;
  std::size_t rows_dropped = 0;
  std::size_t columns = 0;
  std::vector<std::string> encoded_columns;
  bool labels_present = false;
};

struct SelectSummary {
  FeatureSet feature_set;
  double frr = 0.0;
  std::size_t total_features = 0;
  bool pseudo_labels_used = false;
};

struct LabelSummary {
  std::size_t rows = 0;
  std::size_t positives = 0;
  // Pairwise agreement fractions between the three aligned assignments,
  // order kmeans, optics, fcm.
  std::array<std::array<double, 3>, 3> agreement{};
  std::vector<std::string> warnings;
};

struct TrainSummary {
  std::size_t epochs = 0;
  double final_loss = 0.0;
  double train_seconds = 0.0;
};

struct EvalSummary {
  bool ground_truth = false;
  ConfusionMatrix cm;
  ClassificationReport report;
  double roc_auc = 0.0;
  double pr_auc = 0.0;
  double eval_seconds = 0.0;
};

// Pipeline stages. Each reads its inputs from config.output_dir (as written
// by the previous stage), writes its artifacts there and updates
// manifest.json. `log` gets a short human-readable summary.
PreprocessSummary cmd_preprocess(const RunConfig& config, std::ostream& log);
SelectSummary cmd_select(const RunConfig& config, std::ostream& log);
LabelSummary cmd_label(const RunConfig& config, std::ostream& log);
TrainSummary cmd_train(const RunConfig& config, std::ostream& log);
EvalSummary cmd_eval(const RunConfig& config, std::ostream& log);
void cmd_report(const RunConfig& config, std::ostream& log);

// FNV-1a 64 over the file bytes, hex encoded. Used for manifest checksums.
std::string file_checksum(const std::string& path);

// Artifact IO used across stages (and by tests).
void save_matrix_csv(const std::string& path, const FeatureMatrix& X);
FeatureMatrix load_matrix_csv(const std::string& path);
void save_feature_set(const std::string& path, const FeatureSet& fs, std::size_t total_features);
FeatureSet load_feature_set(const std::string& path);
void save_mlp_model(const std::string& path, const MlpModel& model);
MlpModel load_mlp_model(const std::string& path);
void save_curve_csv(const std::string& path, const CurveData& curve);

}  // namespace flowlabel
