#include "flowlabel/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "flowlabel/rng.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace flowlabel {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt_double(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

double parse_double_str(const std::string& s, const std::string& context) {
  double v;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::runtime_error(context + ": cannot parse '" + s + "' as a number");
  return v;
}

std::string art(const RunConfig& config, const std::string& name) {
  return (fs::path(config.output_dir) / name).string();
}

void ensure_output_dir(const RunConfig& config) {
  fs::create_directories(config.output_dir);
}

void reject_unknown_keys(const json& j, const std::vector<std::string>& known,
                         const std::string& context) {
  for (const auto& [key, value] : j.items())
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw std::runtime_error("config: unknown key '" + key + "' in " + context);
}

json config_to_json(const RunConfig& c) {
  json j;
  j["dataset"]["path"] = c.dataset.path;
  j["dataset"]["flavor"] = c.dataset.flavor;
  j["dataset"]["delimiter"] = std::string(1, c.dataset.delimiter);
  if (c.dataset.has_header) j["dataset"]["has_header"] = *c.dataset.has_header;
  if (!c.dataset.label_column.empty()) j["dataset"]["label_column"] = c.dataset.label_column;
  if (!c.dataset.normal_token.empty()) j["dataset"]["normal_token"] = c.dataset.normal_token;
  if (!c.dataset.drop_columns.empty()) j["dataset"]["drop_columns"] = c.dataset.drop_columns;
  j["dataset"]["max_malformed_fraction"] = c.dataset.max_malformed_fraction;
  j["output_dir"] = c.output_dir;
  j["seed"] = c.seed;
  j["select"] = {{"delta", c.select.delta},
                 {"alpha_start", c.select.alpha_start},
                 {"alpha_stop", c.select.alpha_stop},
                 {"alpha_step", c.select.alpha_step},
                 {"cv_folds", c.select.cv_folds},
                 {"mode", c.select.mode}};
  j["cluster"]["kmeans"] = {{"batch_size", c.cluster.kmeans.batch_size},
                            {"max_iters", c.cluster.kmeans.max_iters},
                            {"n_init", c.cluster.kmeans.n_init}};
  j["cluster"]["fcm"] = {{"fuzzifier", c.cluster.fcm.fuzzifier},
                         {"tol", c.cluster.fcm.tol},
                         {"max_iters", c.cluster.fcm.max_iters}};
  j["cluster"]["optics"]["min_pts"] = c.cluster.optics.min_pts;
  if (c.cluster.optics.epsilon != kInf)
    j["cluster"]["optics"]["epsilon"] = c.cluster.optics.epsilon;
  j["cluster"]["optics_quantile"] = c.cluster.optics_quantile;
  j["cluster"]["optics_subsample"] = c.cluster.optics_subsample;
  j["cluster"]["polarity"] = c.cluster.polarity;
  j["weights"] = {{"kmeans", c.weights.w_kmeans},
                  {"optics", c.weights.w_optics},
                  {"fcm", c.weights.w_fcm}};
  j["mlp"] = {{"hidden", c.mlp.hidden},
              {"learning_rate", c.mlp.learning_rate},
              {"epochs", c.mlp.epochs},
              {"batch_size", c.mlp.batch_size},
              {"threshold", c.mlp.threshold}};
  return j;
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

json read_json(const std::string& path, const std::string& context) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(context + ": cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(context + ": cannot parse " + path + ": " + e.what());
  }
}

void update_manifest(const RunConfig& config, const std::string& stage,
                     const std::vector<std::string>& artifacts, double seconds) {
  std::string path = art(config, "manifest.json");
  json m;
  if (fs::exists(path)) m = read_json(path, stage);
  m["version"] = kVersion;
  m["config"] = config_to_json(config);
  json entry;
  for (const auto& a : artifacts) entry["artifacts"][fs::path(a).filename().string()] = file_checksum(a);
  entry["seconds"] = seconds;
  m["stages"][stage] = entry;
  write_json(path, m);
}

// derived per-stage seeds so no two stages share an RNG stream
std::uint64_t stage_seed(const RunConfig& config, std::uint64_t stream) {
  return Rng(config.seed).fork(stream).seed();
}

struct StageClock {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

// scaled.csv -> matrix + optional ground-truth labels
FeatureMatrix load_stage_matrix(const RunConfig& config, const std::string& file,
                                const std::string& stage) {
  std::string path = art(config, file);
  if (!fs::exists(path)) {
    const std::string producer = file == "scaled.csv" ? "preprocess" : "label";
    throw std::runtime_error(stage + ": missing " + path + " (run " + producer + " first)");
  }
  return load_matrix_csv(path);
}

json histogram_json(const std::vector<double>& values) {
  std::map<std::string, std::size_t> buckets;
  for (double v : values) buckets[fmt_double(v)]++;
  json j = json::object();
  for (const auto& [k, n] : buckets) j[k] = n;
  return j;
}

json classification_to_json(const ClassificationReport& r) {
  return {{"accuracy", r.accuracy},   {"precision", r.precision},
          {"recall", r.recall},       {"f1", r.f1},
          {"far", r.far},             {"specificity", r.specificity},
          {"mcc", r.mcc},             {"degenerate", r.degenerate}};
}

json clustering_to_json(const ClusteringReport& r) {
  return {{"homogeneity", r.homogeneity},
          {"completeness", r.completeness},
          {"v_measure", r.v_measure},
          {"ari", r.ari},
          {"ami", r.ami}};
}

json confusion_to_json(const ConfusionMatrix& cm) {
  return {{"tp", cm.tp}, {"fn", cm.fn}, {"fp", cm.fp}, {"tn", cm.tn}};
}

struct ClusterVotes {
  BinaryAssignment kmeans, optics, fcm;
  std::vector<std::string> warnings;
};

// run the three clusterers on the given rows and polarity-align them
ClusterVotes run_clusterers(const RunConfig& config, const RowMatrix& R,
                            const std::optional<std::vector<int>>& truth,
                            std::uint64_t seed_base) {
  ClusterVotes v;
  MbkParams kp = config.cluster.kmeans;
  kp.seed = stage_seed(config, seed_base);
  FcmParams fp = config.cluster.fcm;
  fp.seed = stage_seed(config, seed_base + 1);

  KMeansModel km = mbk_fit(R, kp);
  BinaryAssignment kmeans_raw = mbk_predict(km, R);

  BinaryAssignment optics_raw =
      optics_binary(R, config.cluster.optics, config.cluster.optics_quantile,
                    config.cluster.optics_subsample, stage_seed(config, seed_base + 2),
                    &v.warnings);

  FcmModel fm = fcm_fit(R, fp);
  if (config.cluster.polarity == "invert") fm.malicious_cluster = 1 - fm.malicious_cluster;
  FcmPrediction fcm_pred = fcm_predict(fm, R);

  if (config.cluster.polarity == "calibrate") {
    if (!truth)
      throw std::runtime_error(
          "label: polarity calibration requires ground-truth labels in the dataset");
    BinaryAssignment ref;
    ref.source = "truth";
    ref.labels.reserve(truth->size());
    for (int t : *truth) ref.labels.push_back(static_cast<std::uint8_t>(t));
    v.fcm = align_polarity(fcm_pred.assignment, ref);
    v.kmeans = align_polarity(kmeans_raw, ref);
    v.optics = align_polarity(optics_raw, ref);
  } else {
    v.fcm = fcm_pred.assignment;
    v.kmeans = align_polarity(kmeans_raw, v.fcm);
    v.optics = align_polarity(optics_raw, v.fcm);
  }
  v.kmeans.source = "kmeans";
  v.optics.source = "optics";
  v.fcm.source = "fcm";
  return v;
}

double agreement(const BinaryAssignment& a, const BinaryAssignment& b) {
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.labels[i] == b.labels[i]) ++same;
  return a.size() ? static_cast<double>(same) / static_cast<double>(a.size()) : 0.0;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("config: ") + e.what());
  }

  RunConfig c;
  reject_unknown_keys(
      j, {"dataset", "output_dir", "seed", "select", "cluster", "weights", "mlp"}, "config");

  if (!j.contains("dataset") || !j["dataset"].contains("path"))
    throw std::runtime_error("config: dataset.path is required");
  const json& d = j["dataset"];
  reject_unknown_keys(d,
                      {"path", "flavor", "delimiter", "has_header", "label_column",
                       "normal_token", "drop_columns", "max_malformed_fraction"},
                      "dataset");
  c.dataset.path = d["path"].get<std::string>();
  c.dataset.flavor = d.value("flavor", std::string("generic"));
  std::string delim = d.value("delimiter", std::string(","));
  if (delim.size() != 1) throw std::runtime_error("config: delimiter must be one character");
  c.dataset.delimiter = delim[0];
  if (d.contains("has_header")) c.dataset.has_header = d["has_header"].get<bool>();
  c.dataset.label_column = d.value("label_column", std::string());
  c.dataset.normal_token = d.value("normal_token", std::string());
  if (d.contains("drop_columns"))
    c.dataset.drop_columns = d["drop_columns"].get<std::vector<std::string>>();
  c.dataset.max_malformed_fraction = d.value("max_malformed_fraction", 0.001);

  c.output_dir = j.value("output_dir", std::string("run"));
  c.seed = j.value("seed", std::uint64_t{42});

  if (j.contains("select")) {
    const json& s = j["select"];
    reject_unknown_keys(
        s, {"delta", "alpha_start", "alpha_stop", "alpha_step", "cv_folds", "mode"}, "select");
    c.select.delta = s.value("delta", 0.4);
    c.select.alpha_start = s.value("alpha_start", 0.1);
    c.select.alpha_stop = s.value("alpha_stop", 8.0);
    c.select.alpha_step = s.value("alpha_step", 0.01);
    c.select.cv_folds = s.value("cv_folds", std::size_t{10});
    c.select.mode = s.value("mode", std::string("calibration"));
  }

  if (j.contains("cluster")) {
    const json& cl = j["cluster"];
    reject_unknown_keys(
        cl, {"kmeans", "fcm", "optics", "optics_quantile", "optics_subsample", "polarity"},
        "cluster");
    if (cl.contains("kmeans")) {
      const json& k = cl["kmeans"];
      reject_unknown_keys(k, {"batch_size", "max_iters", "n_init"}, "cluster.kmeans");
      c.cluster.kmeans.batch_size = k.value("batch_size", std::size_t{1024});
      c.cluster.kmeans.max_iters = k.value("max_iters", std::size_t{300});
      c.cluster.kmeans.n_init = k.value("n_init", std::size_t{10});
    }
    if (cl.contains("fcm")) {
      const json& f = cl["fcm"];
      reject_unknown_keys(f, {"fuzzifier", "tol", "max_iters"}, "cluster.fcm");
      c.cluster.fcm.fuzzifier = f.value("fuzzifier", 2.0);
      c.cluster.fcm.tol = f.value("tol", 1e-5);
      c.cluster.fcm.max_iters = f.value("max_iters", std::size_t{300});
    }
    if (cl.contains("optics")) {
      const json& o = cl["optics"];
      reject_unknown_keys(o, {"min_pts", "epsilon"}, "cluster.optics");
      c.cluster.optics.min_pts = o.value("min_pts", std::size_t{5});
      if (o.contains("epsilon") && !o["epsilon"].is_null())
        c.cluster.optics.epsilon = o["epsilon"].get<double>();
    }
    c.cluster.optics_quantile = cl.value("optics_quantile", 0.9);
    c.cluster.optics_subsample = cl.value("optics_subsample", std::size_t{0});
    c.cluster.polarity = cl.value("polarity", std::string("auto"));
  }

  if (j.contains("weights")) {
    const json& w = j["weights"];
    reject_unknown_keys(w, {"kmeans", "optics", "fcm"}, "weights");
    c.weights.w_kmeans = w.value("kmeans", 0.25);
    c.weights.w_optics = w.value("optics", 0.25);
    c.weights.w_fcm = w.value("fcm", 0.5);
  }

  if (j.contains("mlp")) {
    const json& m = j["mlp"];
    reject_unknown_keys(m, {"hidden", "learning_rate", "epochs", "batch_size", "threshold"},
                        "mlp");
    if (m.contains("hidden")) c.mlp.hidden = m["hidden"].get<std::vector<std::size_t>>();
    c.mlp.learning_rate = m.value("learning_rate", 0.001);
    c.mlp.epochs = m.value("epochs", std::size_t{40});
    c.mlp.batch_size = m.value("batch_size", std::size_t{200});
    c.mlp.threshold = m.value("threshold", 0.5);
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

void validate(const RunConfig& config) {
  if (!fs::exists(config.dataset.path))
    throw std::runtime_error("config: dataset file not found: " + config.dataset.path);
  if (config.dataset.flavor != "nsl-kdd" && config.dataset.flavor != "ton-iot" &&
      config.dataset.flavor != "generic")
    throw std::runtime_error("config: unknown dataset flavor '" + config.dataset.flavor + "'");
  if (config.select.delta < 0.0 || config.select.delta > 1.0)
    throw std::runtime_error("config: delta must lie in [0,1]");
  if (config.select.mode != "calibration" && config.select.mode != "pseudo-label")
    throw std::runtime_error("config: select.mode must be calibration or pseudo-label");
  if (config.select.cv_folds < 2)
    throw std::runtime_error("config: cv_folds must be at least 2");
  if (config.select.alpha_step <= 0.0)
    throw std::runtime_error("config: alpha_step must be positive");
  if (config.cluster.polarity != "auto" && config.cluster.polarity != "calibrate" &&
      config.cluster.polarity != "invert")
    throw std::runtime_error("config: cluster.polarity must be auto, calibrate or invert");
  if (config.cluster.fcm.fuzzifier <= 1.0)
    throw std::runtime_error("config: fcm.fuzzifier must exceed 1");
  if (config.cluster.optics.min_pts < 2)
    throw std::runtime_error("config: optics.min_pts must be at least 2");
  if (config.cluster.optics_quantile <= 0.0 || config.cluster.optics_quantile > 1.0)
    throw std::runtime_error("config: optics_quantile must lie in (0,1]");
  config.weights.validate();
  if (config.mlp.learning_rate <= 0.0)
    throw std::runtime_error("config: mlp.learning_rate must be positive");
  if (config.mlp.batch_size == 0)
    throw std::runtime_error("config: mlp.batch_size must be at least 1");
}

DatasetConfig resolve_flavor(const DatasetConfig& dataset) {
  DatasetConfig d = dataset;
  if (d.flavor == "nsl-kdd") {
    if (!d.has_header) d.has_header = false;
    if (d.label_column.empty()) d.label_column = "label";
    if (d.normal_token.empty()) d.normal_token = "normal";
    if (d.drop_columns.empty()) d.drop_columns = {"difficulty"};
  } else if (d.flavor == "ton-iot") {
    if (!d.has_header) d.has_header = true;
    if (d.label_column.empty()) d.label_column = "label";
    if (d.normal_token.empty()) d.normal_token = "0";
    if (d.drop_columns.empty()) d.drop_columns = {"type"};
  } else {
    if (!d.has_header) d.has_header = true;
    if (d.label_column.empty()) d.label_column = "label";
    if (d.normal_token.empty()) d.normal_token = "normal";
  }
  return d;
}

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checksum: cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    hex[i] = digits[h & 0xf];
    h >>= 4;
  }
  hex[16] = '\0';
  return hex;
}

void save_matrix_csv(const std::string& path, const FeatureMatrix& X) {
  for (const auto& name : X.names)
    if (X.labels && name == "label")
      throw std::runtime_error("save_matrix_csv: feature column named 'label' collides with "
                               "the label column");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t j = 0; j < X.names.size(); ++j) {
    if (j) out << ',';
    out << X.names[j];
  }
  if (X.labels) out << (X.names.empty() ? "label" : ",label");
  out << '\n';
  for (std::size_t i = 0; i < X.n_rows(); ++i) {
    for (std::size_t j = 0; j < X.n_cols(); ++j) {
      if (j) out << ',';
      out << fmt_double(X.cols[j][i]);
    }
    if (X.labels) out << (X.n_cols() ? "," : "") << (*X.labels)[i];
    out << '\n';
  }
}

FeatureMatrix load_matrix_csv(const std::string& path) {
  CsvOptions opts;
  opts.max_malformed_fraction = 0.0;  // our own artifact, no tolerance
  RawTable table = load_csv(path, opts);
  FeatureMatrix X;
  int label_col = table.col_index("label");
  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    if (static_cast<int>(c) == label_col) continue;
    X.names.push_back(table.header[c]);
    std::vector<double> col;
    col.reserve(table.n_rows());
    for (const auto& row : table.rows)
      col.push_back(parse_double_str(row[c], path + " column " + table.header[c]));
    X.cols.push_back(std::move(col));
  }
  if (label_col >= 0) {
    std::vector<int> labels;
    labels.reserve(table.n_rows());
    for (const auto& row : table.rows) {
      const std::string& s = row[label_col];
      if (s != "0" && s != "1")
        throw std::runtime_error(path + ": label column must be 0/1, saw '" + s + "'");
      labels.push_back(s == "1" ? 1 : 0);
    }
    X.labels = std::move(labels);
  }
  return X;
}

void save_feature_set(const std::string& path, const FeatureSet& fs_doc,
                      std::size_t total_features) {
  json j;
  j["delta"] = fs_doc.delta;
  j["alpha"] = fs_doc.alpha;
  j["total_features"] = total_features;
  j["features"] = json::array();
  for (const auto& f : fs_doc.features)
    j["features"].push_back({{"index", f.index},
                             {"name", f.name},
                             {"provenance", provenance_name(f.provenance)},
                             {"cof", f.cof},
                             {"beta", f.beta}});
  write_json(path, j);
}

FeatureSet load_feature_set(const std::string& path) {
  json j = read_json(path, "feature set");
  FeatureSet fs_doc;
  fs_doc.delta = j.at("delta").get<double>();
  fs_doc.alpha = j.at("alpha").get<double>();
  for (const auto& f : j.at("features")) {
    SelectedFeature sf;
    sf.index = f.at("index").get<std::size_t>();
    sf.name = f.at("name").get<std::string>();
    std::string prov = f.at("provenance").get<std::string>();
    sf.provenance = prov == "both"   ? Provenance::Both
                    : prov == "lasso" ? Provenance::Lasso
                                      : Provenance::Correlation;
    sf.cof = f.at("cof").get<double>();
    sf.beta = f.at("beta").get<double>();
    fs_doc.features.push_back(std::move(sf));
  }
  return fs_doc;
}

void save_mlp_model(const std::string& path, const MlpModel& model) {
  json j;
  j["format"] = 1;
  j["dims"] = model.dims;
  j["seed"] = model.seed;
  j["config"] = {{"hidden", model.config.hidden},
                 {"learning_rate", model.config.learning_rate},
                 {"epochs", model.config.epochs},
                 {"batch_size", model.config.batch_size},
                 {"threshold", model.config.threshold}};
  j["weights"] = model.weights;
  j["biases"] = model.biases;
  write_json(path, j);
}

MlpModel load_mlp_model(const std::string& path) {
  json j = read_json(path, "model");
  if (!j.contains("format") || j["format"].get<int>() != 1)
    throw std::runtime_error("model: unsupported format in " + path);
  MlpModel m;
  m.dims = j.at("dims").get<std::vector<std::size_t>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  const json& c = j.at("config");
  m.config.hidden = c.at("hidden").get<std::vector<std::size_t>>();
  m.config.learning_rate = c.at("learning_rate").get<double>();
  m.config.epochs = c.at("epochs").get<std::size_t>();
  m.config.batch_size = c.at("batch_size").get<std::size_t>();
  m.config.threshold = c.at("threshold").get<double>();
  m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  m.biases = j.at("biases").get<std::vector<std::vector<double>>>();
  if (m.dims.size() < 2 || m.weights.size() != m.dims.size() - 1 ||
      m.biases.size() != m.weights.size())
    throw std::runtime_error("model: inconsistent layer shapes in " + path);
  for (std::size_t l = 0; l + 1 < m.dims.size(); ++l) {
    if (m.weights[l].size() != m.dims[l] * m.dims[l + 1] ||
        m.biases[l].size() != m.dims[l + 1])
      throw std::runtime_error("model: layer " + std::to_string(l) + " shape mismatch in " +
                               path);
    for (double v : m.weights[l])
      if (!std::isfinite(v)) throw std::runtime_error("model: non-finite weight in " + path);
  }
  return m;
}

void save_curve_csv(const std::string& path, const CurveData& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << (curve.kind == CurveKind::Roc ? "fpr,tpr" : "recall,precision") << '\n';
  for (std::size_t i = 0; i < curve.x.size(); ++i)
    out << fmt_double(curve.x[i]) << ',' << fmt_double(curve.y[i]) << '\n';
}

PreprocessSummary cmd_preprocess(const RunConfig& config, std::ostream& log) {
  StageClock clock;
  validate(config);
  ensure_output_dir(config);
  DatasetConfig d = resolve_flavor(config.dataset);

  CsvOptions opts;
  opts.delimiter = d.delimiter;
  opts.has_header = *d.has_header;
  opts.max_malformed_fraction = d.max_malformed_fraction;
  if (d.flavor == "nsl-kdd" && !opts.has_header) opts.schema = nslkdd_schema();
  RawTable table = load_csv(d.path, opts);

  bool labels_present = table.col_index(d.label_column) >= 0;
  std::vector<std::string> exclude = d.drop_columns;
  exclude.push_back(d.label_column);
  auto categorical = detect_categorical_columns(table, exclude);

  std::map<std::string, std::map<std::string, int>> fixed;
  if (d.flavor == "nsl-kdd") {
    fixed["protocol_type"] = nslkdd_protocol_codes();
    fixed["flag"] = nslkdd_flag_codes();
  }
  EncodingMap enc = build_encoding_map(table, categorical, fixed);

  std::vector<std::string> drops = d.drop_columns;
  if (labels_present) drops.push_back(d.label_column);
  FeatureMatrix X = encode_categoricals(table, enc, UnseenPolicy::Reject, drops);
  if (labels_present) X.labels = binarize_labels(table, d.label_column, d.normal_token);

  ScalerParams scaler = fit_scaler(X);
  FeatureMatrix scaled = apply_scaler(X, scaler);
  scaled.labels = X.labels;

  save_matrix_csv(art(config, "scaled.csv"), scaled);
  json enc_json;
  for (const auto& [col, codes] : enc.columns) enc_json["columns"][col] = codes;
  write_json(art(config, "encoding.json"), enc_json);
  write_json(art(config, "scaler.json"),
             {{"names", scaled.names}, {"mean", scaler.mean}, {"stddev", scaler.stddev}});

  PreprocessSummary s;
  s.rows_kept = table.n_rows();
  s.rows_dropped = table.dropped_rows;
  s.columns = scaled.n_cols();
  s.encoded_columns = categorical;
  s.labels_present = labels_present;
  write_json(art(config, "preprocess.json"), {{"rows_kept", s.rows_kept},
                                              {"rows_dropped", s.rows_dropped},
                                              {"columns", s.columns},
                                              {"encoded_columns", s.encoded_columns},
                                              {"labels_present", s.labels_present}});
  update_manifest(config, "preprocess",
                  {art(config, "scaled.csv"), art(config, "encoding.json"),
                   art(config, "scaler.json"), art(config, "preprocess.json")},
                  clock.seconds());

  log << "preprocess: kept " << s.rows_kept << " rows (" << s.rows_dropped << " dropped), "
      << s.columns << " feature columns, encoded {";
  for (std::size_t i = 0; i < categorical.size(); ++i)
    log << (i ? ", " : "") << categorical[i];
  log << "}, ground-truth labels " << (labels_present ? "present" : "absent") << "\n";
  return s;
}

SelectSummary cmd_select(const RunConfig& config, std::ostream& log) {
  StageClock clock;
  ensure_output_dir(config);
  FeatureMatrix scaled = load_stage_matrix(config, "scaled.csv", "select");

  SelectSummary s;
  s.total_features = scaled.n_cols();

  std::vector<int> labels;
  if (config.select.mode == "calibration") {
    if (!scaled.labels)
      throw std::runtime_error(
          "select: calibration mode needs ground-truth labels; preprocess found none "
          "(switch select.mode to pseudo-label for unlabeled traffic)");
    labels = *scaled.labels;
  } else {
    log << "select: pseudo-label mode, running one ensemble pass over all " << s.total_features
        << " features for provisional labels\n";
    RowMatrix R = to_rows(scaled);
    ClusterVotes votes = run_clusterers(config, R, scaled.labels, 16);
    LabeledDataset provisional =
        label_dataset(R, scaled.names, votes.kmeans, votes.optics, votes.fcm, config.weights);
    labels.reserve(provisional.labels.size());
    for (auto v : provisional.labels) labels.push_back(v);
    s.pseudo_labels_used = true;
  }

  SelectOptions opts;
  opts.delta = config.select.delta;
  opts.alpha_start = config.select.alpha_start;
  opts.alpha_stop = config.select.alpha_stop;
  opts.alpha_step = config.select.alpha_step;
  opts.cv_folds = config.select.cv_folds;
  opts.seed = stage_seed(config, 8);
  s.feature_set = select_features(scaled, labels, opts);
  s.frr = feature_reduction_rate(s.feature_set.features.size(), s.total_features);

  save_feature_set(art(config, "feature_set.json"), s.feature_set, s.total_features);
  update_manifest(config, "select", {art(config, "feature_set.json")}, clock.seconds());

  log << "select: " << s.feature_set.features.size() << " of " << s.total_features
      << " features kept (alpha " << s.feature_set.alpha << ", delta " << s.feature_set.delta
      << "), reduction rate " << s.frr << "\n";
  for (const auto& f : s.feature_set.features)
    log << "  [" << f.index << "] " << f.name << " via " << provenance_name(f.provenance)
        << " (cof " << f.cof << ", beta " << f.beta << ")\n";
  return s;
}

LabelSummary cmd_label(const RunConfig& config, std::ostream& log) {
  StageClock clock;
  ensure_output_dir(config);
  FeatureMatrix scaled = load_stage_matrix(config, "scaled.csv", "label");
  if (!fs::exists(art(config, "feature_set.json")))
    throw std::runtime_error("label: missing " + art(config, "feature_set.json") +
                             " (run select first)");
  FeatureSet fset = load_feature_set(art(config, "feature_set.json"));

  RowMatrix R = to_rows(scaled, fset.indices());
  std::vector<std::string> names;
  for (const auto& f : fset.features) names.push_back(f.name);

  ClusterVotes votes = run_clusterers(config, R, scaled.labels, 1);
  LabeledDataset labeled =
      label_dataset(R, names, votes.kmeans, votes.optics, votes.fcm, config.weights);

  LabelSummary s;
  s.rows = labeled.labels.size();
  for (auto v : labeled.labels) s.positives += v;
  const BinaryAssignment* asgs[3] = {&votes.kmeans, &votes.optics, &votes.fcm};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) s.agreement[a][b] = agreement(*asgs[a], *asgs[b]);
  s.warnings = votes.warnings;

  // labeled.csv: the exact matrix the classifier trains on
  FeatureMatrix out;
  out.names = names;
  out.cols.assign(names.size(), {});
  for (std::size_t j = 0; j < names.size(); ++j) {
    out.cols[j].resize(R.n);
    for (std::size_t i = 0; i < R.n; ++i) out.cols[j][i] = R.at(i, j);
  }
  std::vector<int> voted(labeled.labels.begin(), labeled.labels.end());
  out.labels = voted;
  save_matrix_csv(art(config, "labeled.csv"), out);

  std::ofstream vcsv(art(config, "votes.csv"));
  if (!vcsv) throw std::runtime_error("cannot write " + art(config, "votes.csv"));
  vcsv << "kmeans,optics,fcm,score,label\n";
  for (std::size_t i = 0; i < s.rows; ++i)
    vcsv << int(labeled.votes_kmeans[i]) << ',' << int(labeled.votes_optics[i]) << ','
         << int(labeled.votes_fcm[i]) << ',' << fmt_double(labeled.vote_scores[i]) << ','
         << int(labeled.labels[i]) << '\n';
  vcsv.close();

  json vj;
  vj["rows"] = s.rows;
  vj["label_counts"] = {{"benign", s.rows - s.positives}, {"malicious", s.positives}};
  vj["score_histogram"] = histogram_json(labeled.vote_scores);
  vj["agreement"] = s.agreement;
  vj["warnings"] = s.warnings;
  write_json(art(config, "votes.json"), vj);

  update_manifest(
      config, "label",
      {art(config, "labeled.csv"), art(config, "votes.csv"), art(config, "votes.json")},
      clock.seconds());

  log << "label: " << s.positives << " of " << s.rows << " rows voted malicious"
      << "; pairwise agreement kmeans/optics " << s.agreement[0][1] << ", kmeans/fcm "
      << s.agreement[0][2] << ", optics/fcm " << s.agreement[1][2] << "\n";
  for (const auto& w : s.warnings) log << "  warning: " << w << "\n";
  return s;
}

TrainSummary cmd_train(const RunConfig& config, std::ostream& log) {
  StageClock clock;
  ensure_output_dir(config);
  FeatureMatrix labeled = load_stage_matrix(config, "labeled.csv", "train");
  if (!labeled.labels) throw std::runtime_error("train: labeled.csv carries no label column");

  RowMatrix X = to_rows(labeled);
  std::vector<std::uint8_t> y(labeled.labels->begin(), labeled.labels->end());

  MlpModel model = mlp_init(X.d, config.mlp, stage_seed(config, 4));
  TrainingLog tlog = mlp_train(model, X, y);

  save_mlp_model(art(config, "model.json"), model);
  std::ofstream lcsv(art(config, "loss.csv"));
  if (!lcsv) throw std::runtime_error("cannot write " + art(config, "loss.csv"));
  lcsv << "epoch,loss\n";
  for (std::size_t e = 0; e < tlog.epoch_loss.size(); ++e)
    lcsv << (e + 1) << ',' << fmt_double(tlog.epoch_loss[e]) << '\n';
  lcsv.close();

  TrainSummary s;
  s.epochs = tlog.epoch_loss.size();
  s.final_loss = tlog.epoch_loss.empty() ? 0.0 : tlog.epoch_loss.back();
  s.train_seconds = clock.seconds();
  write_json(art(config, "train.json"), {{"epochs", s.epochs}, {"final_loss", s.final_loss}});
  update_manifest(config, "train",
                  {art(config, "model.json"), art(config, "loss.csv"), art(config, "train.json")},
                  s.train_seconds);

  log << "train: " << s.epochs << " epochs over " << X.n << " rows x " << X.d
      << " features, final loss " << s.final_loss << " (" << s.train_seconds << " s)\n";
  return s;
}

EvalSummary cmd_eval(const RunConfig& config, std::ostream& log) {
  StageClock clock;
  ensure_output_dir(config);
  FeatureMatrix labeled = load_stage_matrix(config, "labeled.csv", "eval");
  FeatureMatrix scaled = load_stage_matrix(config, "scaled.csv", "eval");
  if (!fs::exists(art(config, "model.json")))
    throw std::runtime_error("eval: missing " + art(config, "model.json") +
                             " (run train first)");
  MlpModel model = load_mlp_model(art(config, "model.json"));

  RowMatrix X = to_rows(labeled);
  std::vector<double> proba = mlp_predict_proba(model, X);
  std::vector<std::uint8_t> pred(proba.size());
  for (std::size_t i = 0; i < proba.size(); ++i)
    pred[i] = proba[i] > model.config.threshold ? 1 : 0;

  EvalSummary s;
  json ej;
  if (scaled.labels && scaled.labels->size() == X.n) {
    s.ground_truth = true;
    s.cm = confusion(*scaled.labels, pred);
    s.report = classification_report(s.cm);
    CurveData roc = roc_curve(*scaled.labels, proba);
    CurveData pr = pr_curve(*scaled.labels, proba);
    s.roc_auc = roc.auc;
    s.pr_auc = pr.auc;
    save_curve_csv(art(config, "roc.csv"), roc);
    save_curve_csv(art(config, "pr.csv"), pr);
    ej["ground_truth"] = true;
    ej["confusion"] = confusion_to_json(s.cm);
    ej["metrics"] = classification_to_json(s.report);
    ej["roc_auc"] = s.roc_auc;
    ej["pr_auc"] = s.pr_auc;
  } else {
    s.ground_truth = false;
    std::size_t positives = 0;
    for (auto p : pred) positives += p;
    std::vector<double> bucketed(proba.size());
    for (std::size_t i = 0; i < proba.size(); ++i)
      bucketed[i] = std::floor(std::min(proba[i], 0.9999999999) * 10.0) / 10.0;
    ej["ground_truth"] = false;
    ej["predicted_counts"] = {{"benign", proba.size() - positives},
                              {"malicious", positives}};
    ej["score_histogram"] = histogram_json(bucketed);
  }
  write_json(art(config, "eval.json"), ej);

  std::vector<std::string> artifacts = {art(config, "eval.json")};
  if (s.ground_truth) {
    artifacts.push_back(art(config, "roc.csv"));
    artifacts.push_back(art(config, "pr.csv"));
  }
  s.eval_seconds = clock.seconds();
  update_manifest(config, "eval", artifacts, s.eval_seconds);

  if (s.ground_truth)
    log << "eval: accuracy " << s.report.accuracy << ", precision " << s.report.precision
        << ", recall " << s.report.recall << ", far " << s.report.far << ", roc-auc "
        << s.roc_auc << ", pr-auc " << s.pr_auc << "\n";
  else
    log << "eval: no ground truth; wrote prediction counts and score histogram only\n";
  return s;
}

void cmd_report(const RunConfig& config, std::ostream& log) {
  StageClock clock;
  ensure_output_dir(config);
  json r;
  r["dataset"] = {{"path", config.dataset.path}, {"flavor", config.dataset.flavor}};
  r["preprocess"] = nullptr;
  r["features"] = nullptr;
  r["ensemble"] = nullptr;
  r["clustering_vs_truth"] = nullptr;
  r["classifier"] = nullptr;

  if (fs::exists(art(config, "preprocess.json")))
    r["preprocess"] = read_json(art(config, "preprocess.json"), "report");

  if (fs::exists(art(config, "feature_set.json"))) {
    json fj = read_json(art(config, "feature_set.json"), "report");
    std::size_t selected = fj.at("features").size();
    std::size_t total = fj.at("total_features").get<std::size_t>();
    r["features"] = {{"selected", selected},
                     {"total", total},
                     {"reduction_rate", feature_reduction_rate(selected, total)},
                     {"alpha", fj.at("alpha")},
                     {"delta", fj.at("delta")},
                     {"list", fj.at("features")}};
  }

  if (fs::exists(art(config, "votes.json")))
    r["ensemble"] = read_json(art(config, "votes.json"), "report");

  // per-algorithm agreement with ground truth, when both sides exist
  if (fs::exists(art(config, "votes.csv")) && fs::exists(art(config, "scaled.csv"))) {
    FeatureMatrix scaled = load_matrix_csv(art(config, "scaled.csv"));
    if (scaled.labels) {
      CsvOptions vopts;
      vopts.max_malformed_fraction = 0.0;
      RawTable votes = load_csv(art(config, "votes.csv"), vopts);
      if (votes.n_rows() == scaled.labels->size()) {
        json cj;
        const char* algs[4] = {"kmeans", "optics", "fcm", "label"};
        for (const char* alg : algs) {
          int c = votes.col_index(alg);
          if (c < 0) continue;
          std::vector<int> yp;
          yp.reserve(votes.n_rows());
          for (const auto& row : votes.rows) yp.push_back(row[c] == "1" ? 1 : 0);
          ConfusionMatrix cm = confusion(*scaled.labels, yp);
          json entry;
          entry["confusion"] = confusion_to_json(cm);
          entry["classification"] = classification_to_json(classification_report(cm));
          entry["clustering"] = clustering_to_json(clustering_report(*scaled.labels, yp));
          cj[alg == std::string("label") ? "ensemble" : alg] = entry;
        }
        r["clustering_vs_truth"] = cj;
      }
    }
  }

  if (fs::exists(art(config, "train.json"))) {
    json tj = read_json(art(config, "train.json"), "report");
    json cj = {{"epochs", tj.at("epochs")}, {"final_loss", tj.at("final_loss")}};
    if (fs::exists(art(config, "eval.json")))
      cj["eval"] = read_json(art(config, "eval.json"), "report");
    r["classifier"] = cj;
  }

  // timings vary run to run; everything above is stable for a fixed seed
  json timings = json::object();
  if (fs::exists(art(config, "manifest.json"))) {
    json m = read_json(art(config, "manifest.json"), "report");
    if (m.contains("stages"))
      for (const auto& [stage, entry] : m["stages"].items())
        if (entry.contains("seconds")) timings[stage] = entry["seconds"];
  }
  r["timings"] = timings;

  write_json(art(config, "report.json"), r);

  std::ofstream md(art(config, "report.md"));
  if (!md) throw std::runtime_error("cannot write " + art(config, "report.md"));
  md << "# Run report\n\n";
  md << "Dataset: `" << config.dataset.path << "` (" << config.dataset.flavor << ")\n\n";
  if (!r["preprocess"].is_null())
    md << "- Rows: " << r["preprocess"]["rows_kept"] << " kept, "
       << r["preprocess"]["rows_dropped"] << " dropped; " << r["preprocess"]["columns"]
       << " feature columns\n";
  if (!r["features"].is_null())
    md << "- Features: " << r["features"]["selected"] << " of " << r["features"]["total"]
       << " (reduction rate " << r["features"]["reduction_rate"] << ", alpha "
       << r["features"]["alpha"] << ")\n";
  if (!r["ensemble"].is_null())
    md << "- Ensemble labels: " << r["ensemble"]["label_counts"]["malicious"]
       << " malicious / " << r["ensemble"]["rows"] << " rows\n";
  if (!r["classifier"].is_null()) {
    md << "- Classifier: " << r["classifier"]["epochs"] << " epochs, final loss "
       << r["classifier"]["final_loss"] << "\n";
    if (r["classifier"].contains("eval") &&
        r["classifier"]["eval"].value("ground_truth", false)) {
      const json& e = r["classifier"]["eval"];
      md << "\n| metric | value |\n|---|---|\n";
      for (const char* k : {"accuracy", "precision", "recall", "f1", "far", "specificity",
                            "mcc"})
        md << "| " << k << " | " << e["metrics"][k] << " |\n";
      md << "| roc_auc | " << e["roc_auc"] << " |\n";
      md << "| pr_auc | " << e["pr_auc"] << " |\n";
    }
  }
  if (!r["clustering_vs_truth"].is_null()) {
    md << "\n## Base learners vs ground truth\n\n";
    md << "| algorithm | accuracy | ari | ami | v-measure |\n|---|---|---|---|---|\n";
    for (const auto& [alg, entry] : r["clustering_vs_truth"].items())
      md << "| " << alg << " | " << entry["classification"]["accuracy"] << " | "
         << entry["clustering"]["ari"] << " | " << entry["clustering"]["ami"] << " | "
         << entry["clustering"]["v_measure"] << " |\n";
  }
  md.close();

  update_manifest(config, "report", {art(config, "report.json"), art(config, "report.md")},
                  clock.seconds());
  log << "report: wrote " << art(config, "report.json") << " and " << art(config, "report.md")
      << "\n";
}

}  // namespace flowlabel
