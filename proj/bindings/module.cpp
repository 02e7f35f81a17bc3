#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <stdexcept>
#include <vector>

#include "flowlabel/classifier.hpp"
#include "flowlabel/clustering.hpp"
#include "flowlabel/dataset.hpp"
#include "flowlabel/ensemble.hpp"
#include "flowlabel/feature_select.hpp"
#include "flowlabel/metrics.hpp"
#include "flowlabel/pipeline.hpp"
#include "flowlabel/rng.hpp"

namespace py = pybind11;
using namespace flowlabel;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

RowMatrix to_row_matrix(const DoubleArray& a) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  RowMatrix m;
  m.n = static_cast<std::size_t>(a.shape(0));
  m.d = static_cast<std::size_t>(a.shape(1));
  m.data.resize(m.n * m.d);
  std::memcpy(m.data.data(), a.data(), m.data.size() * sizeof(double));
  return m;
}

FeatureMatrix to_feature_matrix(const DoubleArray& a, const std::vector<std::string>* names) {
  if (a.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  const auto n = static_cast<std::size_t>(a.shape(0));
  const auto d = static_cast<std::size_t>(a.shape(1));
  FeatureMatrix X;
  X.cols.assign(d, std::vector<double>(n));
  auto buf = a.unchecked<2>();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) X.cols[j][i] = buf(i, j);
  if (names != nullptr && !names->empty()) {
    if (names->size() != d) throw std::invalid_argument("names length does not match columns");
    X.names = *names;
  } else {
    X.names.resize(d);
    for (std::size_t j = 0; j < d; ++j) X.names[j] = "c" + std::to_string(j);
  }
  return X;
}

py::array_t<double> matrix_array(const std::vector<double>& flat, std::size_t rows,
                                 std::size_t cols) {
  py::array_t<double> out({rows, cols});
  std::memcpy(out.mutable_data(), flat.data(), flat.size() * sizeof(double));
  return out;
}

py::array_t<double> vector_array(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
  return out;
}

py::array_t<int> label_array(const std::vector<std::uint8_t>& v) {
  py::array_t<int> out(static_cast<py::ssize_t>(v.size()));
  auto buf = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < v.size(); ++i) buf(static_cast<py::ssize_t>(i)) = v[i];
  return out;
}

std::vector<std::uint8_t> to_u8(const std::vector<int>& v, const char* what) {
  std::vector<std::uint8_t> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0 && v[i] != 1) throw std::invalid_argument(std::string(what) + " must be 0/1");
    out[i] = static_cast<std::uint8_t>(v[i]);
  }
  return out;
}

py::dict report_dict(const ClassificationReport& r) {
  py::dict d;
  d["accuracy"] = r.accuracy;
  d["precision"] = r.precision;
  d["recall"] = r.recall;
  d["f1"] = r.f1;
  d["far"] = r.far;
  d["specificity"] = r.specificity;
  d["mcc"] = r.mcc;
  d["degenerate"] = r.degenerate;
  return d;
}

py::dict report_dict(const ClusteringReport& r) {
  py::dict d;
  d["homogeneity"] = r.homogeneity;
  d["completeness"] = r.completeness;
  d["v_measure"] = r.v_measure;
  d["ari"] = r.ari;
  d["ami"] = r.ami;
  return d;
}

OpticsParams optics_params(std::size_t min_pts, std::optional<double> epsilon) {
  OpticsParams p;
  p.min_pts = min_pts;
  p.epsilon = epsilon.value_or(kInf);
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Flow labeling and attack detection core";
  m.attr("__version__") = "0.1.0";

  m.def(
      "scale",
      [](const DoubleArray& X) {
        FeatureMatrix fm = to_feature_matrix(X, nullptr);
        ScalerParams p = fit_scaler(fm);
        FeatureMatrix scaled = apply_scaler(fm, p);
        RowMatrix rows = to_rows(scaled);
        py::dict out;
        out["scaled"] = matrix_array(rows.data, rows.n, rows.d);
        out["mean"] = vector_array(p.mean);
        out["stddev"] = vector_array(p.stddev);
        return out;
      },
      py::arg("X"), "Column-wise standardisation (population stddev; constant columns map to 0).");

  m.def(
      "pearson_cof",
      [](const std::vector<double>& x, const std::vector<double>& y) { return pearson_cof(x, y); },
      py::arg("x"), py::arg("y"));

  m.def(
      "lasso_fit",
      [](const DoubleArray& X, const std::vector<double>& y, double alpha, double tol,
         int max_sweeps) {
        FeatureMatrix fm = to_feature_matrix(X, nullptr);
        LassoFit fit = lasso_fit(fm, y, alpha, tol, max_sweeps);
        py::dict out;
        out["beta"] = vector_array(fit.beta);
        out["intercept"] = fit.intercept;
        out["alpha"] = fit.alpha;
        out["iterations"] = fit.iterations;
        out["converged"] = fit.converged;
        return out;
      },
      py::arg("X"), py::arg("y"), py::arg("alpha"), py::arg("tol") = 1e-6,
      py::arg("max_sweeps") = 1000,
      "Coordinate-descent lasso on the unnormalised objective sum(r^2) + alpha*|beta|_1.");

  m.def(
      "cross_validate_alpha",
      [](const DoubleArray& X, const std::vector<double>& y, const std::vector<double>& grid,
         std::size_t folds, std::uint64_t seed) {
        FeatureMatrix fm = to_feature_matrix(X, nullptr);
        CvResult cv = cross_validate_alpha(fm, y, grid, folds, seed);
        py::dict out;
        out["alpha_grid"] = vector_array(cv.alpha_grid);
        out["mean_loss"] = vector_array(cv.mean_loss);
        out["best_alpha"] = cv.best_alpha;
        return out;
      },
      py::arg("X"), py::arg("y"), py::arg("grid"), py::arg("folds") = 10, py::arg("seed") = 0);

  m.def("alpha_grid", &make_alpha_grid, py::arg("start") = 0.1, py::arg("stop") = 8.0,
        py::arg("step") = 0.01);

  m.def(
      "select_features",
      [](const DoubleArray& X, const std::vector<int>& y,
         const std::optional<std::vector<std::string>>& names, double delta, double alpha_start,
         double alpha_stop, double alpha_step, std::size_t cv_folds, std::uint64_t seed) {
        FeatureMatrix fm = to_feature_matrix(X, names ? &*names : nullptr);
        SelectOptions opts;
        opts.delta = delta;
        opts.alpha_start = alpha_start;
        opts.alpha_stop = alpha_stop;
        opts.alpha_step = alpha_step;
        opts.cv_folds = cv_folds;
        opts.seed = seed;
        FeatureSet fs = select_features(fm, y, opts);
        py::list feats;
        for (const auto& f : fs.features) {
          py::dict fd;
          fd["index"] = f.index;
          fd["name"] = f.name;
          fd["provenance"] = provenance_name(f.provenance);
          fd["cof"] = f.cof;
          fd["beta"] = f.beta;
          feats.append(fd);
        }
        py::dict out;
        out["features"] = feats;
        out["indices"] = fs.indices();
        out["delta"] = fs.delta;
        out["alpha"] = fs.alpha;
        out["reduction_rate"] = feature_reduction_rate(fs.features.size(), fm.n_cols());
        return out;
      },
      py::arg("X"), py::arg("y"), py::arg("names") = std::nullopt, py::arg("delta") = 0.4,
      py::arg("alpha_start") = 0.1, py::arg("alpha_stop") = 8.0, py::arg("alpha_step") = 0.01,
      py::arg("cv_folds") = 10, py::arg("seed") = 0,
      "Union of correlation-selected (|cof| > delta) and lasso-selected features.");

  m.def(
      "kmeans",
      [](const DoubleArray& X, std::uint64_t seed, std::size_t batch_size, std::size_t max_iters,
         std::size_t n_init) {
        RowMatrix rows = to_row_matrix(X);
        MbkParams p;
        p.seed = seed;
        p.batch_size = batch_size;
        p.max_iters = max_iters;
        p.n_init = n_init;
        KMeansModel model = mbk_fit(rows, p);
        BinaryAssignment a = mbk_predict(model, rows);
        py::dict out;
        out["labels"] = label_array(a.labels);
        out["centroids"] = matrix_array(model.centroids, 2, model.dim);
        out["inertia"] = kmeans_inertia(model, rows);
        return out;
      },
      py::arg("X"), py::arg("seed") = 0, py::arg("batch_size") = 1024, py::arg("max_iters") = 300,
      py::arg("n_init") = 10, "Two-cluster mini-batch k-means; labels are raw cluster ids.");

  m.def(
      "fcm",
      [](const DoubleArray& X, std::uint64_t seed, double fuzzifier, double tol,
         std::size_t max_iters) {
        RowMatrix rows = to_row_matrix(X);
        FcmParams p;
        p.seed = seed;
        p.fuzzifier = fuzzifier;
        p.tol = tol;
        p.max_iters = max_iters;
        FcmModel model = fcm_fit(rows, p);
        FcmPrediction pred = fcm_predict(model, rows);
        py::dict out;
        out["labels"] = label_array(pred.assignment.labels);
        out["malicious_score"] = vector_array(pred.malicious_score);
        out["centroids"] = matrix_array(model.centroids, 2, model.dim);
        out["membership"] = matrix_array(model.membership, rows.n, 2);
        out["malicious_cluster"] = model.malicious_cluster;
        out["objective"] = vector_array(model.objective_trace);
        out["iterations"] = model.iterations;
        return out;
      },
      py::arg("X"), py::arg("seed") = 0, py::arg("fuzzifier") = 2.0, py::arg("tol") = 1e-5,
      py::arg("max_iters") = 300,
      "Two-cluster fuzzy c-means; labels say 1 for the cluster farther from the data mean.");

  m.def(
      "optics_run",
      [](const DoubleArray& X, std::size_t min_pts, std::optional<double> epsilon) {
        RowMatrix rows = to_row_matrix(X);
        OpticsResult r = optics_run(rows, optics_params(min_pts, epsilon));
        py::dict out;
        out["ordering"] = r.ordering;
        out["reachability"] = vector_array(r.reachability);
        out["core_distance"] = vector_array(r.core_distance);
        return out;
      },
      py::arg("X"), py::arg("min_pts") = 5, py::arg("epsilon") = std::nullopt,
      "Exact OPTICS ordering with per-row reachability and core distances.");

  m.def(
      "optics",
      [](const DoubleArray& X, std::size_t min_pts, std::optional<double> epsilon, double quantile,
         std::size_t subsample, std::uint64_t seed) {
        RowMatrix rows = to_row_matrix(X);
        std::vector<std::string> warnings;
        BinaryAssignment a =
            optics_binary(rows, optics_params(min_pts, epsilon), quantile, subsample, seed,
                          &warnings);
        py::dict out;
        out["labels"] = label_array(a.labels);
        out["warnings"] = warnings;
        return out;
      },
      py::arg("X"), py::arg("min_pts") = 5, py::arg("epsilon") = std::nullopt,
      py::arg("quantile") = 0.9, py::arg("subsample") = 0, py::arg("seed") = 0,
      "OPTICS reduced to a two-sided assignment via the reachability cutoff.");

  m.def(
      "ensemble_label",
      [](const DoubleArray& X, std::uint64_t seed, const std::vector<double>& weights,
         std::size_t kmeans_batch, double fcm_fuzzifier, std::size_t optics_min_pts,
         double optics_quantile, std::size_t optics_subsample) {
        if (weights.size() != 3) throw std::invalid_argument("weights must have 3 entries");
        RowMatrix rows = to_row_matrix(X);
        VoteWeights w;
        w.w_kmeans = weights[0];
        w.w_optics = weights[1];
        w.w_fcm = weights[2];
        w.validate();

        Rng root(seed);
        MbkParams kp;
        kp.batch_size = kmeans_batch;
        kp.seed = root.fork(1).seed();
        FcmParams fp;
        fp.fuzzifier = fcm_fuzzifier;
        fp.seed = root.fork(2).seed();
        OpticsParams op;
        op.min_pts = optics_min_pts;

        KMeansModel km = mbk_fit(rows, kp);
        BinaryAssignment pk = mbk_predict(km, rows);
        FcmModel fm = fcm_fit(rows, fp);
        FcmPrediction fpred = fcm_predict(fm, rows);
        std::vector<std::string> warnings;
        BinaryAssignment po = optics_binary(rows, op, optics_quantile, optics_subsample,
                                            root.fork(3).seed(), &warnings);
        pk = align_polarity(pk, fpred.assignment);
        po = align_polarity(po, fpred.assignment);

        std::vector<std::string> names(rows.d);
        for (std::size_t j = 0; j < rows.d; ++j) names[j] = "c" + std::to_string(j);
        LabeledDataset ld = label_dataset(rows, names, pk, po, fpred.assignment, w);
        py::dict out;
        out["labels"] = label_array(ld.labels);
        out["scores"] = vector_array(ld.vote_scores);
        out["kmeans"] = label_array(ld.votes_kmeans);
        out["optics"] = label_array(ld.votes_optics);
        out["fcm"] = label_array(ld.votes_fcm);
        out["warnings"] = warnings;
        return out;
      },
      py::arg("X"), py::arg("seed") = 0,
      py::arg("weights") = std::vector<double>{0.25, 0.25, 0.5}, py::arg("kmeans_batch") = 1024,
      py::arg("fcm_fuzzifier") = 2.0, py::arg("optics_min_pts") = 5,
      py::arg("optics_quantile") = 0.9, py::arg("optics_subsample") = 0,
      "Weighted vote over the three clusterers, polarity-aligned to fuzzy c-means.");

  m.def(
      "weighted_vote",
      [](int p_kmeans, int p_optics, int p_fcm, const std::vector<double>& weights) {
        if (weights.size() != 3) throw std::invalid_argument("weights must have 3 entries");
        VoteWeights w;
        w.w_kmeans = weights[0];
        w.w_optics = weights[1];
        w.w_fcm = weights[2];
        w.validate();
        double v = weighted_vote(p_kmeans, p_optics, p_fcm, w);
        return py::make_tuple(v, threshold_label(v));
      },
      py::arg("p_kmeans"), py::arg("p_optics"), py::arg("p_fcm"),
      py::arg("weights") = std::vector<double>{0.25, 0.25, 0.5});

  m.def(
      "confusion",
      [](const std::vector<int>& y_true, const std::vector<int>& y_pred) {
        ConfusionMatrix cm = confusion(y_true, y_pred);
        return py::make_tuple(cm.tp, cm.fn, cm.fp, cm.tn);
      },
      py::arg("y_true"), py::arg("y_pred"), "(tp, fn, fp, tn) with 1 the positive class.");

  m.def(
      "classification_report",
      [](const std::vector<int>& y_true, const std::vector<int>& y_pred) {
        return report_dict(classification_report(confusion(y_true, y_pred)));
      },
      py::arg("y_true"), py::arg("y_pred"));

  m.def(
      "classification_report_from_counts",
      [](std::uint64_t tp, std::uint64_t fn, std::uint64_t fp, std::uint64_t tn) {
        ConfusionMatrix cm;
        cm.tp = tp;
        cm.fn = fn;
        cm.fp = fp;
        cm.tn = tn;
        return report_dict(classification_report(cm));
      },
      py::arg("tp"), py::arg("fn"), py::arg("fp"), py::arg("tn"));

  m.def(
      "clustering_report",
      [](const std::vector<int>& y_true, const std::vector<int>& y_pred) {
        return report_dict(clustering_report(y_true, y_pred));
      },
      py::arg("y_true"), py::arg("y_pred"),
      "Homogeneity, completeness, V-measure, ARI and AMI for binary partitions.");

  m.def(
      "roc_curve",
      [](const std::vector<int>& y_true, const std::vector<double>& scores) {
        CurveData c = roc_curve(y_true, scores);
        py::dict out;
        out["fpr"] = vector_array(c.x);
        out["tpr"] = vector_array(c.y);
        out["auc"] = c.auc;
        return out;
      },
      py::arg("y_true"), py::arg("scores"));

  m.def(
      "pr_curve",
      [](const std::vector<int>& y_true, const std::vector<double>& scores) {
        CurveData c = pr_curve(y_true, scores);
        py::dict out;
        out["recall"] = vector_array(c.x);
        out["precision"] = vector_array(c.y);
        out["auc"] = c.auc;
        return out;
      },
      py::arg("y_true"), py::arg("scores"));

  py::class_<MlpModel>(m, "Mlp")
      .def(py::init([](std::size_t input_dim, const std::vector<std::size_t>& hidden, double lr,
                       std::size_t epochs, std::size_t batch_size, double threshold,
                       std::uint64_t seed) {
             MlpConfig cfg;
             cfg.hidden = hidden;
             cfg.learning_rate = lr;
             cfg.epochs = epochs;
             cfg.batch_size = batch_size;
             cfg.threshold = threshold;
             return mlp_init(input_dim, cfg, seed);
           }),
           py::arg("input_dim"), py::arg("hidden") = std::vector<std::size_t>{64, 32},
           py::arg("learning_rate") = 0.001, py::arg("epochs") = 40, py::arg("batch_size") = 200,
           py::arg("threshold") = 0.5, py::arg("seed") = 0)
      .def_property_readonly("dims", [](const MlpModel& m_) { return m_.dims; })
      .def_property_readonly("seed", [](const MlpModel& m_) { return m_.seed; })
      .def_property_readonly("parameter_count",
                             [](const MlpModel& m_) { return m_.parameter_count(); })
      .def(
          "train",
          [](MlpModel& model, const DoubleArray& X, const std::vector<int>& y) {
            RowMatrix rows = to_row_matrix(X);
            TrainingLog log = mlp_train(model, rows, to_u8(y, "labels"));
            return vector_array(log.epoch_loss);
          },
          py::arg("X"), py::arg("y"), "Mini-batch SGD; returns the per-epoch mean loss.")
      .def(
          "predict_proba",
          [](const MlpModel& model, const DoubleArray& X) {
            return vector_array(mlp_predict_proba(model, to_row_matrix(X)));
          },
          py::arg("X"))
      .def(
          "predict",
          [](const MlpModel& model, const DoubleArray& X) {
            return label_array(mlp_predict(model, to_row_matrix(X), model.config.threshold));
          },
          py::arg("X"))
      .def(
          "loss",
          [](const MlpModel& model, const DoubleArray& X, const std::vector<int>& y) {
            return mlp_loss(model, to_row_matrix(X), to_u8(y, "labels"));
          },
          py::arg("X"), py::arg("y"))
      .def(
          "save", [](const MlpModel& model, const std::string& path) { save_mlp_model(path, model); },
          py::arg("path"))
      .def_static(
          "load", [](const std::string& path) { return load_mlp_model(path); }, py::arg("path"));
}
