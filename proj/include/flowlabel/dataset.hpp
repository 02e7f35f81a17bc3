#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flowlabel {

// Raw delimiter-separated table, all fields still strings.
struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::size_t dropped_rows = 0;  // malformed rows removed at load time

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_cols() const { return header.size(); }
  int col_index(const std::string& name) const;
};

struct CsvOptions {
  char delimiter = ',';
  bool has_header = true;
  // Column names when the file has no header; empty means infer c0..cN.
  std::vector<std::string> schema;
  // Rows whose field count differs from the header are dropped; the whole
  // file is rejected once their fraction exceeds this.
  double max_malformed_fraction = 0.001;
  bool trim_whitespace = true;
};

RawTable load_csv(const std::string& path, const CsvOptions& opts = {});

// Per-column mapping from string value to positive integer code.
struct EncodingMap {
  std::map<std::string, std::map<std::string, int>> columns;

  bool has_column(const std::string& name) const { return columns.count(name) != 0; }
  // Inverse lookup; empty if the code is unknown.
  std::string decode(const std::string& column, int code) const;
};

// Fixed code tables for the classic flow-record categorical columns.
const std::map<std::string, int>& nslkdd_protocol_codes();
const std::map<std::string, int>& nslkdd_flag_codes();

// Column names of the classic 41-feature flow schema, followed by
// "label" and "difficulty".
const std::vector<std::string>& nslkdd_schema();

// Columns whose values do not all parse as numbers (excluding `exclude`).
std::vector<std::string> detect_categorical_columns(
    const RawTable& table, const std::vector<std::string>& exclude = {});

// Builds codes for `categorical_columns`: fixed tables are taken verbatim,
// every other column gets codes 1..K over its distinct values in
// lexicographic order.
EncodingMap build_encoding_map(
    const RawTable& table, const std::vector<std::string>& categorical_columns,
    const std::map<std::string, std::map<std::string, int>>& fixed = {});

enum class UnseenPolicy { Reject, CodeZero };

// Dense numeric feature table, stored by column.
struct FeatureMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> cols;
  std::optional<std::vector<int>> labels;  // 0/1 when present

  std::size_t n_rows() const { return cols.empty() ? 0 : cols[0].size(); }
  std::size_t n_cols() const { return cols.size(); }
  int col_index(const std::string& name) const;
};

// All categorical columns mapped through `map`, everything else parsed as
// real numbers. Columns listed in `drop_columns` are omitted.
FeatureMatrix encode_categoricals(const RawTable& table, const EncodingMap& map,
                                  UnseenPolicy policy = UnseenPolicy::Reject,
                                  const std::vector<std::string>& drop_columns = {},
                                  std::vector<std::string>* warnings = nullptr);

// label == normal_token -> 0, anything else -> 1.
std::vector<int> binarize_labels(const RawTable& table, const std::string& label_column,
                                 const std::string& normal_token);

struct ScalerParams {
  std::vector<double> mean;
  std::vector<double> stddev;  // population convention (divide by n)
};

ScalerParams fit_scaler(const FeatureMatrix& X);

// (x - mean) / stddev per column; constant columns (stddev 0) map to zeros.
FeatureMatrix apply_scaler(const FeatureMatrix& X, const ScalerParams& params);

// Row-major dense matrix for the row-oriented consumers (clusterers, MLP).
struct RowMatrix {
  std::size_t n = 0, d = 0;
  std::vector<double> data;  // n*d, row-major

  double* row(std::size_t i) { return data.data() + i * d; }
  const double* row(std::size_t i) const { return data.data() + i * d; }
  double at(std::size_t i, std::size_t j) const { return data[i * d + j]; }
};

// Projection of the named columns into row-major storage, column order preserved.
RowMatrix to_rows(const FeatureMatrix& X, const std::vector<std::size_t>& columns);
RowMatrix to_rows(const FeatureMatrix& X);

}  // namespace flowlabel
