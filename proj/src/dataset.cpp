#include "flowlabel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace flowlabel {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim, bool do_trim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delim, start);
    std::string field = (pos == std::string::npos) ? line.substr(start)
                                                   : line.substr(start, pos - start);
    out.push_back(do_trim ? trim(field) : field);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

}  // namespace

int RawTable::col_index(const std::string& name) const {
  auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

int FeatureMatrix::col_index(const std::string& name) const {
  auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

RawTable load_csv(const std::string& path, const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  RawTable table;
  std::string line;
  std::size_t arity = 0;
  std::size_t line_no = 0;
  std::size_t malformed = 0;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    if (line.empty()) continue;
    auto fields = split(line, opts.delimiter, opts.trim_whitespace);

    if (arity == 0) {
      // first non-empty line fixes the arity
      if (opts.has_header) {
        table.header = fields;
        arity = fields.size();
        continue;
      }
      arity = fields.size();
      if (!opts.schema.empty()) {
        if (opts.schema.size() != arity)
          throw std::runtime_error("schema has " + std::to_string(opts.schema.size()) +
                                   " names but file rows have " + std::to_string(arity) +
                                   " fields");
        table.header = opts.schema;
      } else {
        for (std::size_t i = 0; i < arity; ++i) table.header.push_back("c" + std::to_string(i));
      }
    }

    if (fields.size() != arity) {
      ++malformed;
      continue;
    }
    table.rows.push_back(std::move(fields));
  }

  if (arity == 0) throw std::runtime_error("empty input: " + path);
  if (table.rows.empty() && malformed == 0) throw std::runtime_error("empty input: " + path);

  std::size_t total = table.rows.size() + malformed;
  if (total > 0 && static_cast<double>(malformed) / static_cast<double>(total) >
                       opts.max_malformed_fraction) {
    throw std::runtime_error("rejecting " + path + ": " + std::to_string(malformed) + " of " +
                             std::to_string(total) + " rows malformed (tolerance " +
                             std::to_string(opts.max_malformed_fraction) + ")");
  }
  table.dropped_rows = malformed;

  std::set<std::string> seen;
  for (const auto& name : table.header) {
    if (!seen.insert(name).second)
      throw std::runtime_error("duplicate column name: " + name);
  }
  return table;
}

const std::map<std::string, int>& nslkdd_protocol_codes() {
  static const std::map<std::string, int> codes = {{"icmp", 1}, {"tcp", 2}, {"udp", 3}};
  return codes;
}

const std::map<std::string, int>& nslkdd_flag_codes() {
  static const std::map<std::string, int> codes = {
      {"OTH", 1}, {"REJ", 2}, {"RSTO", 3}, {"RSTOS0", 4}, {"RSTR", 5}, {"S0", 6},
      {"S1", 7},  {"S2", 8},  {"S3", 9},   {"SF", 10},    {"SH", 11}};
  return codes;
}

const std::vector<std::string>& nslkdd_schema() {
  static const std::vector<std::string> names = {
      "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes", "land",
      "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in", "num_compromised",
      "root_shell", "su_attempted", "num_root", "num_file_creations", "num_shells",
      "num_access_files", "num_outbound_cmds", "is_host_login", "is_guest_login", "count",
      "srv_count", "serror_rate", "srv_serror_rate", "rerror_rate", "srv_rerror_rate",
      "same_srv_rate", "diff_srv_rate", "srv_diff_host_rate", "dst_host_count",
      "dst_host_srv_count", "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
      "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate", "dst_host_serror_rate",
      "dst_host_srv_serror_rate", "dst_host_rerror_rate", "dst_host_srv_rerror_rate",
      "label", "difficulty"};
  return names;
}

std::vector<std::string> detect_categorical_columns(const RawTable& table,
                                                    const std::vector<std::string>& exclude) {
  std::vector<std::string> out;
  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    const std::string& name = table.header[c];
    if (std::find(exclude.begin(), exclude.end(), name) != exclude.end()) continue;
    bool numeric = true;
    double v;
    for (const auto& row : table.rows) {
      if (!parse_double(row[c], v)) {
        numeric = false;
        break;
      }
    }
    if (!numeric) out.push_back(name);
  }
  return out;
}

EncodingMap build_encoding_map(const RawTable& table,
                               const std::vector<std::string>& categorical_columns,
                               const std::map<std::string, std::map<std::string, int>>& fixed) {
  EncodingMap map;
  for (const auto& name : categorical_columns) {
    auto fx = fixed.find(name);
    if (fx != fixed.end()) {
      map.columns[name] = fx->second;
      continue;
    }
    int c = table.col_index(name);
    if (c < 0) throw std::runtime_error("categorical column not in table: " + name);
    std::set<std::string> distinct;
    for (const auto& row : table.rows) distinct.insert(row[c]);
    std::map<std::string, int> codes;
    int next = 1;  // codes contiguous from 1, lexicographic order
    for (const auto& v : distinct) codes[v] = next++;
    map.columns[name] = std::move(codes);
  }
  return map;
}

std::string EncodingMap::decode(const std::string& column, int code) const {
  auto it = columns.find(column);
  if (it == columns.end()) return "";
  for (const auto& [value, c] : it->second)
    if (c == code) return value;
  return "";
}

FeatureMatrix encode_categoricals(const RawTable& table, const EncodingMap& map,
                                  UnseenPolicy policy,
                                  const std::vector<std::string>& drop_columns,
                                  std::vector<std::string>* warnings) {
  FeatureMatrix X;
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    const std::string& name = table.header[c];
    if (std::find(drop_columns.begin(), drop_columns.end(), name) != drop_columns.end())
      continue;
    keep.push_back(c);
    X.names.push_back(name);
  }

  X.cols.assign(keep.size(), {});
  for (auto& col : X.cols) col.reserve(table.n_rows());

  for (std::size_t k = 0; k < keep.size(); ++k) {
    std::size_t c = keep[k];
    const std::string& name = table.header[c];
    auto enc = map.columns.find(name);
    if (enc != map.columns.end()) {
      for (std::size_t r = 0; r < table.n_rows(); ++r) {
        const std::string& v = table.rows[r][c];
        auto code = enc->second.find(v);
        if (code == enc->second.end()) {
          if (policy == UnseenPolicy::Reject)
            throw std::runtime_error("unseen value '" + v + "' in column '" + name + "'");
          if (warnings)
            warnings->push_back("column '" + name + "': unseen value '" + v +
                                "' encoded as 0");
          X.cols[k].push_back(0.0);
        } else {
          X.cols[k].push_back(static_cast<double>(code->second));
        }
      }
    } else {
      for (std::size_t r = 0; r < table.n_rows(); ++r) {
        double v;
        if (!parse_double(table.rows[r][c], v))
          throw std::runtime_error("column '" + name + "' row " + std::to_string(r) +
                                   ": cannot parse '" + table.rows[r][c] + "' as a number");
        X.cols[k].push_back(v);
      }
    }
  }
  return X;
}

std::vector<int> binarize_labels(const RawTable& table, const std::string& label_column,
                                 const std::string& normal_token) {
  int c = table.col_index(label_column);
  if (c < 0) throw std::runtime_error("label column '" + label_column + "' not present");
  std::vector<int> out;
  out.reserve(table.n_rows());
  for (const auto& row : table.rows) out.push_back(row[c] == normal_token ? 0 : 1);
  return out;
}

ScalerParams fit_scaler(const FeatureMatrix& X) {
  ScalerParams p;
  std::size_t n = X.n_rows();
  if (n == 0) throw std::runtime_error("cannot fit scaler on an empty matrix");
  for (const auto& col : X.cols) {
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    p.mean.push_back(mean);
    p.stddev.push_back(std::sqrt(var));
  }
  return p;
}

FeatureMatrix apply_scaler(const FeatureMatrix& X, const ScalerParams& params) {
  if (params.mean.size() != X.n_cols() || params.stddev.size() != X.n_cols())
    throw std::invalid_argument("scaler arity " + std::to_string(params.mean.size()) +
                                " does not match matrix arity " + std::to_string(X.n_cols()));
  FeatureMatrix out;
  out.names = X.names;
  out.labels = X.labels;
  out.cols.resize(X.n_cols());
  for (std::size_t j = 0; j < X.n_cols(); ++j) {
    out.cols[j].resize(X.cols[j].size());
    double m = params.mean[j], s = params.stddev[j];
    if (s == 0.0) {
      std::fill(out.cols[j].begin(), out.cols[j].end(), 0.0);  // constant column
    } else {
      for (std::size_t i = 0; i < X.cols[j].size(); ++i)
        out.cols[j][i] = (X.cols[j][i] - m) / s;
    }
  }
  return out;
}

RowMatrix to_rows(const FeatureMatrix& X, const std::vector<std::size_t>& columns) {
  RowMatrix R;
  R.n = X.n_rows();
  R.d = columns.size();
  R.data.resize(R.n * R.d);
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] >= X.n_cols())
      throw std::out_of_range("column index " + std::to_string(columns[j]) + " out of range");
    const auto& col = X.cols[columns[j]];
    for (std::size_t i = 0; i < R.n; ++i) R.data[i * R.d + j] = col[i];
  }
  return R;
}

RowMatrix to_rows(const FeatureMatrix& X) {
  std::vector<std::size_t> all(X.n_cols());
  for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
  return to_rows(X, all);
}

}  // namespace flowlabel
