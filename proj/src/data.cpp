#include "ssnmf/data.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ssnmf/random.hpp"

namespace ssnmf {

namespace {

constexpr Index kSyntheticRows = 500;
constexpr Index kSyntheticCols = 60;

// Signal blocks of the synthetic designs, 0-based half-open ranges. The third
// block is what separates the three-class design from the outlier design.
bool in_signal_block(Index i, Index j, bool with_third_block) {
  if (j < 20) return i < 60;
  if (j < 40) return 30 <= i && i < 90;
  return with_third_block && 60 <= i && i < 120;
}

LabeledDataset synthetic_blocks(std::uint32_t seed, bool with_third_block) {
  NormalSampler rng(seed);
  LabeledDataset ds;
  ds.x.resize(kSyntheticRows, kSyntheticCols);
  for (Index j = 0; j < kSyntheticCols; ++j)
    for (Index i = 0; i < kSyntheticRows; ++i) {
      const double z = rng.next();
      ds.x(i, j) = std::abs(in_signal_block(i, j, with_third_block) ? z : 0.9 * z);
    }
  ds.truth.resize(kSyntheticCols);
  for (Index j = 0; j < kSyntheticCols; ++j)
    ds.truth[static_cast<std::size_t>(j)] = static_cast<int>(j / 20);
  return ds;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) return false;
  out = v;
  return true;
}

std::vector<std::string> split_fields(const std::string& line, char delim) {
  std::vector<std::string> fields;
  std::string::size_type pos = 0;
  while (true) {
    const auto next = line.find(delim, pos);
    if (next == std::string::npos) {
      fields.push_back(trim(line.substr(pos)));
      break;
    }
    fields.push_back(trim(line.substr(pos, next - pos)));
    pos = next + 1;
  }
  return fields;
}

[[noreturn]] void parse_error(const std::string& path, std::size_t line,
                              std::size_t column, const std::string& what) {
  std::ostringstream msg;
  msg << path << ": line " << line << ", column " << column << ": " << what;
  throw std::runtime_error(msg.str());
}

void check_values(const std::string& path, const Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j)))
        throw std::runtime_error(path + ": non-finite value at row " +
                                 std::to_string(i + 1) + ", column " +
                                 std::to_string(j + 1));
      if (m(i, j) < 0.0)
        throw std::runtime_error(path + ": negative value at row " +
                                 std::to_string(i + 1) + ", column " +
                                 std::to_string(j + 1));
    }
}

LabeledDataset load_delimited(const std::string& path, char delim) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");

  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::size_t> line_numbers;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    rows.push_back(split_fields(line, delim));
    line_numbers.push_back(line_no);
  }
  if (rows.empty()) throw std::runtime_error(path + ": no data rows");

  // Shape detection. A non-numeric first field in the last row (always a data
  // row) marks a feature-name column; given that, a non-numeric field in the
  // matching position of the first row marks a header of sample names.
  double probe = 0.0;
  const bool has_feature_names = !parse_double(rows.back().front(), probe);
  const std::size_t name_offset = has_feature_names ? 1 : 0;
  const bool has_header = rows.front().size() > name_offset &&
                          !parse_double(rows.front()[name_offset], probe);
  const std::size_t first_data_row = has_header ? 1 : 0;
  if (first_data_row >= rows.size())
    throw std::runtime_error(path + ": header but no data rows");

  const std::size_t fields_per_row = rows[first_data_row].size();
  if (fields_per_row <= name_offset)
    parse_error(path, line_numbers[first_data_row], 1, "row has no values");
  const Index n = static_cast<Index>(fields_per_row - name_offset);
  const Index p = static_cast<Index>(rows.size() - first_data_row);

  LabeledDataset ds;
  ds.x.resize(p, n);
  if (has_feature_names) ds.feature_names.reserve(static_cast<std::size_t>(p));

  if (has_header) {
    // Accept a corner cell above the feature-name column or its omission.
    const auto& header = rows.front();
    std::size_t skip;
    if (header.size() == fields_per_row)
      skip = name_offset;
    else if (header.size() + 1 == fields_per_row && has_feature_names)
      skip = 0;
    else
      parse_error(path, line_numbers[0], 1, "header width does not match rows");
    ds.sample_names.assign(header.begin() + static_cast<std::ptrdiff_t>(skip),
                           header.end());
  }

  for (std::size_t r = first_data_row; r < rows.size(); ++r) {
    const auto& fields = rows[r];
    if (fields.size() != fields_per_row)
      parse_error(path, line_numbers[r], 1, "inconsistent field count");
    const Index i = static_cast<Index>(r - first_data_row);
    if (has_feature_names) ds.feature_names.push_back(fields[0]);
    for (std::size_t f = name_offset; f < fields.size(); ++f) {
      double v = 0.0;
      if (!parse_double(fields[f], v))
        parse_error(path, line_numbers[r], f + 1,
                    "cannot parse '" + fields[f] + "' as a number");
      ds.x(i, static_cast<Index>(f - name_offset)) = v;
    }
  }
  check_values(path, ds.x);
  return ds;
}

LabeledDataset load_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  std::istringstream banner(line);
  std::string magic, object, format, field, symmetry;
  banner >> magic >> object >> format >> field >> symmetry;
  if (magic != "%%MatrixMarket" || object != "matrix" ||
      format != "coordinate" || (field != "real" && field != "integer") ||
      symmetry != "general")
    throw std::runtime_error(
        path + ": expected '%%MatrixMarket matrix coordinate real general'");

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    break;
  }
  std::istringstream dims(line);
  Index p = 0, n = 0;
  long long nnz = -1;
  if (!(dims >> p >> n >> nnz) || p < 1 || n < 1 || nnz < 0)
    parse_error(path, line_no, 1, "bad dimensions line");

  LabeledDataset ds;
  ds.x = Matrix::Zero(p, n);
  long long seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    std::istringstream entry(t);
    Index i = 0, j = 0;
    double v = 0.0;
    if (!(entry >> i >> j >> v))
      parse_error(path, line_no, 1, "bad coordinate entry");
    if (i < 1 || i > p || j < 1 || j > n)
      parse_error(path, line_no, 1, "coordinate out of bounds");
    ds.x(i - 1, j - 1) = v;
    ++seen;
  }
  if (seen != nnz)
    throw std::runtime_error(path + ": expected " + std::to_string(nnz) +
                             " entries, found " + std::to_string(seen));
  check_values(path, ds.x);
  return ds;
}

}  // namespace

LabeledDataset synthetic_three_block(std::uint32_t seed) {
  return synthetic_blocks(seed, true);
}

LabeledDataset synthetic_outlier(std::uint32_t seed) {
  return synthetic_blocks(seed, false);
}

MatrixFormat format_from_path(const std::string& path) {
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "tsv") return MatrixFormat::kTsv;
  if (ext == "mtx") return MatrixFormat::kMatrixMarket;
  return MatrixFormat::kCsv;
}

LabeledDataset load_matrix(const std::string& path, MatrixFormat format) {
  switch (format) {
    case MatrixFormat::kCsv: return load_delimited(path, ',');
    case MatrixFormat::kTsv: return load_delimited(path, '\t');
    case MatrixFormat::kMatrixMarket: return load_matrix_market(path);
  }
  throw std::logic_error("load_matrix: unknown format");
}

void save_matrix(const std::string& path, const Matrix& m,
                 const std::vector<std::string>& feature_names,
                 const std::vector<std::string>& sample_names) {
  if (!feature_names.empty() &&
      static_cast<Index>(feature_names.size()) != m.rows())
    throw std::invalid_argument("save_matrix: feature_names length mismatch");
  if (!sample_names.empty() &&
      static_cast<Index>(sample_names.size()) != m.cols())
    throw std::invalid_argument("save_matrix: sample_names length mismatch");

  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");

  if (!sample_names.empty()) {
    if (!feature_names.empty()) out << "feature,";
    for (std::size_t j = 0; j < sample_names.size(); ++j)
      out << sample_names[j] << (j + 1 < sample_names.size() ? "," : "\n");
  }
  char buffer[64];
  for (Index i = 0; i < m.rows(); ++i) {
    if (!feature_names.empty())
      out << feature_names[static_cast<std::size_t>(i)] << ',';
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", m(i, j));
      out << buffer << (j + 1 < m.cols() ? "," : "\n");
    }
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

LabelVector load_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::vector<std::string> raw;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (!t.empty()) raw.push_back(t);
  }
  if (raw.empty()) throw std::runtime_error(path + ": no labels");

  LabelVector labels;
  labels.reserve(raw.size());
  bool all_integer = true;
  for (const auto& token : raw) {
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(token.c_str(), &end, 10);
    if (end != token.c_str() + token.size() || errno == ERANGE) {
      all_integer = false;
      break;
    }
    labels.push_back(static_cast<int>(v));
  }
  if (all_integer) return labels;

  // Non-numeric labels: ids by order of first appearance. Metrics are
  // invariant under the choice of ids.
  labels.clear();
  std::map<std::string, int> ids;
  for (const auto& token : raw) {
    const auto it = ids.emplace(token, static_cast<int>(ids.size())).first;
    labels.push_back(it->second);
  }
  return labels;
}

void save_labels(const std::string& path, const LabelVector& labels) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  for (int label : labels) out << label << '\n';
  if (!out) throw std::runtime_error(path + ": write failed");
}

LabeledDataset preprocess_scrna(const LabeledDataset& ds,
                                double dropout_fraction) {
  if ((ds.x.array() < 0.0).any())
    throw std::invalid_argument("preprocess_scrna: X must be nonnegative");
  if (!(dropout_fraction >= 0.0))
    throw std::invalid_argument("preprocess_scrna: bad dropout fraction");

  const Index n = ds.x.cols();
  const double limit = dropout_fraction * static_cast<double>(n);
  std::vector<Index> keep;
  for (Index i = 0; i < ds.x.rows(); ++i) {
    const Index zeros = (ds.x.row(i).array() == 0.0).count();
    if (static_cast<double>(zeros) <= limit) keep.push_back(i);
  }
  if (keep.empty())
    throw std::runtime_error("preprocess_scrna: all features filtered out");

  LabeledDataset out;
  out.x.resize(static_cast<Index>(keep.size()), n);
  for (std::size_t t = 0; t < keep.size(); ++t) {
    out.x.row(static_cast<Index>(t)) =
        ds.x.row(keep[t]).unaryExpr([](double v) { return std::log2(1.0 + v); });
    if (!ds.feature_names.empty())
      out.feature_names.push_back(
          ds.feature_names[static_cast<std::size_t>(keep[t])]);
  }
  out.truth = ds.truth;
  out.sample_names = ds.sample_names;
  return out;
}

}  // namespace ssnmf
