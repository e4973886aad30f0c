#include "srtmix/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace srtmix {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

namespace {

[[noreturn]] void fail(const fs::path& path, long line_no,
                       const std::string& message) {
  throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                           ": " + message);
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// Reads lines with trailing '\r' stripped (tolerates CRLF input).
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

long parse_long(const std::string& s, const fs::path& path, long line_no) {
  long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(path, line_no, "expected integer, got '" + s + "'");
  }
  return value;
}

double parse_real(const std::string& s, const fs::path& path, long line_no) {
  try {
    std::size_t pos = 0;
    const double value = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return value;
  } catch (const std::exception&) {
    fail(path, line_no, "expected number, got '" + s + "'");
  }
}

CountMatrix load_counts_dense(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!next_line(in, line)) fail(path, 1, "empty file");
  auto header = split_csv_line(line);
  if (header.size() < 2) fail(path, 1, "header needs spot_id plus gene ids");

  CountMatrix counts;
  counts.gene_ids.assign(header.begin() + 1, header.end());
  const std::size_t p = counts.gene_ids.size();

  std::vector<std::vector<int>> rows;
  long line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != p + 1) {
      fail(path, line_no,
           "expected " + std::to_string(p + 1) + " fields, got " +
               std::to_string(fields.size()));
    }
    counts.spot_ids.push_back(fields[0]);
    std::vector<int> row(p);
    for (std::size_t j = 0; j < p; ++j) {
      const long v = parse_long(fields[j + 1], path, line_no);
      if (v < 0) fail(path, line_no, "negative count");
      row[j] = static_cast<int>(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(path, line_no, "no data rows");

  counts.values.resize(rows.size(), p);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < p; ++j) counts.values(i, j) = rows[i][j];
  }
  counts.validate();
  return counts;
}

fs::path sidecar(const fs::path& mtx, const char* kind) {
  fs::path p = mtx;
  p.replace_extension();
  p += std::string(".") + kind + ".txt";
  return p;
}

CountMatrix load_counts_mtx(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  long line_no = 0;
  // Header comments (%%...) precede the size line.
  do {
    if (!next_line(in, line)) fail(path, line_no + 1, "missing size line");
    ++line_no;
  } while (!line.empty() && line[0] == '%');

  std::istringstream size_line(line);
  long n = 0, p = 0, nnz = 0;
  if (!(size_line >> n >> p >> nnz) || n <= 0 || p <= 0 || nnz < 0) {
    fail(path, line_no, "malformed size line '" + line + "'");
  }

  CountMatrix counts;
  counts.values = Eigen::MatrixXi::Zero(n, p);
  for (long e = 0; e < nnz; ++e) {
    if (!next_line(in, line)) fail(path, line_no + 1, "truncated entries");
    ++line_no;
    std::istringstream entry(line);
    long i = 0, j = 0, v = 0;
    if (!(entry >> i >> j >> v)) fail(path, line_no, "malformed entry");
    if (i < 1 || i > n || j < 1 || j > p) fail(path, line_no, "index out of range");
    if (v < 0) fail(path, line_no, "negative count");
    counts.values(i - 1, j - 1) = static_cast<int>(v);
  }

  counts.spot_ids = read_id_lines(sidecar(path, "spots"));
  counts.gene_ids = read_id_lines(sidecar(path, "genes"));
  if (static_cast<long>(counts.spot_ids.size()) != n) {
    throw std::runtime_error(sidecar(path, "spots").string() + ": " +
                             std::to_string(counts.spot_ids.size()) +
                             " ids for " + std::to_string(n) + " rows");
  }
  if (static_cast<long>(counts.gene_ids.size()) != p) {
    throw std::runtime_error(sidecar(path, "genes").string() + ": " +
                             std::to_string(counts.gene_ids.size()) +
                             " ids for " + std::to_string(p) + " columns");
  }
  counts.validate();
  return counts;
}

}  // namespace

std::vector<std::string> read_id_lines(const fs::path& path) {
  auto in = open_input(path);
  std::vector<std::string> ids;
  std::string line;
  while (next_line(in, line)) {
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

CountMatrix load_counts(const fs::path& path, CountsFormat format) {
  return format == CountsFormat::DenseCsv ? load_counts_dense(path)
                                          : load_counts_mtx(path);
}

void write_counts(const fs::path& path, const CountMatrix& counts,
                  CountsFormat format) {
  counts.validate();
  if (format == CountsFormat::DenseCsv) {
    auto out = open_output(path);
    out << "spot_id";
    for (const auto& g : counts.gene_ids) out << ',' << g;
    out << '\n';
    for (Eigen::Index i = 0; i < counts.n(); ++i) {
      out << counts.spot_ids[i];
      for (Eigen::Index j = 0; j < counts.p(); ++j) out << ',' << counts.values(i, j);
      out << '\n';
    }
    return;
  }

  long nnz = 0;
  for (Eigen::Index j = 0; j < counts.p(); ++j) {
    for (Eigen::Index i = 0; i < counts.n(); ++i) {
      if (counts.values(i, j) != 0) ++nnz;
    }
  }
  auto out = open_output(path);
  out << "%%MatrixMarket matrix coordinate integer general\n";
  out << counts.n() << ' ' << counts.p() << ' ' << nnz << '\n';
  for (Eigen::Index j = 0; j < counts.p(); ++j) {
    for (Eigen::Index i = 0; i < counts.n(); ++i) {
      if (counts.values(i, j) != 0) {
        out << (i + 1) << ' ' << (j + 1) << ' ' << counts.values(i, j) << '\n';
      }
    }
  }
  auto spots = open_output(sidecar(path, "spots"));
  for (const auto& id : counts.spot_ids) spots << id << '\n';
  auto genes = open_output(sidecar(path, "genes"));
  for (const auto& id : counts.gene_ids) genes << id << '\n';
}

Coordinates load_coordinates(const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!next_line(in, line)) fail(path, 1, "empty file");
  const auto header = split_csv_line(line);
  if (header.size() != 3) fail(path, 1, "expected header spot_id,x,y");

  Coordinates coords;
  std::vector<std::pair<double, double>> xy;
  long line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) fail(path, line_no, "expected 3 fields");
    coords.spot_ids.push_back(fields[0]);
    xy.emplace_back(parse_real(fields[1], path, line_no),
                    parse_real(fields[2], path, line_no));
  }
  if (xy.empty()) fail(path, line_no, "no data rows");
  coords.xy.resize(xy.size(), 2);
  for (std::size_t i = 0; i < xy.size(); ++i) {
    coords.xy(i, 0) = xy[i].first;
    coords.xy(i, 1) = xy[i].second;
  }
  return coords;
}

void write_coordinates(const fs::path& path, const Coordinates& c) {
  auto out = open_output(path);
  out << "spot_id,x,y\n";
  for (Eigen::Index i = 0; i < c.xy.rows(); ++i) {
    out << c.spot_ids[i] << ',' << format_double(c.xy(i, 0)) << ','
        << format_double(c.xy(i, 1)) << '\n';
  }
}

std::pair<std::vector<std::string>, Eigen::VectorXi> load_spot_labels(
    const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!next_line(in, line)) fail(path, 1, "empty file");
  if (split_csv_line(line).size() != 2) fail(path, 1, "expected 2-column header");

  std::vector<std::string> ids;
  std::vector<int> labels;
  long line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) fail(path, line_no, "expected 2 fields");
    ids.push_back(fields[0]);
    labels.push_back(static_cast<int>(parse_long(fields[1], path, line_no)));
  }
  Eigen::VectorXi z(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) z[i] = labels[i];
  return {std::move(ids), std::move(z)};
}

void write_spot_labels(const fs::path& path,
                       const std::vector<std::string>& spot_ids,
                       const Eigen::VectorXi& labels) {
  auto out = open_output(path);
  out << "spot_id,label\n";
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    out << spot_ids[i] << ',' << labels[i] << '\n';
  }
}

std::pair<std::vector<std::string>, Eigen::VectorXd> load_gene_values(
    const fs::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!next_line(in, line)) fail(path, 1, "empty file");
  if (split_csv_line(line).size() != 2) fail(path, 1, "expected 2-column header");

  std::vector<std::string> ids;
  std::vector<double> values;
  long line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) fail(path, line_no, "expected 2 fields");
    ids.push_back(fields[0]);
    values.push_back(parse_real(fields[1], path, line_no));
  }
  Eigen::VectorXd v(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) v[i] = values[i];
  return {std::move(ids), std::move(v)};
}

void write_gene_values(const fs::path& path, const std::string& value_name,
                       const std::vector<std::string>& gene_ids,
                       const Eigen::VectorXd& values) {
  auto out = open_output(path);
  out << "gene_id," << value_name << '\n';
  for (Eigen::Index j = 0; j < values.size(); ++j) {
    out << gene_ids[j] << ',' << format_double(values[j]) << '\n';
  }
}

void write_spot_values(const fs::path& path, const std::string& value_name,
                       const std::vector<std::string>& spot_ids,
                       const Eigen::VectorXd& values) {
  auto out = open_output(path);
  out << "spot_id," << value_name << '\n';
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    out << spot_ids[i] << ',' << format_double(values[i]) << '\n';
  }
}

void write_cluster_matrix(const fs::path& path, const Eigen::MatrixXd& values,
                          const std::vector<std::string>& gene_ids) {
  auto out = open_output(path);
  out << "cluster";
  for (const auto& g : gene_ids) out << ',' << g;
  out << '\n';
  for (Eigen::Index k = 0; k < values.rows(); ++k) {
    out << (k + 1);
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      out << ',' << format_double(values(k, j));
    }
    out << '\n';
  }
}

Eigen::MatrixXd load_cluster_matrix(const fs::path& path,
                                    std::vector<std::string>* gene_ids) {
  auto in = open_input(path);
  std::string line;
  if (!next_line(in, line)) fail(path, 1, "empty file");
  const auto header = split_csv_line(line);
  if (header.size() < 2) fail(path, 1, "expected cluster plus gene ids");
  if (gene_ids) gene_ids->assign(header.begin() + 1, header.end());
  const std::size_t p = header.size() - 1;

  std::vector<std::vector<double>> rows;
  long line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != p + 1) fail(path, line_no, "field count mismatch");
    std::vector<double> row(p);
    for (std::size_t j = 0; j < p; ++j) {
      row[j] = parse_real(fields[j + 1], path, line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(path, line_no, "no data rows");
  Eigen::MatrixXd m(rows.size(), p);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    for (std::size_t j = 0; j < p; ++j) m(k, j) = rows[k][j];
  }
  return m;
}

void write_similarity_matrix(const fs::path& dense_path,
                             const fs::path& sparse_path,
                             const Eigen::MatrixXd& ppm,
                             const std::vector<std::string>& spot_ids,
                             Eigen::Index dense_max_n, double min_value) {
  const Eigen::Index n = ppm.rows();
  if (n < dense_max_n) {
    auto out = open_output(dense_path);
    out << "spot_id";
    for (const auto& id : spot_ids) out << ',' << id;
    out << '\n';
    for (Eigen::Index i = 0; i < n; ++i) {
      out << spot_ids[i];
      for (Eigen::Index j = 0; j < n; ++j) out << ',' << format_double(ppm(i, j));
      out << '\n';
    }
    return;
  }
  auto out = open_output(sparse_path);
  out << "spot_i,spot_j,value\n";
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (ppm(i, j) > min_value) {
        out << spot_ids[i] << ',' << spot_ids[j] << ','
            << format_double(ppm(i, j)) << '\n';
      }
    }
  }
}

void write_trace(const fs::path& path, const std::string& value_name,
                 const std::vector<double>& values) {
  auto out = open_output(path);
  out << "iteration," << value_name << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << (i + 1) << ',' << format_double(values[i]) << '\n';
  }
}

void write_trace(const fs::path& path, const std::string& value_name,
                 const std::vector<int>& values) {
  auto out = open_output(path);
  out << "iteration," << value_name << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) {
    out << (i + 1) << ',' << values[i] << '\n';
  }
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace srtmix
