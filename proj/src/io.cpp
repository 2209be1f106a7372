#include "tlp/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace tlp {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::IoError, "bad numeric field '" + s + "' in " + where);
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_signal_csv(const std::string& path, const TLpSignal& signal) {
  signal.validate();
  const int n = signal.measure.size();
  const int d = signal.measure.dim();
  const int m = signal.channels();
  const bool withWeights = !signal.measure.isUniform(1e-12);
  std::ofstream out = open_out(path);
  for (int c = 0; c < d; ++c) out << (c ? "," : "") << "x" << (c + 1);
  for (int c = 0; c < m; ++c) out << ",f" << (c + 1);
  if (withWeights) out << ",w";
  out << "\n";
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) out << (c ? "," : "") << format_double(signal.measure.points(i, c));
    for (int c = 0; c < m; ++c) out << "," << format_double(signal.values(i, c));
    if (withWeights) out << "," << format_double(signal.measure.weights[i]);
    out << "\n";
  }
}

TLpSignal read_signal_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::IoError, "empty signal file " + path);
  std::vector<std::string> header = split_csv_line(line);
  int d = 0, m = 0;
  bool hasW = false;
  for (const auto& h : header) {
    if (h.rfind("x", 0) == 0) ++d;
    else if (h.rfind("f", 0) == 0) ++m;
    else if (h == "w") hasW = true;
    else throw Error(ErrorKind::IoError, "unexpected column '" + h + "' in " + path);
  }
  if (d == 0) throw Error(ErrorKind::IoError, "no coordinate columns in " + path);

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != d + m + (hasW ? 1 : 0))
      throw Error(ErrorKind::IoError, "bad row width in " + path);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, path));
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  if (n == 0) throw Error(ErrorKind::EmptySupport, "signal file has no rows: " + path);

  TLpSignal s;
  s.measure.points.resize(n, d);
  s.values.resize(n, m);
  s.measure.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) s.measure.points(i, c) = rows[i][c];
    for (int c = 0; c < m; ++c) s.values(i, c) = rows[i][d + c];
    s.measure.weights[i] = hasW ? rows[i][d + m] : 1.0 / n;
  }
  if (hasW) s.measure.weights /= s.measure.weights.sum();
  s.validate();
  return s;
}

void write_dataset(const std::string& dir, const std::vector<TLpSignal>& signals,
                   const std::vector<std::string>& labels) {
  if (signals.size() != labels.size())
    throw Error(ErrorKind::ShapeMismatch, "signals/labels length mismatch");
  fs::create_directories(dir);
  std::ofstream manifest = open_out((fs::path(dir) / "manifest.csv").string());
  manifest << "path,label\n";
  char name[32];
  for (std::size_t i = 0; i < signals.size(); ++i) {
    std::snprintf(name, sizeof name, "signal_%04zu.csv", i);
    write_signal_csv((fs::path(dir) / name).string(), signals[i]);
    manifest << name << "," << labels[i] << "\n";
  }
}

LabeledDataset read_dataset(const std::string& dir) {
  std::ifstream manifest = open_in((fs::path(dir) / "manifest.csv").string());
  std::string line;
  if (!std::getline(manifest, line) || split_csv_line(line) != std::vector<std::string>{"path", "label"})
    throw Error(ErrorKind::IoError, "dataset manifest must start with 'path,label'");
  LabeledDataset ds;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != 2) throw Error(ErrorKind::IoError, "bad manifest row: " + line);
    ds.ids.push_back(cells[0]);
    ds.labelNames.push_back(cells[1]);
    ds.signals.push_back(read_signal_csv((fs::path(dir) / cells[0]).string()));
  }
  std::set<std::string> uniq(ds.labelNames.begin(), ds.labelNames.end());
  std::map<std::string, int> labelId;
  int next = 0;
  for (const auto& l : uniq) labelId[l] = next++;
  for (const auto& l : ds.labelNames) ds.labels.push_back(labelId[l]);
  return ds;
}

void write_embeddings_csv(const std::string& path, const std::vector<std::string>& ids,
                          const std::vector<EmbeddingVector>& embeddings,
                          const EmbeddingFileMeta& meta) {
  if (ids.size() != embeddings.size())
    throw Error(ErrorKind::ShapeMismatch, "ids/embeddings length mismatch");
  std::ofstream out = open_out(path);
  const Eigen::Index len = embeddings.empty() ? 0 : embeddings.front().flat().size();
  out << "id";
  for (Eigen::Index c = 0; c < len; ++c) out << ",v" << c;
  out << "\n";
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    Vector flat = embeddings[i].flat();
    if (flat.size() != len) throw Error(ErrorKind::ShapeMismatch, "embedding width varies");
    out << ids[i];
    for (Eigen::Index c = 0; c < len; ++c) out << "," << format_double(flat[c]);
    out << "\n";
  }

  nlohmann::json j;
  j["n"] = meta.n;
  j["d"] = meta.d;
  j["m"] = meta.m;
  j["p"] = meta.p;
  j["solver"] = meta.solver;
  j["eps"] = meta.eps;
  j["channelScale"] = meta.channelScale;
  j["kind"] = meta.kind;
  j["referencePath"] = meta.referencePath;
  j["labels"] = meta.labels;
  std::ofstream side = open_out(path + ".json");
  side << j.dump(2) << "\n";
}

EmbeddingFile read_embeddings_csv(const std::string& path) {
  EmbeddingFile file;
  {
    std::ifstream side(path + ".json");
    if (side) {
      nlohmann::json j;
      side >> j;
      file.meta.n = j.value("n", 0);
      file.meta.d = j.value("d", 0);
      file.meta.m = j.value("m", 0);
      file.meta.p = j.value("p", 2.0);
      file.meta.solver = j.value("solver", "");
      file.meta.eps = j.value("eps", 0.0);
      file.meta.channelScale = j.value("channelScale", 1.0);
      file.meta.kind = j.value("kind", "");
      file.meta.referencePath = j.value("referencePath", "");
      file.meta.labels = j.value("labels", std::vector<std::string>{});
    }
  }
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::IoError, "empty embeddings file");
  const int width = static_cast<int>(split_csv_line(line).size()) - 1;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (static_cast<int>(cells.size()) != width + 1)
      throw Error(ErrorKind::IoError, "bad embeddings row width");
    file.ids.push_back(cells[0]);
    std::vector<double> row(width);
    for (int c = 0; c < width; ++c) row[c] = parse_double(cells[c + 1], path);
    rows.push_back(std::move(row));
  }
  file.rows.resize(rows.size(), width);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int c = 0; c < width; ++c) file.rows(i, c) = rows[i][c];
  return file;
}

void write_distance_csv(const std::string& path, const DistanceMatrix& D,
                        const std::vector<std::string>& ids) {
  const int N = static_cast<int>(D.entries.rows());
  if (static_cast<int>(ids.size()) != N)
    throw Error(ErrorKind::ShapeMismatch, "ids length mismatch");
  std::ofstream out = open_out(path);
  out << "id";
  for (const auto& id : ids) out << "," << id;
  out << "\n";
  for (int i = 0; i < N; ++i) {
    out << ids[i];
    for (int j = 0; j < N; ++j) out << "," << format_double(D.entries(i, j));
    out << "\n";
  }
}

void write_grid_csv(const std::string& path, const Matrix& grid) {
  std::ofstream out = open_out(path);
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.cols(); ++j)
      out << (j ? "," : "") << format_double(grid(i, j));
    out << "\n";
  }
}

Matrix read_grid_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, path));
    if (!rows.empty() && rows.back().size() != row.size())
      throw Error(ErrorKind::IoError, "ragged grid rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::IoError, "empty grid file " + path);
  Matrix g(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) g(i, j) = rows[i][j];
  return g;
}

PriceSeries read_prices_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::IoError, "empty prices file");
  std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "date")
    throw Error(ErrorKind::IoError, "prices header must be date,ticker1,...");
  PriceSeries ps;
  ps.tickers.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw Error(ErrorKind::IoError, "bad prices row width");
    ps.dates.push_back(cells[0]);
    std::vector<double> row(cells.size() - 1);
    for (std::size_t c = 1; c < cells.size(); ++c) row[c - 1] = parse_double(cells[c], path);
    rows.push_back(std::move(row));
  }
  ps.prices.resize(rows.size(), ps.tickers.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < rows[i].size(); ++c) ps.prices(i, c) = rows[i][c];
  ps.validate();
  return ps;
}

void write_prices_csv(const std::string& path, const PriceSeries& prices) {
  std::ofstream out = open_out(path);
  out << "date";
  for (const auto& t : prices.tickers) out << "," << t;
  out << "\n";
  for (Eigen::Index t = 0; t < prices.prices.rows(); ++t) {
    out << prices.dates[t];
    for (Eigen::Index c = 0; c < prices.prices.cols(); ++c)
      out << "," << format_double(prices.prices(t, c));
    out << "\n";
  }
}

void write_scores_csv(const std::string& path, const std::vector<double>& scores) {
  std::ofstream out = open_out(path);
  out << "repeat,score\n";
  for (std::size_t i = 0; i < scores.size(); ++i)
    out << i << "," << format_double(scores[i]) << "\n";
}

void write_assignments_csv(const std::string& path, const std::vector<std::string>& ids,
                           const std::vector<int>& clusters) {
  if (ids.size() != clusters.size())
    throw Error(ErrorKind::ShapeMismatch, "ids/clusters length mismatch");
  std::ofstream out = open_out(path);
  out << "id,cluster\n";
  for (std::size_t i = 0; i < ids.size(); ++i)
    out << ids[i] << "," << clusters[i] << "\n";
}

}  // namespace tlp
