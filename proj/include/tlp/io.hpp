#pragma once

#include <map>
#include <string>
#include <vector>

#include "tlp/embedding.hpp"
#include "tlp/finance.hpp"

namespace tlp {

// Signal CSV: header x1..xd,f1..fm with one support point per row; a
// trailing `w` column appears only when the weights are not uniform.
void write_signal_csv(const std::string& path, const TLpSignal& signal);
TLpSignal read_signal_csv(const std::string& path);

struct LabeledDataset {
  std::vector<TLpSignal> signals;
  std::vector<std::string> ids;         // file paths relative to the manifest
  std::vector<std::string> labelNames;  // per signal
  std::vector<int> labels;              // dense ids in labelNames sort order
};

// Dataset sidecar manifest: CSV `path,label` next to the signal files.
void write_dataset(const std::string& dir, const std::vector<TLpSignal>& signals,
                   const std::vector<std::string>& labels);
LabeledDataset read_dataset(const std::string& dir);

// Embeddings CSV: one row `id,<n*d spatial>,<n*m channel>` per signal, with a
// JSON sidecar (<path>.json) recording n, d, m, p, solver, eps, the reference
// file, and per-signal labels.
struct EmbeddingFileMeta {
  int n = 0, d = 0, m = 0;
  double p = 2.0;
  std::string solver;
  double eps = 0.0;
  double channelScale = 1.0;
  std::string kind;  // "lwp" | "ltlp"
  std::string referencePath;
  std::vector<std::string> labels;
};
void write_embeddings_csv(const std::string& path, const std::vector<std::string>& ids,
                          const std::vector<EmbeddingVector>& embeddings,
                          const EmbeddingFileMeta& meta);
struct EmbeddingFile {
  std::vector<std::string> ids;
  Matrix rows;  // N x (n*d + n*m)
  EmbeddingFileMeta meta;
};
EmbeddingFile read_embeddings_csv(const std::string& path);

// Square matrix CSV with an `id` header column.
void write_distance_csv(const std::string& path, const DistanceMatrix& D,
                        const std::vector<std::string>& ids);

// Headerless numeric CSV, row i / column j = value at (x_i, y_j).
void write_grid_csv(const std::string& path, const Matrix& grid);
Matrix read_grid_csv(const std::string& path);

// Wide price table: date,ticker1,...,tickern.
PriceSeries read_prices_csv(const std::string& path);
void write_prices_csv(const std::string& path, const PriceSeries& prices);

void write_scores_csv(const std::string& path, const std::vector<double>& scores);
void write_assignments_csv(const std::string& path, const std::vector<std::string>& ids,
                           const std::vector<int>& clusters);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace tlp
