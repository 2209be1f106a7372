#pragma once

#include <vector>

#include "tlp/metric.hpp"

namespace tlp {

enum class ReferenceKind { WP, TLP };

// (sigma, h): for WP the channel block is empty and only the measure matters.
struct ReferenceSignal {
  DiscreteMeasure measure;
  Matrix values;  // n x m, n x 0 for WP
  ReferenceKind kind = ReferenceKind::TLP;

  TLpSignal asSignal() const { return TLpSignal{measure, values}; }
};

// Averaging recipe over signals sharing one support grid.
// WP: sigma = renormalized mean of the input weights, no channel block.
// TLP: sigma = the common base measure, h = pointwise mean of the values.
ReferenceSignal build_reference(const std::vector<TLpSignal>& signals, ReferenceKind kind);

// One transport solve against the reference:
//   spatial_j = (T(x_j) - x_j) rho_j^(1/p)
//   channel_j = (f(T(x_j)) - h(x_j)) rho_j^(1/p)   (TLP kind only)
EmbeddingVector embed(const TLpSignal& signal, const ReferenceSignal& ref, double p,
                      const SolveOptions& opts = {}, double channelScale = 1.0);

// entry(i,j) = |v_i - v_j|_p on the stored (already rho-weighted) vectors.
DistanceMatrix pairwise_linear_distances(const std::vector<EmbeddingVector>& embeddings);

double lp_norm(const Vector& v, double p);

}  // namespace tlp
