#pragma once

#include "tlp/analysis.hpp"
#include "tlp/embedding.hpp"

namespace tlp {

// Point i moves to (1-t)x_i + t*T(x_i) and its value to
// (1-t)h(x_i) + t*f(T(x_i)); weights stay put. `map` must be the lifted map
// on ref's support (images in R^(d+m)).
TLpSignal interpolate(const ReferenceSignal& ref, const TransportMap& map, double t);

// Two-step inverse: lifted atoms v_i/rho_i^(1/p) + (x_i, h(x_i)), then
// projection onto signals by grouping atoms that share a spatial location
// (coordinates rounded to 1e-9) and averaging their channel values by weight.
TLpSignal invert_embedding(const EmbeddingVector& v, const ReferenceSignal& ref,
                           double channelScale = 1.0);

// PCA sweep: invert mean + s*sqrt(lambda_k)*e_k for each s in stddevs.
std::vector<TLpSignal> mode_sweep(const std::vector<EmbeddingVector>& embeddings,
                                  int componentIndex, const std::vector<double>& stddevs,
                                  const ReferenceSignal& ref, double channelScale = 1.0);

}  // namespace tlp
