#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "wltls/assignment.hpp"
#include "wltls/loss.hpp"
#include "wltls/trellis.hpp"

namespace wltls {

// Per-term losses are capped at this value before any summation so that an
// extreme exponential-loss margin cannot poison a whole path total.
inline constexpr double kLossCap = 1e300;

struct EdgeWeights {
  std::vector<double> weights;
  // Number of per-term losses that hit kLossCap.
  std::size_t clamped_terms = 0;
};

struct DecodeResult {
  uint32_t class_id = 0;
  std::vector<uint32_t> path;
  // Sum over all edges of the loss the winning codeword incurs; for
  // decode_heaviest it is the winning path's margin sum instead.
  double total_loss = 0.0;
};

// Edge weights whose path totals reproduce the codeword loss exactly: each
// edge pays its own positive-sign loss plus the negative-sign losses of the
// rest of its group, accumulated through per-depth sums and suffix sums.
EdgeWeights edge_weights(const TrellisGraph& graph, std::span<const double> margins,
                         LossKind kind);

// Minimum-weight source-sink path; ties go to the smaller predecessor edge
// id. Returns the path (edge ids, source to sink) and its total.
std::pair<std::vector<uint32_t>, double> shortest_path(const TrellisGraph& graph,
                                                       std::span<const double> weights);

DecodeResult decode(const TrellisGraph& graph, const ClassAssignment& assignment,
                    std::span<const double> margins, LossKind kind,
                    std::size_t* clamped_terms = nullptr);

// Literal per-class codeword loss minimization, one term per edge, no
// shortcuts. Ties go to the smaller class id. Refuses above max_classes.
DecodeResult decode_exhaustive(const TrellisGraph& graph,
                               const ClassAssignment& assignment,
                               std::span<const double> margins, LossKind kind,
                               uint32_t max_classes = 1u << 20);

// Maximum-margin-sum path (longest path on the raw margins).
DecodeResult decode_heaviest(const TrellisGraph& graph,
                             const ClassAssignment& assignment,
                             std::span<const double> margins);

}  // namespace wltls
