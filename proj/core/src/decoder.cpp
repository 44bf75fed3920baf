#include "wltls/decoder.hpp"

#include <algorithm>
#include <limits>

#include "wltls/common.hpp"

namespace wltls {

namespace {

inline double capped_loss(LossKind kind, double z, std::size_t& clamped) {
  const double v = loss(kind, z);
  if (v > kLossCap) {
    ++clamped;
    return kLossCap;
  }
  return v;
}

void check_margins(const TrellisGraph& graph, std::span<const double> margins) {
  if (margins.size() != graph.edge_count()) {
    throw error("decode: expected " + std::to_string(graph.edge_count()) +
                " margins, got " + std::to_string(margins.size()));
  }
}

}  // namespace

EdgeWeights edge_weights(const TrellisGraph& graph, std::span<const double> margins,
                         LossKind kind) {
  check_margins(graph, margins);
  const std::size_t ell = graph.edge_count();
  const uint32_t depths = graph.max_tail_depth() + 1;

  EdgeWeights out;
  out.weights.resize(ell);

  // depth_sum[s]: total negative-sign loss of the edges whose tail sits at
  // depth s. A forward edge owes its own depth's total, a sink edge owes
  // every depth from its own onward.
  std::vector<double> pos(ell), neg(ell);
  std::vector<double> depth_sum(depths, 0.0);
  for (std::size_t j = 0; j < ell; ++j) {
    pos[j] = capped_loss(kind, margins[j], out.clamped_terms);
    neg[j] = capped_loss(kind, -margins[j], out.clamped_terms);
    depth_sum[graph.tail_depth(static_cast<uint32_t>(j))] += neg[j];
  }
  std::vector<double> suffix_sum(depths + 1, 0.0);
  for (uint32_t s = depths; s-- > 0;) {
    suffix_sum[s] = suffix_sum[s + 1] + depth_sum[s];
  }
  for (std::size_t j = 0; j < ell; ++j) {
    const uint32_t id = static_cast<uint32_t>(j);
    const uint32_t s = graph.tail_depth(id);
    const double group = graph.is_sink_edge(id) ? suffix_sum[s] : depth_sum[s];
    out.weights[j] = pos[j] - neg[j] + group;
  }
  return out;
}

std::pair<std::vector<uint32_t>, double> shortest_path(const TrellisGraph& graph,
                                                       std::span<const double> weights) {
  if (weights.size() != graph.edge_count()) {
    throw error("shortest_path: weight count mismatch");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(graph.vertex_count(), kInf);
  std::vector<uint32_t> pred(graph.vertex_count(), UINT32_MAX);
  dist[TrellisGraph::kSource] = 0.0;

  // Edge ids ascend with tail depth, so one forward sweep relaxes the DAG;
  // strict improvement keeps the smallest predecessor edge id on ties.
  const auto& edges = graph.edges();
  for (uint32_t id = 0; id < edges.size(); ++id) {
    const double cand = dist[edges[id].tail] + weights[id];
    if (cand < dist[edges[id].head]) {
      dist[edges[id].head] = cand;
      pred[edges[id].head] = id;
    }
  }

  std::vector<uint32_t> path;
  for (uint32_t v = graph.sink(); v != TrellisGraph::kSource;) {
    const uint32_t id = pred[v];
    path.push_back(id);
    v = edges[id].tail;
  }
  std::reverse(path.begin(), path.end());
  return {std::move(path), dist[graph.sink()]};
}

DecodeResult decode(const TrellisGraph& graph, const ClassAssignment& assignment,
                    std::span<const double> margins, LossKind kind,
                    std::size_t* clamped_terms) {
  EdgeWeights ew = edge_weights(graph, margins, kind);
  if (clamped_terms != nullptr) *clamped_terms = ew.clamped_terms;
  auto [path, total] = shortest_path(graph, ew.weights);
  DecodeResult res;
  res.class_id = assignment.path_to_class[graph.path_to_index(path)];
  res.path = std::move(path);
  res.total_loss = total;
  return res;
}

DecodeResult decode_exhaustive(const TrellisGraph& graph,
                               const ClassAssignment& assignment,
                               std::span<const double> margins, LossKind kind,
                               uint32_t max_classes) {
  check_margins(graph, margins);
  const uint32_t k = graph.num_classes();
  if (k > max_classes) {
    throw error("decode_exhaustive: " + std::to_string(k) +
                " classes exceed the limit of " + std::to_string(max_classes));
  }

  const std::size_t ell = graph.edge_count();
  std::size_t clamped = 0;
  std::vector<char> on_path(ell, 0);

  DecodeResult best;
  double best_total = std::numeric_limits<double>::infinity();
  std::vector<uint32_t> best_path;
  for (uint32_t c = 0; c < k; ++c) {
    const std::vector<uint32_t> path = graph.index_to_path(assignment.class_to_path[c]);
    for (uint32_t id : path) on_path[id] = 1;
    double total = 0.0;
    for (std::size_t j = 0; j < ell; ++j) {
      total += capped_loss(kind, on_path[j] ? margins[j] : -margins[j], clamped);
    }
    for (uint32_t id : path) on_path[id] = 0;
    if (total < best_total) {
      best_total = total;
      best.class_id = c;
      best_path = path;
    }
  }
  best.path = std::move(best_path);
  best.total_loss = best_total;
  return best;
}

DecodeResult decode_heaviest(const TrellisGraph& graph,
                             const ClassAssignment& assignment,
                             std::span<const double> margins) {
  check_margins(graph, margins);
  std::vector<double> negated(margins.size());
  for (std::size_t j = 0; j < margins.size(); ++j) negated[j] = -margins[j];
  auto [path, total] = shortest_path(graph, negated);
  DecodeResult res;
  res.class_id = assignment.path_to_class[graph.path_to_index(path)];
  res.path = std::move(path);
  res.total_loss = -total;
  return res;
}

}  // namespace wltls
