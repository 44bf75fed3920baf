#include "wltls/trellis.hpp"

#include <algorithm>
#include <string>

#include "wltls/common.hpp"

namespace wltls {

uint32_t Codeword::hamming_distance(const Codeword& other) const {
  if (bits.size() != other.bits.size()) {
    throw error("codeword: length mismatch");
  }
  uint32_t d = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    d += bits[i] != other.bits[i];
  }
  return d;
}

TrellisGraph TrellisGraph::build(uint32_t num_classes, uint32_t slice_width) {
  if (num_classes < 2) {
    throw error("trellis: need at least 2 classes");
  }
  if (slice_width < 2 || slice_width > num_classes) {
    throw error("trellis: slice width must be in [2, num_classes]");
  }
  const uint32_t b = slice_width;

  // Base-b digits of num_classes, least significant first.
  std::vector<uint32_t> digits;
  for (uint64_t rest = num_classes; rest > 0; rest /= b) {
    digits.push_back(static_cast<uint32_t>(rest % b));
  }

  TrellisGraph g;
  g.num_classes_ = num_classes;
  g.slice_width_ = b;

  // sink_counts[i]: vertices of slice i wired to the sink.
  std::vector<uint32_t> sink_counts;
  const bool power_of_b =
      digits.size() >= 2 && digits.back() == 1 &&
      std::all_of(digits.begin(), digits.end() - 1, [](uint32_t d) { return d == 0; });
  if (power_of_b) {
    // K == b^n: n slices of width b, the whole last slice exits to the sink.
    const std::size_t n = digits.size() - 1;
    g.slice_sizes_.assign(n, b);
    sink_counts.assign(n, 0);
    sink_counts.back() = b;
  } else {
    // One slice per digit; vertices of the last slice that do not reach the
    // sink are dropped, so its width is the leading digit.
    g.slice_sizes_.assign(digits.size(), b);
    g.slice_sizes_.back() = digits.back();
    sink_counts = digits;
  }
  const uint32_t n_slices = static_cast<uint32_t>(g.slice_sizes_.size());

  std::vector<uint32_t> slice_base(n_slices);
  uint32_t next_id = 1;
  for (uint32_t i = 0; i < n_slices; ++i) {
    slice_base[i] = next_id;
    next_id += g.slice_sizes_[i];
  }
  const uint32_t sink = next_id;
  const std::size_t n_vertices = sink + 1;

  for (uint32_t p = 0; p < g.slice_sizes_[0]; ++p) {
    g.edges_.push_back({kSource, slice_base[0] + p});
  }
  for (uint32_t i = 0; i < n_slices; ++i) {
    if (i + 1 < n_slices) {
      for (uint32_t tp = 0; tp < g.slice_sizes_[i]; ++tp) {
        for (uint32_t hp = 0; hp < g.slice_sizes_[i + 1]; ++hp) {
          g.edges_.push_back({slice_base[i] + tp, slice_base[i + 1] + hp});
        }
      }
    }
    for (uint32_t tp = 0; tp < sink_counts[i]; ++tp) {
      g.edges_.push_back({slice_base[i] + tp, sink});
    }
  }

  g.out_offsets_.assign(n_vertices + 1, 0);
  for (const Edge& e : g.edges_) {
    ++g.out_offsets_[e.tail + 1];
  }
  for (std::size_t v = 1; v <= n_vertices; ++v) {
    g.out_offsets_[v] += g.out_offsets_[v - 1];
  }
  g.out_ids_.resize(g.edges_.size());
  {
    std::vector<uint32_t> cursor(g.out_offsets_.begin(), g.out_offsets_.end() - 1);
    for (uint32_t id = 0; id < g.edges_.size(); ++id) {
      g.out_ids_[cursor[g.edges_[id].tail]++] = id;
    }
  }

  g.delta_.assign(n_vertices, UINT32_MAX);
  g.delta_[kSource] = 0;
  for (uint32_t v = 0; v < n_vertices; ++v) {
    if (g.delta_[v] == UINT32_MAX) continue;
    for (uint32_t id : g.out_edges(v)) {
      g.delta_[g.edges_[id].head] = std::min(g.delta_[g.edges_[id].head], g.delta_[v] + 1);
    }
  }

  g.paths_to_sink_.assign(n_vertices, 0);
  g.paths_to_sink_[sink] = 1;
  for (uint32_t v = static_cast<uint32_t>(n_vertices); v-- > 0;) {
    for (uint32_t id : g.out_edges(v)) {
      g.paths_to_sink_[v] += g.paths_to_sink_[g.edges_[id].head];
    }
  }

  g.max_tail_depth_ = 0;
  for (const Edge& e : g.edges_) {
    g.max_tail_depth_ = std::max(g.max_tail_depth_, g.delta_[e.tail]);
  }

  if (g.paths_to_sink_[kSource] != num_classes) {
    throw error("trellis: internal path count mismatch");
  }
  return g;
}

std::span<const uint32_t> TrellisGraph::out_edges(uint32_t vertex) const {
  return {out_ids_.data() + out_offsets_[vertex],
          out_ids_.data() + out_offsets_[vertex + 1]};
}

std::vector<uint32_t> TrellisGraph::s_set(uint32_t edge_id) const {
  if (edge_id >= edges_.size()) {
    throw error("s_set: edge id out of range");
  }
  const uint32_t depth = tail_depth(edge_id);
  const bool sink_edge = is_sink_edge(edge_id);
  std::vector<uint32_t> members;
  for (uint32_t id = 0; id < edges_.size(); ++id) {
    const uint32_t d = tail_depth(id);
    if (d == depth || (sink_edge && d > depth)) {
      members.push_back(id);
    }
  }
  return members;
}

uint64_t TrellisGraph::path_to_index(std::span<const uint32_t> path_edges) const {
  uint32_t at = kSource;
  uint64_t index = 0;
  for (uint32_t id : path_edges) {
    if (id >= edges_.size() || edges_[id].tail != at) {
      throw error("path_to_index: not a source-sink path");
    }
    for (uint32_t cand : out_edges(at)) {
      if (cand == id) break;
      index += paths_to_sink_[edges_[cand].head];
    }
    at = edges_[id].head;
  }
  if (at != sink()) {
    throw error("path_to_index: path does not end at the sink");
  }
  return index;
}

std::vector<uint32_t> TrellisGraph::index_to_path(uint64_t index) const {
  if (index >= num_classes_) {
    throw error("index_to_path: index " + std::to_string(index) + " out of range");
  }
  std::vector<uint32_t> path;
  uint32_t at = kSource;
  uint64_t rest = index;
  while (at != sink()) {
    for (uint32_t cand : out_edges(at)) {
      const uint64_t below = paths_to_sink_[edges_[cand].head];
      if (rest < below) {
        path.push_back(cand);
        at = edges_[cand].head;
        break;
      }
      rest -= below;
    }
  }
  return path;
}

Codeword TrellisGraph::codeword(uint64_t path_index) const {
  Codeword cw;
  cw.bits.assign(edge_count(), -1);
  for (uint32_t id : index_to_path(path_index)) {
    cw.bits[id] = 1;
  }
  return cw;
}

uint64_t count_paths(const TrellisGraph& graph) {
  std::vector<uint64_t> paths(graph.vertex_count(), 0);
  paths[graph.sink()] = 1;
  const auto& edges = graph.edges();
  // Edge ids ascend with tail depth, so a reverse sweep sees every head
  // finished before its tails.
  for (uint32_t id = static_cast<uint32_t>(edges.size()); id-- > 0;) {
    paths[edges[id].tail] += paths[edges[id].head];
  }
  return paths[TrellisGraph::kSource];
}

std::optional<uint32_t> min_hamming_distance(const TrellisGraph& graph,
                                             uint32_t max_classes) {
  const uint32_t k = graph.num_classes();
  if (k > max_classes) return std::nullopt;

  const std::size_t words = (graph.edge_count() + 63) / 64;
  std::vector<uint64_t> masks(k * words, 0);
  for (uint32_t c = 0; c < k; ++c) {
    for (uint32_t id : graph.index_to_path(c)) {
      masks[c * words + id / 64] |= uint64_t{1} << (id % 64);
    }
  }

  uint32_t best = UINT32_MAX;
  for (uint32_t a = 0; a < k; ++a) {
    for (uint32_t b = a + 1; b < k; ++b) {
      uint32_t d = 0;
      for (std::size_t w = 0; w < words; ++w) {
        d += static_cast<uint32_t>(
            __builtin_popcountll(masks[a * words + w] ^ masks[b * words + w]));
      }
      best = std::min(best, d);
    }
  }
  return best;
}

uint64_t edge_count_bound(uint32_t num_classes, uint32_t slice_width) {
  if (num_classes < 2 || slice_width < 2 || slice_width > num_classes) {
    throw error("edge_count_bound: bad parameters");
  }
  uint64_t n_slices = 0;
  for (uint64_t rest = num_classes; rest > 0; rest /= slice_width) {
    ++n_slices;
  }
  const uint64_t b = slice_width;
  return (b + 1) * n_slices * b + b;
}

}  // namespace wltls
