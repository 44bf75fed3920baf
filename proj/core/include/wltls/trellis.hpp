#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace wltls {

// Sign codeword over the edge set: bits[j] is +1 iff edge j lies on the path.
struct Codeword {
  std::vector<int8_t> bits;

  uint32_t hamming_distance(const Codeword& other) const;
};

// Layered DAG from source to sink whose source-sink paths enumerate the
// classes. Vertices are arranged in inner slices of at most `slice_width`
// vertices; every path crosses the slices in order and exits to the sink
// from the vertex where its class's digit sequence ends.
//
// Vertex ids: 0 is the source, inner vertices follow slice-major, the sink
// is last. Edge ids are assigned slice-major as well: source edges first,
// then per slice the forward edges ordered by (tail position, head
// position) followed by that slice's sink edges ordered by tail position.
class TrellisGraph {
 public:
  struct Edge {
    uint32_t tail;
    uint32_t head;
  };

  static constexpr uint32_t kSource = 0;

  // Requires 2 <= slice_width <= num_classes.
  static TrellisGraph build(uint32_t num_classes, uint32_t slice_width);

  uint32_t num_classes() const { return num_classes_; }
  uint32_t slice_width() const { return slice_width_; }
  uint32_t num_slices() const { return static_cast<uint32_t>(slice_sizes_.size()); }

  std::size_t edge_count() const { return edges_.size(); }
  std::size_t vertex_count() const { return delta_.size(); }
  uint32_t sink() const { return static_cast<uint32_t>(vertex_count() - 1); }

  const Edge& edge(uint32_t id) const { return edges_[id]; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const uint32_t> out_edges(uint32_t vertex) const;

  // Shortest edge-distance from the source.
  uint32_t delta(uint32_t vertex) const { return delta_[vertex]; }
  uint64_t paths_to_sink(uint32_t vertex) const { return paths_to_sink_[vertex]; }

  bool is_sink_edge(uint32_t edge_id) const { return edges_[edge_id].head == sink(); }
  uint32_t tail_depth(uint32_t edge_id) const { return delta_[edges_[edge_id].tail]; }
  // Largest tail depth over all edges; tail depths partition the edges into
  // the groups the decoder works with.
  uint32_t max_tail_depth() const { return max_tail_depth_; }

  // Edges sharing this edge's low-order side: for a forward edge, every edge
  // whose tail sits at the same depth; for a sink edge, every edge whose
  // tail sits at the same depth or deeper. Sorted by edge id, always
  // contains edge_id itself.
  std::vector<uint32_t> s_set(uint32_t edge_id) const;

  // Bijection between source-sink paths (as edge id sequences) and
  // [0, num_classes): mixed-radix ranking by per-vertex path counts; the
  // lexicographically first path gets index 0.
  uint64_t path_to_index(std::span<const uint32_t> path_edges) const;
  std::vector<uint32_t> index_to_path(uint64_t index) const;

  Codeword codeword(uint64_t path_index) const;

 private:
  uint32_t num_classes_ = 0;
  uint32_t slice_width_ = 0;
  uint32_t max_tail_depth_ = 0;
  std::vector<uint32_t> slice_sizes_;
  std::vector<Edge> edges_;
  std::vector<uint32_t> delta_;
  std::vector<uint64_t> paths_to_sink_;
  // CSR-style adjacency of out-edges, ids ascending per vertex.
  std::vector<uint32_t> out_offsets_;
  std::vector<uint32_t> out_ids_;
};

// Recounts the source-sink paths with a fresh DP over the edge list.
uint64_t count_paths(const TrellisGraph& graph);

// Exact minimum pairwise Hamming distance over all class codewords, by
// brute force. Returns nullopt when num_classes exceeds max_classes.
std::optional<uint32_t> min_hamming_distance(const TrellisGraph& graph,
                                             uint32_t max_classes = 4096);

// Upper bound on the number of edges of build(num_classes, slice_width).
uint64_t edge_count_bound(uint32_t num_classes, uint32_t slice_width);

}  // namespace wltls
