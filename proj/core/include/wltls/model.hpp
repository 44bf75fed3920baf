#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wltls/arow.hpp"
#include "wltls/assignment.hpp"
#include "wltls/dataset.hpp"
#include "wltls/decoder.hpp"
#include "wltls/loss.hpp"
#include "wltls/trellis.hpp"

namespace wltls {

inline constexpr uint16_t kModelFormatVersion = 1;

// Per-edge weight vector, stored dense or as index/value pairs. Values are
// 32-bit floats, matching the on-disk layout bit for bit.
struct WeightVector {
  bool is_sparse = false;
  std::vector<float> dense;
  std::vector<uint32_t> indices;
  std::vector<float> values;

  std::size_t nnz() const;
  double max_abs() const;
  double dot(const SparseVector& x) const;

  static WeightVector from_dense(std::vector<float> weights);
  static WeightVector from_sparse(std::vector<uint32_t> indices,
                                  std::vector<float> values);
};

bool operator==(const WeightVector& a, const WeightVector& b);

// Everything needed to predict: graph parameters, class assignment, label
// map and the per-edge weights. The graph itself is rebuilt from
// (num_classes, slice_width) and never serialized.
class WltlsModel {
 public:
  WltlsModel(uint32_t slice_width, uint32_t dim, LossKind kind,
             ClassAssignment assignment, std::vector<int64_t> label_map,
             std::vector<WeightVector> edge_weights);

  static WltlsModel assemble(const TrellisGraph& graph,
                             const ClassAssignment& assignment,
                             const MarginModel& learners, LossKind kind,
                             std::vector<int64_t> label_map);

  uint32_t num_classes() const { return graph_.num_classes(); }
  uint32_t slice_width() const { return graph_.slice_width(); }
  uint32_t dim() const { return dim_; }
  std::size_t edge_count() const { return edges_.size(); }
  LossKind loss_kind() const { return loss_; }
  const TrellisGraph& graph() const { return graph_; }
  const ClassAssignment& assignment() const { return assignment_; }
  const std::vector<int64_t>& label_map() const { return label_map_; }
  const WeightVector& edge_vector(uint32_t edge_id) const { return edges_[edge_id]; }

  std::vector<double> margins(const SparseVector& x) const;
  DecodeResult decode(const SparseVector& x) const;
  DecodeResult decode(const SparseVector& x, LossKind kind) const;
  int64_t predict_label(const SparseVector& x) const;

  void save(const std::string& path) const;
  static WltlsModel load(const std::string& path);

 private:
  uint32_t dim_;
  LossKind loss_;
  ClassAssignment assignment_;
  std::vector<int64_t> label_map_;
  std::vector<WeightVector> edges_;
  TrellisGraph graph_;
};

bool operator==(const WltlsModel& a, const WltlsModel& b);

// Copy of the model with every weight of magnitude <= lambda zeroed and all
// vectors stored sparse.
WltlsModel prune(const WltlsModel& model, double lambda);

struct PruneReport {
  double lambda = 0.0;
  std::size_t nnz_before = 0;
  std::size_t nnz_after = 0;
  double accuracy_before = 0.0;
  double accuracy_after = 0.0;
  uint64_t bytes_before = 0;
  uint64_t bytes_after = 0;
};

// Largest lambda from a geometric grid (0 and 1e-4 * 1.5^i, capped at the
// largest weight magnitude) whose validation accuracy drop stays within
// max_degradation. Accuracy uses the model's own decode loss.
std::pair<WltlsModel, PruneReport> tune_prune(const WltlsModel& model,
                                              const Dataset& validation,
                                              double max_degradation = 0.01,
                                              unsigned threads = 0);

struct ModelStats {
  std::size_t nnz = 0;
  uint64_t bytes_dense = 0;
  uint64_t bytes_sparse = 0;
  double decode_cost_estimate = 0.0;
};

// avg_sample_nonzeros scales the margin part of the decode cost estimate;
// pass a dataset's average nonzero count to make it concrete.
ModelStats model_stats(const WltlsModel& model, double avg_sample_nonzeros = 0.0);

}  // namespace wltls
