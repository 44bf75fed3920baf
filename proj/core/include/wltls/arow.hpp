#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wltls/assignment.hpp"
#include "wltls/dataset.hpp"
#include "wltls/trellis.hpp"

namespace wltls {

// Adaptive regularization of weight vectors with a diagonal covariance.
class ArowState {
 public:
  ArowState(uint32_t dim, double r);

  // One online step on (x, y) with y in {-1, +1}. Updates only when the
  // margin y * (mean . x) falls below 1. Returns whether it updated.
  bool update(const SparseVector& x, int y);

  double margin(const SparseVector& x) const { return x.dot(mean_); }

  uint32_t dim() const { return static_cast<uint32_t>(mean_.size()); }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& variance() const { return variance_; }

 private:
  std::vector<double> mean_;
  std::vector<double> variance_;
  double r_;
};

struct TrainConfig {
  uint32_t epochs = 5;
  double r = 1.0;
  uint64_t seed = 0;
  // 0 picks the hardware concurrency. Results do not depend on this value.
  uint32_t threads = 1;
};

// Final mean weight vectors of the per-edge learners.
class MarginModel {
 public:
  MarginModel() = default;
  MarginModel(uint32_t dim, std::vector<std::vector<double>> weights);

  uint32_t dim() const { return dim_; }
  std::size_t edge_count() const { return weights_.size(); }
  std::span<const double> weights(uint32_t edge_id) const { return weights_[edge_id]; }

  // All per-edge margins f_j(x) = w_j . x.
  std::vector<double> margins(const SparseVector& x) const;

 private:
  uint32_t dim_ = 0;
  std::vector<std::vector<double>> weights_;
};

// Sign the class's path assigns to an edge: +1 iff the edge lies on the path
// of the class. Derived from the assignment and graph on demand.
int binary_label(const ClassAssignment& assignment, const TrellisGraph& graph,
                 uint32_t class_id, uint32_t edge_id);

// Trains one learner per edge. Learners are independent; each one makes
// config.epochs passes over the data in its own per-epoch shuffle order
// seeded by (config.seed, edge id, epoch), so the result is identical for
// any thread count.
MarginModel train_all(const Dataset& data, const TrellisGraph& graph,
                      const ClassAssignment& assignment, const TrainConfig& config);

namespace detail {
unsigned resolve_threads(uint32_t requested);
// Runs fn(0) .. fn(n-1) on a small thread pool. Tasks must be independent.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn);
}  // namespace detail

}  // namespace wltls
