#include "wltls/arow.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <numeric>
#include <thread>

#include "wltls/common.hpp"

namespace wltls {

ArowState::ArowState(uint32_t dim, double r) : r_(r) {
  if (r <= 0.0) {
    throw error("arow: regularization r must be positive");
  }
  mean_.assign(dim, 0.0);
  variance_.assign(dim, 1.0);
}

bool ArowState::update(const SparseVector& x, int y) {
  const double m = y * margin(x);
  if (m >= 1.0) return false;

  double confidence = 0.0;
  for (const auto& e : x) {
    confidence += variance_[e.index] * e.value * e.value;
  }
  const double beta = 1.0 / (confidence + r_);
  const double alpha = (1.0 - m) * beta;
  for (const auto& e : x) {
    const double vx = variance_[e.index] * e.value;
    mean_[e.index] += alpha * y * vx;
    variance_[e.index] -= beta * vx * vx;
  }
  return true;
}

MarginModel::MarginModel(uint32_t dim, std::vector<std::vector<double>> weights)
    : dim_(dim), weights_(std::move(weights)) {
  for (const auto& w : weights_) {
    if (w.size() != dim_) {
      throw error("margin model: weight vector dimension mismatch");
    }
  }
}

std::vector<double> MarginModel::margins(const SparseVector& x) const {
  std::vector<double> f(weights_.size());
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    f[j] = x.dot(weights_[j]);
  }
  return f;
}

int binary_label(const ClassAssignment& assignment, const TrellisGraph& graph,
                 uint32_t class_id, uint32_t edge_id) {
  if (class_id >= assignment.num_classes()) {
    throw error("binary_label: class id out of range");
  }
  for (uint32_t id : graph.index_to_path(assignment.class_to_path[class_id])) {
    if (id == edge_id) return 1;
  }
  return -1;
}

namespace detail {

unsigned resolve_threads(uint32_t requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& fn) {
  threads = static_cast<unsigned>(
      std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(1, n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

namespace {

bool path_contains(const std::vector<uint32_t>& sorted_path, uint32_t edge_id) {
  return std::binary_search(sorted_path.begin(), sorted_path.end(), edge_id);
}

}  // namespace

MarginModel train_all(const Dataset& data, const TrellisGraph& graph,
                      const ClassAssignment& assignment, const TrainConfig& config) {
  if (assignment.num_classes() != data.num_classes() ||
      assignment.num_classes() != graph.num_classes()) {
    throw error("train_all: class count mismatch between data, graph and assignment");
  }
  if (config.epochs == 0) {
    throw error("train_all: epochs must be positive");
  }

  const std::size_t ell = graph.edge_count();
  const std::size_t m = data.size();

  // Path edge ids per class, sorted; the whole sign matrix stays implicit.
  std::vector<std::vector<uint32_t>> class_paths(data.num_classes());
  for (uint32_t c = 0; c < data.num_classes(); ++c) {
    class_paths[c] = graph.index_to_path(assignment.class_to_path[c]);
    std::sort(class_paths[c].begin(), class_paths[c].end());
  }

  std::vector<std::vector<double>> weights(ell);
  detail::parallel_for(ell, detail::resolve_threads(config.threads), [&](std::size_t j) {
    ArowState state(data.num_features(), config.r);
    std::vector<std::size_t> order(m);
    for (uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
      std::iota(order.begin(), order.end(), 0);
      std::mt19937_64 gen(detail::mix64(config.seed, j, epoch));
      detail::fisher_yates(order, gen);
      for (std::size_t i : order) {
        const int y = path_contains(class_paths[data.y(i)], static_cast<uint32_t>(j))
                          ? 1
                          : -1;
        state.update(data.x(i), y);
      }
    }
    weights[j] = state.mean();
  });

  return MarginModel(data.num_features(), std::move(weights));
}

}  // namespace wltls
