#include "wltls/model.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <type_traits>

#include "wltls/common.hpp"

namespace wltls {

std::size_t WeightVector::nnz() const {
  if (is_sparse) return values.size();
  std::size_t n = 0;
  for (float w : dense) n += w != 0.0f;
  return n;
}

double WeightVector::max_abs() const {
  double m = 0.0;
  if (is_sparse) {
    for (float w : values) m = std::max(m, std::fabs(static_cast<double>(w)));
  } else {
    for (float w : dense) m = std::max(m, std::fabs(static_cast<double>(w)));
  }
  return m;
}

double WeightVector::dot(const SparseVector& x) const {
  if (!is_sparse) {
    return x.dot(std::span<const float>(dense));
  }
  double acc = 0.0;
  std::size_t i = 0;
  for (const auto& e : x) {
    while (i < indices.size() && indices[i] < e.index) ++i;
    if (i == indices.size()) break;
    if (indices[i] == e.index) acc += e.value * static_cast<double>(values[i]);
  }
  return acc;
}

WeightVector WeightVector::from_dense(std::vector<float> weights) {
  WeightVector v;
  v.is_sparse = false;
  v.dense = std::move(weights);
  return v;
}

WeightVector WeightVector::from_sparse(std::vector<uint32_t> indices,
                                       std::vector<float> values) {
  if (indices.size() != values.size()) {
    throw error("weight vector: index/value size mismatch");
  }
  for (std::size_t i = 1; i < indices.size(); ++i) {
    if (indices[i] <= indices[i - 1]) {
      throw error("weight vector: indices must be strictly increasing");
    }
  }
  WeightVector v;
  v.is_sparse = true;
  v.indices = std::move(indices);
  v.values = std::move(values);
  return v;
}

namespace {

bool bitwise_equal(const std::vector<float>& a, const std::vector<float>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(float)) == 0);
}

}  // namespace

bool operator==(const WeightVector& a, const WeightVector& b) {
  return a.is_sparse == b.is_sparse && a.indices == b.indices &&
         bitwise_equal(a.dense, b.dense) && bitwise_equal(a.values, b.values);
}

WltlsModel::WltlsModel(uint32_t slice_width, uint32_t dim, LossKind kind,
                       ClassAssignment assignment, std::vector<int64_t> label_map,
                       std::vector<WeightVector> edge_weights)
    : dim_(dim),
      loss_(kind),
      assignment_(std::move(assignment)),
      label_map_(std::move(label_map)),
      edges_(std::move(edge_weights)),
      graph_(TrellisGraph::build(static_cast<uint32_t>(label_map_.size()), slice_width)) {
  if (assignment_.num_classes() != graph_.num_classes()) {
    throw error("model: assignment size does not match the class count");
  }
  if (edges_.size() != graph_.edge_count()) {
    throw error("model: expected " + std::to_string(graph_.edge_count()) +
                " edge vectors, got " + std::to_string(edges_.size()));
  }
  for (const auto& v : edges_) {
    if (!v.is_sparse && v.dense.size() != dim_) {
      throw error("model: dense edge vector dimension mismatch");
    }
    if (v.is_sparse && !v.indices.empty() && v.indices.back() >= dim_) {
      throw error("model: sparse edge vector index out of range");
    }
  }
}

WltlsModel WltlsModel::assemble(const TrellisGraph& graph,
                                const ClassAssignment& assignment,
                                const MarginModel& learners, LossKind kind,
                                std::vector<int64_t> label_map) {
  if (learners.edge_count() != graph.edge_count()) {
    throw error("model: learner count does not match the edge count");
  }
  if (label_map.size() != graph.num_classes()) {
    throw error("model: label map size does not match the class count");
  }
  std::vector<WeightVector> edges;
  edges.reserve(graph.edge_count());
  for (uint32_t j = 0; j < graph.edge_count(); ++j) {
    const auto w = learners.weights(j);
    std::vector<float> dense(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) dense[i] = static_cast<float>(w[i]);
    edges.push_back(WeightVector::from_dense(std::move(dense)));
  }
  return WltlsModel(graph.slice_width(), learners.dim(), kind,
                    assignment, std::move(label_map), std::move(edges));
}

std::vector<double> WltlsModel::margins(const SparseVector& x) const {
  std::vector<double> f(edges_.size());
  for (std::size_t j = 0; j < edges_.size(); ++j) {
    f[j] = edges_[j].dot(x);
  }
  return f;
}

DecodeResult WltlsModel::decode(const SparseVector& x) const {
  return decode(x, loss_);
}

DecodeResult WltlsModel::decode(const SparseVector& x, LossKind kind) const {
  const std::vector<double> f = margins(x);
  return wltls::decode(graph_, assignment_, f, kind);
}

int64_t WltlsModel::predict_label(const SparseVector& x) const {
  return label_map_[decode(x).class_id];
}

bool operator==(const WltlsModel& a, const WltlsModel& b) {
  return a.num_classes() == b.num_classes() && a.slice_width() == b.slice_width() &&
         a.dim() == b.dim() && a.loss_kind() == b.loss_kind() &&
         a.assignment() == b.assignment() && a.label_map() == b.label_map() &&
         [&] {
           for (uint32_t j = 0; j < a.edge_count(); ++j) {
             if (!(a.edge_vector(j) == b.edge_vector(j))) return false;
           }
           return true;
         }();
}

// ---------------------------------------------------------------- file io

namespace {

constexpr char kMagic[5] = {'W', 'L', 'T', 'L', 'S'};

struct Writer {
  std::string buf;

  void bytes(const void* p, std::size_t n) {
    buf.append(static_cast<const char*>(p), n);
  }
  template <typename T>
  void put(T v) {
    static_assert(std::is_trivially_copyable_v<T>);
    bytes(&v, sizeof(v));
  }
};

struct Reader {
  const std::string& buf;
  std::size_t at = 0;

  void bytes(void* p, std::size_t n) {
    if (at + n > buf.size()) {
      throw error("model load: file is shorter than its header promises");
    }
    std::memcpy(p, buf.data() + at, n);
    at += n;
  }
  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    T v;
    bytes(&v, sizeof(v));
    return v;
  }
};

}  // namespace

void WltlsModel::save(const std::string& path) const {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.put<uint16_t>(kModelFormatVersion);
  w.put<uint32_t>(num_classes());
  w.put<uint32_t>(slice_width());
  w.put<uint32_t>(dim_);
  w.put<uint32_t>(static_cast<uint32_t>(edges_.size()));
  w.put<uint8_t>(static_cast<uint8_t>(loss_));
  w.put<uint64_t>(assignment_.seed);
  for (uint32_t p : assignment_.class_to_path) w.put<uint32_t>(p);
  for (int64_t l : label_map_) w.put<int64_t>(l);
  for (const auto& v : edges_) {
    w.put<uint8_t>(v.is_sparse ? 1 : 0);
    if (v.is_sparse) {
      w.put<uint32_t>(static_cast<uint32_t>(v.values.size()));
      if (!v.indices.empty()) {
        w.bytes(v.indices.data(), v.indices.size() * sizeof(uint32_t));
        w.bytes(v.values.data(), v.values.size() * sizeof(float));
      }
    } else {
      if (!v.dense.empty()) {
        w.bytes(v.dense.data(), v.dense.size() * sizeof(float));
      }
    }
  }

  const uint32_t crc = static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(w.buf.data()),
            static_cast<uInt>(w.buf.size())));
  w.put<uint32_t>(crc);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw error("cannot open '" + path + "' for writing");
  }
  out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
  if (!out) {
    throw error("write failed for '" + path + "'");
  }
}

WltlsModel WltlsModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw error("cannot open '" + path + "'");
  }
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (buf.size() < sizeof(kMagic) + sizeof(uint16_t) + sizeof(uint32_t)) {
    throw error("model load: '" + path + "' is too short to be a model file");
  }
  if (std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
    throw error("model load: '" + path + "' is not a model file (bad magic)");
  }

  const std::size_t payload = buf.size() - sizeof(uint32_t);
  uint32_t stored_crc = 0;
  std::memcpy(&stored_crc, buf.data() + payload, sizeof(stored_crc));
  const uint32_t actual_crc = static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(buf.data()), static_cast<uInt>(payload)));
  if (stored_crc != actual_crc) {
    throw error("model load: checksum mismatch in '" + path +
                "' (file is corrupt or truncated)");
  }

  Reader r{buf};
  r.at = sizeof(kMagic);
  const uint16_t version = r.get<uint16_t>();
  if (version != kModelFormatVersion) {
    throw error("model load: unsupported format version " + std::to_string(version) +
                " (this build reads version " + std::to_string(kModelFormatVersion) + ")");
  }
  const uint32_t k = r.get<uint32_t>();
  const uint32_t b = r.get<uint32_t>();
  const uint32_t d = r.get<uint32_t>();
  const uint32_t ell = r.get<uint32_t>();
  const uint8_t loss_tag = r.get<uint8_t>();
  if (loss_tag > static_cast<uint8_t>(LossKind::hamming_step)) {
    throw error("model load: unknown loss tag");
  }
  const uint64_t seed = r.get<uint64_t>();

  std::vector<uint32_t> perm(k);
  for (auto& p : perm) p = r.get<uint32_t>();
  std::vector<int64_t> label_map(k);
  for (auto& l : label_map) l = r.get<int64_t>();

  std::vector<WeightVector> edges;
  edges.reserve(ell);
  for (uint32_t j = 0; j < ell; ++j) {
    const uint8_t flag = r.get<uint8_t>();
    if (flag == 0) {
      std::vector<float> dense(d);
      if (d > 0) r.bytes(dense.data(), d * sizeof(float));
      edges.push_back(WeightVector::from_dense(std::move(dense)));
    } else if (flag == 1) {
      const uint32_t nnz = r.get<uint32_t>();
      std::vector<uint32_t> idx(nnz);
      std::vector<float> val(nnz);
      if (nnz > 0) {
        r.bytes(idx.data(), nnz * sizeof(uint32_t));
        r.bytes(val.data(), nnz * sizeof(float));
      }
      edges.push_back(WeightVector::from_sparse(std::move(idx), std::move(val)));
    } else {
      throw error("model load: unknown edge vector flag");
    }
  }
  if (r.at != payload) {
    throw error("model load: trailing bytes after the last edge vector");
  }

  WltlsModel model(b, d, static_cast<LossKind>(loss_tag),
                   ClassAssignment::from_permutation(std::move(perm), seed),
                   std::move(label_map), std::move(edges));
  if (model.num_classes() != k) {
    throw error("model load: class count mismatch");
  }
  if (model.edge_count() != ell) {
    throw error("model load: edge count does not match the rebuilt graph");
  }
  return model;
}

// ---------------------------------------------------------------- pruning

WltlsModel prune(const WltlsModel& model, double lambda) {
  if (!(lambda >= 0.0)) {
    throw error("prune: lambda must be non-negative");
  }
  std::vector<WeightVector> pruned;
  pruned.reserve(model.edge_count());
  for (uint32_t j = 0; j < model.edge_count(); ++j) {
    const WeightVector& v = model.edge_vector(j);
    std::vector<uint32_t> idx;
    std::vector<float> val;
    auto keep = [&](uint32_t index, float weight) {
      if (std::fabs(static_cast<double>(weight)) > lambda) {
        idx.push_back(index);
        val.push_back(weight);
      }
    };
    if (v.is_sparse) {
      for (std::size_t i = 0; i < v.indices.size(); ++i) keep(v.indices[i], v.values[i]);
    } else {
      for (uint32_t i = 0; i < v.dense.size(); ++i) keep(i, v.dense[i]);
    }
    pruned.push_back(WeightVector::from_sparse(std::move(idx), std::move(val)));
  }
  return WltlsModel(model.slice_width(), model.dim(), model.loss_kind(),
                    model.assignment(), model.label_map(), std::move(pruned));
}

namespace {

double holdout_accuracy(const WltlsModel& model, const Dataset& data, unsigned threads) {
  std::vector<char> hit(data.size(), 0);
  detail::parallel_for(data.size(), detail::resolve_threads(threads), [&](std::size_t i) {
    hit[i] = model.predict_label(data.x(i)) == data.original_label(data.y(i));
  });
  std::size_t correct = 0;
  for (char h : hit) correct += h;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace

std::pair<WltlsModel, PruneReport> tune_prune(const WltlsModel& model,
                                              const Dataset& validation,
                                              double max_degradation,
                                              unsigned threads) {
  if (max_degradation < 0.0) {
    throw error("tune_prune: max_degradation must be non-negative");
  }

  double max_weight = 0.0;
  for (uint32_t j = 0; j < model.edge_count(); ++j) {
    max_weight = std::max(max_weight, model.edge_vector(j).max_abs());
  }
  std::vector<double> grid{0.0};
  for (double v = 1e-4; v < max_weight; v *= 1.5) {
    grid.push_back(v);
  }

  const double base_accuracy = holdout_accuracy(model, validation, threads);

  double best_lambda = 0.0;
  double best_accuracy = base_accuracy;
  for (std::size_t i = grid.size(); i-- > 1;) {
    const WltlsModel candidate = prune(model, grid[i]);
    const double acc = holdout_accuracy(candidate, validation, threads);
    if (base_accuracy - acc <= max_degradation + 1e-12) {
      best_lambda = grid[i];
      best_accuracy = acc;
      break;
    }
  }

  WltlsModel result = prune(model, best_lambda);
  const ModelStats before = model_stats(model);
  const ModelStats after = model_stats(result);
  PruneReport report;
  report.lambda = best_lambda;
  report.nnz_before = before.nnz;
  report.nnz_after = after.nnz;
  report.accuracy_before = base_accuracy;
  report.accuracy_after = best_lambda == 0.0 ? base_accuracy : best_accuracy;
  report.bytes_before = before.bytes_sparse;
  report.bytes_after = after.bytes_sparse;
  return {std::move(result), report};
}

ModelStats model_stats(const WltlsModel& model, double avg_sample_nonzeros) {
  ModelStats s;
  for (uint32_t j = 0; j < model.edge_count(); ++j) {
    const std::size_t n = model.edge_vector(j).nnz();
    s.nnz += n;
    s.bytes_sparse += 5 + 8 * static_cast<uint64_t>(n);
  }
  const uint64_t ell = model.edge_count();
  s.bytes_dense = ell * static_cast<uint64_t>(model.dim()) * 4;
  s.decode_cost_estimate = avg_sample_nonzeros * static_cast<double>(ell) +
                           2.0 * static_cast<double>(ell) +
                           static_cast<double>(model.graph().vertex_count());
  return s;
}

}  // namespace wltls
