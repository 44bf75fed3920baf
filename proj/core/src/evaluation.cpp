#include "wltls/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>
#include <unordered_map>

#include "wltls/common.hpp"

namespace wltls {

namespace {

double fraction_correct(const WltlsModel& model, const Dataset& data, LossKind kind,
                        unsigned threads) {
  if (data.size() == 0) {
    throw error("accuracy: empty dataset");
  }
  std::vector<char> hit(data.size(), 0);
  detail::parallel_for(data.size(), detail::resolve_threads(threads), [&](std::size_t i) {
    const DecodeResult res = model.decode(data.x(i), kind);
    hit[i] = model.label_map()[res.class_id] == data.original_label(data.y(i));
  });
  std::size_t correct = 0;
  for (char h : hit) correct += h;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

// class id in the model for each dataset class id; throws on unknown labels.
std::vector<uint32_t> model_class_of(const WltlsModel& model, const Dataset& data) {
  std::unordered_map<int64_t, uint32_t> by_label;
  for (uint32_t c = 0; c < model.num_classes(); ++c) {
    by_label.emplace(model.label_map()[c], c);
  }
  std::vector<uint32_t> mapped(data.num_classes());
  for (uint32_t c = 0; c < data.num_classes(); ++c) {
    const auto it = by_label.find(data.original_label(c));
    if (it == by_label.end()) {
      throw error("avg_binary_loss: label " + std::to_string(data.original_label(c)) +
                  " is not in the model");
    }
    mapped[c] = it->second;
  }
  return mapped;
}

}  // namespace

double accuracy(const WltlsModel& model, const Dataset& data, LossKind kind,
                unsigned threads) {
  return fraction_correct(model, data, kind, threads);
}

double accuracy(const WltlsModel& model, const Dataset& data, unsigned threads) {
  return fraction_correct(model, data, model.loss_kind(), threads);
}

double avg_binary_loss(const WltlsModel& model, const Dataset& data, LossKind kind,
                       unsigned threads) {
  if (data.size() == 0) {
    throw error("avg_binary_loss: empty dataset");
  }
  const std::vector<uint32_t> mapped = model_class_of(model, data);
  const TrellisGraph& graph = model.graph();
  const std::size_t ell = graph.edge_count();

  std::vector<std::vector<uint32_t>> class_paths(model.num_classes());
  for (uint32_t c = 0; c < model.num_classes(); ++c) {
    class_paths[c] = graph.index_to_path(model.assignment().class_to_path[c]);
    std::sort(class_paths[c].begin(), class_paths[c].end());
  }

  std::vector<double> per_sample(data.size(), 0.0);
  detail::parallel_for(data.size(), detail::resolve_threads(threads), [&](std::size_t i) {
    const std::vector<double> f = model.margins(data.x(i));
    const std::vector<uint32_t>& path = class_paths[mapped[data.y(i)]];
    double total = 0.0;
    std::size_t p = 0;
    for (std::size_t j = 0; j < ell; ++j) {
      const bool on_path = p < path.size() && path[p] == j;
      if (on_path) ++p;
      total += loss(kind, on_path ? f[j] : -f[j]);
    }
    per_sample[i] = total;
  });

  double sum = 0.0;
  for (double v : per_sample) sum += v;
  return sum / (static_cast<double>(data.size()) * static_cast<double>(ell));
}

double error_bound(std::size_t ell, double epsilon, uint32_t rho, LossKind kind) {
  if (rho == 0) {
    throw error("error_bound: rho must be positive");
  }
  const double at_zero = loss_at_zero(kind);
  if (at_zero <= 0.0) {
    throw error("error_bound: loss has L(0) = 0");
  }
  return static_cast<double>(ell) * epsilon / (static_cast<double>(rho) * at_zero);
}

SweepReport sweep(const Dataset& train, const Dataset& test, const SweepConfig& config) {
  if (config.slice_widths.empty()) {
    throw error("sweep: no slice widths given");
  }
  for (std::size_t i = 0; i < config.slice_widths.size(); ++i) {
    for (std::size_t j = i + 1; j < config.slice_widths.size(); ++j) {
      if (config.slice_widths[i] == config.slice_widths[j]) {
        throw error("sweep: duplicate slice width " +
                    std::to_string(config.slice_widths[i]));
      }
    }
  }
  SweepReport report;
  for (uint32_t b : config.slice_widths) {
    const TrellisGraph graph = TrellisGraph::build(train.num_classes(), b);
    const ClassAssignment assignment =
        ClassAssignment::random(train.num_classes(), config.train.seed);

    const auto t0 = std::chrono::steady_clock::now();
    const MarginModel learners = train_all(train, graph, assignment, config.train);
    const auto t1 = std::chrono::steady_clock::now();

    const WltlsModel model = WltlsModel::assemble(graph, assignment, learners,
                                                  config.decode_loss, train.label_map());

    SweepRow row;
    row.b = b;
    row.ell = static_cast<uint32_t>(graph.edge_count());
    row.train_s = std::chrono::duration<double>(t1 - t0).count();
    row.train_acc = accuracy(model, train, config.bound_loss, config.train.threads);
    row.eps = avg_binary_loss(model, train, config.bound_loss, config.train.threads);
    row.bound = error_bound(graph.edge_count(), row.eps, config.rho, config.bound_loss);

    const auto d0 = std::chrono::steady_clock::now();
    std::size_t correct = 0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const DecodeResult res = model.decode(test.x(i), config.decode_loss);
      correct += model.label_map()[res.class_id] == test.original_label(test.y(i));
    }
    const auto d1 = std::chrono::steady_clock::now();
    row.test_acc = static_cast<double>(correct) / static_cast<double>(test.size());
    row.decode_us_per_query = std::chrono::duration<double, std::micro>(d1 - d0).count() /
                              static_cast<double>(test.size());

    const ModelStats stats = model_stats(model, train.stats().avg_nonzeros);
    row.bytes_dense = stats.bytes_dense;
    row.bytes_sparse = stats.bytes_sparse;
    report.rows.push_back(row);
  }
  return report;
}

void write_csv(const SweepReport& report, std::ostream& out) {
  out << "b,ell,train_acc,test_acc,eps,bound,bytes_dense,bytes_sparse,train_s,"
         "decode_us_per_query\n";
  for (const SweepRow& r : report.rows) {
    out << r.b << ',' << r.ell << ',' << r.train_acc << ',' << r.test_acc << ','
        << r.eps << ',' << r.bound << ',' << r.bytes_dense << ',' << r.bytes_sparse
        << ',' << r.train_s << ',' << r.decode_us_per_query << '\n';
  }
}

uint32_t select_b(const SweepReport& report) {
  if (report.rows.empty()) {
    throw error("select_b: empty report");
  }
  for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
    if (report.rows[i + 1].bound > report.rows[i].bound) {
      return report.rows[i].b;
    }
  }
  return report.rows.back().b;
}

}  // namespace wltls
