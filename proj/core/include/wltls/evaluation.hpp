#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "wltls/dataset.hpp"
#include "wltls/loss.hpp"
#include "wltls/model.hpp"

namespace wltls {

// Fraction of samples whose predicted original label matches the sample's
// original label; datasets never need relabeling to the model's class ids.
double accuracy(const WltlsModel& model, const Dataset& data, LossKind kind,
                unsigned threads = 0);
double accuracy(const WltlsModel& model, const Dataset& data, unsigned threads = 0);

// Average per-edge binary loss over the dataset: mean over samples and
// edges of L(sign * margin), the sign taken from the true class's path.
// Every sample's label must be known to the model.
double avg_binary_loss(const WltlsModel& model, const Dataset& data, LossKind kind,
                       unsigned threads = 0);

// Multiclass training error bound: ell * epsilon / (rho * L(0)).
double error_bound(std::size_t ell, double epsilon, uint32_t rho, LossKind kind);

struct SweepConfig {
  std::vector<uint32_t> slice_widths;
  TrainConfig train;
  // Loss used for test-set decoding and stored in the swept models.
  LossKind decode_loss = LossKind::exponential;
  // Loss used for epsilon, the bound, and the bound-side training accuracy.
  LossKind bound_loss = LossKind::squared_hinge;
  uint32_t rho = 4;
};

struct SweepRow {
  uint32_t b = 0;
  uint32_t ell = 0;
  // Training accuracy under bound_loss decoding, so the bound applies to
  // 1 - train_acc directly.
  double train_acc = 0.0;
  double test_acc = 0.0;
  double eps = 0.0;
  double bound = 0.0;
  uint64_t bytes_dense = 0;
  uint64_t bytes_sparse = 0;
  double train_s = 0.0;
  double decode_us_per_query = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
};

// Trains and evaluates one model per slice width, in the given order.
SweepReport sweep(const Dataset& train, const Dataset& test, const SweepConfig& config);

void write_csv(const SweepReport& report, std::ostream& out);

// Slice width where the bound stops improving: the first row whose
// successor's bound is larger, else the last row.
uint32_t select_b(const SweepReport& report);

}  // namespace wltls
