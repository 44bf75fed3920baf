#pragma once

#include <cstdint>

#include "wltls/dataset.hpp"

namespace wltls {

// Clusterable sparse multiclass data: every class owns a random sparse
// center of unit norm; a sample is its class's center plus Gaussian noise on
// the support and a few background features, renormalized to unit length.
// Classes appear round-robin; original labels are 1..classes.
//
// With clusters > 0 the classes are grouped round-robin into that many
// clusters. Each cluster owns shared_support features whose center values
// all members reuse, and every class keeps support_per_class -
// shared_support private features of its own, so siblings are only
// distinguishable by the private remainder — the overlap structure of
// real-world label sets.
struct SyntheticConfig {
  uint32_t classes = 105;
  uint32_t features = 3000;
  std::size_t samples = 9000;
  uint32_t support_per_class = 40;
  uint32_t background_features = 10;
  double noise = 0.4;
  uint64_t seed = 7;
  uint32_t clusters = 0;
  uint32_t shared_support = 0;
};

Dataset make_synthetic(const SyntheticConfig& config);

}  // namespace wltls
