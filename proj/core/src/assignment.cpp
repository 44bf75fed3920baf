#include "wltls/assignment.hpp"

#include <numeric>

#include "wltls/common.hpp"

namespace wltls {

ClassAssignment ClassAssignment::identity(uint32_t num_classes) {
  ClassAssignment a;
  a.class_to_path.resize(num_classes);
  std::iota(a.class_to_path.begin(), a.class_to_path.end(), 0);
  a.path_to_class = a.class_to_path;
  return a;
}

ClassAssignment ClassAssignment::random(uint32_t num_classes, uint64_t seed) {
  ClassAssignment a = identity(num_classes);
  a.seed = seed;
  std::mt19937_64 gen(detail::mix64(seed, 0x41535347ULL));
  detail::fisher_yates(a.class_to_path, gen);
  for (uint32_t c = 0; c < num_classes; ++c) {
    a.path_to_class[a.class_to_path[c]] = c;
  }
  return a;
}

ClassAssignment ClassAssignment::from_permutation(std::vector<uint32_t> class_to_path,
                                                  uint64_t seed) {
  const uint32_t k = static_cast<uint32_t>(class_to_path.size());
  ClassAssignment a;
  a.seed = seed;
  a.class_to_path = std::move(class_to_path);
  a.path_to_class.assign(k, UINT32_MAX);
  for (uint32_t c = 0; c < k; ++c) {
    const uint32_t p = a.class_to_path[c];
    if (p >= k || a.path_to_class[p] != UINT32_MAX) {
      throw error("assignment: not a permutation");
    }
    a.path_to_class[p] = c;
  }
  return a;
}

}  // namespace wltls
