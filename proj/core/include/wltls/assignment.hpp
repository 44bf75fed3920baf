#pragma once

#include <cstdint>
#include <vector>

namespace wltls {

// Bijection between class ids and path indices. The permutation is stored
// explicitly; the seed is kept for reporting and serialization.
struct ClassAssignment {
  uint64_t seed = 0;
  std::vector<uint32_t> class_to_path;
  std::vector<uint32_t> path_to_class;

  uint32_t num_classes() const { return static_cast<uint32_t>(class_to_path.size()); }

  static ClassAssignment identity(uint32_t num_classes);
  static ClassAssignment random(uint32_t num_classes, uint64_t seed);
  // Rebuilds the inverse side from an explicit permutation.
  static ClassAssignment from_permutation(std::vector<uint32_t> class_to_path,
                                          uint64_t seed);

  bool operator==(const ClassAssignment&) const = default;
};

}  // namespace wltls
