#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wltls {

struct FeatureEntry {
  uint32_t index;
  double value;
};

// Sorted sparse feature vector: indices strictly increasing, no stored zeros.
class SparseVector {
 public:
  SparseVector() = default;

  // Validates ordering and uniqueness, drops zero values.
  static SparseVector from_entries(std::vector<FeatureEntry> entries);

  std::size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const FeatureEntry& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  // One past the largest index, 0 if empty.
  uint32_t extent() const {
    return entries_.empty() ? 0 : entries_.back().index + 1;
  }

  double dot(std::span<const double> dense) const;
  double dot(std::span<const float> dense) const;

  bool operator==(const SparseVector&) const = default;

 private:
  std::vector<FeatureEntry> entries_;
};

inline bool operator==(const FeatureEntry& a, const FeatureEntry& b) {
  return a.index == b.index && a.value == b.value;
}

enum class IndexBase : uint32_t { zero = 0, one = 1 };

struct DatasetStats {
  std::size_t samples = 0;
  uint32_t features = 0;
  uint32_t classes = 0;
  double avg_nonzeros = 0.0;
};

// Immutable multiclass dataset. Labels are remapped to contiguous class ids
// in first-seen order; the original integer labels are kept in label_map.
class Dataset {
 public:
  Dataset() = default;

  static Dataset parse_libsvm(std::istream& in, IndexBase base = IndexBase::one);
  // Reads a file, transparently gunzipping when the name ends in ".gz".
  static Dataset load_file(const std::string& path, IndexBase base = IndexBase::one);

  static Dataset from_samples(std::vector<SparseVector> features,
                              std::vector<uint32_t> labels,
                              uint32_t num_features,
                              std::vector<int64_t> label_map);

  std::size_t size() const { return features_.size(); }
  uint32_t num_features() const { return num_features_; }
  uint32_t num_classes() const { return static_cast<uint32_t>(label_map_.size()); }

  const SparseVector& x(std::size_t i) const { return features_[i]; }
  uint32_t y(std::size_t i) const { return labels_[i]; }
  int64_t original_label(uint32_t class_id) const { return label_map_[class_id]; }
  const std::vector<int64_t>& label_map() const { return label_map_; }

  DatasetStats stats() const;

  Dataset shuffled(uint64_t seed) const;

  // Splits off floor(size * fraction) samples for validation, selection
  // seeded, original order preserved inside both parts. Returns
  // (train, validation). Throws if either part would be empty.
  std::pair<Dataset, Dataset> split_validation(double fraction, uint64_t seed) const;

  void write_libsvm(std::ostream& out, IndexBase base = IndexBase::one) const;

 private:
  std::vector<SparseVector> features_;
  std::vector<uint32_t> labels_;
  std::vector<int64_t> label_map_;
  uint32_t num_features_ = 0;
};

}  // namespace wltls
