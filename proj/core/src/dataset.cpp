#include "wltls/dataset.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "wltls/common.hpp"

namespace wltls {

SparseVector SparseVector::from_entries(std::vector<FeatureEntry> entries) {
  SparseVector v;
  for (const auto& e : entries) {
    if (e.value == 0.0) continue;
    if (!v.entries_.empty() && e.index <= v.entries_.back().index) {
      throw error("sparse vector: indices must be strictly increasing");
    }
    v.entries_.push_back(e);
  }
  return v;
}

double SparseVector::dot(std::span<const double> dense) const {
  double acc = 0.0;
  for (const auto& e : entries_) {
    if (e.index >= dense.size()) break;
    acc += e.value * dense[e.index];
  }
  return acc;
}

double SparseVector::dot(std::span<const float> dense) const {
  double acc = 0.0;
  for (const auto& e : entries_) {
    if (e.index >= dense.size()) break;
    acc += e.value * static_cast<double>(dense[e.index]);
  }
  return acc;
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw error("libsvm parse error at line " + std::to_string(line_no) + ": " + what);
}

int64_t parse_label(std::string_view tok, std::size_t line_no) {
  if (tok.find(',') != std::string_view::npos) {
    parse_fail(line_no, "multilabel rows are not supported (label '" +
                            std::string(tok) + "')");
  }
  int64_t label = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), label);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    parse_fail(line_no, "bad label token '" + std::string(tok) + "'");
  }
  return label;
}

}  // namespace

Dataset Dataset::parse_libsvm(std::istream& in, IndexBase base) {
  Dataset ds;
  std::unordered_map<int64_t, uint32_t> label_to_class;
  uint32_t max_index_plus_one = 0;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t pos = line.find_first_not_of(" \t");
    if (pos == std::string::npos) continue;
    if (line[pos] == '#') continue;

    std::istringstream tokens(line);
    std::string tok;
    tokens >> tok;
    const int64_t raw_label = parse_label(tok, line_no);

    std::vector<FeatureEntry> entries;
    bool have_prev = false;
    uint32_t prev_index = 0;
    while (tokens >> tok) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size()) {
        parse_fail(line_no, "bad feature token '" + tok + "'");
      }
      uint32_t raw_index = 0;
      auto ires = std::from_chars(tok.data(), tok.data() + colon, raw_index);
      if (ires.ec != std::errc() || ires.ptr != tok.data() + colon) {
        parse_fail(line_no, "bad feature index in '" + tok + "'");
      }
      double value = 0.0;
      auto vres = std::from_chars(tok.data() + colon + 1, tok.data() + tok.size(), value);
      if (vres.ec != std::errc() || vres.ptr != tok.data() + tok.size()) {
        parse_fail(line_no, "bad feature value in '" + tok + "'");
      }
      if (base == IndexBase::one) {
        if (raw_index == 0) {
          parse_fail(line_no, "feature index 0 in a 1-based file");
        }
        raw_index -= 1;
      }
      if (have_prev) {
        if (raw_index == prev_index) {
          parse_fail(line_no, "duplicate feature index " + std::to_string(raw_index));
        }
        if (raw_index < prev_index) {
          parse_fail(line_no, "feature indices out of order");
        }
      }
      have_prev = true;
      prev_index = raw_index;
      max_index_plus_one = std::max(max_index_plus_one, raw_index + 1);
      if (value != 0.0) entries.push_back({raw_index, value});
    }

    auto [it, inserted] = label_to_class.emplace(
        raw_label, static_cast<uint32_t>(ds.label_map_.size()));
    if (inserted) ds.label_map_.push_back(raw_label);
    ds.labels_.push_back(it->second);
    ds.features_.push_back(SparseVector::from_entries(std::move(entries)));
  }

  if (ds.features_.empty()) {
    throw error("libsvm parse error: no samples found");
  }
  ds.num_features_ = max_index_plus_one;
  return ds;
}

namespace {

std::string read_gzip_file(const std::string& path) {
  gzFile gz = gzopen(path.c_str(), "rb");
  if (gz == nullptr) {
    throw error("cannot open '" + path + "'");
  }
  std::string content;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(gz, buf, sizeof(buf))) > 0) {
    content.append(buf, static_cast<std::size_t>(n));
  }
  const bool failed = n < 0;
  gzclose(gz);
  if (failed) {
    throw error("gzip read error in '" + path + "'");
  }
  return content;
}

}  // namespace

Dataset Dataset::load_file(const std::string& path, IndexBase base) {
  if (path.size() > 3 && path.compare(path.size() - 3, 3, ".gz") == 0) {
    std::istringstream in(read_gzip_file(path));
    return parse_libsvm(in, base);
  }
  std::ifstream in(path);
  if (!in) {
    throw error("cannot open '" + path + "'");
  }
  return parse_libsvm(in, base);
}

Dataset Dataset::from_samples(std::vector<SparseVector> features,
                              std::vector<uint32_t> labels,
                              uint32_t num_features,
                              std::vector<int64_t> label_map) {
  if (features.size() != labels.size()) {
    throw error("dataset: features/labels size mismatch");
  }
  if (features.empty()) {
    throw error("dataset: empty");
  }
  for (uint32_t label : labels) {
    if (label >= label_map.size()) {
      throw error("dataset: label out of range");
    }
  }
  for (const auto& x : features) {
    if (x.extent() > num_features) {
      throw error("dataset: feature index out of range");
    }
  }
  Dataset ds;
  ds.features_ = std::move(features);
  ds.labels_ = std::move(labels);
  ds.label_map_ = std::move(label_map);
  ds.num_features_ = num_features;
  return ds;
}

DatasetStats Dataset::stats() const {
  DatasetStats s;
  s.samples = size();
  s.features = num_features_;
  s.classes = num_classes();
  std::size_t total = 0;
  for (const auto& x : features_) total += x.nnz();
  s.avg_nonzeros = size() == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(size());
  return s;
}

Dataset Dataset::shuffled(uint64_t seed) const {
  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 gen(detail::mix64(seed, 0x5348554646ULL));
  detail::fisher_yates(order, gen);

  Dataset ds;
  ds.label_map_ = label_map_;
  ds.num_features_ = num_features_;
  ds.features_.reserve(size());
  ds.labels_.reserve(size());
  for (std::size_t i : order) {
    ds.features_.push_back(features_[i]);
    ds.labels_.push_back(labels_[i]);
  }
  return ds;
}

std::pair<Dataset, Dataset> Dataset::split_validation(double fraction, uint64_t seed) const {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw error("split: fraction must be in (0, 1)");
  }
  const std::size_t n_val =
      static_cast<std::size_t>(static_cast<double>(size()) * fraction);
  if (n_val == 0 || n_val >= size()) {
    throw error("split: fraction " + std::to_string(fraction) +
                " leaves an empty part for " + std::to_string(size()) + " samples");
  }

  std::vector<std::size_t> order(size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 gen(detail::mix64(seed, 0x53504c4954ULL));
  detail::fisher_yates(order, gen);

  std::vector<char> in_val(size(), 0);
  for (std::size_t i = 0; i < n_val; ++i) in_val[order[i]] = 1;

  Dataset train, val;
  train.label_map_ = val.label_map_ = label_map_;
  train.num_features_ = val.num_features_ = num_features_;
  for (std::size_t i = 0; i < size(); ++i) {
    Dataset& part = in_val[i] ? val : train;
    part.features_.push_back(features_[i]);
    part.labels_.push_back(labels_[i]);
  }
  return {std::move(train), std::move(val)};
}

void Dataset::write_libsvm(std::ostream& out, IndexBase base) const {
  const uint32_t shift = base == IndexBase::one ? 1 : 0;
  char buf[64];
  for (std::size_t i = 0; i < size(); ++i) {
    out << label_map_[labels_[i]];
    for (const auto& e : features_[i]) {
      auto res = std::to_chars(buf, buf + sizeof(buf), e.value);
      out << ' ' << (e.index + shift) << ':'
          << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

}  // namespace wltls
