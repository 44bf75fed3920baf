#include "wltls/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "wltls/common.hpp"

namespace wltls {

namespace {

double gaussian(std::mt19937_64& gen) {
  const double u1 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  const double u2 = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace

Dataset make_synthetic(const SyntheticConfig& config) {
  if (config.classes < 2 || config.features == 0 || config.samples == 0) {
    throw error("synthetic: bad configuration");
  }
  if (config.support_per_class == 0 || config.support_per_class > config.features) {
    throw error("synthetic: support size must be in [1, features]");
  }

  if (config.clusters > 0 &&
      (config.shared_support == 0 || config.shared_support >= config.support_per_class)) {
    throw error("synthetic: shared support must be in [1, support_per_class)");
  }

  std::mt19937_64 gen(detail::mix64(config.seed, 0x53594e5448ULL));

  std::vector<std::vector<uint32_t>> supports(config.classes);
  std::vector<std::vector<double>> centers(config.classes);
  std::vector<uint32_t> pool(config.features);
  std::iota(pool.begin(), pool.end(), 0);

  auto draw_from = [&gen](std::vector<uint32_t>& from, uint32_t count) {
    std::vector<uint32_t> out;
    out.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(detail::bounded_draw(gen, from.size() - i));
      std::swap(from[i], from[j]);
    }
    out.assign(from.begin(), from.begin() + count);
    return out;
  };

  if (config.clusters == 0) {
    for (uint32_t c = 0; c < config.classes; ++c) {
      supports[c] = draw_from(pool, config.support_per_class);
      std::sort(supports[c].begin(), supports[c].end());

      centers[c].resize(config.support_per_class);
      double norm = 0.0;
      for (double& v : centers[c]) {
        v = gaussian(gen);
        norm += v * v;
      }
      norm = std::sqrt(norm);
      for (double& v : centers[c]) v /= norm;
    }
  } else {
    // cluster-level features and center values, reused by every member
    const uint32_t private_support = config.support_per_class - config.shared_support;
    std::vector<std::vector<uint32_t>> cluster_features(config.clusters);
    std::vector<std::vector<double>> cluster_values(config.clusters);
    std::vector<std::vector<uint32_t>> private_pools(config.clusters);
    for (uint32_t g = 0; g < config.clusters; ++g) {
      cluster_features[g] = draw_from(pool, config.shared_support);
      cluster_values[g].resize(config.shared_support);
      for (double& v : cluster_values[g]) v = gaussian(gen);

      std::vector<uint32_t> sorted = cluster_features[g];
      std::sort(sorted.begin(), sorted.end());
      private_pools[g].reserve(config.features - config.shared_support);
      for (uint32_t f = 0; f < config.features; ++f) {
        if (!std::binary_search(sorted.begin(), sorted.end(), f)) {
          private_pools[g].push_back(f);
        }
      }
    }

    for (uint32_t c = 0; c < config.classes; ++c) {
      const uint32_t g = c % config.clusters;
      std::vector<uint32_t> own = draw_from(private_pools[g], private_support);

      std::vector<std::pair<uint32_t, double>> parts;
      parts.reserve(config.support_per_class);
      for (uint32_t i = 0; i < config.shared_support; ++i) {
        parts.emplace_back(cluster_features[g][i], cluster_values[g][i]);
      }
      for (uint32_t f : own) parts.emplace_back(f, gaussian(gen));
      std::sort(parts.begin(), parts.end());

      supports[c].resize(parts.size());
      centers[c].resize(parts.size());
      double norm = 0.0;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        supports[c][i] = parts[i].first;
        centers[c][i] = parts[i].second;
        norm += parts[i].second * parts[i].second;
      }
      norm = std::sqrt(norm);
      for (double& v : centers[c]) v /= norm;
    }
  }

  std::vector<SparseVector> features;
  std::vector<uint32_t> labels;
  features.reserve(config.samples);
  labels.reserve(config.samples);
  for (std::size_t i = 0; i < config.samples; ++i) {
    const uint32_t c = static_cast<uint32_t>(i % config.classes);
    std::vector<FeatureEntry> entries;
    entries.reserve(config.support_per_class + config.background_features);
    for (uint32_t s = 0; s < config.support_per_class; ++s) {
      entries.push_back(
          {supports[c][s], centers[c][s] + config.noise * gaussian(gen)});
    }
    for (uint32_t k = 0; k < config.background_features; ++k) {
      const uint32_t idx =
          static_cast<uint32_t>(detail::bounded_draw(gen, config.features));
      const bool clash =
          std::binary_search(supports[c].begin(), supports[c].end(), idx) ||
          std::any_of(entries.begin() + config.support_per_class, entries.end(),
                      [idx](const FeatureEntry& e) { return e.index == idx; });
      if (!clash) {
        entries.push_back({idx, 0.5 * config.noise * gaussian(gen)});
      }
    }
    std::sort(entries.begin(), entries.end(),
              [](const FeatureEntry& a, const FeatureEntry& b) { return a.index < b.index; });
    double norm = 0.0;
    for (const auto& e : entries) norm += e.value * e.value;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (auto& e : entries) e.value /= norm;
    }
    features.push_back(SparseVector::from_entries(std::move(entries)));
    labels.push_back(c);
  }

  std::vector<int64_t> label_map(config.classes);
  std::iota(label_map.begin(), label_map.end(), 1);
  return Dataset::from_samples(std::move(features), std::move(labels),
                               config.features, std::move(label_map));
}

}  // namespace wltls
