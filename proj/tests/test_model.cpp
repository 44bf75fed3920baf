#include "wltls/model.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "wltls/common.hpp"
#include "wltls/evaluation.hpp"

using wltls::ClassAssignment;
using wltls::Dataset;
using wltls::LossKind;
using wltls::SparseVector;
using wltls::TrellisGraph;
using wltls::WeightVector;
using wltls::WltlsModel;

namespace {

// 4 classes on width 2, 6 features: features 0..3 carry each edge's ideal
// sign for the matching class, features 4..5 carry removable noise.
WltlsModel handmade_model(double noise = 1e-3) {
  const TrellisGraph g = TrellisGraph::build(4, 2);
  const ClassAssignment assignment = ClassAssignment::identity(4);
  std::vector<WeightVector> edges;
  for (uint32_t j = 0; j < g.edge_count(); ++j) {
    std::vector<float> w(6, 0.0f);
    for (uint32_t c = 0; c < 4; ++c) {
      w[c] = static_cast<float>(wltls::binary_label(assignment, g, c, j));
    }
    w[4] = static_cast<float>(j % 2 == 0 ? noise : -noise / 2.0);
    w[5] = static_cast<float>(noise / 4.0);
    edges.push_back(WeightVector::from_dense(std::move(w)));
  }
  return WltlsModel(2, 6, LossKind::exponential, assignment, {1, 2, 3, 4},
                    std::move(edges));
}

Dataset basis_dataset() {
  std::vector<SparseVector> xs;
  std::vector<uint32_t> ys;
  for (int copy = 0; copy < 3; ++copy) {
    for (uint32_t c = 0; c < 4; ++c) {
      xs.push_back(SparseVector::from_entries({{c, 1.0}}));
      ys.push_back(c);
    }
  }
  return Dataset::from_samples(std::move(xs), std::move(ys), 6, {1, 2, 3, 4});
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(out);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

// Rewrites the trailing checksum so deliberate corruption reaches the parser.
std::string refreshed_crc(std::string file) {
  REQUIRE(file.size() > 4);
  const std::size_t payload = file.size() - 4;
  const uint32_t crc = static_cast<uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(file.data()), static_cast<uInt>(payload)));
  std::memcpy(file.data() + payload, &crc, 4);
  return file;
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("weight vector basics") {
  const WeightVector dense = WeightVector::from_dense({0.5f, 0.0f, -2.0f, 0.25f});
  CHECK(dense.nnz() == 3);
  CHECK(dense.max_abs() == doctest::Approx(2.0));

  const WeightVector sparse = WeightVector::from_sparse({0, 2, 3}, {0.5f, -2.0f, 0.25f});
  CHECK(sparse.nnz() == 3);
  CHECK(sparse.max_abs() == doctest::Approx(2.0));

  const SparseVector x = SparseVector::from_entries({{0, 2.0}, {2, 1.0}, {3, -4.0}});
  CHECK(dense.dot(x) == doctest::Approx(2.0 * 0.5 - 2.0 - 4.0 * 0.25));
  CHECK(sparse.dot(x) == doctest::Approx(dense.dot(x)));

  CHECK_THROWS_AS(WeightVector::from_sparse({2, 1}, {1.0f, 1.0f}), wltls::error);
  CHECK_THROWS_AS(WeightVector::from_sparse({1, 1}, {1.0f, 1.0f}), wltls::error);
  CHECK_THROWS_AS(WeightVector::from_sparse({1}, {1.0f, 2.0f}), wltls::error);

  CHECK(dense == dense);
  CHECK_FALSE(dense == sparse);  // same values, different storage
}

TEST_CASE("assembling from trained learners keeps the margins") {
  const Dataset data = testutil::separable_dataset();
  const TrellisGraph g = TrellisGraph::build(4, 2);
  const ClassAssignment assignment = ClassAssignment::random(4, 2);
  const wltls::MarginModel learners =
      wltls::train_all(data, g, assignment, wltls::TrainConfig{});
  const WltlsModel model =
      WltlsModel::assemble(g, assignment, learners, LossKind::exponential, {1, 2, 3, 4});

  CHECK(model.num_classes() == 4);
  CHECK(model.edge_count() == g.edge_count());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto got = model.margins(data.x(i));
    for (uint32_t j = 0; j < g.edge_count(); ++j) {
      // stored as 32-bit floats, so compare against the rounded weights
      const auto w = learners.weights(j);
      double expected = 0.0;
      for (const auto& e : data.x(i)) {
        expected += e.value * static_cast<double>(static_cast<float>(w[e.index]));
      }
      CHECK(got[j] == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  CHECK_THROWS_AS(
      WltlsModel::assemble(g, assignment, learners, LossKind::exponential, {1, 2, 3}),
      wltls::error);
}

TEST_CASE("construction validates the shape") {
  const TrellisGraph g = TrellisGraph::build(4, 2);
  const ClassAssignment assignment = ClassAssignment::identity(4);
  std::vector<WeightVector> edges(g.edge_count(),
                                  WeightVector::from_dense(std::vector<float>(6, 0.0f)));

  auto too_few = edges;
  too_few.pop_back();
  CHECK_THROWS_AS(
      WltlsModel(2, 6, LossKind::exponential, assignment, {1, 2, 3, 4}, too_few),
      wltls::error);

  auto bad_dim = edges;
  bad_dim[0] = WeightVector::from_dense(std::vector<float>(5, 0.0f));
  CHECK_THROWS_AS(
      WltlsModel(2, 6, LossKind::exponential, assignment, {1, 2, 3, 4}, bad_dim),
      wltls::error);

  auto bad_index = edges;
  bad_index[0] = WeightVector::from_sparse({6}, {1.0f});
  CHECK_THROWS_AS(
      WltlsModel(2, 6, LossKind::exponential, assignment, {1, 2, 3, 4}, bad_index),
      wltls::error);

  CHECK_THROWS_AS(WltlsModel(2, 6, LossKind::exponential, ClassAssignment::identity(3),
                             {1, 2, 3, 4}, edges),
                  wltls::error);
}

TEST_CASE("the handmade model decodes its own classes") {
  const WltlsModel model = handmade_model();
  const Dataset data = basis_dataset();
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(model.predict_label(data.x(i)) == data.original_label(data.y(i)));
    CHECK(model.predict_label(data.x(i)) ==
          model.label_map()[model.decode(data.x(i)).class_id]);
  }
  CHECK(wltls::accuracy(model, data) == doctest::Approx(1.0));
}

TEST_CASE("save and load round trip") {
  TempFile file("wltls_test_model.bin");
  TempFile file2("wltls_test_model2.bin");

  const WltlsModel model = handmade_model();
  model.save(file.path);
  const WltlsModel back = WltlsModel::load(file.path);
  CHECK(back == model);
  CHECK(back.loss_kind() == model.loss_kind());
  CHECK(back.assignment().seed == model.assignment().seed);

  back.save(file2.path);
  CHECK(slurp(file.path) == slurp(file2.path));

  const SparseVector x = SparseVector::from_entries({{1, 1.0}, {4, 0.3}});
  CHECK(back.predict_label(x) == model.predict_label(x));
}

TEST_CASE("sparse vectors survive the round trip") {
  TempFile file("wltls_test_sparse_model.bin");
  const WltlsModel pruned = wltls::prune(handmade_model(), 1e-3);
  pruned.save(file.path);
  const WltlsModel back = WltlsModel::load(file.path);
  CHECK(back == pruned);
  for (uint32_t j = 0; j < back.edge_count(); ++j) {
    CHECK(back.edge_vector(j).is_sparse);
  }
}

TEST_CASE("load rejects damaged files") {
  TempFile file("wltls_test_damaged.bin");
  handmade_model().save(file.path);
  const std::string good = slurp(file.path);

  auto message_of = [&](const std::string& content) {
    spit(file.path, content);
    try {
      WltlsModel::load(file.path);
      return std::string("(no error)");
    } catch (const wltls::error& e) {
      return std::string(e.what());
    }
  };

  CHECK_THROWS_AS(WltlsModel::load("wltls_test_missing.bin"), wltls::error);

  CHECK(message_of("WL").find("too short") != std::string::npos);

  std::string bad_magic = good;
  bad_magic[0] = 'X';
  CHECK(message_of(bad_magic).find("magic") != std::string::npos);

  std::string corrupt = good;
  corrupt[good.size() / 2] ^= 0x40;
  CHECK(message_of(corrupt).find("checksum") != std::string::npos);

  std::string bad_version = good;
  bad_version[5] = 9;
  CHECK(message_of(refreshed_crc(bad_version)).find("version") != std::string::npos);

  std::string bad_loss = good;
  bad_loss[23] = 9;  // loss tag sits after magic, version, four u32 fields
  CHECK(message_of(refreshed_crc(bad_loss)).find("loss") != std::string::npos);

  std::string bad_flag = good;
  bad_flag[32 + 4 * 12] = 7;  // first per-edge flag byte, after the permutation
  CHECK(message_of(refreshed_crc(bad_flag)).find("flag") != std::string::npos);

  std::string trailing = good;
  trailing.insert(trailing.size() - 4, "junk");
  CHECK(message_of(refreshed_crc(trailing)).find("trailing") != std::string::npos);

  // truncation inside an edge vector fails the checksum first
  std::string cut = good.substr(0, good.size() - 30);
  CHECK_THROWS_AS((spit(file.path, cut), WltlsModel::load(file.path)), wltls::error);
}

TEST_CASE("pruning zeroes small weights and goes sparse") {
  const WltlsModel model = handmade_model(1e-3);

  const WltlsModel light = wltls::prune(model, 1e-2);
  for (uint32_t j = 0; j < light.edge_count(); ++j) {
    CHECK(light.edge_vector(j).is_sparse);
    CHECK(light.edge_vector(j).nnz() == 4);  // the +-1 signals survive
    for (float v : light.edge_vector(j).values) {
      CHECK(std::fabs(v) > 1e-2);
    }
  }

  // a threshold of zero only drops exact zeros
  const WltlsModel same = wltls::prune(model, 0.0);
  for (uint32_t j = 0; j < same.edge_count(); ++j) {
    CHECK(same.edge_vector(j).nnz() == model.edge_vector(j).nnz());
  }
  const SparseVector x = SparseVector::from_entries({{0, 1.0}, {4, 2.0}, {5, 1.0}});
  CHECK(same.margins(x) == model.margins(x));

  // the boundary weight is removed, not kept
  const WltlsModel boundary = wltls::prune(model, 1.0);
  for (uint32_t j = 0; j < boundary.edge_count(); ++j) {
    CHECK(boundary.edge_vector(j).nnz() == 0);
  }

  CHECK_THROWS_AS(wltls::prune(model, -0.5), wltls::error);
}

TEST_CASE("threshold tuning keeps accuracy and strips noise") {
  const WltlsModel model = handmade_model(1e-3);
  const Dataset validation = basis_dataset();

  const auto [pruned, report] = wltls::tune_prune(model, validation, 0.01);
  CHECK(report.lambda > 0.5);  // the largest grid step below the signal size
  CHECK(report.nnz_before == 8 * 6);
  CHECK(report.nnz_after == 8 * 4);
  CHECK(report.accuracy_before == doctest::Approx(1.0));
  CHECK(report.accuracy_after == doctest::Approx(1.0));
  CHECK(report.bytes_after < report.bytes_before);

  // the returned model is exactly the reported threshold applied
  const WltlsModel reference = wltls::prune(model, report.lambda);
  CHECK(pruned == reference);
  CHECK(wltls::accuracy(pruned, validation) == doctest::Approx(report.accuracy_after));
}

TEST_CASE("tuning an all-zero model settles on zero") {
  const TrellisGraph g = TrellisGraph::build(4, 2);
  std::vector<WeightVector> edges(g.edge_count(),
                                  WeightVector::from_dense(std::vector<float>(6, 0.0f)));
  const WltlsModel zero(2, 6, LossKind::exponential, ClassAssignment::identity(4),
                        {1, 2, 3, 4}, std::move(edges));
  const auto [pruned, report] = wltls::tune_prune(zero, basis_dataset(), 0.01);
  CHECK(report.lambda == 0.0);
  CHECK(report.nnz_before == 0);
  CHECK(report.nnz_after == 0);
}

TEST_CASE("model statistics") {
  const WltlsModel model = handmade_model();
  const wltls::ModelStats stats = wltls::model_stats(model, 10.0);
  CHECK(stats.nnz == 8 * 6);
  CHECK(stats.bytes_dense == 8ull * 6ull * 4ull);
  CHECK(stats.bytes_sparse == 8ull * (5 + 8 * 6));
  // margin work per query plus the sweep over edges and vertices
  CHECK(stats.decode_cost_estimate == doctest::Approx(10.0 * 8 + 2.0 * 8 + 6));

  const TrellisGraph g = TrellisGraph::build(4, 2);
  std::vector<WeightVector> edges(g.edge_count(),
                                  WeightVector::from_dense(std::vector<float>(6, 0.0f)));
  const WltlsModel zero(2, 6, LossKind::exponential, ClassAssignment::identity(4),
                        {1, 2, 3, 4}, std::move(edges));
  CHECK(wltls::model_stats(zero).nnz == 0);
}
