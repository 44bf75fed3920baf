#include "wltls/trellis.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"
#include "wltls/common.hpp"

using wltls::TrellisGraph;

TEST_CASE("nine classes at width two, the worked structure") {
  const TrellisGraph g = TrellisGraph::build(9, 2);
  CHECK(g.num_classes() == 9);
  CHECK(g.slice_width() == 2);
  CHECK(g.num_slices() == 4);
  CHECK(g.edge_count() == 14);
  CHECK(g.vertex_count() == 9);
  CHECK(g.sink() == 8);
  CHECK(g.paths_to_sink(TrellisGraph::kSource) == 9);

  // slice-major edge order: source edges, then per slice forward edges by
  // (tail, head) followed by that slice's sink edges
  const std::vector<std::pair<uint32_t, uint32_t>> expected = {
      {0, 1}, {0, 2},                                  // source
      {1, 3}, {1, 4}, {2, 3}, {2, 4}, {1, 8},          // slice 0 (+ sink exit)
      {3, 5}, {3, 6}, {4, 5}, {4, 6},                  // slice 1
      {5, 7}, {6, 7},                                  // slice 2
      {7, 8},                                          // slice 3
  };
  REQUIRE(g.edges().size() == expected.size());
  for (uint32_t j = 0; j < expected.size(); ++j) {
    CHECK(g.edge(j).tail == expected[j].first);
    CHECK(g.edge(j).head == expected[j].second);
  }

  const std::vector<uint32_t> depth = testutil::tail_depths_bfs(g);
  for (uint32_t j = 0; j < g.edge_count(); ++j) {
    CHECK(g.tail_depth(j) == depth[j]);
  }
  CHECK(g.max_tail_depth() == 4);
}

TEST_CASE("edge groups on the nine-class graph") {
  const TrellisGraph g = TrellisGraph::build(9, 2);

  // deepest sink edge stands alone
  CHECK(g.s_set(13) == std::vector<uint32_t>{13});
  // an interior forward edge groups with its whole depth
  CHECK(g.s_set(7) == std::vector<uint32_t>{7, 8, 9, 10});
  // the shallow sink exit swallows everything at its depth and deeper
  CHECK(g.s_set(6) ==
        std::vector<uint32_t>{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13});
  // source edges form their own two-edge group
  CHECK(g.s_set(0) == std::vector<uint32_t>{0, 1});
  CHECK(g.s_set(0) == g.s_set(1));
}

TEST_CASE("edge groups match the literal definition") {
  const std::pair<uint32_t, uint32_t> cases[] = {
      {9, 2}, {4, 2}, {2, 2}, {4, 3}, {12, 3}, {27, 3}, {30, 4}, {8, 8}, {19, 19}};
  for (const auto& [k, b] : cases) {
    const TrellisGraph g = TrellisGraph::build(k, b);
    const auto groups = testutil::edge_groups(g);
    for (uint32_t j = 0; j < g.edge_count(); ++j) {
      const std::vector<uint32_t> group = g.s_set(j);
      CHECK(group == groups[j]);
      CHECK(std::binary_search(group.begin(), group.end(), j));
    }
  }
}

TEST_CASE("power-of-width graphs have no early exits") {
  const TrellisGraph g = TrellisGraph::build(4, 2);
  CHECK(g.num_slices() == 2);
  CHECK(g.edge_count() == 8);
  const TrellisGraph g2 = TrellisGraph::build(2, 2);
  CHECK(g2.num_slices() == 1);
  CHECK(g2.edge_count() == 4);
  CHECK(wltls::count_paths(g2) == 2);
  const TrellisGraph g27 = TrellisGraph::build(27, 3);
  CHECK(g27.num_slices() == 3);
  // 3 source edges, two full bipartite layers, 3 sink edges
  CHECK(g27.edge_count() == 3 + 9 + 9 + 3);
}

TEST_CASE("width equal to the class count gives one edge pair per class") {
  const TrellisGraph g = TrellisGraph::build(64, 64);
  CHECK(g.edge_count() == 128);
  CHECK(wltls::count_paths(g) == 64);
  for (uint32_t i = 0; i < 64; ++i) {
    CHECK(g.index_to_path(i) == std::vector<uint32_t>{i, 64 + i});
  }
}

TEST_CASE("path enumeration matches brute-force search") {
  const std::pair<uint32_t, uint32_t> cases[] = {
      {9, 2}, {2, 2}, {5, 2}, {12, 3}, {17, 4}, {105, 10}, {8, 8}, {23, 23}};
  for (const auto& [k, b] : cases) {
    const TrellisGraph g = TrellisGraph::build(k, b);
    const auto paths = testutil::all_paths(g);
    REQUIRE(paths.size() == k);
    for (uint32_t i = 0; i < k; ++i) {
      CHECK(g.index_to_path(i) == paths[i]);
      CHECK(g.path_to_index(paths[i]) == i);
    }
  }
}

TEST_CASE("path counting") {
  for (uint32_t b : {2u, 3u, 5u, 7u, 10u}) {
    for (uint32_t k = b; k <= 140; k += 7) {
      const TrellisGraph g = TrellisGraph::build(k, b);
      CHECK(wltls::count_paths(g) == k);
      CHECK(g.paths_to_sink(TrellisGraph::kSource) == k);
      CHECK(g.edge_count() <= wltls::edge_count_bound(k, b));
    }
  }
  for (uint32_t k = 2; k <= 32; ++k) {
    CHECK(wltls::count_paths(TrellisGraph::build(k, k)) == k);
  }
}

TEST_CASE("every vertex lies on some source-sink path") {
  const std::pair<uint32_t, uint32_t> cases[] = {{9, 2}, {12, 3}, {105, 10}, {37, 6}};
  for (const auto& [k, b] : cases) {
    const TrellisGraph g = TrellisGraph::build(k, b);
    for (uint32_t v = 0; v < g.vertex_count(); ++v) {
      CHECK(testutil::paths_from_source(g, v) >= 1);
      CHECK(g.paths_to_sink(v) >= 1);
    }
  }
}

TEST_CASE("source-to-vertex path counts grow as powers of the width") {
  const TrellisGraph g = TrellisGraph::build(27, 3);
  // slices hold vertices 1..3, 4..6, 7..9
  for (uint32_t slice = 0; slice < 3; ++slice) {
    uint64_t expected = 1;
    for (uint32_t i = 0; i < slice; ++i) expected *= 3;
    for (uint32_t pos = 0; pos < 3; ++pos) {
      CHECK(testutil::paths_from_source(g, 1 + slice * 3 + pos) == expected);
    }
  }
}

TEST_CASE("codewords") {
  const TrellisGraph g = TrellisGraph::build(9, 2);
  for (uint32_t i = 0; i < 9; ++i) {
    const auto path = g.index_to_path(i);
    const auto expected = testutil::codeword_of(g, path);
    const wltls::Codeword cw = g.codeword(i);
    REQUIRE(cw.bits.size() == g.edge_count());
    CHECK(cw.bits == expected);
  }
  CHECK(g.codeword(0).hamming_distance(g.codeword(0)) == 0);
  // distance counts differing positions of the sign vectors
  const wltls::Codeword a = g.codeword(0);
  const wltls::Codeword b = g.codeword(4);
  uint32_t differ = 0;
  for (std::size_t j = 0; j < a.bits.size(); ++j) differ += a.bits[j] != b.bits[j];
  CHECK(a.hamming_distance(b) == differ);
}

TEST_CASE("minimum codeword distance") {
  for (uint32_t k : {8u, 16u, 32u, 64u}) {
    CHECK(wltls::min_hamming_distance(TrellisGraph::build(k, 2)) == 4);
  }
  CHECK(wltls::min_hamming_distance(TrellisGraph::build(8, 8)) == 4);

  // early sink exits can bring a pair of paths within three edges
  CHECK(wltls::min_hamming_distance(TrellisGraph::build(4, 3)) == 3);
  CHECK(wltls::min_hamming_distance(TrellisGraph::build(12, 3)) == 3);

  CHECK_FALSE(wltls::min_hamming_distance(TrellisGraph::build(64, 2), 63).has_value());
}

TEST_CASE("the multi-slice layouts used in the size table") {
  CHECK(TrellisGraph::build(105, 2).edge_count() == 28);
  CHECK(TrellisGraph::build(105, 4).edge_count() == 46);
  CHECK(TrellisGraph::build(105, 5).edge_count() == 55);
  CHECK(TrellisGraph::build(105, 7).edge_count() == 73);
  CHECK(TrellisGraph::build(105, 10).edge_count() == 126);
}

TEST_CASE("construction rejects bad widths") {
  CHECK_THROWS_AS(TrellisGraph::build(9, 1), wltls::error);
  CHECK_THROWS_AS(TrellisGraph::build(9, 0), wltls::error);
  CHECK_THROWS_AS(TrellisGraph::build(9, 10), wltls::error);
  CHECK_THROWS_AS(TrellisGraph::build(1, 2), wltls::error);
}

TEST_CASE("out edges are sorted and consistent with the edge list") {
  const TrellisGraph g = TrellisGraph::build(105, 7);
  std::size_t seen = 0;
  for (uint32_t v = 0; v < g.vertex_count(); ++v) {
    const auto out = g.out_edges(v);
    seen += out.size();
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(g.edge(out[i]).tail == v);
      if (i > 0) CHECK(out[i] > out[i - 1]);
    }
  }
  CHECK(seen == g.edge_count());
  CHECK(g.out_edges(g.sink()).empty());
}
