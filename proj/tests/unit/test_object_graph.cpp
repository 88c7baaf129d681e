#include <doctest.h>

#include <algorithm>
#include <map>

#include "arcllm/object_graph.hpp"
#include "partition_oracle.hpp"
#include "random_inputs.hpp"

using namespace arcllm;

namespace {

Grid rows(std::vector<std::vector<int>> r) { return Grid::from_rows(r); }

constexpr AbstractionStrategy kCovering[] = {AbstractionStrategy::SameColor4, AbstractionStrategy::SameColor8,
                                             AbstractionStrategy::VerticalRuns, AbstractionStrategy::HorizontalRuns,
                                             AbstractionStrategy::SinglePixels};

std::multiset<std::pair<int, int>> color_sizes(const ObjectGraph& g) {
  std::multiset<std::pair<int, int>> out;
  for (const auto& n : g.nodes) out.insert({n.color.code(), n.size()});
  return out;
}

}  // namespace

TEST_CASE("diagonal cells split under 4-adjacency and join under 8-adjacency") {
  const Grid g = rows({{1, 0}, {0, 1}});
  const auto four = abstract(g, AbstractionStrategy::SameColor4);
  REQUIRE(four.nodes.size() == 2);
  for (const auto& n : four.nodes) {
    CHECK(n.size() == 1);
    CHECK(n.color == Color(1));
  }
  const auto eight = abstract(g, AbstractionStrategy::SameColor8);
  REQUIRE(eight.nodes.size() == 1);
  CHECK(eight.nodes[0].size() == 2);
}

TEST_CASE("separate blue and red objects each get a node") {
  // Two blue bars on top, two red blocks further down.
  const Grid g = rows({{1, 1, 0, 1, 1},
                       {0, 0, 0, 0, 0},
                       {0, 0, 0, 0, 0},
                       {2, 0, 0, 0, 2},
                       {2, 0, 0, 0, 2}});
  const auto graph = abstract(g, AbstractionStrategy::SameColor4);
  REQUIRE(graph.nodes.size() == 4);
  CHECK(graph.nodes[0].color == Color(1));
  CHECK(graph.nodes[1].color == Color(1));
  CHECK(graph.nodes[2].color == Color(2));
  CHECK(graph.nodes[3].color == Color(2));
  CHECK(graph.nodes[2].pixels == std::vector<Cell>{{3, 0}, {4, 0}});
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) CHECK(graph.nodes[i].id == static_cast<int>(i));
}

TEST_CASE("multicolor components take the modal color, lowest code on ties") {
  auto graph = abstract(rows({{3, 2, 2}, {0, 0, 3}}), AbstractionStrategy::MultiColor4);
  REQUIRE(graph.nodes.size() == 1);
  CHECK(graph.nodes[0].color == Color(2));  // 2 twice, 3 twice -> lowest
  graph = abstract(rows({{4, 4, 7}}), AbstractionStrategy::MultiColor4);
  CHECK(graph.nodes[0].color == Color(4));
  CHECK(graph.nodes[0].size() == 3);
}

TEST_CASE("runs and single pixels") {
  const Grid g = rows({{1, 1, 2}, {1, 0, 2}});
  const auto v = abstract(g, AbstractionStrategy::VerticalRuns);
  CHECK(v.nodes.size() == 3);
  const auto h = abstract(g, AbstractionStrategy::HorizontalRuns);
  CHECK(h.nodes.size() == 4);
  CHECK(abstract(g, AbstractionStrategy::SinglePixels).nodes.size() == 5);
  CHECK(abstract(Grid::filled(3, 3), AbstractionStrategy::SameColor4).nodes.empty());
}

TEST_CASE("non-black background") {
  const Grid g = rows({{5, 5, 1}, {5, 0, 5}});
  const auto graph = abstract(g, AbstractionStrategy::SameColor4, Color(5));
  REQUIRE(graph.nodes.size() == 2);
  CHECK(graph.background == Color(5));
  CHECK(render(graph) == g);
}

TEST_CASE("partitions match the union-find oracle") {
  Rng rng(17);
  for (int i = 0; i < 300; ++i) {
    const Grid g = testing::random_grid(rng, 10, 10, rng.uniform(2, 10), rng.uniform(10, 90));
    for (auto s : kAllStrategies) {
      const auto graph = abstract(g, s);
      CHECK(oracle::partition_of(graph) == oracle::reference_partition(g, s));
      for (std::size_t k = 1; k < graph.nodes.size(); ++k) {
        CHECK(graph.nodes[k - 1].pixels.front() < graph.nodes[k].pixels.front());
      }
    }
  }
}

TEST_CASE("render inverts abstraction") {
  Rng rng(23);
  for (int i = 0; i < 300; ++i) {
    const Grid g = testing::random_grid(rng, 10, 10);
    for (auto s : kCovering) CHECK(render(abstract(g, s)) == g);
    // MultiColor4 keeps footprints, not necessarily colors.
    const Grid m = render(abstract(g, AbstractionStrategy::MultiColor4));
    for (int r = 0; r < g.height(); ++r) {
      for (int c = 0; c < g.width(); ++c) CHECK((m.at(r, c) == kBlack) == (g.at(r, c) == kBlack));
    }
  }
}

TEST_CASE("render errors") {
  ObjectGraph empty;
  empty.grid_height = 3;
  empty.grid_width = 3;
  CHECK(render(empty) == Grid::filled(3, 3));

  ObjectGraph out_of_bounds = empty;
  out_of_bounds.nodes.push_back({0, Color(1), {{5, 5}}});
  CHECK_THROWS_AS(render(out_of_bounds), RenderError);

  ObjectGraph overlap = empty;
  overlap.nodes.push_back({0, Color(1), {{0, 0}}});
  overlap.nodes.push_back({1, Color(2), {{0, 0}}});
  CHECK_THROWS_AS(render(overlap), RenderError);
}

TEST_CASE("build_edges examples") {
  ObjectGraph g;
  g.grid_height = 3;
  g.grid_width = 3;
  g.nodes = {{0, Color(1), {{0, 0}}}, {1, Color(2), {{0, 2}}}};
  auto e = build_edges(g).edges;
  REQUIRE(e.size() == 1);
  CHECK(e[0] == ObjectEdge{0, 1, Relation::Horizontal});

  g.nodes = {{0, Color(1), {{0, 0}}}, {1, Color(2), {{2, 2}}}};
  CHECK(build_edges(g).edges.empty());

  g.nodes = {{0, Color(1), {{0, 0}}}, {1, Color(2), {{1, 0}}}};
  e = build_edges(g).edges;
  REQUIRE(e.size() == 1);
  CHECK(e[0] == ObjectEdge{0, 1, Relation::Vertical});

  g.nodes = {{0, Color(1), {{0, 0}, {0, 1}}}, {1, Color(2), {{0, 2}, {1, 1}}}};
  e = build_edges(g).edges;
  CHECK(e == std::vector<ObjectEdge>{{0, 1, Relation::Horizontal}, {0, 1, Relation::Vertical}});
}

TEST_CASE("build_edges is symmetric, irreflexive and bounded") {
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const auto graph = build_edges(abstract(testing::random_grid(rng, 8, 8, 4, 40), AbstractionStrategy::SameColor4));
    const std::size_t n = graph.nodes.size();
    CHECK(graph.edges.size() <= n * (n > 0 ? n - 1 : 0));
    std::set<ObjectEdge> seen;
    for (const auto& e : graph.edges) {
      CHECK(e.a < e.b);
      CHECK(seen.insert(e).second);
    }
  }
}

TEST_CASE("rotation keeps the multiset of (color, size)") {
  Rng rng(41);
  const AbstractionStrategy invariant[] = {AbstractionStrategy::SameColor4, AbstractionStrategy::SameColor8,
                                           AbstractionStrategy::MultiColor4, AbstractionStrategy::SinglePixels};
  for (int i = 0; i < 200; ++i) {
    const Grid g = testing::random_grid(rng, 10, 10);
    const Grid r = rotate90(g, Rotation::Clockwise);
    for (auto s : invariant) CHECK(color_sizes(abstract(g, s)) == color_sizes(abstract(r, s)));
    // Runs swap roles under rotation.
    CHECK(color_sizes(abstract(g, AbstractionStrategy::HorizontalRuns)) ==
          color_sizes(abstract(r, AbstractionStrategy::VerticalRuns)));
  }
}

TEST_CASE("best-fit scoring on solid rectangles") {
  // Train 1: two blue 2x2 squares, shifted right by one in the output.
  // Train 2: a red 1x3 bar and a blue 2x2 square, shifted the same way.
  const Grid in1 = rows({{1, 1, 0, 0, 0, 0}, {1, 1, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 0}, {0, 0, 0, 1, 1, 0},
                         {0, 0, 0, 1, 1, 0}});
  const Grid out1 = rows({{0, 1, 1, 0, 0, 0}, {0, 1, 1, 0, 0, 0}, {0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 1, 1},
                          {0, 0, 0, 0, 1, 1}});
  const Grid in2 = rows({{2, 2, 2, 0, 0, 0}, {0, 0, 0, 0, 0, 0}, {0, 0, 0, 1, 1, 0}, {0, 0, 0, 1, 1, 0},
                         {0, 0, 0, 0, 0, 0}});
  const Grid out2 = rows({{0, 2, 2, 2, 0, 0}, {0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 1, 1}, {0, 0, 0, 0, 1, 1},
                          {0, 0, 0, 0, 0, 0}});
  const Task t{"rects", {{in1, out1}, {in2, out2}}, {{in1, out1}}};

  // Node counts worked out by hand (input1, output1, input2, output2):
  //   SameColor4 / SameColor8 / MultiColor4: 2,2,2,2 -> +2 +2 +1 = 5
  //   VerticalRuns:   4,4,5,5 -> inputs differ; +2 +1 = 3
  //   HorizontalRuns: 4,4,3,3 -> inputs differ; +2 +1 = 3
  //   SinglePixels:   8,8,7,7 -> inputs differ; +2 +1 = 3
  const std::map<AbstractionStrategy, int> by_hand = {
      {AbstractionStrategy::SameColor4, 5},   {AbstractionStrategy::SameColor8, 5},
      {AbstractionStrategy::MultiColor4, 5},  {AbstractionStrategy::VerticalRuns, 3},
      {AbstractionStrategy::HorizontalRuns, 3}, {AbstractionStrategy::SinglePixels, 3}};
  for (auto [s, expected] : by_hand) CHECK(score_strategy(t, s) == expected);
  CHECK(select_best_fit(t) == AbstractionStrategy::SameColor4);
}

TEST_CASE("best-fit on all-background grids falls back to enumeration order") {
  const Grid z = Grid::filled(3, 3);
  const Task t{"empty", {{z, z}, {z, z}}, {{z, z}}};
  // Every strategy: equal counts +2, equal in/out +2, mean 0 outside [2,12], zero nodes -3.
  for (auto s : kAllStrategies) CHECK(score_strategy(t, s) == 1);
  CHECK(select_best_fit(t) == AbstractionStrategy::SameColor4);
}

TEST_CASE("best-fit penalizes more than 50 nodes") {
  Grid checker = Grid::filled(12, 12);
  for (int r = 0; r < 12; ++r) {
    for (int c = 0; c < 12; ++c) {
      if ((r + c) % 2 == 0) checker.set(r, c, Color(3));
    }
  }
  const Task t{"checker", {{checker, checker}}, {{checker, checker}}};
  // 72 pixels: four-adjacency and runs give 72 nodes, eight-adjacency and multicolor give 1.
  CHECK(score_strategy(t, AbstractionStrategy::SameColor4) == 2 + 2 - 3);
  CHECK(score_strategy(t, AbstractionStrategy::SameColor8) == 2 + 2);
  CHECK(select_best_fit(t) == AbstractionStrategy::SameColor8);
}

TEST_CASE("overrides take precedence") {
  const auto overrides = parse_overrides(R"({"dc433765": "MultiColor4"})");
  const Grid z = Grid::filled(2, 2);
  const Task t{"dc433765", {{z, z}}, {{z, z}}};
  CHECK(select_best_fit(t, &overrides) == AbstractionStrategy::MultiColor4);
  const Task other{"other", {{z, z}}, {{z, z}}};
  CHECK(select_best_fit(other, &overrides) == AbstractionStrategy::SameColor4);
  CHECK_THROWS(parse_overrides(R"({"x": "Blobs"})"));
  CHECK_THROWS(parse_overrides("[1]"));
}

TEST_CASE("strategy tags round trip") {
  for (auto s : kAllStrategies) CHECK(parse_strategy(to_string(s)) == s);
  CHECK_THROWS_AS(parse_strategy("nope"), std::invalid_argument);
}
