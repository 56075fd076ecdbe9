#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "resdeloc/graph.hpp"

using namespace resdeloc;

TEST_CASE("tree counts") {
  const Graph g = make_tree(2, 3);
  CHECK(g.vertex_count() == 22);
  CHECK(g.edge_count() == 21);
  const std::size_t sizes[] = {1, 3, 6, 12};
  for (int r = 0; r <= 3; ++r) {
    CHECK(sphere(g, 0, r).members.size() == sizes[r]);
    CHECK(tree_sphere_size(2, r) == sizes[r]);
  }
  CHECK(sphere(g, 0, 4).members.empty());
  CHECK(g.child_count(0) == 3);
  CHECK(g.child_count(1) == 2);
  CHECK(g.degree(1) == 3);
  CHECK(g.degree(21) == 1);
}

TEST_CASE("tree layout is breadth first") {
  const Graph g = make_tree(3, 4);
  for (int d = 0; d <= 4; ++d) {
    const auto [b, e] = g.shell_range(d);
    for (VertexId v = b; v < e; ++v) CHECK(g.level(v) == d);
  }
  for (VertexId v = 1; v < g.vertex_count(); ++v) {
    CHECK(g.adjacent(v, g.parent(v)));
    CHECK(g.level(g.parent(v)) == g.level(v) - 1);
  }
}

TEST_CASE("box and complete graphs") {
  const Graph box = make_box({4, 4});
  CHECK(box.vertex_count() == 16);
  CHECK(box.max_degree() == 4);
  CHECK(box.edge_count() == 24);
  const auto far = sphere(box, 0, 6).members;
  REQUIRE(far.size() == 1);
  CHECK(far[0] == 15);

  const Graph k5 = make_complete(5);
  CHECK(k5.edge_count() == 10);
  CHECK(k5.adjacency_norm() == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("sphere of radius zero is the center") {
  for (const Graph& g : {make_tree(2, 4), make_box({3, 5}), make_complete(7)}) {
    const VertexId c = g.vertex_count() / 2;
    const auto s = sphere(g, c, 0);
    REQUIRE(s.members.size() == 1);
    CHECK(s.members[0] == c);
    CHECK(chi(g, 0) == 0.0);
  }
}

TEST_CASE("chi on trees") {
  const Graph g = make_tree(2, 14);
  CHECK(chi(g, 2) == doctest::Approx(std::log(6.0)).epsilon(1e-12));
  for (int r = 2; r <= 14; ++r) CHECK(std::abs(chi(g, r) - chi(g, r - 1) - std::log(2.0)) < 1e-12);
  // chi(R)/R = log 2 + log(3/2)/R exactly.
  CHECK(std::abs(chi(g, 14) / 14 - std::log(2.0) - std::log(1.5) / 14) < 1e-12);
}

TEST_CASE("distances are a metric and spheres partition") {
  const Graph g = make_custom(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {1, 4}}, 0);
  const auto d = g.distance_matrix();
  const std::size_t n = g.vertex_count();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      CHECK(d[a * n + b] == d[b * n + a]);
      for (std::size_t c = 0; c < n; ++c) CHECK(d[a * n + c] <= d[a * n + b] + d[b * n + c]);
    }
  const Graph box = make_box({3, 4, 2});
  std::vector<int> seen(box.vertex_count(), 0);
  for (int r = 0; r <= box.eccentricity(box.origin()); ++r)
    for (VertexId v : sphere(box, box.origin(), r).members) ++seen[v];
  CHECK(std::all_of(seen.begin(), seen.end(), [](int s) { return s == 1; }));
}

TEST_CASE("custom graphs are validated") {
  CHECK_THROWS_AS(make_custom(4, {{0, 1}, {2, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(make_custom(3, {{0, 1}, {1, 1}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(make_custom(3, {{0, 1}, {0, 1}, {1, 2}}), std::invalid_argument);
  CHECK_THROWS_AS(make_custom(3, {{0, 1}, {1, 5}}), std::invalid_argument);
  CHECK_NOTHROW(make_custom(1, {}));
}
