#include "resdeloc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace resdeloc {

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::box: return "box";
    case GraphKind::tree: return "tree";
    case GraphKind::complete: return "complete";
    case GraphKind::custom: return "custom";
  }
  return "unknown";
}

namespace {

std::vector<int> bfs(const Graph& g, VertexId source) {
  std::vector<int> dist(g.vertex_count(), -1);
  std::deque<VertexId> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const VertexId v = queue.front();
    queue.pop_front();
    for (VertexId w : g.neighbors(v)) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

}  // namespace

void Graph::finalize(const std::vector<std::vector<VertexId>>& adjacency, VertexId origin) {
  offsets_.assign(1, 0);
  neighbors_.clear();
  for (const auto& row : adjacency) {
    neighbors_.insert(neighbors_.end(), row.begin(), row.end());
    offsets_.push_back(neighbors_.size());
  }
  origin_ = origin;
  origin_dist_ = bfs(*this, origin);
  if (std::any_of(origin_dist_.begin(), origin_dist_.end(), [](int d) { return d < 0; })) {
    throw std::invalid_argument("graph is not connected");
  }
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (VertexId v = 0; v < vertex_count(); ++v) best = std::max(best, degree(v));
  return best;
}

bool Graph::adjacent(VertexId u, VertexId v) const {
  const auto nb = neighbors(u);
  return std::find(nb.begin(), nb.end(), v) != nb.end();
}

std::vector<int> Graph::distances_from(VertexId source) const {
  if (source >= vertex_count()) throw std::out_of_range("vertex out of range");
  if (source == origin_) return origin_dist_;
  return bfs(*this, source);
}

std::vector<int> Graph::distance_matrix() const {
  const std::size_t n = vertex_count();
  if (n > 4096) throw std::invalid_argument("distance matrix limited to N <= 4096");
  std::vector<int> out(n * n);
  for (VertexId v = 0; v < n; ++v) {
    const auto row = bfs(*this, v);
    std::copy(row.begin(), row.end(), out.begin() + static_cast<std::ptrdiff_t>(v * n));
  }
  return out;
}

int Graph::eccentricity(VertexId v) const {
  const auto d = distances_from(v);
  return *std::max_element(d.begin(), d.end());
}

double Graph::adjacency_norm() const {
  const std::size_t n = vertex_count();
  if (n == 1) return 0.0;
  // Power iteration on A^2 avoids the +/- oscillation on bipartite graphs.
  std::vector<double> x(n), y(n), w(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = 1.0 + 1e-3 * static_cast<double>(i % 7);
  double lambda_sq = 0.0;
  for (int it = 0; it < 500; ++it) {
    for (VertexId v = 0; v < n; ++v) {
      double s = 0.0;
      for (VertexId u : neighbors(v)) s += x[u];
      y[v] = s;
    }
    for (VertexId v = 0; v < n; ++v) {
      double s = 0.0;
      for (VertexId u : neighbors(v)) s += y[u];
      w[v] = s;
    }
    const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
    const double next = std::inner_product(x.begin(), x.end(), w.begin(), 0.0) /
                        std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
    for (std::size_t i = 0; i < n; ++i) x[i] = w[i] / norm;
    if (std::abs(next - lambda_sq) <= 1e-12 * next) {
      lambda_sq = next;
      break;
    }
    lambda_sq = next;
  }
  return std::sqrt(lambda_sq);
}

std::pair<VertexId, VertexId> Graph::shell_range(int d) const {
  if (kind_ != GraphKind::tree) throw std::logic_error("shell_range requires a tree");
  if (d < 0 || d > depth_) return {0, 0};
  if (d == 0) return {0, 1};
  VertexId begin = 1;
  for (int k = 1; k < d; ++k) begin += tree_sphere_size(branching_, k);
  return {begin, begin + tree_sphere_size(branching_, d)};
}

std::size_t tree_sphere_size(int branching, int radius) {
  if (radius == 0) return 1;
  std::size_t n = static_cast<std::size_t>(branching) + 1;
  for (int k = 1; k < radius; ++k) n *= static_cast<std::size_t>(branching);
  return n;
}

Graph make_tree(int branching, int depth) {
  if (branching < 1) throw std::invalid_argument("tree branching K must be >= 1");
  if (depth < 1) throw std::invalid_argument("tree depth D must be >= 1");
  std::size_t n = 0;
  for (int d = 0; d <= depth; ++d) n += tree_sphere_size(branching, d);

  Graph g;
  g.kind_ = GraphKind::tree;
  g.branching_ = branching;
  g.depth_ = depth;
  g.parent_.assign(n, 0);
  g.first_child_.assign(n, 0);
  g.child_count_.assign(n, 0);

  std::vector<std::vector<VertexId>> adj(n);
  VertexId next = 1;
  VertexId shell_begin = 0;
  VertexId shell_end = 1;
  for (int d = 0; d < depth; ++d) {
    for (VertexId v = shell_begin; v < shell_end; ++v) {
      const std::size_t kids = d == 0 ? static_cast<std::size_t>(branching) + 1
                                      : static_cast<std::size_t>(branching);
      g.first_child_[v] = next;
      g.child_count_[v] = kids;
      for (std::size_t c = 0; c < kids; ++c, ++next) {
        g.parent_[next] = v;
        adj[v].push_back(next);
        adj[next].push_back(v);
      }
    }
    shell_begin = shell_end;
    shell_end = next;
  }
  // Parent first in each row keeps neighbor order deterministic.
  for (VertexId v = 1; v < n; ++v) {
    std::rotate(adj[v].begin(), std::find(adj[v].begin(), adj[v].end(), g.parent_[v]),
                std::find(adj[v].begin(), adj[v].end(), g.parent_[v]) + 1);
  }
  g.finalize(adj, 0);
  return g;
}

Graph make_box(const std::vector<std::size_t>& dims) {
  if (dims.empty()) throw std::invalid_argument("box needs at least one dimension");
  std::size_t n = 1;
  for (std::size_t L : dims) {
    if (L == 0) throw std::invalid_argument("box dimension must be positive");
    n *= L;
  }
  std::vector<std::size_t> stride(dims.size(), 1);
  for (std::size_t i = dims.size() - 1; i > 0; --i) stride[i - 1] = stride[i] * dims[i];

  std::vector<std::vector<VertexId>> adj(n);
  for (VertexId v = 0; v < n; ++v) {
    for (std::size_t axis = 0; axis < dims.size(); ++axis) {
      const std::size_t coord = (v / stride[axis]) % dims[axis];
      if (coord > 0) adj[v].push_back(v - stride[axis]);
      if (coord + 1 < dims[axis]) adj[v].push_back(v + stride[axis]);
    }
    std::sort(adj[v].begin(), adj[v].end());
  }
  VertexId center = 0;
  for (std::size_t axis = 0; axis < dims.size(); ++axis) center += (dims[axis] / 2) * stride[axis];

  Graph g;
  g.kind_ = GraphKind::box;
  g.dims_ = dims;
  g.finalize(adj, center);
  return g;
}

Graph make_complete(std::size_t n) {
  if (n == 0) throw std::invalid_argument("complete graph needs N >= 1");
  std::vector<std::vector<VertexId>> adj(n);
  for (VertexId v = 0; v < n; ++v)
    for (VertexId w = 0; w < n; ++w)
      if (v != w) adj[v].push_back(w);
  Graph g;
  g.kind_ = GraphKind::complete;
  g.finalize(adj, 0);
  return g;
}

Graph make_custom(std::size_t n, const std::vector<std::pair<VertexId, VertexId>>& edges,
                  VertexId origin) {
  if (n == 0) throw std::invalid_argument("custom graph needs N >= 1");
  if (origin >= n) throw std::invalid_argument("custom graph origin out of range");
  std::vector<std::vector<VertexId>> adj(n);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
    if (u == v) throw std::invalid_argument("self-loops are not allowed");
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    if (std::adjacent_find(row.begin(), row.end()) != row.end())
      throw std::invalid_argument("duplicate edge");
  }
  Graph g;
  g.kind_ = GraphKind::custom;
  g.finalize(adj, origin);
  return g;
}

SphereIndex sphere(const Graph& g, VertexId center, int radius) {
  if (center >= g.vertex_count()) throw std::out_of_range("sphere center out of range");
  if (radius < 0) throw std::invalid_argument("sphere radius must be >= 0");
  SphereIndex s{center, radius, {}};
  if (g.kind() == GraphKind::tree && center == g.origin()) {
    const auto [b, e] = g.shell_range(radius);
    for (VertexId v = b; v < e; ++v) s.members.push_back(v);
    return s;
  }
  const auto dist = g.distances_from(center);
  for (VertexId v = 0; v < dist.size(); ++v)
    if (dist[v] == radius) s.members.push_back(v);
  return s;
}

double chi(const Graph& g, int radius) {
  const auto s = sphere(g, g.origin(), radius);
  if (s.members.empty()) throw std::domain_error("chi undefined: empty sphere");
  return std::log(static_cast<double>(s.members.size()));
}

}  // namespace resdeloc
