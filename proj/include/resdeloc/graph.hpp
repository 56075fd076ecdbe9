#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace resdeloc {

using VertexId = std::size_t;

enum class GraphKind { box, tree, complete, custom };

std::string to_string(GraphKind kind);

/// Sorted list of vertices at a fixed graph distance from a center.
struct SphereIndex {
  VertexId center = 0;
  int radius = 0;
  std::vector<VertexId> members;
};

/// Finite connected graph with unit-weight adjacency stored in CSR form.
///
/// Trees are laid out in breadth-first order: the root is vertex 0, every
/// shell occupies a contiguous index range, and the children of a vertex are
/// contiguous. The root has K+1 children, every other interior vertex has K.
/// Boxes use free boundaries and row-major indexing with the last dimension
/// fastest; their origin is the central vertex.
///
/// Immutable after construction.
class Graph {
 public:
  GraphKind kind() const { return kind_; }
  std::size_t vertex_count() const { return offsets_.size() - 1; }
  std::size_t edge_count() const { return neighbors_.size() / 2; }
  VertexId origin() const { return origin_; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const;
  bool adjacent(VertexId u, VertexId v) const;

  /// Graph distances from the origin (precomputed).
  std::span<const int> origin_distances() const { return origin_dist_; }
  /// BFS distances from an arbitrary source; O(N).
  std::vector<int> distances_from(VertexId source) const;
  /// Full distance matrix, row-major; only allowed for N <= 4096.
  std::vector<int> distance_matrix() const;
  int eccentricity(VertexId v) const;

  /// Spectral norm of the adjacency matrix, by power iteration.
  double adjacency_norm() const;

  const std::vector<std::size_t>& dims() const { return dims_; }

  // Tree structure; only meaningful when kind() == GraphKind::tree.
  int branching() const { return branching_; }
  int depth() const { return depth_; }
  VertexId parent(VertexId v) const { return parent_[v]; }
  int level(VertexId v) const { return origin_dist_[v]; }
  std::size_t child_count(VertexId v) const { return child_count_[v]; }
  VertexId first_child(VertexId v) const { return first_child_[v]; }
  /// Index range [begin, end) of the vertices at depth d.
  std::pair<VertexId, VertexId> shell_range(int d) const;

  friend Graph make_tree(int branching, int depth);
  friend Graph make_box(const std::vector<std::size_t>& dims);
  friend Graph make_complete(std::size_t n);
  friend Graph make_custom(std::size_t n, const std::vector<std::pair<VertexId, VertexId>>& edges,
                           VertexId origin);

 private:
  Graph() = default;
  void finalize(const std::vector<std::vector<VertexId>>& adjacency, VertexId origin);

  GraphKind kind_ = GraphKind::custom;
  std::vector<std::size_t> offsets_{0};
  std::vector<VertexId> neighbors_;
  VertexId origin_ = 0;
  std::vector<int> origin_dist_;
  std::vector<std::size_t> dims_;

  int branching_ = 0;
  int depth_ = 0;
  std::vector<VertexId> parent_;
  std::vector<VertexId> first_child_;
  std::vector<std::size_t> child_count_;
};

/// Rooted truncation of the (K+1)-regular tree to depth D.
Graph make_tree(int branching, int depth);
Graph make_box(const std::vector<std::size_t>& dims);
Graph make_complete(std::size_t n);
/// Throws std::invalid_argument if the edge list does not describe a simple
/// connected graph on n vertices.
Graph make_custom(std::size_t n, const std::vector<std::pair<VertexId, VertexId>>& edges,
                  VertexId origin = 0);

/// Exact graph-distance sphere; empty when R exceeds the eccentricity.
SphereIndex sphere(const Graph& g, VertexId center, int radius);

/// Natural log of the size of the origin-centred sphere of radius R.
double chi(const Graph& g, int radius);

/// Number of vertices at distance R from the tree root, without building it.
std::size_t tree_sphere_size(int branching, int radius);

}  // namespace resdeloc
