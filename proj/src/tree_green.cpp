#include "resdeloc/tree_green.hpp"

#include <cmath>
#include <stdexcept>

namespace resdeloc {

TreeBoundary tree_boundary_from_string(const std::string& s) {
  if (s == "free") return TreeBoundary::free;
  if (s == "stationary") return TreeBoundary::stationary;
  if (s == "real") return TreeBoundary::real;
  throw std::invalid_argument("unknown tree boundary '" + s + "'");
}

std::string to_string(TreeBoundary b) {
  switch (b) {
    case TreeBoundary::free: return "free";
    case TreeBoundary::stationary: return "stationary";
    case TreeBoundary::real: return "real";
  }
  return "free";
}

cplx free_branch_green(int branching, cplx z) {
  const double k = branching;
  const cplx root = std::sqrt(z * z - 4.0 * k);
  const cplx a = (-z + root) / (2.0 * k);
  const cplx b = (-z - root) / (2.0 * k);
  return a.imag() >= b.imag() ? a : b;
}

BoundaryPool make_boundary_pool(const OperatorModel& model, ComplexEnergy z, int size, int sweeps) {
  if (model.graph.kind() != GraphKind::tree) throw std::invalid_argument("boundary pool needs a tree model");
  if (size < 1 || sweeps < 0) throw std::invalid_argument("boundary pool size/sweeps invalid");
  const int k = model.graph.branching();
  const cplx zz = z.z();
  BoundaryPool pool{z, std::vector<cplx>(static_cast<std::size_t>(size), free_branch_green(k, zz))};
  std::vector<cplx> next(pool.values.size());
  Rng rng = make_stream(model.seed, StreamTag::boundary_pool);
  std::uniform_int_distribution<std::size_t> pick(0, pool.values.size() - 1);
  for (int s = 0; s < sweeps; ++s) {
    for (auto& out : next) {
      cplx d = model.lambda * model.dist.sample(rng) - zz;
      for (int c = 0; c < k; ++c) d -= pool.values[pick(rng)];
      out = 1.0 / d;
    }
    pool.values.swap(next);
  }
  return pool;
}

BoundaryPool make_real_boundary_pool(const OperatorModel& model, ComplexEnergy z, int size, int sweeps) {
  if (model.graph.kind() != GraphKind::tree) throw std::invalid_argument("boundary pool needs a tree model");
  if (size < 1 || sweeps < 0) throw std::invalid_argument("boundary pool size/sweeps invalid");
  if (!model.dist.has_density() || !(model.lambda > 0))
    throw std::invalid_argument("real boundary pool needs lambda > 0 and a law with a density");
  const int k = model.graph.branching();
  BoundaryPool pool{z, std::vector<cplx>(static_cast<std::size_t>(size), cplx{})};
  std::vector<cplx> next(pool.values.size());
  Rng rng = make_stream(model.seed, StreamTag::boundary_pool, {1});
  std::uniform_int_distribution<std::size_t> pick(0, pool.values.size() - 1);
  for (int s = 0; s < sweeps; ++s) {
    for (auto& out : next) {
      double d = model.lambda * model.dist.sample(rng) - z.E;
      for (int c = 0; c < k; ++c) d -= pool.values[pick(rng)].real();
      out = 1.0 / d;
    }
    pool.values.swap(next);
  }
  return pool;
}

std::optional<BoundaryPool> make_pool(const OperatorModel& model, ComplexEnergy z, TreeBoundary b) {
  switch (b) {
    case TreeBoundary::free: return std::nullopt;
    case TreeBoundary::stationary: return make_boundary_pool(model, z);
    case TreeBoundary::real: return make_real_boundary_pool(model, z);
  }
  return std::nullopt;
}

TreeGreen::TreeGreen(const OperatorModel& model, const PotentialSample& sample, ComplexEnergy z,
                     TreeBoundary boundary, const BoundaryPool* pool, bool up_functions)
    : g_(&model.graph), v_(&sample.values), z_(z) {
  const Graph& g = model.graph;
  if (g.kind() != GraphKind::tree) throw std::invalid_argument("TreeGreen requires a tree topology");
  if (model.hopping != 1.0) throw std::invalid_argument("TreeGreen assumes unit hopping");
  if (sample.values.size() != g.vertex_count()) throw std::invalid_argument("TreeGreen: sample size mismatch");
  const cplx zz = z.z();
  const std::size_t n = g.vertex_count();
  const auto [leaf_begin, leaf_end] = g.shell_range(g.depth());
  leaf_begin_ = leaf_begin;
  leaf_b_.assign(leaf_end - leaf_begin, cplx{});

  if (needs_pool(boundary)) {
    if (pool == nullptr || pool->values.empty()) throw std::invalid_argument(to_string(boundary) + " boundary needs a pool");
    Rng rng = make_stream(model.seed, StreamTag::boundary_leaf, sample.stream_key);
    std::uniform_int_distribution<std::size_t> pick(0, pool->values.size() - 1);
    for (auto& b : leaf_b_)
      for (int c = 0; c < g.branching(); ++c) b += pool->values[pick(rng)];
  }

  gamma_.resize(n);
  const auto& v = sample.values;
  for (std::size_t i = n; i-- > 0;) {
    cplx d = v[i] - zz;
    if (i >= leaf_begin_) {
      d -= leaf_b_[i - leaf_begin_];
    } else {
      const VertexId c0 = g.first_child(i);
      for (std::size_t c = 0; c < g.child_count(i); ++c) d -= gamma_[c0 + c];
    }
    gamma_[i] = 1.0 / d;
  }
  {
    cplx d = v[0] - zz;
    for (std::size_t c = 0; c < g.child_count(0); ++c) d -= gamma_[g.first_child(0) + c];
    g00_ = 1.0 / d;
  }

  if (up_functions) {
    up_.assign(n, cplx{});
    const auto [interior_begin, interior_end] = std::pair<VertexId, VertexId>{0, leaf_begin_};
    for (VertexId p = interior_begin; p < interior_end; ++p) {
      const VertexId c0 = g.first_child(p);
      const std::size_t kids = g.child_count(p);
      for (std::size_t j = 0; j < kids; ++j) {
        cplx d = v[p] - zz;
        for (std::size_t c = 0; c < kids; ++c)
          if (c != j) d -= gamma_[c0 + c];
        if (p != 0) d -= up_[p];
        up_[c0 + j] = 1.0 / d;
      }
    }
  }
}

cplx TreeGreen::up(VertexId v) const {
  if (up_.empty()) throw std::logic_error("TreeGreen built without up functions");
  if (v == 0) throw std::invalid_argument("the root has no up function");
  return up_[v];
}

cplx TreeGreen::leaf_boundary(VertexId v) const {
  return v >= leaf_begin_ ? leaf_b_[v - leaf_begin_] : cplx{};
}

cplx TreeGreen::branch_sum_except(VertexId v, VertexId skip) const {
  cplx s = leaf_boundary(v);
  if (v < leaf_begin_) {
    const VertexId c0 = g_->first_child(v);
    for (std::size_t c = 0; c < g_->child_count(v); ++c)
      if (c0 + c != skip) s += gamma_[c0 + c];
  }
  if (v != 0 && g_->parent(v) != skip) s += up(v);
  return s;
}

cplx TreeGreen::diagonal(VertexId x) const {
  if (x == 0) return g00_;
  return 1.0 / (potential(x) - z_.z() - branch_sum_except(x, static_cast<VertexId>(-1)));
}

cplx TreeGreen::self_energy(VertexId x) const {
  if (x == 0) return potential(0) - 1.0 / g00_;
  return z_.z() + branch_sum_except(x, static_cast<VertexId>(-1));
}

cplx TreeGreen::g_ratio(VertexId x) const {
  cplx g = 1.0;
  for (VertexId v = x; v != 0; v = g_->parent(v)) g *= -gamma_[v];
  return g;
}

cplx TreeGreen::g_ratio_with(VertexId x, double vx) const {
  if (x == 0) return 1.0;
  const cplx zz = z_.z();
  cplx d = vx - zz - leaf_boundary(x);
  if (x < leaf_begin_) {
    const VertexId c0 = g_->first_child(x);
    for (std::size_t c = 0; c < g_->child_count(x); ++c) d -= gamma_[c0 + c];
  }
  cplx gam = 1.0 / d;
  cplx g = -gam;
  for (VertexId v = x, p = g_->parent(x); p != 0; v = p, p = g_->parent(p)) {
    cplx dp = potential(p) - zz - gam;
    const VertexId c0 = g_->first_child(p);
    for (std::size_t c = 0; c < g_->child_count(p); ++c)
      if (c0 + c != v) dp -= gamma_[c0 + c];
    gam = 1.0 / dp;
    g *= -gam;
  }
  return g;
}

RootPair TreeGreen::root_pair(VertexId x) const {
  const cplx zz = z_.z();
  const int n = g_->level(x);
  RootPair out;
  if (n == 0) {
    out.tau = 1.0;
    out.root_gap = 1.0 / g00_;
    out.site_gap = out.root_gap;
    return out;
  }
  // Path 0 = x_0, x_1, ..., x_n = x.
  std::vector<VertexId> path(static_cast<std::size_t>(n) + 1);
  for (VertexId v = x, k = static_cast<VertexId>(n);; v = g_->parent(v), --k) {
    path[k] = v;
    if (k == 0) break;
  }
  auto children_except = [&](VertexId v, VertexId skip) {
    cplx s = leaf_boundary(v);
    if (v < leaf_begin_) {
      const VertexId c0 = g_->first_child(v);
      for (std::size_t c = 0; c < g_->child_count(v); ++c)
        if (c0 + c != skip) s += gamma_[c0 + c];
    }
    return s;
  };
  const cplx x_local = potential(x) - zz - children_except(x, static_cast<VertexId>(-1));
  if (n == 1) {
    out.tau = -1.0;
    out.root_gap = potential(0) - zz - children_except(0, x);
    out.site_gap = x_local;
    return out;
  }
  // Interior chain x_1..x_{n-1} with both endpoints removed.
  const std::size_t m = static_cast<std::size_t>(n) - 1;
  std::vector<cplx> d(m);
  for (std::size_t k = 0; k < m; ++k)
    d[k] = potential(path[k + 1]) - zz - children_except(path[k + 1], path[k + 2]);
  cplx back = 1.0 / d[m - 1];
  cplx prod = back;
  for (std::size_t k = m - 1; k-- > 0;) {
    back = 1.0 / (d[k] - back);
    prod *= back;
  }
  out.tau = (n % 2 == 0 ? 1.0 : -1.0) * prod;
  out.root_gap = potential(0) - zz - children_except(0, path[1]) - back;
  cplx fwd = 1.0 / d[0];
  for (std::size_t k = 1; k < m; ++k) fwd = 1.0 / (d[k] - fwd);
  out.site_gap = x_local - fwd;
  return out;
}

TreePair TreeGreen::pair(VertexId x, VertexId y) const {
  if (x == y) throw std::invalid_argument("TreeGreen::pair requires x != y");
  if (x == 0 || y == 0) {
    const bool root_first = x == 0;
    const RootPair rp = root_pair(root_first ? y : x);
    const cplx root_sigma = potential(0) - rp.root_gap;
    const cplx site_sigma = potential(root_first ? y : x) - rp.site_gap;
    return root_first ? TreePair{root_sigma, site_sigma, rp.tau} : TreePair{site_sigma, root_sigma, rp.tau};
  }
  // Path x -> lca -> y.
  std::vector<VertexId> up_x{x}, up_y{y};
  VertexId a = x, b = y;
  while (g_->level(a) > g_->level(b)) up_x.push_back(a = g_->parent(a));
  while (g_->level(b) > g_->level(a)) up_y.push_back(b = g_->parent(b));
  while (a != b) {
    up_x.push_back(a = g_->parent(a));
    up_y.push_back(b = g_->parent(b));
  }
  std::vector<VertexId> path = up_x;
  for (std::size_t i = up_y.size() - 1; i-- > 0;) path.push_back(up_y[i]);

  const cplx zz = z_.z();
  const std::size_t m = path.size() - 2;
  if (m == 0) {
    return {zz + branch_sum_except(x, y), zz + branch_sum_except(y, x), -1.0};
  }
  std::vector<cplx> d(m);
  for (std::size_t k = 0; k < m; ++k) {
    const VertexId u = path[k + 1];
    cplx s = leaf_boundary(u);
    if (u < leaf_begin_) {
      const VertexId c0 = g_->first_child(u);
      for (std::size_t c = 0; c < g_->child_count(u); ++c)
        if (c0 + c != path[k] && c0 + c != path[k + 2]) s += gamma_[c0 + c];
    }
    if (u != 0 && g_->parent(u) != path[k] && g_->parent(u) != path[k + 2]) s += up(u);
    d[k] = potential(u) - zz - s;
  }
  cplx back = 1.0 / d[m - 1];
  cplx prod = 1.0;
  for (std::size_t k = m - 1; k-- > 0;) {
    prod *= -back;
    back = 1.0 / (d[k] - back);
  }
  const cplx tau = back * prod;
  cplx fwd = 1.0 / d[0];
  for (std::size_t k = 1; k < m; ++k) fwd = 1.0 / (d[k] - fwd);
  return {zz + branch_sum_except(x, path[1]) + back, zz + branch_sum_except(y, path[m]) + fwd, tau};
}

std::vector<cplx> TreeGreen::root_row() const {
  std::vector<cplx> row(gamma_.size());
  row[0] = g00_;
  for (VertexId v = 1; v < row.size(); ++v) row[v] = -gamma_[v] * row[g_->parent(v)];
  return row;
}

double TreeGreen::root_leakage(const std::vector<cplx>& row) const {
  double s = 0.0;
  for (std::size_t i = 0; i < leaf_b_.size(); ++i) s += std::norm(row[leaf_begin_ + i]) * leaf_b_[i].imag();
  return s;
}

ShellTau tree_tau_recursion(const TreeGreen& tg, int radius) {
  const Graph& g = tg.graph();
  if (radius < 0 || radius > g.depth()) throw std::invalid_argument("tree_tau_recursion: radius outside tree");
  ShellTau out;
  out.radius = radius;
  const auto [b, e] = g.shell_range(radius);
  for (VertexId v = b; v < e; ++v) {
    out.vertices.push_back(v);
    out.tau.push_back(tg.tau_root(v));
    out.forward.push_back(tg.forward(v));
  }
  return out;
}

}  // namespace resdeloc
