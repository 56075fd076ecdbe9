#pragma once

#include <optional>
#include <vector>

#include "resdeloc/model.hpp"
#include "resdeloc/resolvent.hpp"

namespace resdeloc {

/// How the leaves of a finite tree are closed.
///   free: leaves see nothing beyond depth D.
///   stationary: every leaf gets K virtual children drawn from a population
///     of branch Green functions of the infinite disordered tree.
///   real: as stationary, but the population solves the recursion on the
///     real axis (eta = 0), so Im Sigma stays of order eta. This stands in
///     for arbitrarily deep free subtrees.
enum class TreeBoundary { free, stationary, real };

TreeBoundary tree_boundary_from_string(const std::string& s);
std::string to_string(TreeBoundary b);

/// Forward Green function of the disorder-free K-branching tree: the root of
/// K G^2 + z G + 1 = 0 with Im G > 0.
cplx free_branch_green(int branching, cplx z);

/// Population of branch Green functions at z. Its randomness depends only on
/// the model seed, so pools at different z use common random numbers.
struct BoundaryPool {
  ComplexEnergy z;
  std::vector<cplx> values;
};

BoundaryPool make_boundary_pool(const OperatorModel& model, ComplexEnergy z, int size = 4096,
                                int sweeps = 128);
/// Real-axis population at energy E; needs a law with a density and lambda > 0.
BoundaryPool make_real_boundary_pool(const OperatorModel& model, ComplexEnergy z, int size = 4096,
                                     int sweeps = 128);

inline bool needs_pool(TreeBoundary b) { return b != TreeBoundary::free; }
/// The pool matching `b`, or nullopt for the free boundary.
std::optional<BoundaryPool> make_pool(const OperatorModel& model, ComplexEnergy z, TreeBoundary b);

/// Two-site Schur data of a tree pair; tau_xy == tau_yx on trees.
struct TreePair {
  cplx sigma_x;
  cplx sigma_y;
  cplx tau;
};

/// Quantities for the pair (root, x) needed by the resonance events.
struct RootPair {
  cplx tau;       // tau(0,x) = tau(x,0)
  cplx root_gap;  // V(0) - sigma(0)
  cplx site_gap;  // V(x) - sigma(x)
};

/// Green function data of H = A + V on a rooted tree at one z. Keeps
/// pointers to the model's graph and the sample; both must outlive it.
///
/// Gamma_v is the Green function at v of the subtree hanging below v,
/// U_v the Green function at parent(v) of the tree with that subtree cut
/// off. Both are computed explicitly (no subtraction of sums).
class TreeGreen {
 public:
  /// pool must be non-null unless the boundary is free.
  TreeGreen(const OperatorModel& model, const PotentialSample& sample, ComplexEnergy z,
            TreeBoundary boundary, const BoundaryPool* pool = nullptr, bool up_functions = false);

  ComplexEnergy energy() const { return z_; }
  const Graph& graph() const { return *g_; }
  double potential(VertexId v) const { return (*v_)[v]; }

  cplx forward(VertexId v) const { return gamma_[v]; }
  cplx up(VertexId v) const;
  cplx leaf_boundary(VertexId v) const;
  bool has_up_functions() const { return !up_.empty(); }

  cplx G00() const { return g00_; }
  cplx diagonal(VertexId x) const;
  /// Sigma(x) = V(x) - 1/G(x,x).
  cplx self_energy(VertexId x) const;
  /// G(0,x)/G(0,0) as the product of -Gamma along the path.
  cplx g_ratio(VertexId x) const;
  /// g_ratio after V(x) := vx (effective potential), without rebuilding.
  cplx g_ratio_with(VertexId x, double vx) const;
  /// tau(0,0) = 1 by convention; tau(0,x) = -1 for neighbours.
  cplx tau_root(VertexId x) const { return root_pair(x).tau; }
  RootPair root_pair(VertexId x) const;
  /// Needs up functions unless one of the sites is the root.
  TreePair pair(VertexId x, VertexId y) const;

  /// Row G(0, y) for all y.
  std::vector<cplx> root_row() const;
  /// Sum over leaves of |G(0,l)|^2 Im b_l; Im G00 = eta sum|G(0,y)|^2 + this.
  double root_leakage(const std::vector<cplx>& row) const;

 private:
  cplx branch_sum_except(VertexId v, VertexId skip) const;

  const Graph* g_;
  const std::vector<double>* v_;
  ComplexEnergy z_;
  std::vector<cplx> gamma_;
  std::vector<cplx> up_;
  std::vector<cplx> leaf_b_;
  VertexId leaf_begin_ = 0;
  cplx g00_;
};

/// tau(0,x) for every x on the distance-R shell, with the forward factors
/// Gamma_x of those vertices.
struct ShellTau {
  int radius = 0;
  std::vector<VertexId> vertices;
  std::vector<cplx> tau;
  std::vector<cplx> forward;
};

ShellTau tree_tau_recursion(const TreeGreen& tg, int radius);

}  // namespace resdeloc
