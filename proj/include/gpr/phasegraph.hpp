#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gpr/core.hpp"
#include "gpr/framegen.hpp"
#include "gpr/settools.hpp"

namespace gpr {

inline constexpr double kVanishTolerance = 1e-10;

/// Edge between lattice vertices u and v = u + (q, p). The relative phase,
/// once attached, is omega = phase(c_u) / phase(c_v); the reverse orientation
/// carries conj(omega).
struct PhaseEdge {
  int u = 0;
  int v = 0;
  int q = 0;  ///< shift taking u to v
  int p = 0;
  std::optional<cplx> omega;
  bool pruned = false;
};

/// Graph (Lambda, E) with E = {(k,l) -> (k+q, l+p) : q in Q, p in P}. Vertex i
/// is lattice point i. Pairs reached by several shifts are stored once, in the
/// orientation first met when scanning u, then (q, p), lexicographically.
/// The (0,0) shift produces self-pairs that are counted but not stored.
struct PhaseGraph {
  Lattice lattice;
  IndexSet Q;
  IndexSet P;
  std::vector<PhaseEdge> edges;
  int self_pairs = 0;
  int removed_edges = 0;
  std::vector<int> flagged_vertices;  ///< vertices deemed vanishing by pruning

  int vertex_count() const { return lattice.size(); }
  /// Adjacency lists over unpruned edges: (neighbor, edge id).
  std::vector<std::vector<std::pair<int, int>>> adjacency() const;
};

PhaseGraph build_edges(const Lattice& lattice, const IndexSet& Q, const IndexSet& P);

/// Number of directed pairs (u, u + (q, p)) with (q, p) != (0, 0) landing in
/// Lambda, per vertex.
std::vector<int> out_degrees(const PhaseGraph& graph);

enum class SpectralStructure { automatic, dense };
enum class SpectralMethod { circulant, dense };
std::string to_string(SpectralMethod m);

struct SpectralReport {
  double gap = 0.0;
  double lambda_max = 0.0;
  SpectralMethod method = SpectralMethod::dense;
  std::vector<cplx> eigenvalues;  ///< dense only, sorted by modulus descending
};

/// Spectral gap of the adjacency A(u, v) = 1_Q(k_v - k_u) 1_P(l_v - l_u) on
/// Lambda (self-pairs included on the diagonal, matching the Kronecker form
/// Circ(1_Q) (x) Circ(1_P)). The circulant route needs T = F = Z_M; dense
/// handles any lattice but requires a regular graph.
SpectralReport spectral_gap(const PhaseGraph& graph, SpectralStructure structure = SpectralStructure::automatic);

/// 1 - max{bias(Q)/P(Q), bias(P)/P(P)}: the gap of the full cyclic lattice
/// graph, computed from two transforms.
double kronecker_gap(const IndexSet& Q, const IndexSet& P);

/// Marks every edge touching a vertex with |coeff| <= tol * scale as pruned.
PhaseGraph prune_edges(PhaseGraph graph, const std::vector<double>& magnitudes, double scale,
                       double tol = kVanishTolerance);
PhaseGraph prune_edges(PhaseGraph graph, const std::vector<cplx>& coeffs, double scale,
                       double tol = kVanishTolerance);

struct Components {
  std::vector<int> label;  ///< smallest vertex id of the component
  std::vector<int> size_of_label;  ///< indexed by label; 0 for non-representatives
  int largest_label = 0;   ///< ties go to the smallest label
  int largest_size = 0;
  int count = 0;

  std::vector<int> members(int label_id) const;
};

/// Components over unpruned edges, by breadth-first search.
Components connected_components(const PhaseGraph& graph);
/// Same labeling by union-find; kept as an independent check.
Components connected_components_union_find(const PhaseGraph& graph);

/// |Lambda| (1 - 2 deleted / (|Lambda| gap)): component size guaranteed after
/// deleting the edges of `deleted_vertices` vertices.
double component_bound(int lattice_size, double gap, int deleted_vertices);

}  // namespace gpr
