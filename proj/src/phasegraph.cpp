#include "gpr/phasegraph.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_map>

namespace gpr {

std::vector<std::vector<std::pair<int, int>>> PhaseGraph::adjacency() const {
  std::vector<std::vector<std::pair<int, int>>> adj(static_cast<std::size_t>(vertex_count()));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& edge = edges[e];
    if (edge.pruned) continue;
    adj[static_cast<std::size_t>(edge.u)].emplace_back(edge.v, static_cast<int>(e));
    adj[static_cast<std::size_t>(edge.v)].emplace_back(edge.u, static_cast<int>(e));
  }
  return adj;
}

PhaseGraph build_edges(const Lattice& lattice, const IndexSet& Q, const IndexSet& P) {
  const int M = lattice.modulus();
  if (Q.modulus() != M || P.modulus() != M) throw ValidationError("build_edges: Q, P must live in Z_M");
  PhaseGraph graph{lattice, Q, P, {}, 0, 0, {}};
  const auto n = static_cast<long long>(lattice.size());
  std::unordered_map<long long, int> seen;
  for (int u = 0; u < lattice.size(); ++u) {
    const TFIndex a = lattice.point(u);
    for (int q : Q.members()) {
      for (int p : P.members()) {
        if (q == 0 && p == 0) {
          ++graph.self_pairs;
          continue;
        }
        const int v = lattice.index_of(TFIndex(a.k + q, a.l + p, M));
        if (v < 0) continue;
        const long long key = std::min(u, v) * n + std::max(u, v);
        if (seen.contains(key)) continue;
        seen.emplace(key, static_cast<int>(graph.edges.size()));
        graph.edges.push_back({u, v, q, p, std::nullopt, false});
      }
    }
  }
  return graph;
}

std::vector<int> out_degrees(const PhaseGraph& graph) {
  const int M = graph.lattice.modulus();
  std::vector<int> deg(static_cast<std::size_t>(graph.vertex_count()), 0);
  for (int u = 0; u < graph.vertex_count(); ++u) {
    const TFIndex a = graph.lattice.point(u);
    for (int q : graph.Q.members()) {
      for (int p : graph.P.members()) {
        if (q == 0 && p == 0) continue;
        if (graph.lattice.index_of(TFIndex(a.k + q, a.l + p, M)) >= 0) ++deg[static_cast<std::size_t>(u)];
      }
    }
  }
  return deg;
}

std::string to_string(SpectralMethod m) { return m == SpectralMethod::circulant ? "circulant" : "dense"; }

double kronecker_gap(const IndexSet& Q, const IndexSet& P) {
  if (Q.empty() || P.empty()) throw ValidationError("kronecker_gap: Q and P must be nonempty");
  const double rq = fourier_bias(Q) / density(Q);
  const double rp = fourier_bias(P) / density(P);
  return std::clamp(1.0 - std::max(rq, rp), 0.0, 1.0);
}

namespace {

SpectralReport dense_gap(const PhaseGraph& graph) {
  const int M = graph.lattice.modulus();
  const int n = graph.vertex_count();
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  for (int u = 0; u < n; ++u) {
    const TFIndex a = graph.lattice.point(u);
    for (int q : graph.Q.members()) {
      for (int p : graph.P.members()) {
        const int v = graph.lattice.index_of(TFIndex(a.k + q, a.l + p, M));
        if (v >= 0) A(u, v) += 1.0;
      }
    }
  }
  const Eigen::VectorXd rows = A.real().rowwise().sum();
  const Eigen::VectorXd cols = A.real().colwise().sum().transpose();
  const double degree = rows(0);
  for (int i = 0; i < n; ++i) {
    if (rows(i) != degree || cols(i) != degree) {
      throw ValidationError("spectral_gap: graph is not regular (vertex " + std::to_string(i) + " has degree " +
                            std::to_string(rows(i)) + ", expected " + std::to_string(degree) + ")");
    }
  }
  if (degree == 0.0) throw ValidationError("spectral_gap: graph has no adjacency");

  SpectralReport rep;
  rep.method = SpectralMethod::dense;
  rep.lambda_max = degree;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(A, false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("spectral_gap: eigensolver did not converge");
  const Eigen::VectorXcd ev = solver.eigenvalues();
  rep.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::stable_sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), [](cplx a, cplx b) {
    if (std::abs(a) != std::abs(b)) return std::abs(a) > std::abs(b);
    return a.real() > b.real();
  });
  if (n == 1) {
    rep.gap = 1.0;
    return rep;
  }
  // Drop the Perron eigenvalue (the one nearest the degree) and take the rest.
  std::size_t top = 0;
  for (std::size_t i = 1; i < rep.eigenvalues.size(); ++i) {
    if (std::abs(rep.eigenvalues[i] - degree) < std::abs(rep.eigenvalues[top] - degree)) top = i;
  }
  double second = 0.0;
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
    if (i != top) second = std::max(second, std::abs(rep.eigenvalues[i]));
  }
  rep.gap = std::clamp(1.0 - second / degree, 0.0, 1.0);
  return rep;
}

}  // namespace

SpectralReport spectral_gap(const PhaseGraph& graph, SpectralStructure structure) {
  if (structure == SpectralStructure::automatic && graph.lattice.is_full()) {
    SpectralReport rep;
    rep.method = SpectralMethod::circulant;
    rep.lambda_max = static_cast<double>(graph.Q.size()) * graph.P.size();
    rep.gap = kronecker_gap(graph.Q, graph.P);
    return rep;
  }
  return dense_gap(graph);
}

PhaseGraph prune_edges(PhaseGraph graph, const std::vector<double>& magnitudes, double scale, double tol) {
  if (static_cast<int>(magnitudes.size()) != graph.vertex_count()) {
    throw ValidationError("prune_edges: need one coefficient per vertex");
  }
  std::vector<char> flagged(magnitudes.size(), 0);
  for (std::size_t v = 0; v < magnitudes.size(); ++v) {
    if (magnitudes[v] <= tol * scale) {
      flagged[v] = 1;
      graph.flagged_vertices.push_back(static_cast<int>(v));
    }
  }
  for (auto& e : graph.edges) {
    if (e.pruned) continue;
    if (flagged[static_cast<std::size_t>(e.u)] || flagged[static_cast<std::size_t>(e.v)]) {
      e.pruned = true;
      ++graph.removed_edges;
    }
  }
  return graph;
}

PhaseGraph prune_edges(PhaseGraph graph, const std::vector<cplx>& coeffs, double scale, double tol) {
  std::vector<double> mags(coeffs.size());
  std::transform(coeffs.begin(), coeffs.end(), mags.begin(), [](cplx c) { return std::abs(c); });
  return prune_edges(std::move(graph), mags, scale, tol);
}

std::vector<int> Components::members(int label_id) const {
  std::vector<int> out;
  for (std::size_t v = 0; v < label.size(); ++v) {
    if (label[v] == label_id) out.push_back(static_cast<int>(v));
  }
  return out;
}

namespace {

Components finish(std::vector<int> label) {
  Components c;
  c.size_of_label.assign(label.size(), 0);
  for (int l : label) ++c.size_of_label[static_cast<std::size_t>(l)];
  for (std::size_t l = 0; l < c.size_of_label.size(); ++l) {
    const int s = c.size_of_label[l];
    if (s == 0) continue;
    ++c.count;
    if (s > c.largest_size) {
      c.largest_size = s;
      c.largest_label = static_cast<int>(l);
    }
  }
  c.label = std::move(label);
  return c;
}

}  // namespace

Components connected_components(const PhaseGraph& graph) {
  const int n = graph.vertex_count();
  const auto adj = graph.adjacency();
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  std::deque<int> queue;
  for (int s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    label[static_cast<std::size_t>(s)] = s;
    queue.push_back(s);
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (auto [v, e] : adj[static_cast<std::size_t>(u)]) {
        if (label[static_cast<std::size_t>(v)] < 0) {
          label[static_cast<std::size_t>(v)] = s;
          queue.push_back(v);
        }
      }
    }
  }
  return finish(std::move(label));
}

Components connected_components_union_find(const PhaseGraph& graph) {
  const int n = graph.vertex_count();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) {
      parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
      v = parent[static_cast<std::size_t>(v)];
    }
    return v;
  };
  for (const auto& e : graph.edges) {
    if (e.pruned) continue;
    const int a = find(e.u);
    const int b = find(e.v);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
  std::vector<int> label(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) label[static_cast<std::size_t>(v)] = find(v);
  return finish(std::move(label));
}

double component_bound(int lattice_size, double gap, int deleted_vertices) {
  if (!(gap > 0.0)) throw ValidationError("component_bound: spectral gap must be positive");
  if (lattice_size <= 0 || deleted_vertices < 0) throw ValidationError("component_bound: invalid sizes");
  const double n = lattice_size;
  return n * (1.0 - 2.0 * deleted_vertices / (n * gap));
}

}  // namespace gpr
