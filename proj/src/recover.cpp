#include "gpr/recover.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <sstream>

#include "gpr/rng.hpp"

namespace gpr {

cplx polarization(const std::array<double, 3>& squared_moduli) {
  cplx s = 0.0;
  for (int t = 0; t < 3; ++t) s += unit_root(-t, 3) * squared_moduli[static_cast<std::size_t>(t)];
  return s / 3.0;
}

namespace {

// Non-throwing core of relative_phase: a conj(b) / (r1 r2).
cplx raw_relative_phase(const std::array<double, 3>& aux, double r1, double r2, int k, int p, int M) {
  return unit_root(static_cast<long long>(k) * p, M) * polarization(aux) / (r1 * r2);
}

}  // namespace

RelativePhase relative_phase(const std::array<double, 3>& aux, double r1, double r2, int k, int p, int M,
                             double threshold) {
  if (!(r1 > threshold) || !(r2 > threshold)) {
    throw EdgeUndefinedError("relative_phase: coefficient magnitude at or below the vanishing threshold");
  }
  const cplx raw = raw_relative_phase(aux, r1, r2, k, p, M);
  const double mod = std::abs(raw);
  return {mod > 0.0 ? raw / mod : cplx(1.0), mod};
}

cplx PhaseSolution::at(int v) const {
  if (v < 0 || v >= static_cast<int>(phase.size()) || !resolved[static_cast<std::size_t>(v)]) {
    throw std::out_of_range("phase of vertex " + std::to_string(v) + " is not determined");
  }
  return phase[static_cast<std::size_t>(v)];
}

PhaseSolution propagate_phases(const PhaseGraph& graph, int root) {
  const int n = graph.vertex_count();
  if (root < 0 || root >= n) throw ValidationError("propagate_phases: root outside the graph");
  PhaseSolution sol;
  sol.phase.assign(static_cast<std::size_t>(n), 0.0);
  sol.resolved.assign(static_cast<std::size_t>(n), 0);
  const auto adj = graph.adjacency();
  std::deque<int> queue{root};
  sol.phase[static_cast<std::size_t>(root)] = 1.0;
  sol.resolved[static_cast<std::size_t>(root)] = 1;
  while (!queue.empty()) {
    const int parent = queue.front();
    queue.pop_front();
    for (auto [child, e] : adj[static_cast<std::size_t>(parent)]) {
      if (sol.resolved[static_cast<std::size_t>(child)]) continue;
      const PhaseEdge& edge = graph.edges[static_cast<std::size_t>(e)];
      if (!edge.omega) throw ValidationError("propagate_phases: edge without a relative phase");
      // omega = phase(u) / phase(v)
      const cplx w = edge.u == child ? *edge.omega : std::conj(*edge.omega);
      sol.phase[static_cast<std::size_t>(child)] = w * sol.phase[static_cast<std::size_t>(parent)];
      sol.resolved[static_cast<std::size_t>(child)] = 1;
      queue.push_back(child);
    }
  }
  return sol;
}

PhaseSolution angular_sync(const PhaseGraph& graph, const std::vector<int>& vertices, const SyncOptions& opts) {
  const int n_all = graph.vertex_count();
  PhaseSolution sol;
  sol.phase.assign(static_cast<std::size_t>(n_all), 0.0);
  sol.resolved.assign(static_cast<std::size_t>(n_all), 0);
  const int n = static_cast<int>(vertices.size());
  if (n == 0) return sol;

  std::vector<int> local(static_cast<std::size_t>(n_all), -1);
  for (int i = 0; i < n; ++i) local[static_cast<std::size_t>(vertices[static_cast<std::size_t>(i)])] = i;

  // Sparse rows of H over the selected vertices.
  std::vector<std::vector<std::pair<int, cplx>>> rows(static_cast<std::size_t>(n));
  for (const auto& e : graph.edges) {
    if (e.pruned) continue;
    const int a = local[static_cast<std::size_t>(e.u)];
    const int b = local[static_cast<std::size_t>(e.v)];
    if (a < 0 || b < 0) continue;
    if (!e.omega) throw ValidationError("angular_sync: edge without a relative phase");
    rows[static_cast<std::size_t>(a)].emplace_back(b, *e.omega);
    rows[static_cast<std::size_t>(b)].emplace_back(a, std::conj(*e.omega));
  }
  double shift = 0.0;
  for (const auto& r : rows) shift = std::max(shift, static_cast<double>(r.size()));

  // All-ones plus a fixed-seed perturbation: all-ones alone is orthogonal to
  // the leading eigenvector whenever the true phases sum to zero.
  Rng start(kSyncStartSeed);
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = 1.0 + start.complex_normal();
  v /= v.norm();
  Eigen::VectorXcd hv(n);
  auto apply = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    for (int i = 0; i < n; ++i) {
      cplx s = 0.0;
      for (auto [j, w] : rows[static_cast<std::size_t>(i)]) s += w * in(j);
      out(i) = s;
    }
  };
  double mu = 0.0;
  double residual = 0.0;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    apply(v, hv);
    mu = v.dot(hv).real();
    residual = (hv - mu * v).norm();
    if (residual <= opts.tolerance * std::max(1.0, std::abs(mu))) break;
    v = hv + shift * v;
    v /= v.norm();
  }
  sol.eigenvalue = mu;
  sol.iterations = it;
  sol.eigen_residual = residual;
  for (int i = 0; i < n; ++i) {
    const int vert = vertices[static_cast<std::size_t>(i)];
    const double a = std::abs(v(i));
    if (a < opts.flag_threshold) {
      sol.flagged.push_back(vert);
      continue;
    }
    sol.phase[static_cast<std::size_t>(vert)] = v(i) / a;
    sol.resolved[static_cast<std::size_t>(vert)] = 1;
  }
  return sol;
}

LeastSquares solve_least_squares(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& c) {
  if (A.rows() != c.size()) throw ValidationError("solve_least_squares: row count differs from data length");
  if (A.rows() < A.cols()) {
    throw RankDeficientError("solve_least_squares: fewer equations than unknowns",
                             std::numeric_limits<double>::infinity());
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  LeastSquares out;
  out.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(smin > kRankTolerance * smax)) {
    std::ostringstream os;
    os << "solve_least_squares: rank-deficient system (condition number " << out.condition << ")";
    throw RankDeficientError(os.str(), out.condition);
  }
  out.solution = svd.solve(c);
  const double cn = c.norm();
  out.residual = cn > 0.0 ? (A * out.solution - c).norm() / cn : (A * out.solution).norm();
  return out;
}

namespace {

Eigen::MatrixXcd analysis_rows(const Signal& g, const std::vector<TFIndex>& vertices) {
  const int M = g.dim();
  Eigen::MatrixXcd A(static_cast<Eigen::Index>(vertices.size()), M);
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const Signal phi = tf_shift(g, vertices[i]);
    for (int m = 0; m < M; ++m) A(static_cast<Eigen::Index>(i), m) = std::conj(phi[m]);
  }
  return A;
}

Eigen::VectorXcd to_eigen(const std::vector<cplx>& v) {
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Signal to_signal(const Eigen::VectorXcd& v) { return Signal(std::vector<cplx>(v.data(), v.data() + v.size())); }

}  // namespace

CoefficientSolve solve_coefficients(const Signal& g, const std::vector<TFIndex>& vertices,
                                    const std::vector<cplx>& coeffs) {
  if (vertices.size() != coeffs.size()) throw ValidationError("solve_coefficients: one coefficient per vertex");
  const auto ls = solve_least_squares(analysis_rows(g, vertices), to_eigen(coeffs));
  return {to_signal(ls.solution), ls.residual, ls.condition};
}

std::string to_string(PhaseMethod m) { return m == PhaseMethod::propagate ? "propagate" : "sync"; }

std::string to_string(ReconstructionStatus s) {
  switch (s) {
    case ReconstructionStatus::success:
      return "success";
    case ReconstructionStatus::component_too_small:
      return "component_too_small";
    case ReconstructionStatus::unresolved_phases:
      return "unresolved_phases";
    case ReconstructionStatus::rank_deficient:
      return "rank_deficient";
  }
  return "unknown";
}

void validate_measurements(const MultiWindowGaborFrame& frame, const MeasurementVector& b) {
  if (b.values.size() != b.index.size()) throw ValidationError("measurements: values and index differ in length");
  auto describe = [&](const MeasurementKey& k) {
    std::ostringstream os;
    if (k.window >= 0 && k.window < frame.window_count()) {
      os << frame.window_tag(k.window);
      if (k.window > 0) {
        const AuxKey a = frame.aux_key(k.window);
        os << " (q=" << a.q << ", p=" << a.p << ", t=" << a.t << ")";
      }
    } else {
      os << "window " << k.window;
    }
    os << " at (k=" << k.k << ", l=" << k.l << ")";
    return os.str();
  };
  const std::size_t n = frame.cardinality();
  for (std::size_t j = 0; j < std::min(n, b.index.size()); ++j) {
    const MeasurementKey want = frame.key(j);
    if (!(b.index[j] == want)) {
      throw ValidationError("measurements: row " + std::to_string(j) + " should be " + describe(want) + ", found " +
                            describe(b.index[j]));
    }
  }
  if (b.index.size() < n) {
    throw ValidationError("measurements: missing " + describe(frame.key(b.index.size())) + " and " +
                          std::to_string(n - b.index.size() - 1) + " further rows");
  }
  if (b.index.size() > n) throw ValidationError("measurements: more rows than frame vectors");
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(b.values[j]) || b.values[j] < 0.0) {
      throw ValidationError("measurements: row " + std::to_string(j) + " is not a finite nonnegative value");
    }
  }
}

namespace {

using RowBuilder = std::function<Eigen::MatrixXcd(const std::vector<TFIndex>&)>;
using Embedder = std::function<Signal(const Eigen::VectorXcd&)>;

ReconstructionResult run_pipeline(const MultiWindowGaborFrame& frame, const MeasurementVector& b,
                                  const ReconstructionOptions& opts, int dim, const RowBuilder& rows,
                                  const Embedder& embed) {
  validate_measurements(frame, b);
  const Lattice& lat = frame.lattice();
  const int M = frame.modulus();
  const int n = lat.size();

  ReconstructionResult res;
  res.method = opts.method;
  res.solve_dimension = dim;
  res.vertex_count = n;
  res.estimate = Signal::zeros(M);

  std::vector<double> r(static_cast<std::size_t>(n));
  double scale = 0.0;
  for (int i = 0; i < n; ++i) {
    r[static_cast<std::size_t>(i)] = std::sqrt(b.values[static_cast<std::size_t>(i)]);
    scale = std::max(scale, r[static_cast<std::size_t>(i)]);
  }
  if (scale == 0.0) {
    // Every measurement of the primary block vanishes: only x = 0 fits.
    res.status = ReconstructionStatus::success;
    res.vanishing_vertices = n;
    return res;
  }

  PhaseGraph graph = prune_edges(build_edges(lat, frame.Q(), frame.P()), r, scale, opts.vanish_tolerance);
  res.edge_count = static_cast<int>(graph.edges.size());
  res.removed_edges = graph.removed_edges;
  res.vanishing_vertices = static_cast<int>(graph.flagged_vertices.size());

  const auto n_edges = static_cast<long long>(graph.edges.size());
  const auto block = static_cast<std::size_t>(n);
  std::vector<double> defect(graph.edges.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (long long e = 0; e < n_edges; ++e) {
    PhaseEdge& edge = graph.edges[static_cast<std::size_t>(e)];
    if (edge.pruned) continue;
    const TFIndex a = lat.point(edge.u);
    std::array<double, 3> aux{};
    for (int t = 0; t < 3; ++t) {
      const auto w = static_cast<std::size_t>(frame.aux_window(edge.q, edge.p, t));
      aux[static_cast<std::size_t>(t)] = b.values[w * block + static_cast<std::size_t>(edge.u)];
    }
    const cplx raw = raw_relative_phase(aux, r[static_cast<std::size_t>(edge.u)], r[static_cast<std::size_t>(edge.v)],
                                        a.k, edge.p, M);
    const double mod = std::abs(raw);
    edge.omega = mod > 0.0 ? raw / mod : cplx(1.0);
    defect[static_cast<std::size_t>(e)] = std::abs(mod - 1.0);
  }

  const Components comps = connected_components(graph);
  res.component_count = comps.count;
  res.component_size = comps.largest_size;
  if (comps.largest_size < dim) {
    res.status = ReconstructionStatus::component_too_small;
    return res;
  }
  const std::vector<int> members = comps.members(comps.largest_label);
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    const auto& edge = graph.edges[e];
    if (!edge.pruned && comps.label[static_cast<std::size_t>(edge.u)] == comps.largest_label) {
      res.max_phase_defect = std::max(res.max_phase_defect, defect[e]);
    }
  }

  const PhaseSolution phases = opts.method == PhaseMethod::propagate ? propagate_phases(graph, comps.largest_label)
                                                                     : angular_sync(graph, members, opts.sync);
  if (!phases.flagged.empty()) {
    res.status = ReconstructionStatus::unresolved_phases;
    return res;
  }

  std::vector<TFIndex> points;
  Eigen::VectorXcd coeffs(static_cast<Eigen::Index>(members.size()));
  for (std::size_t i = 0; i < members.size(); ++i) {
    const int v = members[i];
    points.push_back(lat.point(v));
    coeffs(static_cast<Eigen::Index>(i)) = phases.at(v) * r[static_cast<std::size_t>(v)];
  }
  try {
    const LeastSquares ls = solve_least_squares(rows(points), coeffs);
    res.estimate = embed(ls.solution);
    res.solve_residual = ls.residual;
    res.condition = ls.condition;
    res.status = ReconstructionStatus::success;
  } catch (const RankDeficientError& err) {
    res.condition = err.condition();
    res.status = ReconstructionStatus::rank_deficient;
  }
  return res;
}

}  // namespace

ReconstructionResult reconstruct(const MultiWindowGaborFrame& frame, const MeasurementVector& b,
                                 const ReconstructionOptions& opts) {
  const Signal& g = frame.g().values();
  return run_pipeline(
      frame, b, opts, frame.modulus(), [&](const std::vector<TFIndex>& pts) { return analysis_rows(g, pts); },
      [](const Eigen::VectorXcd& x) { return to_signal(x); });
}

SubspacePrior::SubspacePrior(Eigen::MatrixXcd W, double rank_tolerance) : W_(std::move(W)) {
  if (W_.cols() < 1 || W_.rows() < W_.cols()) {
    throw ValidationError("SubspacePrior: need an M x d matrix with 1 <= d <= M");
  }
  if (!W_.allFinite()) throw ValidationError("SubspacePrior: non-finite entries");
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(W_);
  const auto& s = svd.singularValues();
  rank_ratio_ = s(0) > 0.0 ? s(s.size() - 1) / s(0) : 0.0;
  if (!(rank_ratio_ > rank_tolerance)) {
    std::ostringstream os;
    os << "SubspacePrior: numerical rank below " << W_.cols() << " (sigma_d / sigma_1 = " << rank_ratio_ << ")";
    throw ValidationError(os.str());
  }
}

Signal SubspacePrior::embed(const Eigen::VectorXcd& h) const {
  if (h.size() != W_.cols()) throw ValidationError("SubspacePrior::embed: coefficient length differs from d");
  return to_signal(W_ * h);
}

Eigen::VectorXcd SubspacePrior::project(const Signal& v) const {
  if (v.dim() != W_.rows()) throw ValidationError("SubspacePrior::project: length differs from M");
  return W_.adjoint() * Eigen::Map<const Eigen::VectorXcd>(v.data().data(), v.dim());
}

SubspacePrior random_subspace_prior(int M, int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXcd W(M, d);
  for (int j = 0; j < d; ++j) {
    for (int i = 0; i < M; ++i) W(i, j) = rng.complex_normal();
  }
  return SubspacePrior(std::move(W));
}

ReconstructionResult reconstruct_subspace(const MultiWindowGaborFrame& frame, const SubspacePrior& prior,
                                          const MeasurementVector& b, const ReconstructionOptions& opts) {
  if (prior.ambient_dim() != frame.modulus()) {
    throw ValidationError("reconstruct_subspace: prior lives in a different ambient dimension");
  }
  const Signal& g = frame.g().values();
  // <h, W^* phi> = (W^* phi)^* h = phi^* W h
  return run_pipeline(
      frame, b, opts, prior.dim(),
      [&](const std::vector<TFIndex>& pts) { return Eigen::MatrixXcd(analysis_rows(g, pts) * prior.W()); },
      [&](const Eigen::VectorXcd& h) { return prior.embed(h); });
}

}  // namespace gpr
