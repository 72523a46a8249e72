#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gpr/recover.hpp"
#include "support.hpp"

using namespace gpr;
using testing::expi;
using testing::random_signal;

namespace {

// Attaches exact relative phases phase(c_u) / phase(c_v) to every edge.
PhaseGraph with_true_phases(PhaseGraph g, const std::vector<cplx>& c) {
  for (auto& e : g.edges) {
    const cplx a = c[static_cast<std::size_t>(e.u)], b = c[static_cast<std::size_t>(e.v)];
    e.omega = (a / std::abs(a)) / (b / std::abs(b));
  }
  return g;
}

std::vector<cplx> random_phases(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cplx> out(static_cast<std::size_t>(n));
  for (auto& z : out) z = expi(2.0 * std::numbers::pi * rng.uniform()) * (0.5 + rng.uniform());
  return out;
}

// Largest |phase_i * conj(c_i/|c_i|) - common| after removing one global factor.
double phase_mismatch(const PhaseSolution& s, const std::vector<cplx>& c, const std::vector<int>& verts) {
  const cplx ref = s.at(verts.front()) / (c[static_cast<std::size_t>(verts.front())] /
                                          std::abs(c[static_cast<std::size_t>(verts.front())]));
  double worst = 0.0;
  for (int v : verts) {
    const cplx u = c[static_cast<std::size_t>(v)] / std::abs(c[static_cast<std::size_t>(v)]);
    worst = std::max(worst, std::abs(s.at(v) - ref * u));
  }
  return worst;
}

}  // namespace

TEST_CASE("polarization recovers a conj(b)") {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const cplx a = rng.complex_normal(), b = rng.complex_normal();
    std::array<double, 3> m{};
    for (int t = 0; t < 3; ++t) m[static_cast<std::size_t>(t)] = std::norm(a + expi(-2.0 * std::numbers::pi * t / 3) * b);
    CHECK(std::abs(polarization(m) - a * std::conj(b)) < 1e-13);
  }
}

TEST_CASE("relative phase on exact data and the vanishing guard") {
  const int M = 8;
  const Signal g = random_signal(M, 3), x = random_signal(M, 4);
  const int k = 3, l = 5, q = 2, p = 6;
  const cplx c1 = inner(x, tf_shift(g, TFIndex(k, l, M)));
  const cplx c2 = inner(x, tf_shift(g, TFIndex(k + q, l + p, M)));
  std::array<double, 3> aux{};
  for (int t = 0; t < 3; ++t) {
    aux[static_cast<std::size_t>(t)] = std::norm(inner(x, tf_shift(build_auxiliary(g, q, p, t), TFIndex(k, l, M))));
  }
  const RelativePhase rp = relative_phase(aux, std::abs(c1), std::abs(c2), k, p, M);
  const cplx want = (c1 / std::abs(c1)) / (c2 / std::abs(c2));
  CHECK(std::abs(rp.omega - want) < 1e-12);
  CHECK(rp.raw_modulus == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(relative_phase(aux, 0.0, std::abs(c2), k, p, M, 1e-10), EdgeUndefinedError);
  CHECK_THROWS_AS(relative_phase(aux, std::abs(c1), 1e-12, k, p, M, 1e-10), EdgeUndefinedError);
}

TEST_CASE("propagation and synchronization recover consistent phases") {
  const int M = 7;
  const IndexSet Q(M, {0, 1, 3}), P(M, {0, 2});
  const PhaseGraph base = build_edges(Lattice::full(M), Q, P);
  const auto c = random_phases(base.vertex_count(), 9);
  const PhaseGraph g = with_true_phases(base, c);
  std::vector<int> all(static_cast<std::size_t>(g.vertex_count()));
  std::iota(all.begin(), all.end(), 0);

  const PhaseSolution bfs = propagate_phases(g, 4);
  CHECK(bfs.at(4) == cplx(1.0));
  CHECK(phase_mismatch(bfs, c, all) < 1e-12);

  const PhaseSolution sync = angular_sync(g, all);
  CHECK(sync.flagged.empty());
  CHECK(phase_mismatch(sync, c, all) < 1e-10);
  // Consistent data: H = D (A - diag) D^*, top eigenvalue is the degree.
  CHECK(sync.eigenvalue == doctest::Approx(10.0).epsilon(1e-10));
}

TEST_CASE("rank-one consistent H on a complete graph has eigenvalue n - 1") {
  const int M = 4;
  const PhaseGraph base = build_edges(Lattice::full(M), IndexSet::full(M), IndexSet::full(M));
  const auto c = random_phases(16, 1);
  const PhaseGraph g = with_true_phases(base, c);
  std::vector<int> all(16);
  std::iota(all.begin(), all.end(), 0);
  const PhaseSolution s = angular_sync(g, all);
  CHECK(s.eigenvalue == doctest::Approx(15.0).epsilon(1e-10));
  CHECK(phase_mismatch(s, c, all) < 1e-10);
}

TEST_CASE("propagation leaves unreachable vertices unresolved") {
  const int M = 6;
  PhaseGraph g = build_edges(Lattice::full(M), IndexSet(M, {0, 3}), IndexSet(M, {0}));
  g = with_true_phases(g, random_phases(g.vertex_count(), 3));
  const PhaseSolution s = propagate_phases(g, 0);
  CHECK(s.resolved[static_cast<std::size_t>(Lattice::full(M).index_of(TFIndex(3, 0, M)))]);
  CHECK_FALSE(s.resolved[1]);
  CHECK_THROWS_AS(s.at(1), std::out_of_range);
  CHECK_THROWS_AS(propagate_phases(g, 99), ValidationError);
}

TEST_CASE("least squares: exact systems, residual and rank deficiency") {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Random(10, 4);
  const Eigen::VectorXcd x = Eigen::VectorXcd::Random(4);
  const LeastSquares ls = solve_least_squares(A, A * x);
  CHECK((ls.solution - x).norm() < 1e-12);
  CHECK(ls.residual < 1e-13);
  CHECK(ls.condition >= 1.0);
  A.col(3) = A.col(0) * cplx(2.0, -1.0);
  CHECK_THROWS_AS(solve_least_squares(A, A * x), RankDeficientError);
  CHECK_THROWS_AS(solve_least_squares(Eigen::MatrixXcd::Random(2, 3), Eigen::VectorXcd::Random(2)),
                  RankDeficientError);
  CHECK_THROWS_AS(solve_least_squares(A, Eigen::VectorXcd::Random(3)), ValidationError);
}

TEST_CASE("coefficient solve inverts the analysis map") {
  const int M = 6;
  const Signal g = random_signal(M, 5), x = random_signal(M, 6);
  std::vector<TFIndex> pts;
  std::vector<cplx> c;
  for (int i = 0; i < 10; ++i) {
    pts.emplace_back(i, 2 * i + 1, M);
    c.push_back(inner(x, tf_shift(g, pts.back())));
  }
  const CoefficientSolve s = solve_coefficients(g, pts, c);
  CHECK(testing::max_abs_diff(s.estimate, x) < 1e-11);
}

TEST_CASE("reconstruct round trip on a full lattice, both phase methods") {
  for (int M : {4, 6, 9}) {
    const IndexSet Q = beta(M, 4.0).witness.value();
    const auto frame = assemble_frame(random_window(M, 50), Lattice::full(M), Q, Q);
    for (PhaseMethod method : {PhaseMethod::sync, PhaseMethod::propagate}) {
      for (std::uint64_t s = 0; s < 5; ++s) {
        const Signal x = random_signal(M, 100 + s);
        ReconstructionOptions o;
        o.method = method;
        const ReconstructionResult r = reconstruct(frame, measure(frame, x), o);
        REQUIRE(r.status == ReconstructionStatus::success);
        CHECK(phase_distance(r.estimate, x) <= 1e-9 * x.norm());
        CHECK(r.component_size == M * M);
        CHECK(r.max_phase_defect < 1e-8);
      }
    }
  }
}

TEST_CASE("reconstruct on a proper lattice T x Z_M") {
  const int M = 8;
  const IndexSet T(M, {0, 1, 2, 3});
  const auto frame = assemble_frame(random_window(M, 7), Lattice(T, IndexSet::full(M)), difference_set(T),
                                    beta(M, 4.0).witness.value());
  const Signal x = random_signal(M, 8);
  const ReconstructionResult r = reconstruct(frame, measure(frame, x));
  REQUIRE(r.status == ReconstructionStatus::success);
  CHECK(phase_distance(r.estimate, x) <= 1e-9 * x.norm());
}

TEST_CASE("reconstruct handles sparse signals with vanishing coefficients") {
  const int M = 8;
  const auto frame = assemble_frame(random_window(M, 12), Lattice::full(M), IndexSet::full(M), IndexSet::full(M));
  const Signal x = Signal::basis(M, 3).scaled(cplx(0.0, 2.0));
  const ReconstructionResult r = reconstruct(frame, measure(frame, x));
  REQUIRE(r.status == ReconstructionStatus::success);
  CHECK(phase_distance(r.estimate, x) <= 1e-9);

  const ReconstructionResult z = reconstruct(frame, measure(frame, Signal::zeros(M)));
  CHECK(z.status == ReconstructionStatus::success);
  CHECK(z.estimate.norm() == 0.0);
}

TEST_CASE("negative control: no edges means component_too_small") {
  const int M = 6;
  const auto frame = assemble_frame(random_window(M, 1), Lattice::full(M), IndexSet(M, {0}), IndexSet(M, {0}));
  const ReconstructionResult r = reconstruct(frame, measure(frame, random_signal(M, 2)));
  CHECK(r.status == ReconstructionStatus::component_too_small);
  CHECK(r.component_size == 1);
  CHECK(r.edge_count == 0);
}

TEST_CASE("measurement validation names the offending entry") {
  const int M = 4;
  const auto frame = assemble_frame(random_window(M, 1), Lattice::full(M), IndexSet(M, {1}), IndexSet(M, {0}));
  MeasurementVector b = measure(frame, random_signal(M, 2));
  MeasurementVector shuffled = b;
  std::swap(shuffled.index[3], shuffled.index[4]);
  CHECK_THROWS_WITH_AS(validate_measurements(frame, shuffled), doctest::Contains("row 3"), ValidationError);

  MeasurementVector truncated = b;
  truncated.values.resize(16);
  truncated.index.resize(16);
  CHECK_THROWS_WITH_AS(validate_measurements(frame, truncated), doctest::Contains("aux_1_0_0 (q=1, p=0, t=0)"), ValidationError);

  MeasurementVector negative = b;
  negative.values[5] = -1.0;
  CHECK_THROWS_AS(validate_measurements(frame, negative), ValidationError);
  CHECK_NOTHROW(validate_measurements(frame, b));
}

TEST_CASE("subspace prior: embedding, projection and round trip") {
  const int M = 16, d = 3;
  const SubspacePrior prior = random_subspace_prior(M, d, 4);
  CHECK(prior.dim() == d);
  CHECK(prior.ambient_dim() == M);
  CHECK(prior.rank_ratio() > 0.0);
  Eigen::MatrixXcd W = prior.W();
  W.col(2) = W.col(0);
  CHECK_THROWS_AS(SubspacePrior{W}, ValidationError);
  CHECK_THROWS_AS(SubspacePrior(Eigen::MatrixXcd::Random(2, 3)), ValidationError);

  const Eigen::VectorXcd h = Eigen::VectorXcd::Random(d);
  const Signal x = prior.embed(h);
  const Eigen::VectorXcd back = prior.project(x);
  CHECK((back - prior.W().adjoint() * prior.W() * h).norm() < 1e-12);

  const IndexSet P = beta(M, 4.0).witness.value();
  const auto frame = assemble_frame(random_window(M, 5), Lattice(IndexSet(M, {0}), IndexSet::full(M)),
                                    IndexSet(M, {0}), P);
  const ReconstructionResult r = reconstruct_subspace(frame, prior, measure(frame, x));
  REQUIRE(r.status == ReconstructionStatus::success);
  CHECK(r.solve_dimension == d);
  CHECK(phase_distance(r.estimate, x) <= 1e-9 * x.norm());
  CHECK_THROWS_AS(reconstruct_subspace(frame, random_subspace_prior(8, 2, 1), measure(frame, x)), ValidationError);
}
