#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "gpr/phasegraph.hpp"
#include "gpr/rng.hpp"
#include "support.hpp"

using namespace gpr;

namespace {

IndexSet random_nonempty(int M, double rate, Rng& rng) {
  for (;;) {
    IndexSet A = random_subset(M, rate, rng.next_u64());
    if (!A.empty()) return A;
  }
}

}  // namespace

TEST_CASE("edge set matches an independent enumeration") {
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const int M = 3 + static_cast<int>(rng.below(6));
    const IndexSet T = random_nonempty(M, 0.6, rng);
    const IndexSet F = random_nonempty(M, 0.6, rng);
    const Lattice lat(T, F);
    const IndexSet Q = random_nonempty(M, 0.4, rng);
    const IndexSet P = random_nonempty(M, 0.4, rng);
    const PhaseGraph g = build_edges(lat, Q, P);

    std::set<std::pair<int, int>> want;
    int self = 0;
    for (int u = 0; u < lat.size(); ++u) {
      for (int q : Q.members()) {
        for (int p : P.members()) {
          const TFIndex b(lat.point(u).k + q, lat.point(u).l + p, M);
          if (q == 0 && p == 0) {
            ++self;
            continue;
          }
          const int v = lat.index_of(b);
          if (v >= 0) want.insert({std::min(u, v), std::max(u, v)});
        }
      }
    }
    std::set<std::pair<int, int>> got;
    for (const auto& e : g.edges) {
      CHECK(lat.point(e.v) == TFIndex(lat.point(e.u).k + e.q, lat.point(e.u).l + e.p, M));
      got.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
    }
    CHECK(got.size() == g.edges.size());
    CHECK(got == want);
    CHECK(g.self_pairs == self);
  }
}

TEST_CASE("out degrees on the full lattice equal |Q||P| minus the self pair") {
  const int M = 7;
  const IndexSet Q(M, {0, 2, 3}), P(M, {1, 5});
  for (int d : out_degrees(build_edges(Lattice::full(M), Q, P))) CHECK(d == 6);
  const IndexSet Q0(M, {0, 2}), P0(M, {0, 5});
  for (int d : out_degrees(build_edges(Lattice::full(M), Q0, P0))) CHECK(d == 3);
}

TEST_CASE("spectral gap reference values") {
  const int M = 6;
  const auto full = Lattice::full(M);
  // Complete graph with loops: A = J.
  CHECK(spectral_gap(build_edges(full, IndexSet::full(M), IndexSet::full(M))).gap == doctest::Approx(1.0));
  CHECK(spectral_gap(build_edges(full, IndexSet::full(M), IndexSet::full(M)), SpectralStructure::dense).gap ==
        doctest::Approx(1.0));
  // Only self pairs: A = I.
  CHECK(spectral_gap(build_edges(full, IndexSet(M, {0}), IndexSet(M, {0})), SpectralStructure::dense).gap <
        1e-12);
  CHECK(spectral_gap(build_edges(full, IndexSet(M, {0}), IndexSet(M, {0}))).gap < 1e-12);
  // Subgroup: disconnected, gap 0.
  const IndexSet H(M, {0, 3});
  CHECK(spectral_gap(build_edges(full, H, H)).gap < 1e-12);
  CHECK(spectral_gap(build_edges(full, H, H), SpectralStructure::dense).gap < 1e-12);
}

TEST_CASE("circulant route agrees with dense eigenvalues on the full lattice") {
  Rng rng(3);
  for (int M : {4, 5, 6, 8}) {
    for (int trial = 0; trial < 10; ++trial) {
      const IndexSet Q = random_nonempty(M, 0.5, rng);
      const IndexSet P = random_nonempty(M, 0.5, rng);
      const PhaseGraph g = build_edges(Lattice::full(M), Q, P);
      const SpectralReport fast = spectral_gap(g);
      const SpectralReport dense = spectral_gap(g, SpectralStructure::dense);
      CHECK(fast.method == SpectralMethod::circulant);
      CHECK(dense.method == SpectralMethod::dense);
      CHECK(std::abs(fast.gap - dense.gap) < 1e-10);
      CHECK(dense.lambda_max == doctest::Approx(Q.size() * P.size()));
      CHECK(dense.eigenvalues.size() == static_cast<std::size_t>(M * M));
    }
  }
}

TEST_CASE("dense route handles regular proper lattices and rejects irregular ones") {
  const int M = 8;
  const IndexSet T(M, {0, 1});
  const Lattice lat(T, IndexSet::full(M));
  const SpectralReport r = spectral_gap(build_edges(lat, difference_set(T), IndexSet(M, {0, 1})));
  CHECK(r.method == SpectralMethod::dense);
  CHECK(r.lambda_max == doctest::Approx(4.0));
  CHECK(r.gap >= 0.0);
  CHECK(r.gap <= 1.0);
  CHECK_THROWS_AS(spectral_gap(build_edges(lat, IndexSet(M, {0, 1}), IndexSet(M, {0}))), ValidationError);
}

TEST_CASE("pruning marks exactly the edges touching small coefficients") {
  const int M = 5;
  const PhaseGraph g = build_edges(Lattice::full(M), IndexSet(M, {0, 1}), IndexSet(M, {0, 2}));
  std::vector<double> mags(25, 1.0);
  mags[3] = 1e-12;
  mags[17] = 0.0;
  const PhaseGraph pruned = prune_edges(g, mags, 2.0);
  CHECK(pruned.flagged_vertices == std::vector<int>{3, 17});
  int expected = 0;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto& a = g.edges[e];
    const bool touch = a.u == 3 || a.v == 3 || a.u == 17 || a.v == 17;
    expected += touch ? 1 : 0;
    CHECK(pruned.edges[e].pruned == touch);
  }
  CHECK(pruned.removed_edges == expected);
  CHECK_THROWS_AS(prune_edges(g, std::vector<double>(3, 1.0), 1.0), ValidationError);
}

TEST_CASE("BFS and union-find components agree") {
  Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int M = 4 + static_cast<int>(rng.below(5));
    const PhaseGraph g = build_edges(Lattice::full(M), random_nonempty(M, 0.3, rng), random_nonempty(M, 0.3, rng));
    std::vector<double> mags(static_cast<std::size_t>(g.vertex_count()));
    for (auto& m : mags) m = rng.uniform() < 0.2 ? 0.0 : 1.0;
    const PhaseGraph p = prune_edges(g, mags, 1.0);
    const Components a = connected_components(p);
    const Components b = connected_components_union_find(p);
    CHECK(a.label == b.label);
    CHECK(a.count == b.count);
    CHECK(a.largest_size == b.largest_size);
    CHECK(a.largest_label == b.largest_label);
    int total = 0;
    for (int s : a.size_of_label) total += s;
    CHECK(total == g.vertex_count());
    CHECK(static_cast<int>(a.members(a.largest_label).size()) == a.largest_size);
  }
}

TEST_CASE("component bound") {
  CHECK(component_bound(25, 0.75, 0) == doctest::Approx(25.0));
  CHECK(component_bound(25, 0.75, 5) == doctest::Approx(25.0 - 10.0 / 0.75));
  CHECK(component_bound(10, 0.5, 4) == doctest::Approx(-6.0));
  CHECK_THROWS_AS(component_bound(10, 0.0, 1), ValidationError);
  CHECK_THROWS_AS(component_bound(10, 0.5, -1), ValidationError);
}

TEST_CASE("component bound holds on pruned full-lattice graphs") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int M = 6 + static_cast<int>(rng.below(4));
    const IndexSet Q = random_nonempty(M, 0.6, rng);
    const IndexSet P = random_nonempty(M, 0.6, rng);
    const PhaseGraph g = build_edges(Lattice::full(M), Q, P);
    const double gap = spectral_gap(g).gap;
    if (gap <= 0.0) continue;
    std::vector<double> mags(static_cast<std::size_t>(g.vertex_count()), 1.0);
    int deleted = 0;
    for (auto& m : mags) {
      if (rng.uniform() < 0.1) {
        m = 0.0;
        ++deleted;
      }
    }
    const Components c = connected_components(prune_edges(g, mags, 1.0));
    CHECK(c.largest_size >= component_bound(g.vertex_count(), gap, deleted) - 1e-9);
  }
}
