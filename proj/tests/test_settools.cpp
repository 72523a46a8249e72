#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <numbers>

#include "gpr/settools.hpp"
#include "support.hpp"

using namespace gpr;

namespace {

// Bias straight from the definition, via the library DFT of the indicator.
double bias_oracle(const IndexSet& A) {
  const Signal X = dft(indicator(A));
  double b = 0.0;
  for (int j = 1; j < A.modulus(); ++j) b = std::max(b, std::abs(X[j]));
  return b;
}

// Brute force beta with an independently computed bias.
std::pair<int, std::vector<int>> beta_oracle(int M, double C) {
  const double c = (C - 3.0) / (C - 1.0);
  for (int size = 1; size <= M; ++size) {
    std::vector<int> idx(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (;;) {
      double b = 0.0;
      for (int j = 1; j < M; ++j) {
        std::complex<double> s = 0.0;
        for (int m : idx) s += testing::expi(-2.0 * std::numbers::pi * j * m / M);
        b = std::max(b, std::abs(s) / M);
      }
      if (b <= c * size / M + 1e-12) return {size, idx};
      int i = size - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == M - size + i) --i;
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
      for (int r = i + 1; r < size; ++r) idx[static_cast<std::size_t>(r)] = idx[static_cast<std::size_t>(r - 1)] + 1;
    }
  }
  return {0, {}};
}

}  // namespace

TEST_CASE("IndexSet normalizes and validates members") {
  const IndexSet A(6, {4, 1, 4, 0});
  CHECK(A.members() == std::vector<int>{0, 1, 4});
  CHECK(A.contains(4));
  CHECK_FALSE(A.contains(2));
  CHECK(A.position(4) == 2);
  CHECK(A.position(3) == -1);
  CHECK_THROWS_AS(IndexSet(6, {6}), ValidationError);
  CHECK_THROWS_AS(IndexSet(6, {-1}), ValidationError);
  CHECK_THROWS_AS(IndexSet(0, {}), ValidationError);
  CHECK(IndexSet::from_mask(5, 0b10101) == IndexSet(5, {0, 2, 4}));
  CHECK(IndexSet(5, {0, 2}).subset_of(IndexSet(5, {0, 2, 4})));
  CHECK_FALSE(IndexSet(5, {1}).subset_of(IndexSet(5, {0, 2, 4})));
}

TEST_CASE("fourier bias of reference sets") {
  CHECK(fourier_bias(IndexSet::full(8)) < 1e-15);
  CHECK(fourier_bias(IndexSet(4, {0, 2})) == doctest::Approx(0.5));
  CHECK(fourier_bias(IndexSet(4, {0, 1, 2})) == doctest::Approx(0.25));
  CHECK(fourier_bias(IndexSet(7, {3})) == doctest::Approx(1.0 / 7.0));
  for (int M : {4, 6, 8, 10}) {
    const IndexSet H(M, {0, M / 2});
    CHECK(fourier_bias(H) == doctest::Approx(density(H)));
  }
}

TEST_CASE("fourier bias agrees with the DFT oracle on every subset, M <= 8") {
  for (int M = 2; M <= 8; ++M) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << M); ++mask) {
      const IndexSet A = IndexSet::from_mask(M, mask);
      REQUIRE(std::abs(fourier_bias(A) - bias_oracle(A)) < 1e-12);
    }
  }
}

TEST_CASE("fourier bias is invariant under cyclic shifts, M <= 10") {
  for (int M = 2; M <= 10; ++M) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << M); mask += 3) {
      const IndexSet A = IndexSet::from_mask(M, mask);
      const double b = fourier_bias(A);
      for (int s = 1; s < M; ++s) {
        std::vector<int> shifted;
        for (int m : A.members()) shifted.push_back(mod(m + s, M));
        REQUIRE(std::abs(fourier_bias(IndexSet(M, shifted)) - b) < 1e-12);
      }
    }
  }
}

TEST_CASE("bias never exceeds density") {
  for (int M = 2; M <= 9; ++M) {
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << M); ++mask) {
      const IndexSet A = IndexSet::from_mask(M, mask);
      REQUIRE(fourier_bias(A) <= density(A) + 1e-12);
    }
  }
}

TEST_CASE("check_pseudorandom and bias_ratio_for validate inputs") {
  CHECK(bias_ratio_for(5.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(bias_ratio_for(3.0), ValidationError);
  CHECK_THROWS_AS(bias_ratio_for(2.0), ValidationError);
  CHECK_THROWS_AS(check_pseudorandom(IndexSet::empty(4), 0.5), ValidationError);
  CHECK_THROWS_AS(check_pseudorandom(IndexSet(4, {0}), 0.0), ValidationError);
  CHECK_THROWS_AS(check_pseudorandom(IndexSet(4, {0}), 1.0), ValidationError);
  CHECK(check_pseudorandom(IndexSet(4, {0, 1, 2}), 0.5));
  CHECK_FALSE(check_pseudorandom(IndexSet(4, {0, 2}), 0.5));
  CHECK(check_pseudorandom(IndexSet::full(6), 0.01));
}

TEST_CASE("difference set") {
  CHECK(difference_set(IndexSet(8, {0, 1})) == IndexSet(8, {0, 1, 7}));
  CHECK(difference_set(IndexSet(5, {2})) == IndexSet(5, {0}));
  CHECK(difference_set(IndexSet(6, {0, 2, 4})) == IndexSet(6, {0, 2, 4}));
  CHECK_THROWS_AS(difference_set(IndexSet::empty(5)), ValidationError);
}

TEST_CASE("random_subset is seeded and validates its rate") {
  CHECK(random_subset(50, 0.3, 4) == random_subset(50, 0.3, 4));
  CHECK(random_subset(50, 1.0, 4).is_full());
  CHECK_THROWS_AS(random_subset(50, 0.0, 1), ValidationError);
  CHECK_THROWS_AS(random_subset(50, 1.5, 1), ValidationError);
  int total = 0;
  for (std::uint64_t s = 0; s < 200; ++s) total += random_subset(100, 0.25, s).size();
  CHECK(total / 200.0 == doctest::Approx(25.0).epsilon(0.05));
}

TEST_CASE("beta(4, 5) = 3 with witness {0,1,2}") {
  const BetaResult r = beta(4, 5.0);
  CHECK(r.status == BetaStatus::exact);
  CHECK(r.value == 3);
  REQUIRE(r.witness);
  CHECK(*r.witness == IndexSet(4, {0, 1, 2}));
}

TEST_CASE("exhaustive beta matches the brute-force oracle") {
  for (int M = 1; M <= 9; ++M) {
    for (double C : {3.5, 4.0, 5.0, 9.0, 40.0}) {
      const auto [size, members] = beta_oracle(M, C);
      const BetaResult r = beta(M, C);
      CAPTURE(M);
      CAPTURE(C);
      CHECK(r.value == size);
      REQUIRE(r.witness);
      CHECK(r.witness->members() == members);
      BetaOptions serial;
      serial.parallel = false;
      CHECK(beta(M, C, serial).witness == r.witness);
    }
  }
}

TEST_CASE("beta is monotone non-increasing in C, M <= 10") {
  for (int M = 1; M <= 10; ++M) {
    int prev = M + 1;
    for (double C = 3.25; C <= 30.0; C += 0.75) {
      const int b = beta(M, C).value;
      CHECK(b >= 1);
      CHECK(b <= prev);
      prev = b;
    }
  }
}

TEST_CASE("beta budget and randomized mode") {
  BetaOptions tight;
  tight.exhaustive_budget = 100;
  CHECK_THROWS_AS(beta(10, 4.0, tight), BudgetError);
  CHECK_THROWS_AS(beta(4, 3.0), ValidationError);

  BetaOptions rnd;
  rnd.mode = BetaMode::randomized;
  rnd.seed = 3;
  const BetaResult r = beta(10, 4.0, rnd);
  CHECK(r.status == BetaStatus::upper_bound);
  REQUIRE(r.witness);
  CHECK(check_pseudorandom(*r.witness, bias_ratio_for(4.0)));
  CHECK(r.value >= beta(10, 4.0).value);
  CHECK(beta(10, 4.0, rnd).witness == r.witness);
}

TEST_CASE("budget override from the environment") {
  ::setenv("GABOR_POLAR_BUDGET", "123", 1);
  CHECK(budget_from_env() == std::uint64_t{123});
  ::setenv("GABOR_POLAR_BUDGET", "12x", 1);
  CHECK_FALSE(budget_from_env().has_value());
  ::unsetenv("GABOR_POLAR_BUDGET");
  CHECK_FALSE(budget_from_env().has_value());
}
