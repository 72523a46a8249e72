#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpr/core.hpp"

namespace gpr {

/// Subset of Z_M, stored as a strictly increasing member list.
class IndexSet {
 public:
  IndexSet() = default;
  /// Members must already be in [0, M); duplicates and order are normalized.
  IndexSet(int modulus, std::vector<int> members);

  static IndexSet full(int M);
  static IndexSet empty(int M) { return IndexSet(M, {}); }
  /// Bit m of mask selects element m. Requires M <= 63.
  static IndexSet from_mask(int M, std::uint64_t mask);

  int modulus() const { return modulus_; }
  const std::vector<int>& members() const { return members_; }
  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  bool contains(int m) const;
  bool is_full() const { return size() == modulus_; }
  /// Position of m in the member list, or -1.
  int position(int m) const;
  bool subset_of(const IndexSet& other) const;

  std::string to_string() const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  int modulus_ = 1;
  std::vector<int> members_;
};

/// Indicator function 1_A as a signal in C^M.
Signal indicator(const IndexSet& A);

/// |A| / M
double density(const IndexSet& A);

/// max_{m != 0} |F(1_A)(m)| with the 1/M-normalized DFT; 0 when M = 1.
double fourier_bias(const IndexSet& A);

/// fourier_bias(A) <= c * density(A). Rejects the empty set.
bool check_pseudorandom(const IndexSet& A, double c);

/// (C - 3) / (C - 1), the bias ratio required for a given C > 3.
double bias_ratio_for(double C);

/// {(t - t') mod M : t, t' in T}
IndexSet difference_set(const IndexSet& T);

/// Each element of Z_M kept independently with probability `rate`.
IndexSet random_subset(int M, double rate, std::uint64_t seed);

enum class BetaMode { exhaustive, randomized };

enum class BetaStatus {
  exact,        ///< exhaustive minimum
  upper_bound,  ///< randomized witness; beta <= value
  unknown,      ///< randomized search found nothing within its budget
};

std::string to_string(BetaStatus s);

struct BetaResult {
  BetaStatus status = BetaStatus::unknown;
  int value = 0;  ///< cardinality of the witness (0 when unknown)
  std::optional<IndexSet> witness;
  double ratio = 0.0;  ///< c = (C-3)/(C-1)
  std::uint64_t evaluated = 0;
};

struct BetaOptions {
  BetaMode mode = BetaMode::exhaustive;
  /// Exhaustive mode requires 2^M - 1 <= budget (default: M <= 20).
  std::uint64_t exhaustive_budget = (std::uint64_t{1} << 20);
  std::uint64_t trials = 20000;
  std::uint64_t seed = 0;
  bool parallel = true;
};

/// Minimum cardinality of a nonempty P in Z_M with bias <= ((C-3)/(C-1)) P(P),
/// with the lexicographically smallest minimizer as witness. Throws
/// BudgetError when exhaustive enumeration is over budget.
BetaResult beta(int M, double C, const BetaOptions& opts = {});

/// Budget override from GABOR_POLAR_BUDGET, if set and valid.
std::optional<std::uint64_t> budget_from_env();

}  // namespace gpr
