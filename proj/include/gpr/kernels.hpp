#pragma once

// Data-parallel inner loops, each with a serial reference (explicit
// operators, lexicographic enumeration) and an OpenMP version.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gpr/core.hpp"

namespace gpr::kernels {

/// Precomputed e^{-2 pi i j / M} for j in [0, M).
class Twiddles {
 public:
  explicit Twiddles(int M);
  int modulus() const { return static_cast<int>(w_.size()); }
  /// e^{-2 pi i n / M}
  cplx operator()(long long n) const { return w_[static_cast<std::size_t>(mod(n, modulus()))]; }

 private:
  std::vector<cplx> w_;
};

/// Tests |sum_{m in A} e^{-2 pi i j m / M}| <= c |A| (1 + tol) for all j != 0.
/// Equivalent to bias(A) <= c * density(A).
bool bias_within(std::span<const int> members, double c, const Twiddles& tw);

/// Frame coefficients <x, pi(k,l) w_r> for every window r and (k,l) in T x F,
/// laid out window-major then (k, l) lexicographic. The serial version builds
/// each frame vector with core::tf_shift and takes the inner product.
std::vector<cplx> frame_coefficients_serial(std::span<const Signal> windows, std::span<const int> T,
                                            std::span<const int> F, const Signal& x);
std::vector<cplx> frame_coefficients_omp(std::span<const Signal> windows, std::span<const int> T,
                                         std::span<const int> F, const Signal& x);

/// Smallest (cardinality, lexicographic) nonempty subset of Z_M passing
/// bias_within, as a bitmask. nullopt only if no subset qualifies.
struct SubsetSearch {
  std::optional<std::uint64_t> mask;
  std::uint64_t evaluated = 0;
};
SubsetSearch min_low_bias_subset_serial(int M, double c);
SubsetSearch min_low_bias_subset_omp(int M, double c);

/// True if bitmask a precedes b among sets of equal cardinality in the
/// lexicographic order of their sorted member lists.
bool lex_less_same_size(std::uint64_t a, std::uint64_t b);

/// Determinant scan over M-subsets of the columns of an M x N matrix
/// (column-major, vectors[c] is column c).
struct SparkFailure {
  std::uint64_t rank = 0;  ///< lexicographic rank of the subset
  std::vector<int> columns;
  double margin = 0.0;  ///< |det| / prod of column norms
};
struct SparkScan {
  std::uint64_t subsets = 0;
  double min_margin = 0.0;
  std::vector<SparkFailure> failures;  ///< sorted by rank
};
SparkScan spark_scan_serial(std::span<const Signal> vectors, double threshold);
SparkScan spark_scan_omp(std::span<const Signal> vectors, double threshold);

/// |det| / prod ||column|| for a square set of columns.
double normalized_determinant(std::span<const Signal> vectors, std::span<const int> columns);

/// binomial(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// k-subset of [0, n) with the given lexicographic rank.
std::vector<int> unrank_combination(std::uint64_t rank, int n, int k);

}  // namespace gpr::kernels
