#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpr {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised for malformed inputs: bad dimensions, out-of-range indices,
/// windows that vanish, sets outside their difference sets.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an exhaustive search would exceed its enumeration budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Canonical representative of m in [0, M).
inline int mod(long long m, int M) {
  long long r = m % M;
  return static_cast<int>(r < 0 ? r + M : r);
}

/// e^{2 pi i num / den}
cplx unit_root(long long num, long long den);

/// Finite complex vector in C^M. Entries are checked for NaN/Inf on
/// construction; the length is fixed afterwards.
class Signal {
 public:
  Signal() = default;
  explicit Signal(std::vector<cplx> values);
  Signal(std::initializer_list<cplx> values);

  static Signal zeros(int M);
  static Signal ones(int M);
  /// Canonical basis vector e_j.
  static Signal basis(int M, int j);

  int dim() const { return static_cast<int>(values_.size()); }
  const cplx& operator[](int m) const { return values_[static_cast<std::size_t>(m)]; }
  std::span<const cplx> values() const { return values_; }
  const std::vector<cplx>& data() const { return values_; }

  double norm() const;
  Signal scaled(cplx a) const;

  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

 private:
  std::vector<cplx> values_;
};

/// Time-frequency index (k, l) in Z_M x Z_M, reduced on construction.
struct TFIndex {
  int k = 0;
  int l = 0;

  TFIndex() = default;
  TFIndex(long long k_, long long l_, int M) : k(mod(k_, M)), l(mod(l_, M)) {}

  friend bool operator==(const TFIndex&, const TFIndex&) = default;
  friend auto operator<=>(const TFIndex&, const TFIndex&) = default;
};

/// <x, y> = sum_m x(m) conj(y(m)); linear in x.
cplx inner(const Signal& x, const Signal& y);

/// (T_k x)(m) = x(m - k)
Signal translate(const Signal& x, long long k);
/// (M_l x)(m) = e^{2 pi i l m / M} x(m)
Signal modulate(const Signal& x, long long l);
/// pi(k, l) = M_l T_k
Signal tf_shift(const Signal& x, TFIndex lambda);

/// Forward DFT with 1/M normalization: X(j) = (1/M) sum_m x(m) e^{-2 pi i j m / M}.
/// Direct O(M^2) sum.
Signal dft(const Signal& x);
/// Inverse of dft: x(m) = sum_j X(j) e^{2 pi i j m / M}.
Signal inverse_dft(const Signal& X);

Signal coordwise_product(const Signal& x, const Signal& y);

/// min_theta ||x - e^{i theta} y||_2
double phase_distance(const Signal& x, const Signal& y);

}  // namespace gpr
