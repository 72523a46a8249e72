#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpr/core.hpp"
#include "gpr/settools.hpp"

namespace gpr {

/// Minimum |g(m)| accepted when sampling a random window.
inline constexpr double kMinWindowModulus = 1e-8;
/// Determinant threshold, relative to the product of column norms.
inline constexpr double kSparkThreshold = 1e-10;
inline constexpr std::uint64_t kDefaultSparkBudget = 1'000'000;

/// Nowhere-vanishing window.
class Window {
 public:
  explicit Window(Signal values);

  const Signal& values() const { return values_; }
  int dim() const { return values_.dim(); }
  double min_modulus() const { return min_modulus_; }

 private:
  Signal values_;
  double min_modulus_ = 0.0;
};

/// Uniform sample on the unit sphere of C^M (normalized complex Gaussian),
/// redrawn while any coordinate is below kMinWindowModulus.
Window random_window(int M, std::uint64_t seed);

/// Lambda = T x F in Z_M x Z_M. Points are enumerated with (k, l) lexicographic.
class Lattice {
 public:
  Lattice(IndexSet T, IndexSet F);
  static Lattice full(int M) { return Lattice(IndexSet::full(M), IndexSet::full(M)); }

  int modulus() const { return T_.modulus(); }
  const IndexSet& T() const { return T_; }
  const IndexSet& F() const { return F_; }
  int size() const { return T_.size() * F_.size(); }
  bool is_full() const { return T_.is_full() && F_.is_full(); }

  TFIndex point(int i) const;
  std::vector<TFIndex> points() const;
  /// Position of lambda in the enumeration, or -1 when lambda is not in the lattice.
  int index_of(TFIndex lambda) const;

 private:
  IndexSet T_;
  IndexSet F_;
};

/// g_qpt(m) = g(m) s_qpt(m), s_qpt(m) = 1 + e^{2 pi i (m p / M + t / 3)} g(m - q) / g(m).
/// The result is not renormalized and may vanish at some coordinates.
Signal build_auxiliary(const Signal& g, int q, int p, int t);

struct AuxKey {
  int q = 0;
  int p = 0;
  int t = 0;
  friend bool operator==(const AuxKey&, const AuxKey&) = default;
};

/// Identifies one frame vector pi(k, l) w_r. window 0 is the primary window;
/// window r >= 1 is the auxiliary window number r - 1 in (q, p, t) order.
struct MeasurementKey {
  int window = 0;
  int k = 0;
  int l = 0;
  friend bool operator==(const MeasurementKey&, const MeasurementKey&) = default;
};

/// Multi-window Gabor frame ({g} u {g_qpt}, Lambda). Frame vectors are ordered
/// primary block first ((k, l) lexicographic), then one block per (q, p, t)
/// in that lexicographic order, each again (k, l) lexicographic.
class MultiWindowGaborFrame {
 public:
  const Window& g() const { return g_; }
  const Lattice& lattice() const { return lattice_; }
  const IndexSet& Q() const { return Q_; }
  const IndexSet& P() const { return P_; }
  int modulus() const { return lattice_.modulus(); }

  /// Primary window followed by the auxiliary windows.
  const std::vector<Signal>& windows() const { return windows_; }
  int window_count() const { return static_cast<int>(windows_.size()); }
  AuxKey aux_key(int window) const;
  /// Window id of g_qpt, or -1.
  int aux_window(int q, int p, int t) const;
  std::string window_tag(int window) const;
  /// Inverse of window_tag; -1 if the tag names no window of this frame.
  int window_from_tag(const std::string& tag) const;

  std::size_t cardinality() const { return windows_.size() * static_cast<std::size_t>(lattice_.size()); }
  MeasurementKey key(std::size_t j) const;
  std::size_t index_of(const MeasurementKey& key) const;
  std::vector<MeasurementKey> order() const;

  /// pi(k, l) w_r
  Signal vector(std::size_t j) const;

 private:
  friend MultiWindowGaborFrame assemble_frame(const Window&, const Lattice&, const IndexSet&, const IndexSet&);
  MultiWindowGaborFrame(Window g, Lattice lattice, IndexSet Q, IndexSet P);

  Window g_;
  Lattice lattice_;
  IndexSet Q_;
  IndexSet P_;
  std::vector<Signal> windows_;
};

/// Validates Q within T - T and P within F - F, then builds all 3|Q||P|
/// auxiliary windows.
MultiWindowGaborFrame assemble_frame(const Window& g, const Lattice& lattice, const IndexSet& Q, const IndexSet& P);

/// |Lambda| (1 + 3 |Q| |P|)
std::size_t frame_cardinality(int lattice_size, int q_size, int p_size);

struct MeasurementVector {
  std::vector<double> values;
  std::vector<MeasurementKey> index;
  std::size_t size() const { return values.size(); }
};

/// Complex frame coefficients <x, phi_j> in canonical order.
std::vector<cplx> frame_coefficients(const MultiWindowGaborFrame& frame, const Signal& x);

/// |<x, phi_j>|^2 in canonical order.
MeasurementVector measure(const MultiWindowGaborFrame& frame, const Signal& x);

enum class SparkMode { exhaustive, montecarlo };

struct SparkFailureReport {
  std::vector<int> columns;     ///< positions in the vector list
  std::vector<TFIndex> subset;  ///< lattice points (lattice checks only)
  double margin = 0.0;
};

struct SparkReport {
  SparkMode mode = SparkMode::exhaustive;
  bool full_spark = false;  ///< exhaustive: proven; montecarlo: no failure sampled
  std::uint64_t subsets_checked = 0;
  double min_margin = 0.0;
  double threshold = kSparkThreshold;
  std::vector<SparkFailureReport> failures;
};

struct SparkOptions {
  SparkMode mode = SparkMode::exhaustive;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 0;
  std::uint64_t budget = kDefaultSparkBudget;
  double threshold = kSparkThreshold;
  bool parallel = true;
};

/// Checks that every M-subset of {pi(lambda) g : lambda in Lambda} is
/// linearly independent (|det| > threshold * prod of column norms).
/// Exhaustive mode throws BudgetError when binomial(|Lambda|, M) > budget.
SparkReport full_spark_check(const Window& g, const Lattice& lattice, const SparkOptions& opts = {});

/// Generic variant over arbitrary vectors of equal dimension d, testing d-subsets.
SparkReport spark_check_vectors(const std::vector<Signal>& vectors, const SparkOptions& opts = {});

}  // namespace gpr
