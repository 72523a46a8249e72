#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpr/core.hpp"
#include "gpr/framegen.hpp"
#include "gpr/phasegraph.hpp"

namespace gpr {

/// A relative phase was requested on an edge touching a vanishing coefficient.
class EdgeUndefinedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The coefficient system has no unique least-squares solution.
class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(const std::string& what, double condition) : std::runtime_error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

/// a conj(b) from the squared moduli |a + e^{-2 pi i t/3} b|^2, t = 0, 1, 2:
/// (1/3) sum_t e^{-2 pi i t/3} |a + e^{-2 pi i t/3} b|^2. The weights must be
/// the conjugates of the mask phases; with e^{+2 pi i t/3} the sum is conj(a) b.
cplx polarization(const std::array<double, 3>& squared_moduli);

struct RelativePhase {
  cplx omega;          ///< unit modulus
  double raw_modulus;  ///< |omega| before renormalization; 1 on exact data
};

/// omega = phase(<x, pi(k,l) g>) / phase(<x, pi(k+q, l+p) g>) from the three
/// auxiliary measurements |<x, pi(k,l) g_qpt>|^2, t = 0, 1, 2, and the two
/// primary magnitudes r1 = |<x, pi(k,l) g>|, r2 = |<x, pi(k+q,l+p) g>|.
/// Throws EdgeUndefinedError when r1 or r2 is at or below `threshold`.
RelativePhase relative_phase(const std::array<double, 3>& aux, double r1, double r2, int k, int p, int M,
                             double threshold = 0.0);

/// Vertex phases up to one global factor. Unresolved vertices keep phase 0.
struct PhaseSolution {
  std::vector<cplx> phase;
  std::vector<char> resolved;
  double eigenvalue = 0.0;  ///< angular synchronization only
  int iterations = 0;
  double eigen_residual = 0.0;
  std::vector<int> flagged;

  /// Throws std::out_of_range for vertices the method could not reach.
  cplx at(int v) const;
};

/// Spanning-tree propagation from `root` over weighted, unpruned edges:
/// phase(root) = 1 and phase(v) = omega_(v, parent) phase(parent).
PhaseSolution propagate_phases(const PhaseGraph& graph, int root);

inline constexpr std::uint64_t kSyncStartSeed = 0x9e3779b97f4a7c15ULL;

struct SyncOptions {
  int max_iterations = 1000;
  double tolerance = 1e-12;
  double flag_threshold = 1e-12;
};

/// Leading eigenvector of H (H_uv = omega_(u,v), H_uu = 0) restricted to
/// `vertices`, by shifted power iteration from a fixed-seed start vector,
/// then normalized entrywise.
PhaseSolution angular_sync(const PhaseGraph& graph, const std::vector<int>& vertices, const SyncOptions& opts = {});

struct LeastSquares {
  Eigen::VectorXcd solution;
  double residual = 0.0;   ///< ||A x - c|| / ||c|| (0 for c = 0)
  double condition = 0.0;  ///< sigma_max / sigma_min
};

inline constexpr double kRankTolerance = 1e-12;

/// argmin ||A x - c||_2 via SVD; throws RankDeficientError when
/// sigma_min <= kRankTolerance * sigma_max.
LeastSquares solve_least_squares(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& c);

struct CoefficientSolve {
  Signal estimate;
  double residual = 0.0;
  double condition = 0.0;
};

/// x minimizing sum_lambda |<x, pi(lambda) g> - coeff(lambda)|^2.
CoefficientSolve solve_coefficients(const Signal& g, const std::vector<TFIndex>& vertices,
                                    const std::vector<cplx>& coeffs);

enum class PhaseMethod { propagate, sync };
std::string to_string(PhaseMethod m);

enum class ReconstructionStatus { success, component_too_small, unresolved_phases, rank_deficient };
std::string to_string(ReconstructionStatus s);

struct ReconstructionOptions {
  PhaseMethod method = PhaseMethod::sync;
  double vanish_tolerance = kVanishTolerance;
  SyncOptions sync;
};

struct ReconstructionResult {
  Signal estimate;
  ReconstructionStatus status = ReconstructionStatus::component_too_small;
  int component_size = 0;
  int solve_dimension = 0;
  int vertex_count = 0;
  int edge_count = 0;
  int removed_edges = 0;
  int vanishing_vertices = 0;
  int component_count = 0;
  double solve_residual = 0.0;
  double condition = 0.0;
  double max_phase_defect = 0.0;  ///< max | |omega_raw| - 1 | over used edges
  std::optional<double> phase_error;  ///< phase_distance to a known truth
  PhaseMethod method = PhaseMethod::sync;
};

/// Checks that b follows the frame's canonical ordering and holds finite,
/// nonnegative values. The message names the first missing or misplaced entry.
void validate_measurements(const MultiWindowGaborFrame& frame, const MeasurementVector& b);

/// Full recovery from phaseless measurements b = measure(frame, x).
ReconstructionResult reconstruct(const MultiWindowGaborFrame& frame, const MeasurementVector& b,
                                 const ReconstructionOptions& opts = {});

/// Known-rank subspace x = W h, W an M x d matrix whose columns span the prior.
class SubspacePrior {
 public:
  explicit SubspacePrior(Eigen::MatrixXcd W, double rank_tolerance = 1e-10);

  const Eigen::MatrixXcd& W() const { return W_; }
  int ambient_dim() const { return static_cast<int>(W_.rows()); }
  int dim() const { return static_cast<int>(W_.cols()); }
  /// sigma_d / sigma_1
  double rank_ratio() const { return rank_ratio_; }

  Signal embed(const Eigen::VectorXcd& h) const;
  /// W^* v
  Eigen::VectorXcd project(const Signal& v) const;

 private:
  Eigen::MatrixXcd W_;
  double rank_ratio_ = 0.0;
};

/// W with i.i.d. standard complex normal entries.
SubspacePrior random_subspace_prior(int M, int d, std::uint64_t seed);

/// Recovery of x = W h in dimension d: component threshold d, coefficient
/// solve for h against rows W^* pi(lambda) g, estimate W h.
ReconstructionResult reconstruct_subspace(const MultiWindowGaborFrame& frame, const SubspacePrior& prior,
                                          const MeasurementVector& b, const ReconstructionOptions& opts = {});

}  // namespace gpr
