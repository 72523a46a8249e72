#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "gpr/framegen.hpp"
#include "gpr/phasegraph.hpp"
#include "gpr/recover.hpp"
#include "json.hpp"

namespace gpr::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Signals are arrays of [re, im] pairs; {"values": [...]} is also accepted.
json to_json(const Signal& x);
Signal signal_from_json(const json& j);

/// {"modulus": M, "members": [...]}
json to_json(const IndexSet& A);
IndexSet index_set_from_json(const json& j);

/// Resolves a T/F/Q/P spec against Z_M. Accepted forms:
///   "full" | [members...] | {"modulus", "members"} |
///   "difference-set" (Q: T - T, P: F - F; needs `base`) |
///   {"bernoulli": rate, "seed": s} | {"beta": C, "mode", "seed", "trials"}.
struct ResolvedSet {
  IndexSet set;
  std::optional<BetaResult> beta;  ///< set when the spec asked for a beta witness
};
ResolvedSet resolve_set(const json& spec, int M, const IndexSet* base, std::uint64_t beta_budget);

/// Frame descriptor: {"M", "T", "F", "Q", "P", and "g" (pairs) or "seed"}.
struct FrameSpec {
  Window g;
  Lattice lattice;
  IndexSet Q;
  IndexSet P;
  std::optional<std::uint64_t> seed;
  std::optional<BetaResult> q_beta;
  std::optional<BetaResult> p_beta;
};
FrameSpec frame_spec_from_json(const json& j, std::optional<std::uint64_t> seed_override = std::nullopt,
                               std::uint64_t beta_budget = std::uint64_t{1} << 20);

/// Frame file: the descriptor with explicit sets and window values plus the
/// canonical window order and cardinality.
json to_json(const MultiWindowGaborFrame& frame, std::optional<std::uint64_t> seed = std::nullopt);
MultiWindowGaborFrame frame_from_json(const json& j);

/// CSV with header window_tag,k,l,value, rows in canonical order.
void write_measurements_csv(std::ostream& os, const MultiWindowGaborFrame& frame, const MeasurementVector& b);
/// Parses and validates against the frame's ordering (ValidationError on any
/// unknown tag, shuffled row or missing block).
MeasurementVector read_measurements_csv(std::istream& is, const MultiWindowGaborFrame& frame);

json to_json(const SpectralReport& rep);
json to_json(const SparkReport& rep);
json to_json(const ReconstructionResult& res, double elapsed_seconds);

/// Edge list CSV: k,l,k2,l2,re,im,pruned.
void write_edges_csv(std::ostream& os, const PhaseGraph& graph);

/// Subspace prior file: {"M", "d", "W": M rows of d [re, im] pairs} or {"M", "d", "seed"}.
json to_json(const SubspacePrior& prior);
SubspacePrior prior_from_json(const json& j);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace gpr::io
