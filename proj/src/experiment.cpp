#include "gpr/experiment.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "gpr/rng.hpp"

namespace gpr {

namespace {

std::uint64_t trial_stream(std::uint64_t seed, int trial, std::uint64_t purpose) {
  return Rng(seed).split(static_cast<std::uint64_t>(trial)).split(purpose).seed();
}

}  // namespace

Window trial_window(std::uint64_t seed, int trial, int M) { return random_window(M, trial_stream(seed, trial, 0)); }

Signal trial_signal(std::uint64_t seed, int trial, int M) {
  Rng rng(trial_stream(seed, trial, 1));
  std::vector<cplx> v(static_cast<std::size_t>(M));
  for (auto& e : v) e = rng.complex_normal();
  return Signal(std::move(v));
}

ExperimentConfig experiment_config_from_json(const io::json& j) {
  if (!j.is_object()) throw ValidationError("experiment config: expected an object");
  if (j.contains("schema_version") && j.at("schema_version") != io::kSchemaVersion) {
    throw ValidationError("experiment config: unsupported schema_version");
  }
  ExperimentConfig c;
  try {
    c.M = j.at("M").get<int>();
    c.C = j.value("C", c.C);
    if (j.contains("lattice")) {
      c.T = j.at("lattice").value("T", c.T);
      c.F = j.at("lattice").value("F", c.F);
    }
    c.Q = j.value("Q", c.Q);
    c.P = j.value("P", c.P);
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    const auto method = j.value("method", std::string("sync"));
    if (method == "sync") {
      c.method = PhaseMethod::sync;
    } else if (method == "propagate") {
      c.method = PhaseMethod::propagate;
    } else {
      throw ValidationError("experiment config: method must be 'sync' or 'propagate'");
    }
    if (j.contains("tolerances")) {
      c.vanish_tolerance = j.at("tolerances").value("vanish", c.vanish_tolerance);
      c.success_tolerance = j.at("tolerances").value("success", c.success_tolerance);
    }
    if (j.contains("subspace")) c.subspace_dim = j.at("subspace").at("d").get<int>();
    if (j.contains("spark_trials")) c.spark_trials = j.at("spark_trials").get<std::uint64_t>();
  } catch (const io::json::exception& e) {
    throw ValidationError(std::string("experiment config: ") + e.what());
  }
  if (c.M < 1) throw ValidationError("experiment config: M must be positive");
  if (!(c.C > 3.0)) throw ValidationError("experiment config: C must exceed 3");
  if (c.trials < 0) throw ValidationError("experiment config: trials must be nonnegative");
  if (c.subspace_dim && (*c.subspace_dim < 1 || *c.subspace_dim > c.M)) {
    throw ValidationError("experiment config: subspace d must satisfy 1 <= d <= M");
  }
  return c;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const int M = config.M;
  ExperimentReport rep;
  rep.config = config;

  const IndexSet T = io::resolve_set(config.T, M, nullptr, config.beta_budget).set;
  const IndexSet F = io::resolve_set(config.F, M, nullptr, config.beta_budget).set;
  const Lattice lattice(T, F);
  auto q = io::resolve_set(config.Q, M, &T, config.beta_budget);
  auto p = io::resolve_set(config.P, M, &F, config.beta_budget);
  rep.Q = q.set;
  rep.P = p.set;
  rep.q_beta = q.beta;
  rep.p_beta = p.beta;
  rep.lattice_size = lattice.size();
  rep.measurement_count_formula = frame_cardinality(lattice.size(), rep.Q.size(), rep.P.size());

  const double c = bias_ratio_for(config.C);
  rep.q_pseudorandom = check_pseudorandom(rep.Q, c);
  rep.p_pseudorandom = check_pseudorandom(rep.P, c);
  const int dim = config.subspace_dim.value_or(M);
  rep.lattice_exceeds_C_dim = lattice.size() > config.C * dim;

  // Validates Q, P against the difference sets before any trial runs.
  const MultiWindowGaborFrame probe = assemble_frame(trial_window(config.seed, 0, M), lattice, rep.Q, rep.P);
  rep.measurement_count = probe.cardinality();

  const PhaseGraph graph = build_edges(lattice, rep.Q, rep.P);
  try {
    rep.spectral = spectral_gap(graph);
  } catch (const ValidationError& e) {
    rep.spectral_error = e.what();
  }

  ReconstructionOptions ropts;
  ropts.method = config.method;
  ropts.vanish_tolerance = config.vanish_tolerance;

  rep.trials.resize(static_cast<std::size_t>(config.trials));
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < config.trials; ++i) {
    TrialRecord& rec = rep.trials[static_cast<std::size_t>(i)];
    rec.trial = i;
    try {
      const Window g = trial_window(config.seed, i, M);
      const MultiWindowGaborFrame frame = assemble_frame(g, lattice, rep.Q, rep.P);
      std::optional<SubspacePrior> prior;
      Signal x;
      if (config.subspace_dim) {
        prior.emplace(random_subspace_prior(M, *config.subspace_dim, trial_stream(config.seed, i, 2)));
        const Signal h = trial_signal(trial_stream(config.seed, i, 3), 0, *config.subspace_dim);
        x = prior->embed(Eigen::Map<const Eigen::VectorXcd>(h.data().data(), h.dim()));
      } else {
        x = trial_signal(config.seed, i, M);
      }
      const MeasurementVector b = measure(frame, x);
      const ReconstructionResult res =
          prior ? reconstruct_subspace(frame, *prior, b, ropts) : reconstruct(frame, b, ropts);
      rec.status = to_string(res.status);
      rec.component_size = res.component_size;
      rec.vanishing_vertices = res.vanishing_vertices;
      rec.phase_distance = phase_distance(res.estimate, x);
      rec.relative_error = rec.phase_distance / x.norm();
      rec.success = res.status == ReconstructionStatus::success && rec.relative_error <= config.success_tolerance;
      if (rep.spectral && rep.spectral->gap > 0.0) {
        rec.bound = component_bound(lattice.size(), rep.spectral->gap, res.vanishing_vertices);
      }
      if (config.spark_trials) {
        SparkOptions so;
        so.mode = SparkMode::montecarlo;
        so.trials = *config.spark_trials;
        so.seed = trial_stream(config.seed, i, 4);
        rec.spark_ok = full_spark_check(g, lattice, so).full_spark;
      }
    } catch (const std::exception& e) {
      rec.status = std::string("error: ") + e.what();
    }
  }
  for (const auto& rec : rep.trials) {
    if (rec.success) ++rep.successes;
    rep.max_relative_error = std::max(rep.max_relative_error, rec.relative_error);
  }
  rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

namespace {

io::json beta_json(const std::optional<BetaResult>& b) {
  if (!b) return nullptr;
  return {{"value", b->value}, {"status", to_string(b->status)}, {"ratio", b->ratio}};
}

}  // namespace

io::json ExperimentReport::to_json(bool with_timing) const {
  io::json trials_json = io::json::array();
  for (const auto& t : trials) {
    io::json r = {{"trial", t.trial},
                  {"status", t.status},
                  {"success", t.success},
                  {"phase_distance", t.phase_distance},
                  {"relative_error", t.relative_error},
                  {"component_size", t.component_size},
                  {"vanishing_vertices", t.vanishing_vertices}};
    if (t.bound) r["component_bound"] = *t.bound;
    if (t.spark_ok) r["full_spark_sampled"] = *t.spark_ok;
    trials_json.push_back(r);
  }
  io::json j = {{"schema_version", io::kSchemaVersion},
                {"M", config.M},
                {"C", config.C},
                {"seed", config.seed},
                {"method", gpr::to_string(config.method)},
                {"subspace_dim", config.subspace_dim ? io::json(*config.subspace_dim) : io::json(nullptr)},
                {"lattice_size", lattice_size},
                {"Q", io::to_json(Q)},
                {"P", io::to_json(P)},
                {"beta", {{"Q", beta_json(q_beta)}, {"P", beta_json(p_beta)}}},
                {"measurement_count", measurement_count},
                {"measurement_count_formula", measurement_count_formula},
                {"hypotheses",
                 {{"lattice_exceeds_C_dim", lattice_exceeds_C_dim},
                  {"Q_pseudorandom", q_pseudorandom},
                  {"P_pseudorandom", p_pseudorandom}}},
                {"spectral_gap", spectral ? io::to_json(*spectral) : io::json(nullptr)},
                {"trials", trials_json},
                {"summary",
                 {{"trials", trials.size()},
                  {"successes", successes},
                  {"success_rate", trials.empty() ? 0.0 : static_cast<double>(successes) / trials.size()},
                  {"max_relative_error", max_relative_error}}}};
  if (!spectral_error.empty()) j["spectral_gap_error"] = spectral_error;
  if (with_timing) j["timing"] = {{"wall_clock_seconds", wall_clock_seconds}};
  return j;
}

std::string ExperimentReport::summary_csv() const {
  std::ostringstream os;
  os << "# schema_version: " << io::kSchemaVersion << "\n";
  os << "trial,status,success,phase_distance,relative_error,component_size\n";
  os.precision(17);
  for (const auto& t : trials) {
    os << t.trial << ',' << t.status << ',' << (t.success ? 1 : 0) << ',' << t.phase_distance << ','
       << t.relative_error << ',' << t.component_size << '\n';
  }
  return os.str();
}

}  // namespace gpr
