#include "gpr/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gpr/experiment.hpp"
#include "gpr/io.hpp"

namespace gpr {

namespace {

using io::json;

std::uint64_t effective_budget(std::uint64_t fallback) { return budget_from_env().value_or(fallback); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// 12 significant digits; roundoff below 1e-14 prints as 0.
std::string num(double v) {
  if (std::abs(v) < 1e-14) v = 0.0;
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_text_file(path, text);
  }
}

IndexSet parse_members(int M, const std::string& list) {
  std::vector<int> members;
  std::stringstream ss(list);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw ValidationError("--members: '" + tok + "' is not an integer");
    members.push_back(mod(v, M));
  }
  return IndexSet(M, std::move(members));
}

struct ConstructArgs {
  std::string config, out;
  std::optional<std::uint64_t> seed;
  std::string spark_mode;
  std::uint64_t spark_trials = 1000;
};

int cmd_construct(const ConstructArgs& a, std::ostream& out) {
  const json desc = io::read_json_file(a.config);
  const io::FrameSpec spec = io::frame_spec_from_json(desc, a.seed, effective_budget(std::uint64_t{1} << 20));
  const auto frame = assemble_frame(spec.g, spec.lattice, spec.Q, spec.P);
  json j = io::to_json(frame, spec.seed);
  if (spec.q_beta) j["beta"]["Q"] = {{"value", spec.q_beta->value}, {"status", to_string(spec.q_beta->status)}};
  if (spec.p_beta) j["beta"]["P"] = {{"value", spec.p_beta->value}, {"status", to_string(spec.p_beta->status)}};
  if (!a.spark_mode.empty()) {
    SparkOptions so;
    so.mode = a.spark_mode == "exhaustive" ? SparkMode::exhaustive : SparkMode::montecarlo;
    so.trials = a.spark_trials;
    so.seed = spec.seed.value_or(0);
    so.budget = effective_budget(so.budget);
    j["spark"] = io::to_json(full_spark_check(spec.g, spec.lattice, so));
  }
  emit(a.out, dump(j), out);
  return kExitOk;
}

int cmd_measure(const std::string& frame_path, const std::string& signal_path, const std::string& out_path,
                std::ostream& out) {
  const auto frame = io::frame_from_json(io::read_json_file(frame_path));
  const Signal x = io::signal_from_json(io::read_json_file(signal_path));
  const MeasurementVector b = measure(frame, x);
  std::ostringstream os;
  io::write_measurements_csv(os, frame, b);
  emit(out_path, os.str(), out);
  return kExitOk;
}

struct ReconstructArgs {
  std::string frame, measurements, out, method = "sync", truth, prior;
};

int cmd_reconstruct(const ReconstructArgs& a, std::ostream& out, std::ostream& err) {
  const auto frame = io::frame_from_json(io::read_json_file(a.frame));
  std::ifstream in(a.measurements);
  if (!in) throw ValidationError("cannot open '" + a.measurements + "'");
  const MeasurementVector b = io::read_measurements_csv(in, frame);
  ReconstructionOptions opts;
  opts.method = a.method == "propagate" ? PhaseMethod::propagate : PhaseMethod::sync;

  const auto start = std::chrono::steady_clock::now();
  ReconstructionResult res;
  if (a.prior.empty()) {
    res = reconstruct(frame, b, opts);
  } else {
    const SubspacePrior prior = io::prior_from_json(io::read_json_file(a.prior));
    res = reconstruct_subspace(frame, prior, b, opts);
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!a.truth.empty()) res.phase_error = phase_distance(res.estimate, io::signal_from_json(io::read_json_file(a.truth)));
  emit(a.out, dump(io::to_json(res, elapsed)), out);
  if (res.status != ReconstructionStatus::success) {
    err << "reconstruct: " << to_string(res.status) << " (largest component " << res.component_size << ", needs "
        << res.solve_dimension << ")\n";
    return kExitReconstruction;
  }
  return kExitOk;
}

struct BiasArgs {
  std::string set_file, members;
  int modulus = 0;
  std::optional<double> C;
};

int cmd_bias(const BiasArgs& a, std::ostream& out) {
  IndexSet A;
  if (!a.set_file.empty()) {
    A = io::index_set_from_json(io::read_json_file(a.set_file));
  } else {
    if (a.modulus < 1) throw ValidationError("bias: give --set or --modulus with --members");
    A = parse_members(a.modulus, a.members);
  }
  const double bias = fourier_bias(A);
  out << "set: " << A.to_string() << "\n";
  out << "size: " << A.size() << "\n";
  out << "density: " << num(density(A)) << "\n";
  out << "bias: " << num(bias) << "\n";
  if (a.C) {
    const double c = bias_ratio_for(*a.C);
    out << "ratio c: " << num(c) << "\n";
    out << "pseudorandom: " << (check_pseudorandom(A, c) ? "yes" : "no") << "\n";
  }
  return kExitOk;
}

struct BetaArgs {
  int M = 0;
  double C = 0.0;
  std::string mode = "exhaustive";
  std::uint64_t seed = 0;
  std::uint64_t trials = 20000;
};

int cmd_beta(const BetaArgs& a, std::ostream& out) {
  if (!(a.C > 3.0)) throw ValidationError("beta: C must exceed 3");
  BetaOptions opts;
  opts.mode = a.mode == "randomized" ? BetaMode::randomized : BetaMode::exhaustive;
  opts.seed = a.seed;
  opts.trials = a.trials;
  opts.exhaustive_budget = effective_budget(opts.exhaustive_budget);
  const BetaResult r = beta(a.M, a.C, opts);
  const bool upper = r.status == BetaStatus::upper_bound;
  if (r.status == BetaStatus::unknown) {
    out << "beta: unknown (no witness in " << r.evaluated << " samples)\n";
    return kExitOk;
  }
  out << "beta" << (upper ? " (upper bound)" : "") << ": " << r.value << "\n";
  out << "witness: " << r.witness->to_string() << "\n";
  out << "ratio c: " << num(r.ratio) << "\n";
  out << "measurement count" << (upper ? " (upper bound)" : "") << ": " << num(a.C * a.M * (1.0 + 3.0 * r.value)) << "\n";
  return kExitOk;
}

int cmd_spectral_gap(const std::string& config, const std::string& structure, std::ostream& out) {
  const json j = io::read_json_file(config);
  if (!j.is_object() || !j.contains("M")) throw ValidationError("spectral-gap: config needs M");
  const int M = j.at("M").get<int>();
  const std::uint64_t budget = effective_budget(std::uint64_t{1} << 20);
  json tspec = "full", fspec = "full";
  if (j.contains("lattice")) {
    tspec = j.at("lattice").value("T", tspec);
    fspec = j.at("lattice").value("F", fspec);
  }
  tspec = j.value("T", tspec);
  fspec = j.value("F", fspec);
  const IndexSet T = io::resolve_set(tspec, M, nullptr, budget).set;
  const IndexSet F = io::resolve_set(fspec, M, nullptr, budget).set;
  const IndexSet Q = io::resolve_set(j.value("Q", json("difference-set")), M, &T, budget).set;
  const IndexSet P = io::resolve_set(j.value("P", json("difference-set")), M, &F, budget).set;
  const Lattice lattice(T, F);
  const PhaseGraph graph = build_edges(lattice, Q, P);
  const auto rep = spectral_gap(graph, structure == "dense" ? SpectralStructure::dense : SpectralStructure::automatic);
  json o = io::to_json(rep);
  o["lattice_size"] = lattice.size();
  o["edge_count"] = graph.edges.size();
  o["Q"] = io::to_json(Q);
  o["P"] = io::to_json(P);
  out << dump(o);
  return kExitOk;
}

int cmd_experiment(const std::string& config, const std::string& out_path, const std::string& csv_path,
                   std::optional<std::uint64_t> seed, std::ostream& out) {
  ExperimentConfig cfg = experiment_config_from_json(io::read_json_file(config));
  if (seed) cfg.seed = *seed;
  cfg.beta_budget = effective_budget(cfg.beta_budget);
  const ExperimentReport rep = run_experiment(cfg);
  emit(out_path, dump(rep.to_json()), out);
  if (!csv_path.empty()) io::write_text_file(csv_path, rep.summary_csv());
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Phase retrievable multi-window Gabor frames"};
  app.require_subcommand(1);

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "frame descriptor -> frame file");
  construct->add_option("--config", ca.config, "frame descriptor JSON")->required();
  construct->add_option("--out", ca.out, "output frame JSON (default stdout)");
  construct->add_option("--seed", ca.seed, "window seed (overrides g in the descriptor)");
  construct->add_option("--mode", ca.spark_mode, "also run a full-spark check")
      ->check(CLI::IsMember({"exhaustive", "montecarlo"}));
  construct->add_option("--trials", ca.spark_trials, "montecarlo subsets");

  std::string m_frame, m_signal, m_out;
  auto* meas = app.add_subcommand("measure", "frame + signal -> measurement CSV");
  meas->add_option("--frame", m_frame)->required();
  meas->add_option("--signal", m_signal)->required();
  meas->add_option("--out", m_out);

  ReconstructArgs ra;
  auto* rec = app.add_subcommand("reconstruct", "frame + measurements -> reconstruction JSON");
  rec->add_option("--frame", ra.frame)->required();
  rec->add_option("--measurements", ra.measurements)->required();
  rec->add_option("--out", ra.out);
  rec->add_option("--method", ra.method)->check(CLI::IsMember({"propagate", "sync"}));
  rec->add_option("--truth", ra.truth, "signal JSON, reports phase_distance");
  rec->add_option("--prior", ra.prior, "subspace prior JSON");

  BiasArgs ba;
  auto* bias = app.add_subcommand("bias", "Fourier bias of a set");
  bias->add_option("--set", ba.set_file, "index set JSON");
  bias->add_option("--modulus", ba.modulus);
  bias->add_option("--members", ba.members, "comma separated");
  bias->add_option("--C", ba.C, "also test bias <= ((C-3)/(C-1)) density");

  BetaArgs be;
  auto* bet = app.add_subcommand("beta", "beta(M, C) and its witness");
  bet->add_option("--M", be.M)->required();
  bet->add_option("--C", be.C)->required();
  bet->add_option("--mode", be.mode)->check(CLI::IsMember({"exhaustive", "randomized"}));
  bet->add_option("--seed", be.seed);
  bet->add_option("--trials", be.trials);

  std::string g_config, g_structure = "automatic";
  auto* gap = app.add_subcommand("spectral-gap", "spectral gap of the phase graph");
  gap->add_option("--config", g_config)->required();
  gap->add_option("--structure", g_structure)->check(CLI::IsMember({"automatic", "dense"}));

  std::string e_config, e_out, e_csv;
  std::optional<std::uint64_t> e_seed;
  auto* exp = app.add_subcommand("experiment", "seeded reconstruction sweep");
  exp->add_option("--config", e_config)->required();
  exp->add_option("--out", e_out);
  exp->add_option("--csv", e_csv);
  exp->add_option("--seed", e_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*construct) return cmd_construct(ca, out);
    if (*meas) return cmd_measure(m_frame, m_signal, m_out, out);
    if (*rec) return cmd_reconstruct(ra, out, err);
    if (*bias) return cmd_bias(ba, out);
    if (*bet) return cmd_beta(be, out);
    if (*gap) return cmd_spectral_gap(g_config, g_structure, out);
    if (*exp) return cmd_experiment(e_config, e_out, e_csv, e_seed, out);
  } catch (const BudgetError& e) {
    err << "budget: " << e.what() << "\n";
    return kExitBudget;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const json::exception& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const RankDeficientError& e) {
    err << "reconstruction failed: " << e.what() << "\n";
    return kExitReconstruction;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitValidation;
}

}  // namespace gpr
