#include "gpr/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gpr/rng.hpp"

namespace gpr::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw ValidationError(what); }

int as_int(const json& j, const char* what) {
  if (!j.is_number_integer()) bad(std::string(what) + ": expected an integer");
  return j.get<int>();
}

std::string fmt_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

json to_json(const Signal& x) {
  json arr = json::array();
  for (const cplx& v : x) arr.push_back({v.real(), v.imag()});
  return arr;
}

Signal signal_from_json(const json& j) {
  const json& arr = j.is_object() && j.contains("values") ? j.at("values") : j;
  if (!arr.is_array() || arr.empty()) bad("signal: expected a nonempty array of [re, im] pairs");
  std::vector<cplx> v;
  v.reserve(arr.size());
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      bad("signal: entry " + std::to_string(v.size()) + " is not an [re, im] pair");
    }
    v.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  return Signal(std::move(v));
}

json to_json(const IndexSet& A) { return {{"modulus", A.modulus()}, {"members", A.members()}}; }

IndexSet index_set_from_json(const json& j) {
  if (!j.is_object() || !j.contains("modulus") || !j.contains("members")) {
    bad("index set: expected {\"modulus\": M, \"members\": [...]}");
  }
  const int M = as_int(j.at("modulus"), "index set modulus");
  if (!j.at("members").is_array()) bad("index set: members must be an array");
  std::vector<int> members;
  for (const auto& m : j.at("members")) members.push_back(as_int(m, "index set member"));
  std::vector<int> check = members;
  std::sort(check.begin(), check.end());
  if (std::adjacent_find(check.begin(), check.end()) != check.end()) bad("index set: duplicate members");
  return IndexSet(M, std::move(members));
}

ResolvedSet resolve_set(const json& spec, int M, const IndexSet* base, std::uint64_t beta_budget) {
  if (spec.is_string()) {
    const auto s = spec.get<std::string>();
    if (s == "full") return {IndexSet::full(M), std::nullopt};
    if (s == "difference-set") {
      if (base == nullptr) bad("set spec: difference-set needs a base set");
      return {difference_set(*base), std::nullopt};
    }
    bad("set spec: unknown keyword '" + s + "'");
  }
  if (spec.is_array()) {
    std::vector<int> members;
    for (const auto& m : spec) members.push_back(mod(as_int(m, "set member"), M));
    return {IndexSet(M, std::move(members)), std::nullopt};
  }
  if (spec.is_object()) {
    if (spec.contains("members")) {
      IndexSet A = index_set_from_json(spec);
      if (A.modulus() != M) bad("set spec: modulus " + std::to_string(A.modulus()) + " differs from M");
      return {A, std::nullopt};
    }
    if (spec.contains("bernoulli")) {
      const double rate = spec.at("bernoulli").get<double>();
      const auto seed = spec.value("seed", std::uint64_t{0});
      // Redraw on an empty sample, deterministically, from child streams.
      const Rng root(seed);
      for (std::uint64_t i = 0; i < 1000; ++i) {
        IndexSet A = random_subset(M, rate, i == 0 ? seed : root.split(i).seed());
        if (!A.empty()) return {A, std::nullopt};
      }
      bad("set spec: bernoulli rate too small to produce a nonempty set");
    }
    if (spec.contains("beta")) {
      BetaOptions opts;
      opts.exhaustive_budget = beta_budget;
      const auto mode = spec.value("mode", std::string("exhaustive"));
      if (mode == "exhaustive") {
        opts.mode = BetaMode::exhaustive;
      } else if (mode == "randomized") {
        opts.mode = BetaMode::randomized;
      } else {
        bad("set spec: unknown beta mode '" + mode + "'");
      }
      opts.seed = spec.value("seed", std::uint64_t{0});
      opts.trials = spec.value("trials", opts.trials);
      BetaResult r = beta(M, spec.at("beta").get<double>(), opts);
      if (!r.witness) bad("set spec: randomized beta search found no witness within its budget");
      return {*r.witness, r};
    }
  }
  bad("set spec: unrecognized form " + spec.dump());
}

FrameSpec frame_spec_from_json(const json& j, std::optional<std::uint64_t> seed_override, std::uint64_t beta_budget) {
  if (!j.is_object()) bad("frame descriptor: expected an object");
  for (const char* key : {"M", "T", "F", "Q", "P"}) {
    if (!j.contains(key)) bad(std::string("frame descriptor: missing field '") + key + "'");
  }
  const int M = as_int(j.at("M"), "M");
  if (M < 1) bad("frame descriptor: M must be positive");
  IndexSet T = resolve_set(j.at("T"), M, nullptr, beta_budget).set;
  IndexSet F = resolve_set(j.at("F"), M, nullptr, beta_budget).set;
  ResolvedSet Q = resolve_set(j.at("Q"), M, &T, beta_budget);
  ResolvedSet P = resolve_set(j.at("P"), M, &F, beta_budget);

  std::optional<std::uint64_t> seed = seed_override;
  if (!seed && j.contains("seed")) seed = j.at("seed").get<std::uint64_t>();
  std::optional<Window> g;
  if (j.contains("g") && !seed_override) {
    g.emplace(signal_from_json(j.at("g")));
  } else if (seed) {
    g.emplace(random_window(M, *seed));
  } else {
    bad("frame descriptor: needs either explicit window values 'g' or a 'seed'");
  }
  if (g->dim() != M) bad("frame descriptor: window length differs from M");
  return {*g, Lattice(std::move(T), std::move(F)), Q.set, P.set, seed, Q.beta, P.beta};
}

json to_json(const MultiWindowGaborFrame& frame, std::optional<std::uint64_t> seed) {
  json windows = json::array();
  for (int r = 0; r < frame.window_count(); ++r) windows.push_back(frame.window_tag(r));
  json j = {{"schema_version", kSchemaVersion},
            {"M", frame.modulus()},
            {"T", frame.lattice().T().members()},
            {"F", frame.lattice().F().members()},
            {"Q", frame.Q().members()},
            {"P", frame.P().members()},
            {"g", to_json(frame.g().values())},
            {"windows", windows},
            {"cardinality", frame.cardinality()}};
  if (seed) j["seed"] = *seed;
  return j;
}

MultiWindowGaborFrame frame_from_json(const json& j) {
  if (j.is_object() && j.contains("schema_version") && j.at("schema_version") != kSchemaVersion) {
    bad("frame file: unsupported schema_version " + j.at("schema_version").dump());
  }
  FrameSpec spec = frame_spec_from_json(j);
  MultiWindowGaborFrame frame = assemble_frame(spec.g, spec.lattice, spec.Q, spec.P);
  if (j.contains("cardinality") && j.at("cardinality").get<std::size_t>() != frame.cardinality()) {
    bad("frame file: recorded cardinality does not match the rebuilt frame");
  }
  return frame;
}

void write_measurements_csv(std::ostream& os, const MultiWindowGaborFrame& frame, const MeasurementVector& b) {
  os << "# schema_version: " << kSchemaVersion << "\n";
  os << "window_tag,k,l,value\n";
  for (std::size_t j = 0; j < b.size(); ++j) {
    const auto& key = b.index[j];
    os << frame.window_tag(key.window) << ',' << key.k << ',' << key.l << ',' << fmt_double(b.values[j]) << '\n';
  }
}

MeasurementVector read_measurements_csv(std::istream& is, const MultiWindowGaborFrame& frame) {
  MeasurementVector b;
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "window_tag,k,l,value") bad("measurements: expected header 'window_tag,k,l,value'");
      header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) bad("measurements: line " + std::to_string(lineno) + " needs 4 columns");
    const int w = frame.window_from_tag(cells[0]);
    if (w < 0) bad("measurements: line " + std::to_string(lineno) + " names unknown window '" + cells[0] + "'");
    MeasurementKey key{w, 0, 0};
    double value = 0.0;
    auto parse_int = [&](const std::string& s, int& out) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec != std::errc() || p != s.data() + s.size()) bad("measurements: bad integer on line " + std::to_string(lineno));
    };
    parse_int(cells[1], key.k);
    parse_int(cells[2], key.l);
    {
      auto [p, ec] = std::from_chars(cells[3].data(), cells[3].data() + cells[3].size(), value);
      if (ec != std::errc() || p != cells[3].data() + cells[3].size()) {
        bad("measurements: bad value on line " + std::to_string(lineno));
      }
    }
    b.index.push_back(key);
    b.values.push_back(value);
  }
  if (!header) bad("measurements: empty file");
  validate_measurements(frame, b);
  return b;
}

json to_json(const SpectralReport& rep) {
  json j = {{"schema_version", kSchemaVersion},
            {"gap", rep.gap},
            {"lambda_max", rep.lambda_max},
            {"method", to_string(rep.method)}};
  if (rep.method == SpectralMethod::dense) {
    json ev = json::array();
    for (const cplx& v : rep.eigenvalues) ev.push_back({v.real(), v.imag()});
    j["eigenvalues"] = ev;
  }
  return j;
}

json to_json(const SparkReport& rep) {
  json failures = json::array();
  for (const auto& f : rep.failures) {
    json pts = json::array();
    for (const auto& p : f.subset) pts.push_back({p.k, p.l});
    failures.push_back({{"columns", f.columns}, {"points", pts}, {"margin", f.margin}});
  }
  return {{"mode", rep.mode == SparkMode::exhaustive ? "exhaustive" : "montecarlo"},
          {"full_spark", rep.full_spark},
          {"subsets_checked", rep.subsets_checked},
          {"min_margin", std::isfinite(rep.min_margin) ? json(rep.min_margin) : json(nullptr)},
          {"threshold", rep.threshold},
          {"failures", failures}};
}

json to_json(const ReconstructionResult& res, double elapsed_seconds) {
  json j = {{"schema_version", kSchemaVersion},
            {"status", to_string(res.status)},
            {"method", to_string(res.method)},
            {"component_size", res.component_size},
            {"solve_dimension", res.solve_dimension},
            {"vertex_count", res.vertex_count},
            {"edge_count", res.edge_count},
            {"removed_edges", res.removed_edges},
            {"vanishing_vertices", res.vanishing_vertices},
            {"component_count", res.component_count},
            {"residuals", {{"solve", res.solve_residual}, {"max_phase_defect", res.max_phase_defect}}},
            {"condition_number", std::isfinite(res.condition) ? json(res.condition) : json(nullptr)},
            {"estimate", to_json(res.estimate)},
            {"timing", {{"wall_clock_seconds", elapsed_seconds}}}};
  if (res.phase_error) j["residuals"]["phase_distance"] = *res.phase_error;
  return j;
}

void write_edges_csv(std::ostream& os, const PhaseGraph& graph) {
  os << "k,l,k2,l2,re,im,pruned\n";
  for (const auto& e : graph.edges) {
    const TFIndex a = graph.lattice.point(e.u);
    const TFIndex b = graph.lattice.point(e.v);
    os << a.k << ',' << a.l << ',' << b.k << ',' << b.l << ',';
    if (e.omega) {
      os << fmt_double(e.omega->real()) << ',' << fmt_double(e.omega->imag());
    } else {
      os << ',';
    }
    os << ',' << (e.pruned ? 1 : 0) << '\n';
  }
}

json to_json(const SubspacePrior& prior) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < prior.W().rows(); ++i) {
    json row = json::array();
    for (Eigen::Index c = 0; c < prior.W().cols(); ++c) row.push_back({prior.W()(i, c).real(), prior.W()(i, c).imag()});
    rows.push_back(row);
  }
  return {{"schema_version", kSchemaVersion}, {"M", prior.ambient_dim()}, {"d", prior.dim()}, {"W", rows}};
}

SubspacePrior prior_from_json(const json& j) {
  if (!j.is_object() || !j.contains("M") || !j.contains("d")) bad("prior: expected {\"M\", \"d\", \"W\" | \"seed\"}");
  const int M = as_int(j.at("M"), "prior M");
  const int d = as_int(j.at("d"), "prior d");
  if (M < 1 || d < 1 || d > M) bad("prior: need 1 <= d <= M");
  if (j.contains("W")) {
    const json& rows = j.at("W");
    if (!rows.is_array() || static_cast<int>(rows.size()) != M) bad("prior: W must have M rows");
    Eigen::MatrixXcd W(M, d);
    for (int i = 0; i < M; ++i) {
      const json& row = rows[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<int>(row.size()) != d) bad("prior: W row " + std::to_string(i) + " needs d entries");
      for (int c = 0; c < d; ++c) {
        const json& e = row[static_cast<std::size_t>(c)];
        if (!e.is_array() || e.size() != 2) bad("prior: W entries must be [re, im] pairs");
        W(i, c) = cplx(e[0].get<double>(), e[1].get<double>());
      }
    }
    return SubspacePrior(std::move(W));
  }
  if (j.contains("seed")) return random_subspace_prior(M, d, j.at("seed").get<std::uint64_t>());
  bad("prior: needs W or seed");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    bad("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace gpr::io
