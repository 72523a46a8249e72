#include "gpr/framegen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "gpr/kernels.hpp"
#include "gpr/rng.hpp"

namespace gpr {

Window::Window(Signal values) : values_(std::move(values)) {
  min_modulus_ = std::numeric_limits<double>::infinity();
  for (int m = 0; m < values_.dim(); ++m) {
    const double a = std::abs(values_[m]);
    if (a == 0.0) throw ValidationError("Window: coordinate " + std::to_string(m) + " vanishes");
    min_modulus_ = std::min(min_modulus_, a);
  }
}

Window random_window(int M, std::uint64_t seed) {
  if (M < 1) throw ValidationError("random_window: M must be positive");
  Rng rng(seed);
  for (;;) {
    std::vector<cplx> z(static_cast<std::size_t>(M));
    double n2 = 0.0;
    for (auto& v : z) {
      v = rng.complex_normal();
      n2 += std::norm(v);
    }
    const double n = std::sqrt(n2);
    bool ok = n > 0.0;
    for (auto& v : z) {
      v /= n;
      ok = ok && std::abs(v) >= kMinWindowModulus;
    }
    if (ok) return Window(Signal(std::move(z)));
  }
}

Lattice::Lattice(IndexSet T, IndexSet F) : T_(std::move(T)), F_(std::move(F)) {
  if (T_.modulus() != F_.modulus()) throw ValidationError("Lattice: T and F live in different Z_M");
  if (T_.empty() || F_.empty()) throw ValidationError("Lattice: T and F must be nonempty");
}

TFIndex Lattice::point(int i) const {
  const int nF = F_.size();
  TFIndex out;
  out.k = T_.members()[static_cast<std::size_t>(i / nF)];
  out.l = F_.members()[static_cast<std::size_t>(i % nF)];
  return out;
}

std::vector<TFIndex> Lattice::points() const {
  std::vector<TFIndex> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (int i = 0; i < size(); ++i) out.push_back(point(i));
  return out;
}

int Lattice::index_of(TFIndex lambda) const {
  const int a = T_.position(lambda.k);
  const int b = F_.position(lambda.l);
  if (a < 0 || b < 0) return -1;
  return a * F_.size() + b;
}

Signal build_auxiliary(const Signal& g, int q, int p, int t) {
  const int M = g.dim();
  std::vector<cplx> out(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    if (g[m] == 0.0) {
      throw ValidationError("build_auxiliary: window vanishes at coordinate " + std::to_string(m));
    }
    // e^{2 pi i (m p / M + t / 3)} = e^{2 pi i (3 m p + t M) / (3 M)}
    const cplx phase = unit_root(3LL * m * p + static_cast<long long>(t) * M, 3LL * M);
    const cplx s = 1.0 + phase * g[mod(m - q, M)] / g[m];
    out[static_cast<std::size_t>(m)] = g[m] * s;
  }
  return Signal(std::move(out));
}

MultiWindowGaborFrame::MultiWindowGaborFrame(Window g, Lattice lattice, IndexSet Q, IndexSet P)
    : g_(std::move(g)), lattice_(std::move(lattice)), Q_(std::move(Q)), P_(std::move(P)) {
  windows_.reserve(1 + 3 * static_cast<std::size_t>(Q_.size() * P_.size()));
  windows_.push_back(g_.values());
  for (int q : Q_.members()) {
    for (int p : P_.members()) {
      for (int t = 0; t < 3; ++t) windows_.push_back(build_auxiliary(g_.values(), q, p, t));
    }
  }
}

AuxKey MultiWindowGaborFrame::aux_key(int window) const {
  if (window < 1 || window >= window_count()) throw ValidationError("aux_key: not an auxiliary window");
  const int r = window - 1;
  const int nP = P_.size();
  AuxKey key;
  key.t = r % 3;
  key.p = P_.members()[static_cast<std::size_t>((r / 3) % nP)];
  key.q = Q_.members()[static_cast<std::size_t>(r / 3 / nP)];
  return key;
}

int MultiWindowGaborFrame::aux_window(int q, int p, int t) const {
  const int iq = Q_.position(q);
  const int ip = P_.position(p);
  if (iq < 0 || ip < 0 || t < 0 || t > 2) return -1;
  return 1 + (iq * P_.size() + ip) * 3 + t;
}

std::string MultiWindowGaborFrame::window_tag(int window) const {
  if (window == 0) return "g";
  const AuxKey key = aux_key(window);
  return "aux_" + std::to_string(key.q) + "_" + std::to_string(key.p) + "_" + std::to_string(key.t);
}

int MultiWindowGaborFrame::window_from_tag(const std::string& tag) const {
  if (tag == "g") return 0;
  int q = 0, p = 0, t = 0;
  char tail = 0;
  if (std::sscanf(tag.c_str(), "aux_%d_%d_%d%c", &q, &p, &t, &tail) != 3) return -1;
  if (tag != "aux_" + std::to_string(q) + "_" + std::to_string(p) + "_" + std::to_string(t)) return -1;
  return aux_window(q, p, t);
}

MeasurementKey MultiWindowGaborFrame::key(std::size_t j) const {
  const auto n = static_cast<std::size_t>(lattice_.size());
  const TFIndex lambda = lattice_.point(static_cast<int>(j % n));
  return {static_cast<int>(j / n), lambda.k, lambda.l};
}

std::size_t MultiWindowGaborFrame::index_of(const MeasurementKey& key) const {
  const int i = lattice_.index_of(TFIndex(key.k, key.l, modulus()));
  if (i < 0 || key.window < 0 || key.window >= window_count()) {
    throw ValidationError("index_of: key outside the frame");
  }
  return static_cast<std::size_t>(key.window) * static_cast<std::size_t>(lattice_.size()) + static_cast<std::size_t>(i);
}

std::vector<MeasurementKey> MultiWindowGaborFrame::order() const {
  std::vector<MeasurementKey> out;
  out.reserve(cardinality());
  for (std::size_t j = 0; j < cardinality(); ++j) out.push_back(key(j));
  return out;
}

Signal MultiWindowGaborFrame::vector(std::size_t j) const {
  const MeasurementKey k = key(j);
  return tf_shift(windows_[static_cast<std::size_t>(k.window)], TFIndex(k.k, k.l, modulus()));
}

MultiWindowGaborFrame assemble_frame(const Window& g, const Lattice& lattice, const IndexSet& Q, const IndexSet& P) {
  const int M = lattice.modulus();
  if (g.dim() != M) throw ValidationError("assemble_frame: window length differs from lattice modulus");
  if (Q.modulus() != M || P.modulus() != M) throw ValidationError("assemble_frame: Q, P must live in Z_M");
  if (Q.empty() || P.empty()) throw ValidationError("assemble_frame: Q and P must be nonempty");
  if (!Q.subset_of(difference_set(lattice.T()))) {
    throw ValidationError("assemble_frame: Q " + Q.to_string() + " is not contained in T - T");
  }
  if (!P.subset_of(difference_set(lattice.F()))) {
    throw ValidationError("assemble_frame: P " + P.to_string() + " is not contained in F - F");
  }
  return MultiWindowGaborFrame(g, lattice, Q, P);
}

std::size_t frame_cardinality(int lattice_size, int q_size, int p_size) {
  return static_cast<std::size_t>(lattice_size) * (1 + 3 * static_cast<std::size_t>(q_size) * static_cast<std::size_t>(p_size));
}

std::vector<cplx> frame_coefficients(const MultiWindowGaborFrame& frame, const Signal& x) {
  if (x.dim() != frame.modulus()) {
    throw ValidationError("measure: signal has length " + std::to_string(x.dim()) + ", frame expects " +
                          std::to_string(frame.modulus()));
  }
  const auto& lat = frame.lattice();
  return kernels::frame_coefficients_omp(frame.windows(), lat.T().members(), lat.F().members(), x);
}

MeasurementVector measure(const MultiWindowGaborFrame& frame, const Signal& x) {
  const auto coeffs = frame_coefficients(frame, x);
  MeasurementVector out;
  out.values.resize(coeffs.size());
  std::transform(coeffs.begin(), coeffs.end(), out.values.begin(), [](cplx c) { return std::norm(c); });
  out.index = frame.order();
  return out;
}

namespace {

SparkReport scan_vectors(const std::vector<Signal>& vectors, const SparkOptions& opts) {
  if (vectors.empty()) throw ValidationError("spark check: no vectors");
  const int d = vectors.front().dim();
  for (const auto& v : vectors) {
    if (v.dim() != d) throw ValidationError("spark check: vectors differ in dimension");
  }
  const int n = static_cast<int>(vectors.size());
  SparkReport rep;
  rep.mode = opts.mode;
  rep.threshold = opts.threshold;
  if (n < d) {
    // No d-subsets exist; the condition holds vacuously.
    rep.full_spark = true;
    rep.min_margin = std::numeric_limits<double>::infinity();
    return rep;
  }
  if (opts.mode == SparkMode::exhaustive) {
    const std::uint64_t total = kernels::binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(d));
    if (total > opts.budget) {
      throw BudgetError("full_spark_check: binomial(" + std::to_string(n) + ", " + std::to_string(d) + ") = " +
                        std::to_string(total) + " subsets exceeds budget " + std::to_string(opts.budget) +
                        "; use montecarlo mode");
    }
    const auto scan = opts.parallel ? kernels::spark_scan_omp(vectors, opts.threshold)
                                    : kernels::spark_scan_serial(vectors, opts.threshold);
    rep.subsets_checked = scan.subsets;
    rep.min_margin = scan.min_margin;
    for (const auto& f : scan.failures) rep.failures.push_back({f.columns, {}, f.margin});
  } else {
    const Rng root(opts.seed);
    const auto trials = static_cast<long long>(opts.trials);
    std::vector<double> margins(static_cast<std::size_t>(trials));
    std::vector<std::vector<int>> subsets(static_cast<std::size_t>(trials));
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < trials; ++i) {
      Rng rng = root.split(static_cast<std::uint64_t>(i));
      std::vector<int> pool(static_cast<std::size_t>(n));
      std::iota(pool.begin(), pool.end(), 0);
      for (int a = 0; a < d; ++a) {
        const auto b = a + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - a)));
        std::swap(pool[static_cast<std::size_t>(a)], pool[static_cast<std::size_t>(b)]);
      }
      pool.resize(static_cast<std::size_t>(d));
      std::sort(pool.begin(), pool.end());
      margins[static_cast<std::size_t>(i)] = kernels::normalized_determinant(vectors, pool);
      subsets[static_cast<std::size_t>(i)] = std::move(pool);
    }
    rep.subsets_checked = opts.trials;
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < margins.size(); ++i) {
      rep.min_margin = std::min(rep.min_margin, margins[i]);
      if (!(margins[i] > opts.threshold)) rep.failures.push_back({subsets[i], {}, margins[i]});
    }
  }
  rep.full_spark = rep.failures.empty();
  return rep;
}

}  // namespace

SparkReport spark_check_vectors(const std::vector<Signal>& vectors, const SparkOptions& opts) {
  return scan_vectors(vectors, opts);
}

SparkReport full_spark_check(const Window& g, const Lattice& lattice, const SparkOptions& opts) {
  if (g.dim() != lattice.modulus()) throw ValidationError("full_spark_check: window length differs from modulus");
  std::vector<Signal> vectors;
  vectors.reserve(static_cast<std::size_t>(lattice.size()));
  for (const TFIndex& lambda : lattice.points()) vectors.push_back(tf_shift(g.values(), lambda));
  SparkReport rep = scan_vectors(vectors, opts);
  for (auto& f : rep.failures) {
    for (int c : f.columns) f.subset.push_back(lattice.point(c));
  }
  return rep;
}

}  // namespace gpr
