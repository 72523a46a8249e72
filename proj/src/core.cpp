#include "gpr/core.hpp"

#include <algorithm>
#include <cmath>

namespace gpr {

namespace {

void require_same_dim(const Signal& x, const Signal& y, const char* what) {
  if (x.dim() != y.dim()) {
    throw ValidationError(std::string(what) + ": dimension mismatch (" + std::to_string(x.dim()) +
                          " vs " + std::to_string(y.dim()) + ")");
  }
}

}  // namespace

cplx unit_root(long long num, long long den) {
  // Reduce first so large products k*p stay exact before the division.
  const long long r = ((num % den) + den) % den;
  return std::polar(1.0, kTwoPi * static_cast<double>(r) / static_cast<double>(den));
}

Signal::Signal(std::vector<cplx> values) : values_(std::move(values)) {
  if (values_.empty()) throw ValidationError("Signal: dimension must be positive");
  for (std::size_t m = 0; m < values_.size(); ++m) {
    if (!std::isfinite(values_[m].real()) || !std::isfinite(values_[m].imag())) {
      throw ValidationError("Signal: non-finite entry at index " + std::to_string(m));
    }
  }
}

Signal::Signal(std::initializer_list<cplx> values) : Signal(std::vector<cplx>(values)) {}

Signal Signal::zeros(int M) { return Signal(std::vector<cplx>(static_cast<std::size_t>(M), 0.0)); }

Signal Signal::ones(int M) { return Signal(std::vector<cplx>(static_cast<std::size_t>(M), 1.0)); }

Signal Signal::basis(int M, int j) {
  if (M < 1 || j < 0 || j >= M) throw ValidationError("Signal::basis: index outside [0, M)");
  std::vector<cplx> v(static_cast<std::size_t>(M), 0.0);
  v[static_cast<std::size_t>(j)] = 1.0;
  return Signal(std::move(v));
}

double Signal::norm() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(s);
}

Signal Signal::scaled(cplx a) const {
  std::vector<cplx> out(values_);
  for (auto& v : out) v *= a;
  return Signal(std::move(out));
}

cplx inner(const Signal& x, const Signal& y) {
  require_same_dim(x, y, "inner");
  cplx s = 0.0;
  for (int m = 0; m < x.dim(); ++m) s += x[m] * std::conj(y[m]);
  return s;
}

Signal translate(const Signal& x, long long k) {
  const int M = x.dim();
  std::vector<cplx> out(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) out[static_cast<std::size_t>(m)] = x[mod(m - k, M)];
  return Signal(std::move(out));
}

Signal modulate(const Signal& x, long long l) {
  const int M = x.dim();
  std::vector<cplx> out(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) out[static_cast<std::size_t>(m)] = unit_root(l * m, M) * x[m];
  return Signal(std::move(out));
}

Signal tf_shift(const Signal& x, TFIndex lambda) { return modulate(translate(x, lambda.k), lambda.l); }

Signal dft(const Signal& x) {
  const int M = x.dim();
  std::vector<cplx> out(static_cast<std::size_t>(M), 0.0);
  for (int j = 0; j < M; ++j) {
    cplx s = 0.0;
    for (int m = 0; m < M; ++m) s += x[m] * unit_root(-static_cast<long long>(j) * m, M);
    out[static_cast<std::size_t>(j)] = s / static_cast<double>(M);
  }
  return Signal(std::move(out));
}

Signal inverse_dft(const Signal& X) {
  const int M = X.dim();
  std::vector<cplx> out(static_cast<std::size_t>(M), 0.0);
  for (int m = 0; m < M; ++m) {
    cplx s = 0.0;
    for (int j = 0; j < M; ++j) s += X[j] * unit_root(static_cast<long long>(j) * m, M);
    out[static_cast<std::size_t>(m)] = s;
  }
  return Signal(std::move(out));
}

Signal coordwise_product(const Signal& x, const Signal& y) {
  require_same_dim(x, y, "coordwise_product");
  std::vector<cplx> out(static_cast<std::size_t>(x.dim()));
  for (int m = 0; m < x.dim(); ++m) out[static_cast<std::size_t>(m)] = x[m] * y[m];
  return Signal(std::move(out));
}

double phase_distance(const Signal& x, const Signal& y) {
  require_same_dim(x, y, "phase_distance");
  // The minimizing rotation aligns y with x: theta = arg <x, y>. Evaluating
  // the residual directly avoids the cancellation in ||x||^2 + ||y||^2 - 2|<x,y>|.
  const cplx ip = inner(x, y);
  const cplx rot = std::abs(ip) > 0.0 ? ip / std::abs(ip) : cplx(1.0);
  double s = 0.0;
  for (int m = 0; m < x.dim(); ++m) s += std::norm(x[m] - rot * y[m]);
  return std::sqrt(s);
}

}  // namespace gpr
