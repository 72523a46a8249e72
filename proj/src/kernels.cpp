#include "gpr/kernels.hpp"

#include <omp.h>

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <limits>

namespace gpr::kernels {

namespace {

// Rounding slack on the bias comparison; exact ties (subgroups at c = 1)
// should still pass.
constexpr double kBiasTol = 1e-12;

bool next_combination(std::vector<int>& comb, int n) {
  const int k = static_cast<int>(comb.size());
  int i = k - 1;
  while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - k + i) --i;
  if (i < 0) return false;
  ++comb[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

std::vector<int> mask_members(std::uint64_t mask) {
  std::vector<int> out;
  while (mask != 0) {
    out.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return out;
}

}  // namespace

Twiddles::Twiddles(int M) : w_(static_cast<std::size_t>(M)) {
  for (int j = 0; j < M; ++j) w_[static_cast<std::size_t>(j)] = unit_root(-j, M);
}

bool bias_within(std::span<const int> members, double c, const Twiddles& tw) {
  const int M = tw.modulus();
  const double bound = c * static_cast<double>(members.size()) * (1.0 + kBiasTol) + kBiasTol;
  for (int j = 1; j < M; ++j) {
    cplx s = 0.0;
    for (int m : members) s += tw(static_cast<long long>(j) * m);
    if (std::abs(s) > bound) return false;
  }
  return true;
}

std::vector<cplx> frame_coefficients_serial(std::span<const Signal> windows, std::span<const int> T,
                                            std::span<const int> F, const Signal& x) {
  const int M = x.dim();
  std::vector<cplx> out;
  out.reserve(windows.size() * T.size() * F.size());
  for (const Signal& w : windows) {
    for (int k : T) {
      for (int l : F) out.push_back(inner(x, tf_shift(w, TFIndex(k, l, M))));
    }
  }
  return out;
}

std::vector<cplx> frame_coefficients_omp(std::span<const Signal> windows, std::span<const int> T,
                                         std::span<const int> F, const Signal& x) {
  const int M = x.dim();
  const Twiddles tw(M);
  const long long nT = static_cast<long long>(T.size());
  const long long nF = static_cast<long long>(F.size());
  const long long blocks = static_cast<long long>(windows.size()) * nT;
  std::vector<cplx> out(static_cast<std::size_t>(blocks * nF));

  // <x, M_l T_k w> = sum_m x(m) conj(w(m-k)) e^{-2 pi i l m / M}
#pragma omp parallel
  {
    std::vector<cplx> y(static_cast<std::size_t>(M));
#pragma omp for schedule(static)
    for (long long b = 0; b < blocks; ++b) {
      const Signal& w = windows[static_cast<std::size_t>(b / nT)];
      const int k = T[static_cast<std::size_t>(b % nT)];
      for (int m = 0; m < M; ++m) y[static_cast<std::size_t>(m)] = x[m] * std::conj(w[mod(m - k, M)]);
      for (long long il = 0; il < nF; ++il) {
        const long long l = F[static_cast<std::size_t>(il)];
        cplx s = 0.0;
        for (int m = 0; m < M; ++m) s += y[static_cast<std::size_t>(m)] * tw(l * m);
        out[static_cast<std::size_t>(b * nF + il)] = s;
      }
    }
  }
  return out;
}

bool lex_less_same_size(std::uint64_t a, std::uint64_t b) {
  if (a == b) return false;
  const std::uint64_t d = a ^ b;
  return (a & (d & (~d + 1))) != 0;
}

SubsetSearch min_low_bias_subset_serial(int M, double c) {
  const Twiddles tw(M);
  SubsetSearch res;
  for (int s = 1; s <= M; ++s) {
    std::vector<int> comb(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) comb[static_cast<std::size_t>(i)] = i;
    do {
      ++res.evaluated;
      if (bias_within(comb, c, tw)) {
        std::uint64_t mask = 0;
        for (int m : comb) mask |= std::uint64_t{1} << m;
        res.mask = mask;
        return res;
      }
    } while (next_combination(comb, M));
  }
  return res;
}

SubsetSearch min_low_bias_subset_omp(int M, double c) {
  const Twiddles tw(M);
  const long long total = static_cast<long long>(std::uint64_t{1} << M);
  SubsetSearch res;
  for (int s = 1; s <= M; ++s) {
    std::optional<std::uint64_t> best;
    std::uint64_t evaluated = 0;
#pragma omp parallel
    {
      std::optional<std::uint64_t> local;
      std::vector<int> members;
#pragma omp for schedule(static) reduction(+ : evaluated)
      for (long long mask = 1; mask < total; ++mask) {
        const auto um = static_cast<std::uint64_t>(mask);
        if (std::popcount(um) != s) continue;
        if (local && !lex_less_same_size(um, *local)) continue;
        ++evaluated;
        members = mask_members(um);
        if (bias_within(members, c, tw)) local = um;
      }
#pragma omp critical(gpr_subset_merge)
      {
        if (local && (!best || lex_less_same_size(*local, *best))) best = local;
      }
    }
    res.evaluated += evaluated;
    if (best) {
      res.mask = best;
      return res;
    }
  }
  return res;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

std::vector<int> unrank_combination(std::uint64_t rank, int n, int k) {
  std::vector<int> comb;
  comb.reserve(static_cast<std::size_t>(k));
  int next = 0;
  for (int i = 0; i < k; ++i) {
    for (int v = next; v < n; ++v) {
      const std::uint64_t below = binomial(static_cast<std::uint64_t>(n - v - 1), static_cast<std::uint64_t>(k - i - 1));
      if (rank < below) {
        comb.push_back(v);
        next = v + 1;
        break;
      }
      rank -= below;
    }
  }
  return comb;
}

double normalized_determinant(std::span<const Signal> vectors, std::span<const int> columns) {
  const auto n = static_cast<Eigen::Index>(columns.size());
  Eigen::MatrixXcd A(n, n);
  double scale = 1.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    const Signal& v = vectors[static_cast<std::size_t>(columns[static_cast<std::size_t>(c)])];
    for (Eigen::Index r = 0; r < n; ++r) A(r, c) = v[static_cast<int>(r)];
    scale *= v.norm();
  }
  if (scale == 0.0) return 0.0;
  return std::abs(A.partialPivLu().determinant()) / scale;
}

SparkScan spark_scan_serial(std::span<const Signal> vectors, double threshold) {
  SparkScan scan;
  scan.min_margin = std::numeric_limits<double>::infinity();
  if (vectors.empty()) return scan;
  const int n = static_cast<int>(vectors.size());
  const int k = vectors.front().dim();
  if (k > n) return scan;
  std::vector<int> comb(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
  std::uint64_t rank = 0;
  do {
    const double margin = normalized_determinant(vectors, comb);
    scan.min_margin = std::min(scan.min_margin, margin);
    if (!(margin > threshold)) scan.failures.push_back({rank, comb, margin});
    ++rank;
  } while (next_combination(comb, n));
  scan.subsets = rank;
  return scan;
}

SparkScan spark_scan_omp(std::span<const Signal> vectors, double threshold) {
  SparkScan scan;
  scan.min_margin = std::numeric_limits<double>::infinity();
  if (vectors.empty()) return scan;
  const int n = static_cast<int>(vectors.size());
  const int k = vectors.front().dim();
  if (k > n) return scan;
  const std::uint64_t total = binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
  scan.subsets = total;
  double min_margin = std::numeric_limits<double>::infinity();

#pragma omp parallel reduction(min : min_margin)
  {
    const auto nthreads = static_cast<std::uint64_t>(omp_get_num_threads());
    const auto tid = static_cast<std::uint64_t>(omp_get_thread_num());
    const std::uint64_t begin = total / nthreads * tid + std::min(tid, total % nthreads);
    const std::uint64_t count = total / nthreads + (tid < total % nthreads ? 1 : 0);
    std::vector<SparkFailure> local;
    if (count > 0) {
      std::vector<int> comb = unrank_combination(begin, n, k);
      for (std::uint64_t r = begin; r < begin + count; ++r) {
        const double margin = normalized_determinant(vectors, comb);
        min_margin = std::min(min_margin, margin);
        if (!(margin > threshold)) local.push_back({r, comb, margin});
        next_combination(comb, n);
      }
    }
#pragma omp critical(gpr_spark_merge)
    scan.failures.insert(scan.failures.end(), local.begin(), local.end());
  }
  std::sort(scan.failures.begin(), scan.failures.end(),
            [](const SparkFailure& a, const SparkFailure& b) { return a.rank < b.rank; });
  scan.min_margin = min_margin;
  return scan;
}

}  // namespace gpr::kernels
