#include "gpr/settools.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "gpr/kernels.hpp"
#include "gpr/rng.hpp"

namespace gpr {

IndexSet::IndexSet(int modulus, std::vector<int> members) : modulus_(modulus), members_(std::move(members)) {
  if (modulus_ < 1) throw ValidationError("IndexSet: modulus must be positive");
  for (int m : members_) {
    if (m < 0 || m >= modulus_) {
      throw ValidationError("IndexSet: member " + std::to_string(m) + " outside [0, " + std::to_string(modulus_) +
                            ")");
    }
  }
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

IndexSet IndexSet::full(int M) {
  std::vector<int> all(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) all[static_cast<std::size_t>(m)] = m;
  return IndexSet(M, std::move(all));
}

IndexSet IndexSet::from_mask(int M, std::uint64_t mask) {
  if (M > 63) throw ValidationError("IndexSet::from_mask: modulus too large for a mask");
  std::vector<int> members;
  for (int m = 0; m < M; ++m) {
    if ((mask >> m) & 1U) members.push_back(m);
  }
  return IndexSet(M, std::move(members));
}

bool IndexSet::contains(int m) const { return std::binary_search(members_.begin(), members_.end(), m); }

int IndexSet::position(int m) const {
  auto it = std::lower_bound(members_.begin(), members_.end(), m);
  if (it == members_.end() || *it != m) return -1;
  return static_cast<int>(it - members_.begin());
}

bool IndexSet::subset_of(const IndexSet& other) const {
  return modulus_ == other.modulus_ &&
         std::includes(other.members_.begin(), other.members_.end(), members_.begin(), members_.end());
}

std::string IndexSet::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < members_.size(); ++i) os << (i ? "," : "") << members_[i];
  os << "} in Z_" << modulus_;
  return os.str();
}

Signal indicator(const IndexSet& A) {
  std::vector<cplx> v(static_cast<std::size_t>(A.modulus()), 0.0);
  for (int m : A.members()) v[static_cast<std::size_t>(m)] = 1.0;
  return Signal(std::move(v));
}

double density(const IndexSet& A) { return static_cast<double>(A.size()) / A.modulus(); }

double fourier_bias(const IndexSet& A) {
  const int M = A.modulus();
  if (M == 1 || A.empty()) return 0.0;
  const kernels::Twiddles tw(M);
  double best = 0.0;
  for (int j = 1; j < M; ++j) {
    cplx s = 0.0;
    for (int m : A.members()) s += tw(static_cast<long long>(j) * m);
    best = std::max(best, std::abs(s));
  }
  return best / M;
}

bool check_pseudorandom(const IndexSet& A, double c) {
  if (A.empty()) throw ValidationError("check_pseudorandom: the empty set is excluded");
  if (!(c > 0.0 && c < 1.0)) throw ValidationError("check_pseudorandom: c must lie in (0, 1)");
  return kernels::bias_within(A.members(), c, kernels::Twiddles(A.modulus()));
}

double bias_ratio_for(double C) {
  if (!(C > 3.0)) throw ValidationError("C must be greater than 3");
  return (C - 3.0) / (C - 1.0);
}

IndexSet difference_set(const IndexSet& T) {
  if (T.empty()) throw ValidationError("difference_set: empty set");
  const int M = T.modulus();
  std::vector<int> diffs;
  for (int a : T.members()) {
    for (int b : T.members()) diffs.push_back(mod(a - b, M));
  }
  return IndexSet(M, std::move(diffs));
}

IndexSet random_subset(int M, double rate, std::uint64_t seed) {
  if (M < 1) throw ValidationError("random_subset: M must be positive");
  if (!(rate > 0.0 && rate <= 1.0)) throw ValidationError("random_subset: rate must lie in (0, 1]");
  Rng rng(seed);
  std::vector<int> members;
  for (int m = 0; m < M; ++m) {
    if (rng.bernoulli(rate)) members.push_back(m);
  }
  return IndexSet(M, std::move(members));
}

std::string to_string(BetaStatus s) {
  switch (s) {
    case BetaStatus::exact:
      return "exact";
    case BetaStatus::upper_bound:
      return "upper_bound";
    case BetaStatus::unknown:
      return "unknown";
  }
  return "unknown";
}

namespace {

BetaResult beta_exhaustive(int M, double c, const BetaOptions& opts) {
  const std::uint64_t subsets = M >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << M) - 1;
  if (M > 62 || subsets > opts.exhaustive_budget) {
    throw BudgetError("beta: exhaustive search over 2^" + std::to_string(M) + " - 1 subsets exceeds budget " +
                      std::to_string(opts.exhaustive_budget) + "; use randomized mode");
  }
  const auto search = opts.parallel ? kernels::min_low_bias_subset_omp(M, c) : kernels::min_low_bias_subset_serial(M, c);
  BetaResult res;
  res.ratio = c;
  res.evaluated = search.evaluated;
  // Z_M itself always qualifies, so the search cannot come back empty.
  res.status = BetaStatus::exact;
  res.witness = IndexSet::from_mask(M, *search.mask);
  res.value = res.witness->size();
  return res;
}

BetaResult beta_randomized(int M, double c, const BetaOptions& opts) {
  // Bernoulli rates on a geometric grid from 1/M up to 1.
  constexpr int kLevels = 16;
  std::vector<double> rates(kLevels);
  for (int i = 0; i < kLevels; ++i) {
    rates[static_cast<std::size_t>(i)] = std::pow(static_cast<double>(M), -1.0 + static_cast<double>(i) / (kLevels - 1));
  }
  const Rng root(opts.seed);
  const kernels::Twiddles tw(M);
  BetaResult res;
  res.ratio = c;
  std::optional<std::vector<int>> best;
  for (std::uint64_t trial = 0; trial < opts.trials; ++trial) {
    Rng rng = root.split(trial);
    const double rate = rates[trial % kLevels];
    std::vector<int> members;
    for (int m = 0; m < M; ++m) {
      if (rng.bernoulli(rate)) members.push_back(m);
    }
    if (members.empty()) continue;
    if (best && (members.size() > best->size() || (members.size() == best->size() && members >= *best))) continue;
    ++res.evaluated;
    if (kernels::bias_within(members, c, tw)) best = std::move(members);
  }
  if (best) {
    res.status = BetaStatus::upper_bound;
    res.witness = IndexSet(M, *best);
    res.value = res.witness->size();
  }
  return res;
}

}  // namespace

BetaResult beta(int M, double C, const BetaOptions& opts) {
  if (M < 1) throw ValidationError("beta: M must be positive");
  const double c = bias_ratio_for(C);
  return opts.mode == BetaMode::exhaustive ? beta_exhaustive(M, c, opts) : beta_randomized(M, c, opts);
}

std::optional<std::uint64_t> budget_from_env() {
  const char* raw = std::getenv("GABOR_POLAR_BUDGET");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (end == raw || *end != '\0') return std::nullopt;
  return static_cast<std::uint64_t>(v);
}

}  // namespace gpr
