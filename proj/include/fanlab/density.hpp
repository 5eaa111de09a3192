#ifndef FANLAB_DENSITY_HPP_
#define FANLAB_DENSITY_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fanlab/errors.hpp"
#include "fanlab/maps.hpp"

// Witness searches for the exponent-lattice density lemmas.  Each search
// scans a deterministic candidate order (derived from the target exponent
// ratio), self-verifies in log space, and returns the first witness meeting
// the requested eps.

namespace fanlab {

struct DensityWitness {
  std::vector<std::pair<std::string, long long>> exponents;
  double achieved = 0.0;
  double error = 0.0;
  std::uint64_t evaluations = 0;

  long long exponent(const std::string& name) const {
    for (const auto& [n, v] : exponents)
      if (n == name) return v;
    fail(ErrorCode::UnknownName, "witness exponent " + name);
  }

  nlohmann::json to_json() const {
    nlohmann::json e = nlohmann::json::object();
    for (const auto& [n, v] : exponents) e[n] = v;
    return {{"exponents", e}, {"achieved", achieved}, {"error", error},
            {"evaluations", evaluations}};
  }
};

namespace detail {

[[noreturn]] inline void witness_not_found(long long bound, double best_error) {
  fail(ErrorCode::WitnessNotFound,
       "no witness within bound " + std::to_string(bound) +
           " (best error " + std::to_string(best_error) + ")");
}

}  // namespace detail

/// Witness (m, n), 1 <= m, n <= bound, with |x^(2^m / 3^n) - z| < eps.
/// Candidates: for each n, m is chosen so 2^m / 3^n tracks ln z / ln x.
inline DensityWitness search_pow23(double x, double z, double eps, long long bound) {
  if (!(x > 0.0 && x < 1.0)) fail(ErrorCode::OutOfRange, "search_pow23 needs 0 < x < 1");
  if (!(z >= 0.0 && z <= 1.0)) fail(ErrorCode::OutOfRange, "z must lie in [0,1]");
  if (!(eps > 0.0) || bound < 1) fail(ErrorCode::OutOfRange, "bad eps/bound");

  const double lnx = std::log(x);
  std::uint64_t evals = 0;
  double best = 2.0;
  auto value_log = [&](long long m, long long n) {
    // exponent 2^m / 3^n in log2 space to avoid overflow
    double log2_exp = static_cast<double>(m) - static_cast<double>(n) * std::log2(3.0);
    return std::exp2(log2_exp) * lnx;  // = ln(value)
  };
  auto try_pair = [&](long long m, long long n) -> bool {
    if (m < 1 || m > bound || n < 1 || n > bound) return false;
    ++evals;
    double err = std::abs(std::exp(value_log(m, n)) - z);
    best = std::min(best, err);
    return err < eps;
  };

  if (z == 0.0) {
    // Need x^E < eps: E = 2^m / 3 with n = 1.
    double e_needed = std::log(eps) / lnx;
    long long m = static_cast<long long>(std::ceil(std::log2(3.0 * e_needed)));
    for (long long mm = std::max(1LL, m); mm <= std::max(1LL, m) + 2; ++mm)
      if (try_pair(mm, 1)) {
        double a = std::exp(value_log(mm, 1));
        return {{{"m", mm}, {"n", 1}}, a, std::abs(a - z), evals};
      }
    detail::witness_not_found(bound, best);
  }
  // General path (covers z = 1 since the target ratio just goes to 0):
  // want 2^m / 3^n = ln z / ln x, i.e. m = log2(ln z / ln x) + n*log2(3).
  const double log2_ratio =
      z == 1.0 ? -std::numeric_limits<double>::infinity() : std::log2(std::log(z) / lnx);
  for (long long n = 1; n <= bound; ++n) {
    double mstar = log2_ratio + static_cast<double>(n) * std::log2(3.0);
    long long mf = std::isfinite(mstar) && std::abs(mstar) < 1e18
                       ? static_cast<long long>(std::floor(mstar))
                       : 1;
    for (long long m : {mf, mf + 1, 1LL}) {
      if (try_pair(m, n)) {
        double a = std::exp(value_log(m, n));
        return {{{"m", m}, {"n", n}}, a, std::abs(a - z), evals};
      }
    }
  }
  detail::witness_not_found(bound, best);
}

/// Witness (k, n) with |(1/2)^(k/2^n) * x^(1/2^n) - z| < eps for
/// x in (0, 2/3], z in [0, 2/3].
inline DensityWitness search_half_pow(double x, double z, double eps, long long bound) {
  if (!(x > 0.0 && x <= 2.0 / 3.0 + kDomainTol))
    fail(ErrorCode::OutOfRange, "search_half_pow needs 0 < x <= 2/3");
  if (!(z >= 0.0 && z <= 2.0 / 3.0 + kDomainTol))
    fail(ErrorCode::OutOfRange, "z must lie in [0, 2/3]");
  if (!(eps > 0.0) || bound < 1) fail(ErrorCode::OutOfRange, "bad eps/bound");

  const double ln2 = std::log(2.0), lnx = std::log(x);
  std::uint64_t evals = 0;
  double best = 2.0;
  auto value = [&](long long k, long long n) {
    double p = std::exp2(-static_cast<double>(n));  // 1/2^n
    return std::exp(-static_cast<double>(k) * p * ln2 + p * lnx);
  };
  auto try_pair = [&](long long k, long long n) -> bool {
    if (k < 1 || k > bound || n < 1 || n > bound) return false;
    ++evals;
    double err = std::abs(value(k, n) - z);
    best = std::min(best, err);
    return err < eps;
  };

  if (z == 0.0) {
    // Proof's choice: n minimal with 2^-n <= eps, k = n * 2^n.
    long long n = std::max(1LL, static_cast<long long>(std::ceil(std::log2(1.0 / eps))));
    long long k = n * (1LL << std::min(n, 62LL));
    if (try_pair(k, n)) {
      double a = value(k, n);
      return {{{"k", k}, {"n", n}}, a, std::abs(a - z), evals};
    }
    detail::witness_not_found(bound, best);
  }
  // want k/2^n * ln(1/2) + lnx/2^n = ln z  =>  k = (lnx - 2^n ln z) / ln 2
  for (long long n = 1; n <= bound; ++n) {
    double kstar = (lnx - std::exp2(static_cast<double>(n)) * std::log(z)) / ln2;
    if (kstar > 2.0 * static_cast<double>(bound)) break;
    long long kf = static_cast<long long>(std::floor(kstar));
    for (long long k : {kf, kf + 1, 1LL}) {
      if (try_pair(k, n)) {
        double a = value(k, n);
        return {{{"k", k}, {"n", n}}, a, std::abs(a - z), evals};
      }
    }
  }
  detail::witness_not_found(bound, best);
}

/// Witness (k, m, n) with |f1^(m+n)(f2^k(f3^m(x))) - z| < eps for the
/// sqrt / halving / square triple on [0,1].  Follows the lemma's proof: m
/// pushes x (and z) below 2/3 where f2 acts as pure halving, so the value is
/// exp(2^-(m+n) * (2^m ln x - k ln 2)).
inline DensityWitness search_propertyL(const MapFamily& fam, double x, double z,
                                       double eps, long long bound) {
  if (!(x > 0.0 && x < 1.0)) fail(ErrorCode::OutOfRange, "search_propertyL needs 0 < x < 1");
  if (!(z >= 0.0 && z <= 1.0)) fail(ErrorCode::OutOfRange, "z must lie in [0,1]");
  if (!(eps > 0.0) || bound < 1) fail(ErrorCode::OutOfRange, "bad eps/bound");
  (void)fam;  // the triple is fixed by the lemma; callers pass catalog("definicija")

  const double ln2 = std::log(2.0), lnx = std::log(x);
  std::uint64_t evals = 0;
  double best = 2.0;
  auto value_log = [&](long long k, long long m, long long n) {
    double two_m = std::exp2(static_cast<double>(m));
    return (two_m * lnx - static_cast<double>(k) * ln2) /
           (two_m * std::exp2(static_cast<double>(n)));
  };
  auto try_triple = [&](long long k, long long m, long long n) -> bool {
    if (k < 1 || k > bound || n < 1 || n > bound) return false;
    ++evals;
    double err = std::abs(std::exp(value_log(k, m, n)) - z);
    best = std::min(best, err);
    return err < eps;
  };

  if (z == 1.0) {
    // Proof case 1: m = k = 1, then f1^n pulls x^2/2 toward 1.
    for (long long n = 1; n <= bound; ++n)
      if (try_triple(1, 1, n)) {
        double a = std::exp(value_log(1, 1, n));
        return {{{"k", 1}, {"m", 1}, {"n", n}}, a, std::abs(a - z), evals};
      }
    detail::witness_not_found(bound, best);
  }
  // m minimal with x^(2^m) < 2/3 and (for z > 0) z^(2^m) < 2/3.
  long long m = 1;
  auto below = [&](double v, long long mm) {
    return std::exp2(static_cast<double>(mm)) * std::log(v) < std::log(2.0 / 3.0);
  };
  while (m < 60 && (!below(x, m) || (z > 0.0 && !below(z, m)))) ++m;

  if (z == 0.0) {
    // n = 1; k large enough that the log value drops below ln eps.
    double two_m = std::exp2(static_cast<double>(m));
    long long k = static_cast<long long>(
        std::ceil((two_m * lnx - 2.0 * two_m * std::log(eps)) / ln2)) + 1;
    for (long long kk = std::max(1LL, k); kk <= std::max(1LL, k) + 2; ++kk)
      if (try_triple(kk, m, 1)) {
        double a = std::exp(value_log(kk, m, 1));
        return {{{"k", kk}, {"m", m}, {"n", 1}}, a, std::abs(a - z), evals};
      }
    detail::witness_not_found(bound, best);
  }
  // want 2^-(m+n) (2^m lnx - k ln2) = ln z  =>  k = (2^m lnx - 2^(m+n) ln z)/ln2
  const double two_m = std::exp2(static_cast<double>(m));
  for (long long n = 1; n <= bound; ++n) {
    double kstar =
        (two_m * lnx - two_m * std::exp2(static_cast<double>(n)) * std::log(z)) / ln2;
    if (kstar > 2.0 * static_cast<double>(bound)) break;
    long long kf = static_cast<long long>(std::floor(kstar));
    for (long long k : {kf, kf + 1, 1LL}) {
      if (try_triple(k, m, n)) {
        double a = std::exp(value_log(k, m, n));
        return {{{"k", k}, {"m", m}, {"n", n}}, a, std::abs(a - z), evals};
      }
    }
  }
  detail::witness_not_found(bound, best);
}

/// Witness (k, h) with |(1/2)^((3^h - 1)/2^(k+1)) * x^(3^h / 2^k) - z| < eps
/// for x in (0, 1].  Log value: 3^h 2^-k (ln x - ln2/2) + 2^-(k+1) ln 2, with
/// 3^h 2^-k held as exp(h ln3 - k ln2).
inline DensityWitness search_gabi(double x, double z, double eps, long long k_bound,
                                  long long h_bound = 2000) {
  if (!(x > 0.0 && x <= 1.0)) fail(ErrorCode::OutOfRange, "search_gabi needs 0 < x <= 1");
  if (!(z >= 0.0 && z <= 1.0)) fail(ErrorCode::OutOfRange, "z must lie in [0,1]");
  if (!(eps > 0.0) || k_bound < 1) fail(ErrorCode::OutOfRange, "bad eps/bound");

  const double ln2 = std::log(2.0), ln3 = std::log(3.0);
  const double coeff = std::log(x) - 0.5 * ln2;  // always negative
  std::uint64_t evals = 0;
  double best = 2.0;
  auto value_log = [&](long long h, long long k) {
    double ratio = std::exp(static_cast<double>(h) * ln3 - static_cast<double>(k) * ln2);
    return ratio * coeff + std::exp2(-static_cast<double>(k + 1)) * ln2;
  };
  auto try_pair = [&](long long h, long long k) -> bool {
    if (h < 1 || h > h_bound || k < 1 || k > k_bound) return false;
    ++evals;
    double err = std::abs(std::exp(value_log(h, k)) - z);
    best = std::min(best, err);
    return err < eps;
  };
  auto found = [&](long long h, long long k) -> DensityWitness {
    double a = std::exp(value_log(h, k));
    return {{{"h", h}, {"k", k}}, a, std::abs(a - z), evals};
  };

  if (z == 0.0) {
    // k = 1, h large enough to push the log value below ln eps.
    double needed = (std::log(eps) - 0.25 * ln2) / (0.5 * coeff);  // 3^h > needed
    long long h = static_cast<long long>(std::ceil(std::log(needed) / ln3));
    for (long long hh = std::max(1LL, h); hh <= std::max(1LL, h) + 2; ++hh)
      if (try_pair(hh, 1)) return found(hh, 1);
    detail::witness_not_found(k_bound, best);
  }
  // want ratio = (ln z - 2^-(k+1) ln2) / coeff, i.e. h ln3 = ln(ratio) + k ln2.
  for (long long k = 1; k <= k_bound; ++k) {
    double target = (std::log(z) - std::exp2(-static_cast<double>(k + 1)) * ln2) / coeff;
    if (!(target > 0.0)) continue;
    double hstar = (std::log(target) + static_cast<double>(k) * ln2) / ln3;
    long long hf = static_cast<long long>(std::floor(hstar));
    for (long long h : {hf, hf + 1, 1LL})
      if (try_pair(h, k)) return found(h, k);
  }
  detail::witness_not_found(k_bound, best);
}

}  // namespace fanlab

#endif  // FANLAB_DENSITY_HPP_
