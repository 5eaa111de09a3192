#ifndef FANLAB_FANS_HPP_
#define FANLAB_FANS_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fanlab/density.hpp"
#include "fanlab/errors.hpp"
#include "fanlab/mahavier.hpp"
#include "fanlab/maps.hpp"
#include "fanlab/symbolic.hpp"

// Quotient-space fan models, the Lelek-fan model over the relation H,
// endpoint construction and certification, induced quotient maps, and planar
// embeddings.

namespace fanlab {

/// Quotient representative: the t=1 fiber collapses to the Apex.
template <class Symbols>
struct FanPoint {
  bool apex = false;
  std::optional<Symbols> symbols;  // absent for the apex
  double t = 1.0;

  friend bool operator==(const FanPoint& a, const FanPoint& b) {
    if (a.apex || b.apex) return a.apex == b.apex;
    return a.t == b.t && a.symbols == b.symbols;
  }
};

template <class Symbols>
FanPoint<Symbols> canonicalize(Symbols symbols, double t) {
  if (!(t >= 0.0 && t <= 1.0)) fail(ErrorCode::OutOfRange, "t must lie in [0,1]");
  if (t == 1.0) return {true, std::nullopt, 1.0};
  return {false, std::move(symbols), t};
}

/// f*([x]) = [f(x)].  `base` maps (Symbols, t) -> (Symbols, t).  The respect
/// check runs the base map on apex probes; any probe leaving the t=1 fiber
/// raises NotCompatible.
template <class Symbols, class BaseMap>
FanPoint<Symbols> induced_map(BaseMap&& base, const FanPoint<Symbols>& p,
                              const std::vector<Symbols>& apex_probes) {
  if (p.apex) {
    if (apex_probes.empty())
      fail(ErrorCode::OutOfRange, "apex application needs probe representatives");
    std::pair<Symbols, double> image = base(apex_probes.front(), 1.0);
    for (const Symbols& probe : apex_probes) {
      std::pair<Symbols, double> out = base(probe, 1.0);
      if (std::abs(out.second - 1.0) > 1e-12)
        fail(ErrorCode::NotCompatible, "base map moves the apex fiber off t=1");
    }
    (void)image;
    return {true, std::nullopt, 1.0};
  }
  std::pair<Symbols, double> out = base(*p.symbols, p.t);
  return canonicalize(std::move(out.first), out.second);
}

/// The second quotient rule (real two-sided windows): windows whose every
/// coordinate lies in {0, 2} collapse to a single class.
inline bool is_two_fiber_class(const TwoSidedMahavierWindow& w, double tol = 1e-12) {
  for (double v : w.values)
    if (std::abs(v) > tol && std::abs(v - 2.0) > tol) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Lelek fan model over the relation H

/// A truncated point of the two-sided Mahavier product of H, values in [0,1].
struct LelekWindowPoint {
  TwoSidedMahavierWindow window;

  explicit LelekWindowPoint(TwoSidedMahavierWindow w) : window(std::move(w)) {
    for (double v : window.values)
      if (!(v >= -kDomainTol && v <= 1.0 + kDomainTol))
        fail(ErrorCode::OutOfRange, "Lelek window values must lie in [0,1]");
  }
};

struct EndpointCertificate {
  long index = 0;  // coordinate whose value is exactly 1
};

/// Certificate when some coordinate equals 1 (within 1e-12); nullopt
/// otherwise — absence of a 1 is not a disproof.
inline std::optional<EndpointCertificate> is_endpoint_certified(
    const LelekWindowPoint& x) {
  for (long k = x.window.lo; k <= x.window.hi; ++k)
    if (std::abs(x.window.value(k) - 1.0) <= 1e-12) return EndpointCertificate{k};
  return std::nullopt;
}

/// Builds a certified endpoint within eps of x (truncated two-sided metric):
/// some coordinate p < -m is exactly 1, a descent word steers from that 1
/// down to x(-m), x's own choices are followed on [-m, m], branch 1 extends
/// above m, and the window is all 1s below the certificate.  Descent words
/// are tried best-landing-first until the final distance self-check passes.
inline std::pair<LelekWindowPoint, EndpointCertificate> lelek_endpoint_near(
    const LelekWindowPoint& x, double eps, const ClosedRelation& H) {
  if (!(eps > 0.0)) fail(ErrorCode::OutOfRange, "eps must be positive");
  if (auto cert = is_endpoint_certified(x)) return {x, *cert};

  const long lo = x.window.lo, hi = x.window.hi;
  long m = 1;
  while (std::pow(2.0, -static_cast<double>(m - 1)) >= eps / 3.0) ++m;
  if (-lo < m || hi < m)
    fail(ErrorCode::WindowTooShort, "window cannot carry the tail bound index");
  const long budget = -lo - m;  // room for h0 + k0 below -m
  const double target = x.window.value(-m);

  // Candidate descent words over both branches from the literal 1 down to
  // x(-m), best landing error first.  The gabi-witness block 1^h 2^k leads
  // when it fits the budget; a beam search over all branch words fills in the
  // fallbacks (the pure-block exponent lattice is too coarse at small
  // budgets).
  std::vector<std::vector<int>> candidates;
  auto block_word = [](long long h0, long long k0) {
    std::vector<int> w(static_cast<std::size_t>(h0), 1);
    w.insert(w.end(), static_cast<std::size_t>(k0), 2);
    return w;
  };
  if (std::abs(target) <= 1e-300) {
    // Steer to an underflow-exact 0: enough cubing steps from 1 drive the
    // value to 0 in binary64, matching a zero coordinate exactly.
    if (budget >= 9) candidates.push_back(block_word(8, 1));
  } else {
    try {
      DensityWitness wit = search_gabi(1.0, target, eps / 3.0, 1 << 20);
      if (wit.exponent("h") + wit.exponent("k") <= budget)
        candidates.push_back(block_word(wit.exponent("h"), wit.exponent("k")));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::WitnessNotFound) throw;
    }
    struct Node {
      double v;
      std::vector<int> word;
    };
    std::vector<Node> beam{{1.0, {}}};
    std::vector<std::pair<double, std::vector<int>>> pool;
    for (long d = 1; d <= budget; ++d) {
      std::vector<Node> next;
      next.reserve(2 * beam.size());
      for (const Node& nd : beam)
        for (int b : {1, 2}) {
          Node child{H.branches().map(b).eval(nd.v), nd.word};
          child.word.push_back(b);
          pool.push_back({std::abs(child.v - target), child.word});
          next.push_back(std::move(child));
        }
      std::sort(next.begin(), next.end(), [&](const Node& a, const Node& b) {
        double ea = std::abs(a.v - target), eb = std::abs(b.v - target);
        return ea != eb ? ea < eb : a.word < b.word;
      });
      if (next.size() > 512) next.resize(512);
      beam = std::move(next);
    }
    std::sort(pool.begin(), pool.end());
    if (pool.size() > 64) pool.resize(64);
    for (auto& [err, word] : pool) candidates.push_back(std::move(word));
  }

  for (const std::vector<int>& descent : candidates) {
    const long p = -m - static_cast<long>(descent.size());  // index of the literal 1
    if (p < lo) continue;
    std::vector<double> vals(static_cast<std::size_t>(hi - lo + 1));
    std::vector<int> ch(static_cast<std::size_t>(hi - lo));
    auto V = [&](long k) -> double& { return vals[static_cast<std::size_t>(k - lo)]; };
    auto C = [&](long k) -> int& { return ch[static_cast<std::size_t>(k - lo)]; };
    for (long k = lo; k <= p; ++k) V(k) = 1.0;
    for (long k = lo; k < p; ++k) C(k) = 2;  // sqrt fixes 1
    for (long k = p; k < -m; ++k) {
      C(k) = descent[static_cast<std::size_t>(k - p)];
      V(k + 1) = H.branches().map(C(k)).eval(V(k));
    }
    for (long k = -m; k < m; ++k) {
      C(k) = x.window.choice(k);
      V(k + 1) = H.branches().map(C(k)).eval(V(k));
    }
    for (long k = m; k < hi; ++k) {
      C(k) = 1;
      V(k + 1) = H.branches().map(1).eval(V(k));
    }
    LelekWindowPoint e(TwoSidedMahavierWindow(H, lo, hi, vals, ch));
    double dist = metric_d2(x.window, e.window, 1.0).value;
    if (dist < eps) return {e, EndpointCertificate{p}};
  }
  fail(ErrorCode::WindowTooShort,
       "no certified endpoint within eps fits the window budget");
}

// ---------------------------------------------------------------------------
// Planar embeddings

struct PlanarLeg {
  std::size_t id = 0;
  double c = 0.0;  // leg direction: segment from (0,0) to (c,-1)
  std::vector<std::pair<double, double>> points;
};

/// Legs of the Cantor fan at the depth-d ternary approximation: one leg per
/// word over the digits {0, 2}, c = sum digit_i / 3^i, sampled at (t*c, -t).
inline std::vector<PlanarLeg> embed_cantor_fan(int depth, int samples_per_leg) {
  if (depth < 1 || samples_per_leg < 2)
    fail(ErrorCode::OutOfRange, "depth >= 1 and samples >= 2 required");
  std::vector<PlanarLeg> legs;
  std::size_t count = 1u << depth;
  for (std::size_t w = 0; w < count; ++w) {
    double c = 0.0, scale = 1.0 / 3.0;
    for (int i = depth - 1; i >= 0; --i) {
      if ((w >> i) & 1u) c += 2.0 * scale;
      scale /= 3.0;
    }
    PlanarLeg leg{w, c, {}};
    for (int s = 0; s < samples_per_leg; ++s) {
      double t = static_cast<double>(s) / (samples_per_leg - 1);
      leg.points.emplace_back(t * c, -t);
    }
    legs.push_back(std::move(leg));
  }
  return legs;
}

/// Embedding of Lelek windows: t = value at index 1, leg direction from the
/// ternary encoding of the forward choice word (choice 1 -> digit 0,
/// choice 2 -> digit 2, padded with 0).
inline std::vector<std::pair<double, double>> embed_lelek(
    const std::vector<LelekWindowPoint>& windows) {
  if (windows.empty()) fail(ErrorCode::OutOfRange, "embed_lelek needs windows");
  std::vector<std::pair<double, double>> out;
  for (const LelekWindowPoint& w : windows) {
    double c = 0.0, scale = 1.0 / 3.0;
    for (long k = 1; k < w.window.hi; ++k) {
      if (w.window.choice(k) == 2) c += 2.0 * scale;
      scale /= 3.0;
    }
    double t = w.window.value(1);
    out.emplace_back(t * c, -t);
  }
  return out;
}

}  // namespace fanlab

#endif  // FANLAB_FANS_HPP_
