#ifndef FANLAB_MAHAVIER_HPP_
#define FANLAB_MAHAVIER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fanlab/errors.hpp"
#include "fanlab/maps.hpp"
#include "fanlab/symbolic.hpp"

// Closed relations as unions of branch graphs, finite Mahavier products,
// shifts on truncations, forward impressions, and the structure maps tying
// one-sided and two-sided products together.

namespace fanlab {

inline constexpr double kRelationTol = 1e-9;

/// F = union of the graphs of the branch maps over a shared domain.
class ClosedRelation {
 public:
  explicit ClosedRelation(MapFamily branches) : branches_(std::move(branches)) {
    // Light containment check: branch values at sampled points stay in the
    // domain.
    for (int k = 1; k <= branches_.size(); ++k)
      for (const Interval& iv : branches_.domain().intervals)
        for (int i = 0; i <= 16; ++i) {
          double t = iv.a + (iv.b - iv.a) * i / 16.0;
          if (!branches_.domain().contains(branches_.map(k).eval(t), 1e-9))
            fail(ErrorCode::OutOfRange, "branch leaves the relation domain");
        }
  }

  const MapFamily& branches() const { return branches_; }
  const IntervalUnionDomain& domain() const { return branches_.domain(); }
  int branch_count() const { return branches_.size(); }

  /// Relation with each branch replaced by its inverse (requires bijections).
  ClosedRelation inverse() const {
    std::vector<PiecewiseMap> inv;
    for (int k = 1; k <= branches_.size(); ++k) {
      const PiecewiseMap& m = branches_.map(k);
      if (!m.invertible())
        fail(ErrorCode::NotInvertible, "inverse relation needs invertible branches");
      std::vector<MapPiece> pieces;
      for (const MapPiece& piece : m.pieces()) {
        double va = piece.expr.eval(piece.interval.a);
        double vb = piece.expr.eval(piece.interval.b);
        pieces.push_back(
            {Interval(std::min(va, vb), std::max(va, vb)), piece.expr.inverse()});
      }
      std::sort(pieces.begin(), pieces.end(),
                [](const MapPiece& l, const MapPiece& r) {
                  return l.interval.a < r.interval.a;
                });
      inv.emplace_back(m.domain(), std::move(pieces), true);
    }
    return ClosedRelation(MapFamily(std::move(inv)));
  }

 private:
  MapFamily branches_;
};

/// The fiber F(x): deduplicated branch evaluations, lowest index first.
inline std::vector<std::pair<int, double>> successors(const ClosedRelation& F,
                                                      double x) {
  if (!F.domain().contains(x)) fail(ErrorCode::OutOfDomain, "successors");
  std::vector<std::pair<int, double>> out;
  for (int k = 1; k <= F.branch_count(); ++k) {
    double v = F.branches().map(k).eval(x);
    bool dup = false;
    for (const auto& [b, w] : out)
      if (std::abs(w - v) <= 1e-12) {
        dup = true;
        break;
      }
    if (!dup) out.emplace_back(k, v);
  }
  return out;
}

/// Element of the m-th Mahavier product: values x_1..x_{m+1} with per-step
/// branch choices certifying (x_i, x_{i+1}) in F.
struct MahavierWord {
  std::vector<double> values;
  FiniteWord choices;

  MahavierWord(const ClosedRelation& F, std::vector<double> vals, FiniteWord ch)
      : values(std::move(vals)), choices(std::move(ch)) {
    check_against(F);
  }

  struct Unchecked {};
  // For outputs whose validity is structural (sub-words, verified builders).
  MahavierWord(Unchecked, std::vector<double> vals, FiniteWord ch)
      : values(std::move(vals)), choices(std::move(ch)) {}

  std::size_t length() const { return values.size(); }

  void check_against(const ClosedRelation& F) const {
    if (values.empty() || values.size() != choices.size() + 1)
      fail(ErrorCode::LengthMismatch, "Mahavier word needs m+1 values, m choices");
    for (std::size_t i = 0; i < choices.size(); ++i) {
      double expect = F.branches().map(choices.symbols[i]).eval(values[i]);
      if (std::abs(expect - values[i + 1]) > kRelationTol)
        fail(ErrorCode::ConstraintViolation,
             "relation constraint fails at step " + std::to_string(i + 1));
    }
  }
};

/// Truncation of the two-sided Mahavier product: values indexed lo..hi,
/// choices indexed lo..hi-1 (choice k certifies the step k -> k+1).
struct TwoSidedMahavierWindow {
  long lo = 0;
  long hi = 1;
  std::vector<double> values;   // indexed lo..hi
  std::vector<int> choices;     // indexed lo..hi-1

  TwoSidedMahavierWindow(const ClosedRelation& F, long lo_, long hi_,
                         std::vector<double> vals, std::vector<int> ch)
      : lo(lo_), hi(hi_), values(std::move(vals)), choices(std::move(ch)) {
    if (!(lo <= 0 && 0 < hi)) fail(ErrorCode::OutOfRange, "window needs lo <= 0 < hi");
    if (static_cast<long>(values.size()) != hi - lo + 1 ||
        static_cast<long>(choices.size()) != hi - lo)
      fail(ErrorCode::LengthMismatch, "window value/choice count mismatch");
    for (long k = lo; k < hi; ++k) {
      double expect = F.branches().map(choice(k)).eval(value(k));
      if (std::abs(expect - value(k + 1)) > kRelationTol)
        fail(ErrorCode::ConstraintViolation,
             "relation constraint fails at index " + std::to_string(k));
    }
  }

  struct Unchecked {};
  TwoSidedMahavierWindow(Unchecked, long lo_, long hi_, std::vector<double> vals,
                         std::vector<int> ch)
      : lo(lo_), hi(hi_), values(std::move(vals)), choices(std::move(ch)) {}

  double value(long k) const {
    if (k < lo || k > hi) fail(ErrorCode::OutOfRange, "window value index");
    return values[static_cast<std::size_t>(k - lo)];
  }
  int choice(long k) const {
    if (k < lo || k >= hi) fail(ErrorCode::OutOfRange, "window choice index");
    return choices[static_cast<std::size_t>(k - lo)];
  }
};

/// All branch-choice expansions of length `depth` from `start`, ordered by
/// choice word lexicographically.
inline std::vector<MahavierWord> enumerate_mahavier(const ClosedRelation& F,
                                                    double start, int depth,
                                                    std::uint64_t node_budget = 1000000) {
  if (!F.domain().contains(start)) fail(ErrorCode::OutOfDomain, "enumerate_mahavier");
  if (depth < 1) fail(ErrorCode::OutOfRange, "depth must be positive");
  double nodes = static_cast<double>(depth) *
                 std::pow(static_cast<double>(F.branch_count()), depth);
  if (nodes > static_cast<double>(node_budget))
    fail(ErrorCode::BudgetExceeded,
         "enumeration would visit ~" + std::to_string(nodes) + " nodes");

  std::vector<MahavierWord> out;
  std::vector<double> values{start};
  std::vector<int> choices;
  Alphabet ab = F.branches().alphabet();
  // Depth-first, branch indices ascending = lexicographic choice order.
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(choices.size()) == depth) {
      out.emplace_back(MahavierWord::Unchecked{}, values, FiniteWord(ab, choices));
      return;
    }
    // A start value that is a common fixed point stays a single constant
    // word: agreeing branches are merged, but only while the path still sits
    // at the start value.  Merging later agreements too would collapse
    // distinct branch words whose values underflowed to the same double.
    const bool at_start = values.back() == values.front();
    for (int k = 1; k <= F.branch_count(); ++k) {
      double v = F.branches().map(k).eval(values.back());
      bool dup = false;
      for (int b = 1; at_start && b < k && !dup; ++b)
        dup = F.branches().map(b).eval(values.back()) == v;
      if (dup) continue;
      values.push_back(v);
      choices.push_back(k);
      self(self);
      values.pop_back();
      choices.pop_back();
    }
  };
  rec(rec);
  return out;
}

/// sigma_F^+ on truncations: drops the first value and choice.
inline MahavierWord shift_forward_truncated(const MahavierWord& w) {
  if (w.values.size() < 2) fail(ErrorCode::TooShort, "shift needs >= 2 values");
  std::vector<double> vals(w.values.begin() + 1, w.values.end());
  std::vector<int> ch(w.choices.symbols.begin() + 1, w.choices.symbols.end());
  return MahavierWord(MahavierWord::Unchecked{}, std::move(vals),
                      FiniteWord(w.choices.alphabet, std::move(ch)));
}

/// sigma_F on windows: re-indexing of values and choices in lockstep.
inline TwoSidedMahavierWindow shift_two_sided_window(const TwoSidedMahavierWindow& w,
                                                     ShiftDirection dir) {
  if (dir == ShiftDirection::Forward) {
    if (w.hi < 2) fail(ErrorCode::WindowTooShort, "forward shift needs hi >= 2");
    return TwoSidedMahavierWindow(TwoSidedMahavierWindow::Unchecked{}, w.lo - 1,
                                  w.hi - 1, w.values, w.choices);
  }
  return TwoSidedMahavierWindow(TwoSidedMahavierWindow::Unchecked{}, w.lo + 1,
                                w.hi + 1, w.values, w.choices);
}

/// Sampled forward impression of x: terminal values of Mahavier words from x
/// of lengths <= depth.  Exhaustive when the full tree fits the budget,
/// otherwise seeded random walks recording every prefix endpoint.
inline std::vector<double> forward_impression_sample(const ClosedRelation& F, double x,
                                                     int depth, std::uint64_t budget,
                                                     std::uint64_t seed) {
  if (!F.domain().contains(x)) fail(ErrorCode::OutOfDomain, "forward_impression_sample");
  if (depth < 1) fail(ErrorCode::OutOfRange, "depth must be positive");
  const int n = F.branch_count();
  double tree = 0.0, layer = 1.0;
  for (int d = 1; d <= depth; ++d) {
    layer *= n;
    tree += layer;
  }
  std::vector<double> out;
  if (tree <= static_cast<double>(budget)) {
    std::vector<double> frontier{x};
    for (int d = 1; d <= depth; ++d) {
      std::vector<double> next;
      for (double v : frontier)
        for (int k = 1; k <= n; ++k) next.push_back(F.branches().map(k).eval(v));
      out.insert(out.end(), next.begin(), next.end());
      frontier = std::move(next);
    }
    return out;
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(1, n);
  while (out.size() < budget) {
    double v = x;
    for (int d = 1; d <= depth && out.size() < budget; ++d) {
      v = F.branches().map(pick(rng)).eval(v);
      out.push_back(v);
    }
  }
  return out;
}

/// Unique-branch-agreement hypothesis: wherever two distinct branches agree,
/// the common value is a fixed point of every branch (F(x) = {x}).  Checked by
/// scan + bisection root isolation on each branch pair.
inline bool unique_agreement_hypothesis(const ClosedRelation& F, int scan = 4096) {
  for (int i = 1; i <= F.branch_count(); ++i)
    for (int j = i + 1; j <= F.branch_count(); ++j) {
      const PiecewiseMap& fi = F.branches().map(i);
      const PiecewiseMap& fj = F.branches().map(j);
      for (const Interval& iv : F.domain().intervals)
        for (int s = 0; s < scan; ++s) {
          double a = iv.a + (iv.b - iv.a) * s / scan;
          double b = iv.a + (iv.b - iv.a) * (s + 1) / scan;
          double ga = fi.eval(a) - fj.eval(a);
          double gb = fi.eval(b) - fj.eval(b);
          if (ga == 0.0 || ga * gb < 0.0 || (s == scan - 1 && gb == 0.0)) {
            double root;
            if (ga == 0.0) {
              root = a;
            } else if (gb == 0.0) {
              root = b;
            } else {
              // Bisect to the agreement point.
              double lo2 = a, hi2 = b;
              for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo2 + hi2);
                double gm = fi.eval(mid) - fj.eval(mid);
                if (gm == 0.0) {
                  lo2 = hi2 = mid;
                  break;
                }
                if (ga * gm < 0.0)
                  hi2 = mid;
                else
                  lo2 = mid;
              }
              root = 0.5 * (lo2 + hi2);
            }
            for (int k = 1; k <= F.branch_count(); ++k)
              if (std::abs(F.branches().map(k).eval(root) - root) > 1e-6) return false;
          }
        }
    }
  return true;
}

/// The structure map T from the two-sided to the one-sided product:
/// x_1 = f_{m(0)}(x(0)), then x_{k+1} = f_{m(k/2)}(x_k) for even k and
/// x_{k+1} = f_{m(-(k+1)/2)}(x_k) for odd k.  Requires homeomorphism branches
/// and the unique-branch-agreement hypothesis.
inline MahavierWord interleave_T(const TwoSidedMahavierWindow& w, const ClosedRelation& F,
                                 bool skip_hypothesis_check = false) {
  for (int k = 1; k <= F.branch_count(); ++k)
    if (!F.branches().map(k).is_bijection())
      fail(ErrorCode::NotApplicable, "branches must be homeomorphisms");
  if (!skip_hypothesis_check && !unique_agreement_hypothesis(F))
    fail(ErrorCode::NotApplicable, "unique-branch-agreement hypothesis fails");

  const long length = w.hi + (-w.lo);  // output value count
  std::vector<double> vals;
  std::vector<int> ch;
  vals.reserve(static_cast<std::size_t>(length));
  auto choice_at = [&](long idx) -> int {
    if (idx < w.lo || idx >= w.hi)
      fail(ErrorCode::WindowTooShort, "interleaving consumed choice outside window");
    return w.choice(idx);
  };
  vals.push_back(F.branches().map(choice_at(0)).eval(w.value(0)));
  for (long k = 1; k < length; ++k) {
    long idx = (k % 2 == 0) ? k / 2 : -(k + 1) / 2;
    int c = choice_at(idx);
    ch.push_back(c);
    vals.push_back(F.branches().map(c).eval(vals.back()));
  }
  return MahavierWord(MahavierWord::Unchecked{}, std::move(vals),
                      FiniteWord(F.branches().alphabet(), std::move(ch)));
}

/// phi: glue a forward word a (for F) and a backward word b (for F^{-1}) into
/// a two-sided window (..., b(2), b(1); a(1), a(2), ...).  The seam pair
/// (b(1), a(1)) must lie in F.
inline TwoSidedMahavierWindow phi_pair_to_window(const MahavierWord& a,
                                                 const MahavierWord& b,
                                                 const ClosedRelation& F) {
  // Seam: find a branch of F carrying b(1) to a(1).
  int seam_branch = 0;
  for (const auto& [k, v] : successors(F, b.values.front()))
    if (std::abs(v - a.values.front()) <= kRelationTol) {
      seam_branch = k;
      break;
    }
  if (seam_branch == 0)
    fail(ErrorCode::SeamViolation, "(b(1), a(1)) is not in the relation");

  const long mb = static_cast<long>(b.choices.size());
  const long ma = static_cast<long>(a.choices.size());
  const long lo = -mb, hi = ma + 1;
  std::vector<double> vals(static_cast<std::size_t>(hi - lo + 1));
  std::vector<int> ch(static_cast<std::size_t>(hi - lo));
  // Index -k holds b(k+1); index j >= 1 holds a(j).
  for (long k = 0; k <= mb; ++k)
    vals[static_cast<std::size_t>(-k - lo)] = b.values[static_cast<std::size_t>(k)];
  for (long j = 1; j <= ma + 1; ++j)
    vals[static_cast<std::size_t>(j - lo)] = a.values[static_cast<std::size_t>(j - 1)];
  // Step -k -> -k+1 applies the F-branch matching b's k-th inverse step.
  for (long k = 1; k <= mb; ++k)
    ch[static_cast<std::size_t>(-k - lo)] = b.choices.symbols[static_cast<std::size_t>(k - 1)];
  ch[static_cast<std::size_t>(0 - lo)] = seam_branch;
  for (long j = 1; j <= ma; ++j)
    ch[static_cast<std::size_t>(j - lo)] = a.choices.symbols[static_cast<std::size_t>(j - 1)];
  return TwoSidedMahavierWindow(F, lo, hi, std::move(vals), std::move(ch));
}

/// S((a,b),t) = ((..., b(2), b(1); a(1), a(2), ...), t), truncated to the
/// window [-(depth-1), depth].
inline std::pair<TwoSidedSymbolWindow, double> conjugacy_S(const OneSidedWord& a,
                                                           const OneSidedWord& b,
                                                           double t, std::size_t depth) {
  if (!(a.prefix.alphabet == b.prefix.alphabet))
    fail(ErrorCode::AlphabetMismatch, "conjugacy_S");
  if (depth < 1) fail(ErrorCode::OutOfRange, "depth must be positive");
  long lo = -(static_cast<long>(depth) - 1), hi = static_cast<long>(depth);
  std::vector<int> syms(static_cast<std::size_t>(hi - lo + 1));
  for (long k = lo; k <= hi; ++k)
    syms[static_cast<std::size_t>(k - lo)] =
        k >= 1 ? a.at(static_cast<std::size_t>(k)) : b.at(static_cast<std::size_t>(1 - k));
  return {TwoSidedSymbolWindow(a.prefix.alphabet, lo, hi, std::move(syms)), t};
}

/// Reads (a, b) back out of an S-image window.
inline std::pair<FiniteWord, FiniteWord> conjugacy_S_inverse(const TwoSidedSymbolWindow& w) {
  std::vector<int> a, b;
  for (long k = 1; k <= w.hi; ++k) a.push_back(w.at(k));
  for (long k = 0; k >= w.lo; --k) b.push_back(w.at(k));
  return {FiniteWord(w.alphabet, std::move(a)), FiniteWord(w.alphabet, std::move(b))};
}

struct MetricValue {
  double value = 0.0;
  double truncation_bound = 0.0;  // tail contribution not represented
};

/// D_F^+ truncated: sum_{k=1}^{N} |x_k - y_k| / 2^k; bound diam * 2^{-N}.
inline MetricValue metric_dplus(const std::vector<double>& x, const std::vector<double>& y,
                                double diam) {
  if (x.size() != y.size()) fail(ErrorCode::LengthMismatch, "metric_dplus");
  double sum = 0.0, w = 1.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    w *= 0.5;
    sum += std::abs(x[k] - y[k]) * w;
  }
  return {sum, diam * std::pow(2.0, -static_cast<double>(x.size()))};
}

inline MetricValue metric_dplus(const MahavierWord& x, const MahavierWord& y, double diam) {
  return metric_dplus(x.values, y.values, diam);
}

/// D_F truncated over a shared window; bound 2 * diam * 2^{-min(|lo|, hi)}.
inline MetricValue metric_d2(const TwoSidedMahavierWindow& x,
                             const TwoSidedMahavierWindow& y, double diam) {
  if (x.lo != y.lo || x.hi != y.hi) fail(ErrorCode::WindowMismatch, "metric_d2");
  double sum = 0.0;
  for (long k = x.lo; k <= x.hi; ++k)
    sum += std::abs(x.value(k) - y.value(k)) *
           std::pow(2.0, -static_cast<double>(std::abs(k)));
  double m = static_cast<double>(std::min(-x.lo, x.hi));
  return {sum, 2.0 * diam * std::pow(2.0, -m)};
}

/// CSV row `value_1,...,value_{m+1},choices` with choices as a digit string.
inline std::string mahavier_to_csv(const MahavierWord& w) {
  std::ostringstream os;
  os.precision(17);
  for (double v : w.values) os << v << ',';
  for (int c : w.choices.symbols) os << c;
  return os.str();
}

}  // namespace fanlab

#endif  // FANLAB_MAHAVIER_HPP_
