#ifndef FANLAB_TRANSITIVITY_HPP_
#define FANLAB_TRANSITIVITY_HPP_

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

// Sorting skew-products over full shifts, the transitive-point construction,
// sigma-transitivity chains, and orbit coverage measurement.

namespace fanlab {

enum class SkewSide { OneSided, TwoSided };

struct SkewSystem {
  MapFamily family;
  SkewSide side = SkewSide::OneSided;
};

struct SkewStateC {
  OneSidedWord symbols;
  double t = 0.0;
};

struct SkewStateD {
  TwoSidedSymbolWindow symbols;
  double t = 0.0;
};

/// (f_1,...,f_n)_{C_n}(x, t) = (sigma(x), f_{x(1)}(t)).
inline SkewStateC skew_step(const SkewSystem& sys, const SkewStateC& s) {
  int lead = s.symbols.at(1);
  return {shift_one_sided(s.symbols), sys.family.map(lead).eval(s.t)};
}

/// D_n analogue: symbols shift forward (needs hi >= 2), same t update.
inline SkewStateD skew_step(const SkewSystem& sys, const SkewStateD& s) {
  int lead = s.symbols.at(1);
  return {shift_two_sided(s.symbols, ShiftDirection::Forward),
          sys.family.map(lead).eval(s.t)};
}

/// Inverse of the D_n step: g(x, t) = (tau^-1(x), f_{tau^-1(x)(1)}^{-1}(t)).
inline SkewStateD skew_step_inverse(const SkewSystem& sys, const SkewStateD& s) {
  TwoSidedSymbolWindow back = shift_two_sided(s.symbols, ShiftDirection::Backward);
  return {back, sys.family.map(back.at(1)).invert(s.t)};
}

template <class State>
std::vector<State> skew_orbit(const SkewSystem& sys, const State& s0, long steps) {
  if (steps < 0) fail(ErrorCode::OutOfRange, "steps must be non-negative");
  std::vector<State> orbit{s0};
  orbit.reserve(static_cast<std::size_t>(steps) + 1);
  for (long i = 0; i < steps; ++i) orbit.push_back(skew_step(sys, orbit.back()));
  return orbit;
}

/// Open constraint on the leading coordinates of a point: a symbol cylinder,
/// a box of open intervals on real coordinates, or both.
struct CylinderTarget {
  std::optional<FiniteWord> word;
  std::vector<std::pair<double, double>> box;
  double eps = 0.0;

  void require_nonempty() const {
    if ((!word || word->empty()) && box.empty())
      fail(ErrorCode::OutOfRange, "target needs a word or box constraint");
  }
};

// ---------------------------------------------------------------------------
// Transitive point construction (sqrt / halving / square triple on C_3)

struct TransitivePoint {
  OneSidedWord point;
  std::vector<long long> hit_times;
};

namespace detail {

/// Applies one family map in log space, falling back to direct evaluation on
/// pieces that are not log-linear (those only occur at O(1) values).
inline double apply_map_log(const PiecewiseMap& m, double logt) {
  try {
    return m.eval_log(logt);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotApplicable) throw;
    return std::log(m.eval(std::exp(logt)));
  }
}

}  // namespace detail

/// The steering block realizing a property-L witness (k, m, n) for the
/// definicija triple: symbol 3 repeated m times, then 2 repeated k times,
/// then 1 repeated m+n times (applied front-first in the skew product).
inline std::vector<int> property_l_block(const DensityWitness& wit) {
  long long k = wit.exponent("k"), m = wit.exponent("m"), n = wit.exponent("n");
  std::vector<int> block;
  block.reserve(static_cast<std::size_t>(2 * m + k + n));
  block.insert(block.end(), static_cast<std::size_t>(m), 3);
  block.insert(block.end(), static_cast<std::size_t>(k), 2);
  block.insert(block.end(), static_cast<std::size_t>(m + n), 1);
  return block;
}

/// Builds a finite symbol prefix w and hit times s_i so the orbit of
/// (w extended by tail 1, x0) under the C_3 skew system is, at step s_i,
/// inside target i: upcoming symbols start with the target word and the real
/// coordinate is within eps_i of t_i.  Each hit is re-verified by independent
/// log-space iteration before returning.
inline TransitivePoint build_transitive_point(
    const MapFamily& family,
    const std::vector<std::pair<CylinderTarget, double>>& targets,
    const std::vector<double>& eps_schedule, double x0,
    long long search_bound = (1LL << 22)) {
  if (!(x0 > 0.0 && x0 < 1.0)) fail(ErrorCode::OutOfRange, "x0 must lie in (0,1)");
  if (eps_schedule.size() < targets.size())
    fail(ErrorCode::LengthMismatch, "eps schedule shorter than target list");

  std::vector<int> prefix;
  std::vector<long long> hits;
  double log_cur = std::log(x0);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& [target, t_i] = targets[i];
    target.require_nonempty();
    double eps_i = eps_schedule[i];
    double x_cur = std::exp(log_cur);
    if (!(x_cur > 0.0 && x_cur < 1.0))
      fail(ErrorCode::OutOfRange, "construction value left (0,1)");
    DensityWitness wit = search_propertyL(family, x_cur, t_i, eps_i, search_bound);
    std::vector<int> block = property_l_block(wit);
    for (int s : block) {
      prefix.push_back(s);
      log_cur = detail::apply_map_log(family.map(s), log_cur);
    }
    hits.push_back(static_cast<long long>(prefix.size()));
    if (target.word)
      for (int s : target.word->symbols) {
        prefix.push_back(s);
        log_cur = detail::apply_map_log(family.map(s), log_cur);
      }
  }

  OneSidedWord point(FiniteWord(family.alphabet(), prefix), 1);

  // Independent verification: iterate the whole prefix map-by-map.
  double log_v = std::log(x0);
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& [target, t_i] = targets[i];
    while (cursor < static_cast<std::size_t>(hits[i])) {
      log_v = detail::apply_map_log(family.map(prefix[cursor]), log_v);
      ++cursor;
    }
    if (std::abs(std::exp(log_v) - t_i) > eps_schedule[i] + 1e-9)
      fail(ErrorCode::ConstraintViolation,
           "hit " + std::to_string(i + 1) + " fails verification");
    if (target.word)
      for (std::size_t j = 0; j < target.word->size(); ++j)
        if (point.at(static_cast<std::size_t>(hits[i]) + 1 + j) !=
            target.word->at(j + 1))
          fail(ErrorCode::ConstraintViolation, "cylinder word mismatch at hit");
  }
  return {point, hits};
}

/// Deterministic countable dense target enumeration for the C_3 system:
/// level L pairs every word of length L with the odd dyadics of denominator
/// 2^L, diagonally, until `count` targets are produced.
inline std::vector<std::pair<CylinderTarget, double>> auto_targets_c3(std::size_t count) {
  Alphabet ab(3);
  std::vector<std::pair<CylinderTarget, double>> out;
  for (std::size_t level = 1; out.size() < count && level < 16; ++level) {
    std::vector<FiniteWord> words = enumerate_words(ab, level);
    std::vector<double> dyadics;
    for (std::size_t num = 1; num < (1u << level); num += 2)
      dyadics.push_back(static_cast<double>(num) / static_cast<double>(1u << level));
    for (std::size_t wi = 0; wi < words.size() && out.size() < count; ++wi) {
      double t = dyadics[wi % dyadics.size()];
      out.push_back({CylinderTarget{words[wi], {}, 0.0}, t});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sigma-transitivity chains on the relation H

struct SigmaChain {
  std::vector<MahavierWord> points;
  std::vector<long long> lengths;  // l_j
  std::vector<long long> depths;   // m_j
};

namespace detail {

/// Feasible interval of first coordinates for a fixed branch word: every
/// forward coordinate must land in the corresponding open box interval.
/// Branches of H are increasing, so intervals propagate as intervals.
inline std::optional<std::pair<double, double>> feasible_interval(
    const ClosedRelation& F, const FiniteWord& w,
    const std::vector<std::pair<double, double>>& box, double margin = 1e-9) {
  const double dlo = F.domain().lo(), dhi = F.domain().hi();
  double lo = std::max(box[0].first + margin, dlo);
  double hi = std::min(box[0].second - margin, dhi);
  if (!(lo < hi)) return std::nullopt;
  // Forward interval with running clipping; then pull the clip back.
  double flo = lo, fhi = hi;
  std::vector<std::pair<double, double>> stages{{flo, fhi}};
  for (std::size_t i = 0; i < w.size(); ++i) {
    const PiecewiseMap& f = F.branches().map(w.at(i + 1));
    flo = f.eval(flo);
    fhi = f.eval(fhi);
    if (i + 1 < box.size()) {
      flo = std::max(flo, box[i + 1].first + margin);
      fhi = std::min(fhi, box[i + 1].second - margin);
    }
    if (!(flo < fhi)) return std::nullopt;
    stages.push_back({flo, fhi});
  }
  // Pull the final clipped interval back to the first coordinate.
  for (std::size_t i = w.size(); i > 0; --i) {
    const PiecewiseMap& f = F.branches().map(w.at(i));
    flo = f.invert(flo);
    fhi = f.invert(fhi);
    flo = std::max(flo, stages[i - 1].first);
    fhi = std::min(fhi, stages[i - 1].second);
    if (!(flo < fhi)) return std::nullopt;
  }
  return std::make_pair(flo, fhi);
}

struct FeasibleStart {
  FiniteWord word;
  double lo, hi;
};

/// Appends cubing-halving (branch 1) / sqrt (branch 2) blocks until the last
/// value is within eps of z.  Each stage picks the exponent pair (h, k),
/// h >= 0, k >= 1, minimizing the predicted landing error
/// |exp(3^h 2^-k (ln y - ln2/2) + 2^-(k+1) ln2) - z|; h is capped so no
/// intermediate value underflows binary64.  Returns the number of appended
/// steps.
inline long long steer_to(const ClosedRelation& F, std::vector<double>& vals,
                          std::vector<int>& choices, double z, double eps,
                          int max_stages = 64) {
  const double ln2 = std::log(2.0), ln3 = std::log(3.0);
  long long added = 0;
  for (int stage = 0; stage < max_stages; ++stage) {
    double y = vals.back();
    if (std::abs(y - z) < eps) return added;
    if (!(y > 0.0 && y <= 1.0))
      fail(ErrorCode::WitnessNotFound, "steering value left (0,1]");
    const double coeff = std::log(y) - 0.5 * ln2;
    long long h_cap = static_cast<long long>(
        std::floor(std::log(700.0 / (-std::log(y) + 0.35)) / ln3));
    h_cap = std::max(0LL, std::min(h_cap, 12LL));
    long long best_h = -1, best_k = 1;
    double best_err = std::abs(y - z);
    for (long long h = 0; h <= h_cap; ++h)
      for (long long k = 1; k <= 80; ++k) {
        double lv = std::exp(static_cast<double>(h) * ln3 -
                             static_cast<double>(k) * ln2) *
                        coeff +
                    std::exp2(-static_cast<double>(k + 1)) * ln2;
        double err = std::abs(std::exp(lv) - z);
        if (err < best_err) {
          best_err = err;
          best_h = h;
          best_k = k;
        }
      }
    if (best_h < 0)
      fail(ErrorCode::WitnessNotFound, "steering cannot improve toward target");
    for (long long s = 0; s < best_h; ++s) {
      choices.push_back(1);
      vals.push_back(F.branches().map(1).eval(vals.back()));
    }
    for (long long s = 0; s < best_k; ++s) {
      choices.push_back(2);
      vals.push_back(F.branches().map(2).eval(vals.back()));
    }
    added += best_h + best_k;
  }
  if (std::abs(vals.back() - z) < eps) return added;
  fail(ErrorCode::WitnessNotFound, "steering did not converge");
}

inline FeasibleStart find_feasible_start(const ClosedRelation& F,
                                         const CylinderTarget& target) {
  if (target.box.empty()) fail(ErrorCode::OutOfRange, "sigma-chain target needs a box");
  std::size_t m = target.box.size();
  for (const FiniteWord& w : enumerate_words(F.branches().alphabet(), m - 1)) {
    auto iv = feasible_interval(F, w, target.box);
    if (iv) return {w, iv->first, iv->second};
  }
  fail(ErrorCode::InfeasibleTarget, "no branch word realizes the target box");
}

}  // namespace detail

/// Builds a sigma-transitivity chain for the relation H: each x_j realizes
/// target j on its first m_j coordinates, then steers with h_j applications
/// of branch 1 (x^3/2) and k_j of branch 2 (sqrt) so coordinate
/// l_j = m_j + h_j + k_j equals x_{j+1}'s first coordinate exactly.
inline SigmaChain build_sigma_chain(const ClosedRelation& F,
                                    const std::vector<CylinderTarget>& targets,
                                    long long gabi_bound = (1LL << 20)) {
  if (targets.empty()) fail(ErrorCode::OutOfRange, "need at least one target");
  std::vector<detail::FeasibleStart> starts;
  for (const CylinderTarget& t : targets) starts.push_back(detail::find_feasible_start(F, t));

  SigmaChain chain;
  double entry = 0.5 * (starts[0].lo + starts[0].hi);
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const auto& st = starts[j];
    long long m_j = static_cast<long long>(targets[j].box.size());
    std::vector<double> vals{entry};
    std::vector<int> choices;
    for (std::size_t i = 0; i < st.word.size(); ++i) {
      choices.push_back(st.word.at(i + 1));
      vals.push_back(F.branches().map(choices.back()).eval(vals.back()));
    }
    long long added = 0;
    if (j + 1 < targets.size()) {
      const auto& nx = starts[j + 1];
      double z = 0.5 * (nx.lo + nx.hi);
      double eps = 0.25 * (nx.hi - nx.lo);
      added = detail::steer_to(F, vals, choices, z, eps);
      if (added == 0) {
        // Already inside, but the chain needs l_j > m_j: take one sqrt step
        // and steer back into the window.
        choices.push_back(2);
        vals.push_back(F.branches().map(2).eval(vals.back()));
        added = 1 + detail::steer_to(F, vals, choices, z, eps);
      }
    } else {
      // Final point only needs l_j > m_j; one extra sqrt step suffices.
      choices.push_back(2);
      vals.push_back(F.branches().map(2).eval(vals.back()));
      added = 1;
    }
    entry = vals.back();  // exact gluing value for x_{j+1}
    chain.points.emplace_back(MahavierWord::Unchecked{}, std::move(vals),
                              FiniteWord(F.branches().alphabet(), std::move(choices)));
    chain.lengths.push_back(m_j + added);
    chain.depths.push_back(m_j);
  }

  // Self-check: every x_j realizes its box and the gluing matches.
  for (std::size_t j = 0; j < targets.size(); ++j) {
    chain.points[j].check_against(F);
    for (std::size_t i = 0; i < targets[j].box.size(); ++i) {
      double v = chain.points[j].values[i];
      if (!(v > targets[j].box[i].first && v < targets[j].box[i].second))
        fail(ErrorCode::ConstraintViolation, "chain point leaves its target box");
    }
    if (j + 1 < targets.size()) {
      double glue = chain.points[j].values[static_cast<std::size_t>(chain.lengths[j]) - 1];
      if (glue != chain.points[j + 1].values.front())
        fail(ErrorCode::ConstraintViolation, "chain gluing mismatch");
    }
  }
  return chain;
}

/// Star-concatenation of the chain's first l_j coordinates: consecutive words
/// share their gluing value, which is written once.
inline MahavierWord stitch_chain(const SigmaChain& chain, const ClosedRelation& F) {
  std::vector<double> vals;
  std::vector<int> ch;
  for (std::size_t j = 0; j < chain.points.size(); ++j) {
    const MahavierWord& w = chain.points[j];
    std::size_t l = static_cast<std::size_t>(chain.lengths[j]);
    std::size_t start = j == 0 ? 0 : 1;  // skip the shared gluing value
    for (std::size_t i = start; i < l; ++i) vals.push_back(w.values[i]);
    for (std::size_t i = 0; i + 1 < l; ++i) ch.push_back(w.choices.at(i + 1));
  }
  // Final word contributes all of its values.
  const MahavierWord& last = chain.points.back();
  for (std::size_t i = static_cast<std::size_t>(chain.lengths.back());
       i < last.values.size(); ++i)
    vals.push_back(last.values[i]);
  for (std::size_t i = static_cast<std::size_t>(chain.lengths.back()) - 1;
       i < last.choices.size(); ++i)
    ch.push_back(last.choices.at(i + 1));
  return MahavierWord(F, std::move(vals), FiniteWord(F.branches().alphabet(), std::move(ch)));
}

/// Shift offsets of the stitched word: s_k = sum_{j<k} (l_j - 1), so the
/// s_k-fold forward shift starts at x_k's first coordinate.
inline std::vector<long long> chain_shift_offsets(const SigmaChain& chain) {
  std::vector<long long> s{0};
  for (std::size_t j = 0; j + 1 < chain.points.size(); ++j)
    s.push_back(s.back() + chain.lengths[j] - 1);
  return s;
}

// ---------------------------------------------------------------------------
// Orbit coverage

struct CoverageRow {
  std::size_t target_id = 0;
  long long hit_step = -1;  // -1 = miss
  double hit_distance = 0.0;
};

struct CoverageReport {
  std::vector<CoverageRow> rows;
  double fraction_hit = 0.0;

  std::string to_csv() const {
    std::string out = "target_id,hit_step,hit_distance\n";
    for (const CoverageRow& r : rows)
      out += std::to_string(r.target_id) + "," + std::to_string(r.hit_step) + "," +
             std::to_string(r.hit_distance) + "\n";
    return out;
  }
};

inline bool state_in_target(const SkewStateC& s, const CylinderTarget& t,
                            double* distance) {
  if (t.word)
    for (std::size_t j = 1; j <= t.word->size(); ++j)
      if (s.symbols.at(j) != t.word->at(j)) return false;
  if (!t.box.empty()) {
    if (!(s.t > t.box[0].first && s.t < t.box[0].second)) return false;
    *distance = std::abs(s.t - 0.5 * (t.box[0].first + t.box[0].second));
  } else {
    *distance = 0.0;
  }
  return true;
}

inline bool word_in_target(const MahavierWord& w, const CylinderTarget& t,
                           double* distance) {
  if (w.values.size() < t.box.size()) return false;
  double d = 0.0;
  for (std::size_t i = 0; i < t.box.size(); ++i) {
    if (!(w.values[i] > t.box[i].first && w.values[i] < t.box[i].second)) return false;
    d = std::max(d, std::abs(w.values[i] - 0.5 * (t.box[i].first + t.box[i].second)));
  }
  *distance = d;
  return true;
}

template <class Observation, class Pred>
CoverageReport coverage_report(const std::vector<Observation>& orbit,
                               const std::vector<CylinderTarget>& targets, Pred&& inside) {
  CoverageReport rep;
  std::size_t hit_count = 0;
  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    CoverageRow row{ti, -1, 0.0};
    for (std::size_t s = 0; s < orbit.size(); ++s) {
      double d = 0.0;
      if (inside(orbit[s], targets[ti], &d)) {
        row.hit_step = static_cast<long long>(s);
        row.hit_distance = d;
        break;
      }
    }
    if (row.hit_step >= 0) ++hit_count;
    rep.rows.push_back(row);
  }
  rep.fraction_hit = targets.empty()
                         ? 1.0
                         : static_cast<double>(hit_count) / static_cast<double>(targets.size());
  return rep;
}

inline CoverageReport orbit_coverage(const std::vector<SkewStateC>& orbit,
                                     const std::vector<CylinderTarget>& targets) {
  return coverage_report(orbit, targets, state_in_target);
}

inline CoverageReport orbit_coverage(const std::vector<MahavierWord>& shifts,
                                     const std::vector<CylinderTarget>& targets) {
  return coverage_report(shifts, targets, word_in_target);
}

}  // namespace fanlab

#endif  // FANLAB_TRANSITIVITY_HPP_
