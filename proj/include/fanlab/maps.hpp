#ifndef FANLAB_MAPS_HPP_
#define FANLAB_MAPS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fanlab/errors.hpp"
#include "fanlab/symbolic.hpp"

// Piecewise elementary self-maps of unions of closed intervals, the concrete
// map catalog, word compositions and inverse word compositions.

namespace fanlab {

inline constexpr double kDomainTol = 1e-12;

struct Interval {
  double a = 0.0;
  double b = 0.0;

  Interval(double a_, double b_) : a(a_), b(b_) {
    if (!(a <= b)) fail(ErrorCode::OutOfRange, "interval endpoints out of order");
  }
  bool contains(double t, double tol = kDomainTol) const {
    return t >= a - tol && t <= b + tol;
  }
};

struct IntervalUnionDomain {
  std::vector<Interval> intervals;  // sorted, pairwise disjoint

  explicit IntervalUnionDomain(std::vector<Interval> ivs) : intervals(std::move(ivs)) {
    if (intervals.empty()) fail(ErrorCode::OutOfRange, "empty domain");
    for (std::size_t i = 1; i < intervals.size(); ++i)
      if (!(intervals[i - 1].b < intervals[i].a))
        fail(ErrorCode::OutOfRange, "domain intervals must be sorted and disjoint");
  }
  bool contains(double t, double tol = kDomainTol) const {
    for (const Interval& iv : intervals)
      if (iv.contains(t, tol)) return true;
    return false;
  }
  double lo() const { return intervals.front().a; }
  double hi() const { return intervals.back().b; }
  double diameter() const { return hi() - lo(); }
};

/// Real power with sign-preserving odd-root behavior: for negative bases and
/// non-integer exponents the value is -(-t)^p (correct for exponents like 1/3
/// that arise in the catalog; plain pow would return NaN).
inline double signed_pow(double t, double p) {
  if (t < 0.0 && p != std::floor(p)) return -std::pow(-t, p);
  return std::pow(t, p);
}

enum class ExprKind { Affine, Power, ScaledPower };

/// affine(a,b): t -> a*t + b
/// power(p):    t -> t^p
/// scaled_power(c,p,s): t -> c*(t-s)^p + s
struct ElementaryExpr {
  ExprKind kind = ExprKind::Affine;
  double a = 1.0, b = 0.0;       // affine
  double c = 1.0, p = 1.0, s = 0.0;  // power / scaled_power

  static ElementaryExpr affine(double a, double b) {
    ElementaryExpr e;
    e.kind = ExprKind::Affine;
    e.a = a;
    e.b = b;
    return e;
  }
  static ElementaryExpr power(double p) {
    ElementaryExpr e;
    e.kind = ExprKind::Power;
    e.p = p;
    return e;
  }
  static ElementaryExpr scaled_power(double c, double p, double s) {
    ElementaryExpr e;
    e.kind = ExprKind::ScaledPower;
    e.c = c;
    e.p = p;
    e.s = s;
    return e;
  }

  double eval(double t) const {
    switch (kind) {
      case ExprKind::Affine: return a * t + b;
      case ExprKind::Power: return signed_pow(t, p);
      case ExprKind::ScaledPower: return c * signed_pow(t - s, p) + s;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  ElementaryExpr inverse() const {
    switch (kind) {
      case ExprKind::Affine:
        if (a == 0.0) fail(ErrorCode::NotInvertible, "constant affine piece");
        return affine(1.0 / a, -b / a);
      case ExprKind::Power:
        if (p == 0.0) fail(ErrorCode::NotInvertible, "constant power piece");
        return power(1.0 / p);
      case ExprKind::ScaledPower:
        if (c == 0.0 || p == 0.0) fail(ErrorCode::NotInvertible, "constant piece");
        // u = c*(t-s)^p + s  =>  t = ((u-s)/c)^(1/p) + s
        return scaled_power(signed_pow(1.0 / c, 1.0 / p), 1.0 / p, s);
    }
    fail(ErrorCode::NotInvertible, "unknown expression kind");
  }

  /// True when log(eval(t)) = p'*log(t) + q' for all t > 0: powers, linear
  /// scalings, and scaled powers anchored at 0 with positive coefficient.
  bool log_linear() const {
    switch (kind) {
      case ExprKind::Affine: return b == 0.0 && a > 0.0;
      case ExprKind::Power: return true;
      case ExprKind::ScaledPower: return s == 0.0 && c > 0.0;
    }
    return false;
  }

  /// log of the value at exp(logt); requires log_linear() and t > 0.
  double eval_log(double logt) const {
    switch (kind) {
      case ExprKind::Affine: return logt + std::log(a);
      case ExprKind::Power: return p * logt;
      case ExprKind::ScaledPower: return std::log(c) + p * logt;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }
};

struct MapPiece {
  Interval interval;
  ElementaryExpr expr;
};

class PiecewiseMap {
 public:
  PiecewiseMap(IntervalUnionDomain domain, std::vector<MapPiece> pieces,
               bool invertible)
      : domain_(std::move(domain)), pieces_(std::move(pieces)), invertible_(invertible) {
    validate();
  }

  const IntervalUnionDomain& domain() const { return domain_; }
  const std::vector<MapPiece>& pieces() const { return pieces_; }
  bool invertible() const { return invertible_; }

  double eval(double t) const {
    const MapPiece* piece = find_piece(t);
    if (!piece) fail(ErrorCode::OutOfDomain, "eval at t=" + std::to_string(t));
    return eval_clamped(*piece, t);
  }

  double invert(double t) const {
    if (!invertible_) fail(ErrorCode::NotInvertible, "map not declared invertible");
    for (const MapPiece& piece : pieces_) {
      double va = eval_clamped(piece, piece.interval.a);
      double vb = eval_clamped(piece, piece.interval.b);
      double lo = std::min(va, vb), hi = std::max(va, vb);
      if (t < lo - kDomainTol || t > hi + kDomainTol) continue;
      double u = piece.expr.inverse().eval(std::clamp(t, lo, hi));
      u = std::clamp(u, piece.interval.a, piece.interval.b);
      if (std::abs(eval_clamped(piece, u) - t) <= 1e-9 * (1.0 + std::abs(t)))
        return u;
    }
    fail(ErrorCode::OutOfImage, "no piece image contains t=" + std::to_string(t));
  }

  /// True when the image covers the whole domain (the map is a surjection and,
  /// with the invertible flag, a homeomorphism of the domain).
  bool is_bijection(int samples_per_interval = 64) const {
    if (!invertible_) return false;
    for (const Interval& iv : domain_.intervals) {
      for (int i = 0; i <= samples_per_interval; ++i) {
        double t = iv.a + (iv.b - iv.a) * i / samples_per_interval;
        try {
          invert(t);
        } catch (const Error&) {
          return false;
        }
      }
    }
    return true;
  }

  /// log-space evaluation for tiny positive arguments: picks the piece by the
  /// (possibly underflowed) value exp(logt) and requires it to be log-linear.
  double eval_log(double logt) const {
    double t = std::exp(logt);
    const MapPiece* piece = find_piece(t);
    if (!piece) fail(ErrorCode::OutOfDomain, "eval_log outside domain");
    if (!piece->expr.log_linear())
      fail(ErrorCode::NotApplicable, "piece is not log-linear");
    return piece->expr.eval_log(logt);
  }

 private:
  void validate() const {
    if (pieces_.empty()) fail(ErrorCode::OutOfRange, "map needs at least one piece");
    double covered = 0.0, total = 0.0;
    for (const Interval& iv : domain_.intervals) total += iv.b - iv.a;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const MapPiece& piece = pieces_[i];
      if (!domain_.contains(piece.interval.a) || !domain_.contains(piece.interval.b))
        fail(ErrorCode::OutOfRange, "piece interval outside domain");
      covered += piece.interval.b - piece.interval.a;
      if (i > 0 && std::abs(pieces_[i - 1].interval.b - piece.interval.a) <= kDomainTol) {
        double left = pieces_[i - 1].expr.eval(pieces_[i - 1].interval.b);
        double right = piece.expr.eval(piece.interval.a);
        if (std::abs(left - right) > 1e-12)
          fail(ErrorCode::OutOfRange, "adjacent pieces disagree at breakpoint");
      }
    }
    if (std::abs(covered - total) > 1e-9)
      fail(ErrorCode::OutOfRange, "pieces do not cover the domain");
  }

  const MapPiece* find_piece(double t) const {
    for (const MapPiece& piece : pieces_)
      if (piece.interval.contains(t)) return &piece;
    return nullptr;
  }

  // Clamping absorbs roundoff at breakpoints so evaluation stays inside the
  // piece where the expression is monotone.
  static double eval_clamped(const MapPiece& piece, double t) {
    return piece.expr.eval(std::clamp(t, piece.interval.a, piece.interval.b));
  }

  IntervalUnionDomain domain_;
  std::vector<MapPiece> pieces_;
  bool invertible_;
};

class MapFamily {
 public:
  explicit MapFamily(std::vector<PiecewiseMap> maps) : maps_(std::move(maps)) {
    if (maps_.empty()) fail(ErrorCode::OutOfRange, "empty map family");
    const IntervalUnionDomain& d0 = maps_.front().domain();
    for (const PiecewiseMap& m : maps_)
      if (m.domain().intervals.size() != d0.intervals.size() ||
          std::abs(m.domain().lo() - d0.lo()) > kDomainTol ||
          std::abs(m.domain().hi() - d0.hi()) > kDomainTol)
        fail(ErrorCode::OutOfRange, "family maps must share a domain");
  }

  int size() const { return static_cast<int>(maps_.size()); }
  Alphabet alphabet() const { return Alphabet(size()); }
  const IntervalUnionDomain& domain() const { return maps_.front().domain(); }
  // 1-based, matching symbol indices.
  const PiecewiseMap& map(int k) const {
    if (k < 1 || k > size()) fail(ErrorCode::OutOfRange, "family index");
    return maps_[static_cast<std::size_t>(k - 1)];
  }

 private:
  std::vector<PiecewiseMap> maps_;
};

/// f_x: applies f_{word(1)} first, f_{word(len)} last.
inline double compose_word(const MapFamily& fam, const FiniteWord& word, double t) {
  if (word.empty()) fail(ErrorCode::OutOfRange, "compose_word needs a nonempty word");
  for (int s : word.symbols) t = fam.map(s).eval(t);
  return t;
}

/// f_{y[m]}^{-1}: applies f_{y(1)}^{-1} first, f_{y(m)}^{-1} last.
inline double inverse_word_compose(const MapFamily& fam, const FiniteWord& w, double t) {
  if (w.empty()) fail(ErrorCode::OutOfRange, "inverse_word_compose needs a nonempty word");
  for (int s : w.symbols) t = fam.map(s).invert(t);
  return t;
}

/// Log-space word composition for chains that would underflow binary64.
inline double compose_word_log(const MapFamily& fam, const FiniteWord& word, double logt) {
  for (int s : word.symbols) logt = fam.map(s).eval_log(logt);
  return logt;
}

// ---------------------------------------------------------------------------
// Catalog

namespace detail {

inline IntervalUnionDomain unit_interval() {
  return IntervalUnionDomain({Interval(0.0, 1.0)});
}

inline PiecewiseMap single_piece(IntervalUnionDomain d, ElementaryExpr e, bool inv) {
  std::vector<MapPiece> ps;
  for (const Interval& iv : d.intervals) ps.push_back({iv, e});
  return PiecewiseMap(d, std::move(ps), inv);
}

}  // namespace detail

/// Named map families: "definicija" (sqrt / halving-with-doubling / square on
/// [0,1]), "exx1"/"suspension-G" (square and cube root on [0,1]), "exx2" (two
/// homeomorphisms of [0,1] u [2,3]), "exx3" (two homeomorphisms of [-1,1]),
/// "H" (x^3/2 and sqrt on [0,1], injective but not surjective branches),
/// "tent" (the tent map).
inline MapFamily catalog(const std::string& name) {
  using E = ElementaryExpr;
  if (name == "definicija") {
    IntervalUnionDomain d = detail::unit_interval();
    PiecewiseMap f1 = detail::single_piece(d, E::power(0.5), true);
    PiecewiseMap f2(d,
                    {{Interval(0.0, 2.0 / 3.0), E::affine(0.5, 0.0)},
                     {Interval(2.0 / 3.0, 1.0), E::affine(2.0, -1.0)}},
                    true);
    PiecewiseMap f3 = detail::single_piece(d, E::power(2.0), true);
    return MapFamily({f1, f2, f3});
  }
  if (name == "exx1" || name == "suspension-G") {
    IntervalUnionDomain d = detail::unit_interval();
    return MapFamily({detail::single_piece(d, E::power(2.0), true),
                      detail::single_piece(d, E::power(1.0 / 3.0), true)});
  }
  if (name == "exx2") {
    IntervalUnionDomain d({Interval(0.0, 1.0), Interval(2.0, 3.0)});
    PiecewiseMap f1(d,
                    {{Interval(0.0, 1.0), E::power(2.0)},
                     {Interval(2.0, 3.0), E::scaled_power(1.0, 1.0 / 3.0, 2.0)}},
                    true);
    PiecewiseMap f2(d,
                    {{Interval(0.0, 1.0), E::affine(1.0, 2.0)},
                     {Interval(2.0, 3.0), E::affine(1.0, -2.0)}},
                    true);
    return MapFamily({f1, f2});
  }
  if (name == "exx3") {
    IntervalUnionDomain d({Interval(-1.0, 1.0)});
    PiecewiseMap f1 = detail::single_piece(d, E::affine(-1.0, 0.0), true);
    PiecewiseMap f2(d,
                    {{Interval(-1.0, 0.0), E::power(1.0 / 3.0)},
                     {Interval(0.0, 1.0), E::power(2.0)}},
                    true);
    return MapFamily({f1, f2});
  }
  if (name == "H") {
    IntervalUnionDomain d = detail::unit_interval();
    // Branches are injective with elementary inverses on their images, but
    // x^3/2 is not surjective onto [0,1]; is_bijection() reports that.
    return MapFamily({detail::single_piece(d, E::scaled_power(0.5, 3.0, 0.0), true),
                      detail::single_piece(d, E::power(0.5), true)});
  }
  if (name == "tent") {
    IntervalUnionDomain d = detail::unit_interval();
    PiecewiseMap f(d,
                   {{Interval(0.0, 0.5), E::affine(2.0, 0.0)},
                    {Interval(0.5, 1.0), E::affine(-2.0, 2.0)}},
                   false);
    return MapFamily({f});
  }
  fail(ErrorCode::UnknownName, "unknown catalog name: " + name);
}

// ---------------------------------------------------------------------------
// JSON serialization

inline ElementaryExpr expr_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "affine")
    return ElementaryExpr::affine(j.at("a").get<double>(), j.at("b").get<double>());
  if (kind == "power") return ElementaryExpr::power(j.at("p").get<double>());
  if (kind == "scaled_power")
    return ElementaryExpr::scaled_power(j.at("c").get<double>(), j.at("p").get<double>(),
                                        j.at("s").get<double>());
  fail(ErrorCode::ParseError, "unknown expr kind: " + kind);
}

inline nlohmann::json expr_to_json(const ElementaryExpr& e) {
  switch (e.kind) {
    case ExprKind::Affine: return {{"kind", "affine"}, {"a", e.a}, {"b", e.b}};
    case ExprKind::Power: return {{"kind", "power"}, {"p", e.p}};
    case ExprKind::ScaledPower:
      return {{"kind", "scaled_power"}, {"c", e.c}, {"p", e.p}, {"s", e.s}};
  }
  fail(ErrorCode::ParseError, "unknown expr kind");
}

inline MapFamily family_from_json(const nlohmann::json& j) {
  try {
    std::vector<Interval> ivs;
    for (const auto& pair : j.at("domain"))
      ivs.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    IntervalUnionDomain domain(std::move(ivs));
    std::vector<PiecewiseMap> maps;
    for (const auto& br : j.at("branches")) {
      std::vector<MapPiece> pieces;
      for (const auto& pj : br.at("pieces")) {
        Interval iv(pj.at("interval").at(0).get<double>(),
                    pj.at("interval").at(1).get<double>());
        pieces.push_back({iv, expr_from_json(pj.at("expr"))});
      }
      maps.emplace_back(domain, std::move(pieces), br.at("invertible").get<bool>());
    }
    return MapFamily(std::move(maps));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, std::string("family JSON: ") + e.what());
  }
}

inline nlohmann::json family_to_json(const MapFamily& fam) {
  nlohmann::json j;
  j["domain"] = nlohmann::json::array();
  for (const Interval& iv : fam.domain().intervals) j["domain"].push_back({iv.a, iv.b});
  j["branches"] = nlohmann::json::array();
  for (int k = 1; k <= fam.size(); ++k) {
    const PiecewiseMap& m = fam.map(k);
    nlohmann::json br;
    br["invertible"] = m.invertible();
    br["pieces"] = nlohmann::json::array();
    for (const MapPiece& piece : m.pieces())
      br["pieces"].push_back({{"interval", {piece.interval.a, piece.interval.b}},
                              {"expr", expr_to_json(piece.expr)}});
    j["branches"].push_back(br);
  }
  return j;
}

}  // namespace fanlab

#endif  // FANLAB_MAPS_HPP_
