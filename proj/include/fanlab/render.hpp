#ifndef FANLAB_RENDER_HPP_
#define FANLAB_RENDER_HPP_

#include <cstdio>
#include <string>
#include <vector>

#include "fanlab/errors.hpp"
#include "fanlab/fans.hpp"
#include "fanlab/mahavier.hpp"
#include "fanlab/maps.hpp"

// Deterministic SVG figure output.  All geometry lives in the viewBox
// [0,1] x [-1,0]; numbers are printed with fixed precision so identical
// inputs produce byte-identical files.

namespace fanlab {

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace detail

/// One <polyline> per entry, emitted in input order.
inline std::string svg_polylines(
    const std::vector<std::vector<std::pair<double, double>>>& lines) {
  std::string out =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 -1 1 1\">\n";
  for (const auto& line : lines) {
    out += "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"0.002\" points=\"";
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i) out += ' ';
      out += detail::fmt(line[i].first) + "," + detail::fmt(line[i].second);
    }
    out += "\"/>\n";
  }
  out += "</svg>\n";
  return out;
}

inline std::string svg_cantor(int depth, int samples_per_leg = 2) {
  std::vector<std::vector<std::pair<double, double>>> lines;
  for (const PlanarLeg& leg : embed_cantor_fan(depth, samples_per_leg))
    lines.push_back(leg.points);
  return svg_polylines(lines);
}

/// Lelek figure: for every pair of backward/forward branch words of the given
/// depth, the window with a literal 1 at index -depth is built, and its leg
/// segment from the apex to (t * c, -t) is drawn (t = value at index 1, c the
/// ternary direction of the forward word).
inline std::string svg_lelek(int depth, const ClosedRelation& H) {
  if (depth < 1) fail(ErrorCode::OutOfRange, "depth >= 1 required");
  Alphabet ab = H.branches().alphabet();
  std::vector<std::vector<std::pair<double, double>>> lines;
  for (const FiniteWord& back : enumerate_words(ab, static_cast<std::size_t>(depth)))
    for (const FiniteWord& fwd : enumerate_words(ab, static_cast<std::size_t>(depth))) {
      long lo = -depth, hi = depth;
      std::vector<double> vals(static_cast<std::size_t>(hi - lo + 1));
      std::vector<int> ch(static_cast<std::size_t>(hi - lo));
      vals[0] = 1.0;
      for (long i = 0; i < depth; ++i) ch[static_cast<std::size_t>(i)] = back.at(i + 1);
      for (long i = 0; i < depth; ++i)
        ch[static_cast<std::size_t>(depth + i)] = fwd.at(i + 1);
      for (std::size_t i = 1; i < vals.size(); ++i)
        vals[i] = H.branches().map(ch[i - 1]).eval(vals[i - 1]);
      LelekWindowPoint p(TwoSidedMahavierWindow(H, lo, hi, vals, ch));
      auto pts = embed_lelek({p});
      lines.push_back({{0.0, 0.0}, pts.front()});
    }
  return svg_polylines(lines);
}

/// Branch graphs of a family, normalized into the viewBox: x runs over the
/// domain extent, y = -(value normalized the same way).
inline std::string svg_relation(const MapFamily& fam, int samples_per_piece = 256) {
  const double lo = fam.domain().lo(), span = fam.domain().hi() - fam.domain().lo();
  std::vector<std::vector<std::pair<double, double>>> lines;
  for (int k = 1; k <= fam.size(); ++k)
    for (const MapPiece& piece : fam.map(k).pieces()) {
      std::vector<std::pair<double, double>> line;
      for (int s = 0; s <= samples_per_piece; ++s) {
        double t = piece.interval.a +
                   (piece.interval.b - piece.interval.a) * s / samples_per_piece;
        double v = fam.map(k).eval(t);
        line.emplace_back((t - lo) / span, -((v - lo) / span));
      }
      lines.push_back(std::move(line));
    }
  return svg_polylines(lines);
}

}  // namespace fanlab

#endif  // FANLAB_RENDER_HPP_
