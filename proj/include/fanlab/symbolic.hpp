#ifndef FANLAB_SYMBOLIC_HPP_
#define FANLAB_SYMBOLIC_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fanlab/errors.hpp"

// Finite-alphabet words, truncated one- and two-sided symbol sequences, shift
// maps, concatenation and cylinder predicates.  Symbols are 1-based.

namespace fanlab {

struct Alphabet {
  int size = 1;  // symbols are 1..size

  explicit Alphabet(int n) : size(n) {
    if (n < 1) fail(ErrorCode::OutOfRange, "alphabet size must be >= 1");
  }
  bool contains(int s) const { return s >= 1 && s <= size; }
  friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

struct FiniteWord {
  Alphabet alphabet;
  std::vector<int> symbols;

  FiniteWord(Alphabet a, std::vector<int> syms)
      : alphabet(a), symbols(std::move(syms)) {
    for (int s : symbols)
      if (!alphabet.contains(s)) fail(ErrorCode::OutOfRange, "symbol outside alphabet");
  }

  std::size_t size() const { return symbols.size(); }
  bool empty() const { return symbols.empty(); }
  // 1-based coordinate access, matching sequence notation.
  int at(std::size_t i) const {
    if (i < 1 || i > symbols.size()) fail(ErrorCode::OutOfRange, "word coordinate");
    return symbols[i - 1];
  }
  friend bool operator==(const FiniteWord&, const FiniteWord&) = default;
};

/// One-sided infinite sequence represented as a finite prefix extended by a
/// constant tail symbol.
struct OneSidedWord {
  FiniteWord prefix;
  int tail_symbol;

  OneSidedWord(FiniteWord p, int tail) : prefix(std::move(p)), tail_symbol(tail) {
    if (!prefix.alphabet.contains(tail))
      fail(ErrorCode::OutOfRange, "tail symbol outside alphabet");
  }

  // Coordinate i >= 1 of the materialized sequence.
  int at(std::size_t i) const {
    if (i < 1) fail(ErrorCode::OutOfRange, "one-sided coordinate");
    return i <= prefix.size() ? prefix.symbols[i - 1] : tail_symbol;
  }
  friend bool operator==(const OneSidedWord&, const OneSidedWord&) = default;
};

/// Truncation of a two-sided sequence to an explicit index window [lo, hi]
/// with lo <= 0 < hi.  The basepoint convention puts the semicolon between
/// indices 0 and 1.
struct TwoSidedSymbolWindow {
  Alphabet alphabet;
  long lo = 0;
  long hi = 1;
  std::vector<int> symbols;  // indexed lo..hi

  TwoSidedSymbolWindow(Alphabet a, long lo_, long hi_, std::vector<int> syms)
      : alphabet(a), lo(lo_), hi(hi_), symbols(std::move(syms)) {
    if (!(lo <= 0 && 0 < hi)) fail(ErrorCode::OutOfRange, "window must satisfy lo <= 0 < hi");
    if (static_cast<long>(symbols.size()) != hi - lo + 1)
      fail(ErrorCode::OutOfRange, "window symbol count mismatch");
    for (int s : symbols)
      if (!alphabet.contains(s)) fail(ErrorCode::OutOfRange, "symbol outside alphabet");
  }

  int at(long i) const {
    if (i < lo || i > hi) fail(ErrorCode::OutOfRange, "window coordinate");
    return symbols[static_cast<std::size_t>(i - lo)];
  }
  friend bool operator==(const TwoSidedSymbolWindow&, const TwoSidedSymbolWindow&) = default;
};

enum class ShiftDirection { Forward, Backward };

/// Shift sigma_n: drops the first symbol of the materialized sequence.
inline OneSidedWord shift_one_sided(const OneSidedWord& w) {
  if (w.prefix.empty()) return w;  // constant tail is shift-invariant
  std::vector<int> rest(w.prefix.symbols.begin() + 1, w.prefix.symbols.end());
  return OneSidedWord(FiniteWord(w.prefix.alphabet, std::move(rest)), w.tail_symbol);
}

/// Shift tau_n on a window: content is preserved, only the basepoint moves.
/// Forward moves the old index-1 symbol to index 0 (window [lo-1, hi-1]);
/// backward is the exact inverse (window [lo+1, hi+1]).
inline TwoSidedSymbolWindow shift_two_sided(const TwoSidedSymbolWindow& w,
                                            ShiftDirection dir) {
  if (dir == ShiftDirection::Forward) {
    if (w.hi < 2)
      fail(ErrorCode::WindowTooShort, "forward shift needs hi >= 2");
    return TwoSidedSymbolWindow(w.alphabet, w.lo - 1, w.hi - 1, w.symbols);
  }
  return TwoSidedSymbolWindow(w.alphabet, w.lo + 1, w.hi + 1, w.symbols);
}

inline FiniteWord concat(const FiniteWord& left, const FiniteWord& right) {
  if (!(left.alphabet == right.alphabet))
    fail(ErrorCode::AlphabetMismatch, "concat of words over different alphabets");
  std::vector<int> syms = left.symbols;
  syms.insert(syms.end(), right.symbols.begin(), right.symbols.end());
  return FiniteWord(left.alphabet, std::move(syms));
}

inline OneSidedWord concat(const FiniteWord& left, const OneSidedWord& right) {
  return OneSidedWord(concat(left, right.prefix), right.tail_symbol);
}

/// y[m] = (y(m), y(m-1), ..., y(1)).
inline FiniteWord reverse_prefix(const FiniteWord& w, std::size_t m) {
  if (m < 1 || m > w.size()) fail(ErrorCode::OutOfRange, "reverse_prefix length");
  std::vector<int> syms(w.symbols.begin(), w.symbols.begin() + static_cast<long>(m));
  std::reverse(syms.begin(), syms.end());
  return FiniteWord(w.alphabet, std::move(syms));
}

inline FiniteWord reverse_prefix(const OneSidedWord& w, std::size_t m) {
  if (m < 1) fail(ErrorCode::OutOfRange, "reverse_prefix length");
  std::vector<int> syms(m);
  for (std::size_t i = 1; i <= m; ++i) syms[m - i] = w.at(i);
  return FiniteWord(w.prefix.alphabet, std::move(syms));
}

/// |x - y|_n < eps: first n coordinates agree and the geometric tail
/// sum_{k=n..inf} diam/2^k = diam * 2^{-(n-1)} is below eps.
template <class SeqA, class SeqB>
bool n_close(const SeqA& x, const SeqB& y, std::size_t n, double eps, double diam) {
  for (std::size_t k = 1; k <= n; ++k)
    if (x.at(k) != y.at(k)) return false;
  return diam * std::pow(2.0, -static_cast<double>(n - 1)) < eps;
}

/// All n^length words of the given length in lexicographic order.
inline std::vector<FiniteWord> enumerate_words(Alphabet alphabet, std::size_t length) {
  std::vector<FiniteWord> out;
  std::vector<int> cur(length, 1);
  for (;;) {
    out.push_back(FiniteWord(alphabet, cur));
    std::size_t i = length;
    while (i > 0) {
      if (cur[i - 1] < alphabet.size) {
        ++cur[i - 1];
        std::fill(cur.begin() + static_cast<long>(i), cur.end(), 1);
        break;
      }
      --i;
    }
    if (i == 0) break;
  }
  return out;
}

}  // namespace fanlab

#endif  // FANLAB_SYMBOLIC_HPP_
