#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "fanlab/maps.hpp"

using namespace fanlab;

TEST_CASE("catalog evaluation at hand-computed points") {
  MapFamily def = catalog("definicija");
  CHECK(def.map(1).eval(0.25) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(def.map(2).eval(2.0 / 3.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(def.map(2).eval(0.8) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(def.map(3).eval(0.5) == doctest::Approx(0.25).epsilon(1e-12));

  MapFamily tent = catalog("tent");
  CHECK(tent.map(1).eval(0.5) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(tent.map(1).eval(0.75) == doctest::Approx(0.5).epsilon(1e-12));

  MapFamily h = catalog("H");
  CHECK(h.map(1).eval(1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(h.map(2).eval(0.25) == doctest::Approx(0.5).epsilon(1e-12));

  MapFamily e3 = catalog("exx3");
  CHECK(e3.map(1).eval(0.7) == doctest::Approx(-0.7).epsilon(1e-12));
  CHECK(e3.map(2).eval(-0.125) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(e3.map(2).eval(0.5) == doctest::Approx(0.25).epsilon(1e-12));

  MapFamily e2 = catalog("exx2");
  CHECK(e2.map(2).eval(0.3) == doctest::Approx(2.3).epsilon(1e-12));
  CHECK(e2.map(1).eval(2.125) == doctest::Approx(2.5).epsilon(1e-12));

  CHECK_THROWS_AS(catalog("nonexistent"), Error);
}

TEST_CASE("evaluation outside the domain fails") {
  MapFamily def = catalog("definicija");
  CHECK_THROWS_AS(def.map(1).eval(1.5), Error);
  MapFamily e2 = catalog("exx2");
  CHECK_THROWS_AS(e2.map(1).eval(1.5), Error);  // the gap of [0,1] u [2,3]
}

TEST_CASE("inversion at hand-computed points") {
  MapFamily def = catalog("definicija");
  CHECK(def.map(1).invert(0.5) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(def.map(2).invert(0.25) == doctest::Approx(0.5).epsilon(1e-12));

  MapFamily h = catalog("H");
  CHECK(h.map(1).invert(1.0 / 16.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(h.map(2).invert(0.5) == doctest::Approx(0.25).epsilon(1e-12));
  // x^3/2 maps [0,1] onto [0,1/2]; values above 1/2 have no preimage.
  CHECK_THROWS_AS(h.map(1).invert(0.75), Error);

  MapFamily e3 = catalog("exx3");
  CHECK(e3.map(1).invert(0.7) == doctest::Approx(-0.7).epsilon(1e-12));

  MapFamily tent = catalog("tent");
  CHECK_THROWS_AS(tent.map(1).invert(0.5), Error);
}

TEST_CASE("inversion round-trips on sampled grids") {
  for (const char* name : {"definicija", "exx1", "exx2", "exx3", "H"}) {
    MapFamily fam = catalog(name);
    for (int k = 1; k <= fam.size(); ++k) {
      const PiecewiseMap& m = fam.map(k);
      for (const Interval& iv : fam.domain().intervals)
        for (int i = 0; i <= 40; ++i) {
          double t = iv.a + (iv.b - iv.a) * i / 40.0;
          double v = m.eval(t);
          CHECK(m.invert(v) == doctest::Approx(t).epsilon(1e-7));
        }
    }
  }
}

TEST_CASE("bijection detection") {
  MapFamily h = catalog("H");
  CHECK_FALSE(h.map(1).is_bijection());  // image [0,1/2] misses (1/2,1]
  CHECK(h.map(2).is_bijection());
  MapFamily def = catalog("definicija");
  for (int k = 1; k <= 3; ++k) CHECK(def.map(k).is_bijection());
  MapFamily e3 = catalog("exx3");
  for (int k = 1; k <= 2; ++k) CHECK(e3.map(k).is_bijection());
  CHECK_FALSE(catalog("tent").map(1).is_bijection());
}

TEST_CASE("word composition") {
  MapFamily def = catalog("definicija");
  FiniteWord w(def.alphabet(), {1, 2});
  // sqrt then halving: 0.25 -> 0.5 -> 0.25.
  CHECK(compose_word(def, w, 0.25) == doctest::Approx(0.25).epsilon(1e-12));

  MapFamily h = catalog("H");
  // cubing-halving then sqrt from 1: 1 -> 1/2 -> sqrt(1/2).
  CHECK(compose_word(h, FiniteWord(h.alphabet(), {1, 2}), 1.0) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  CHECK_THROWS_AS(compose_word(def, FiniteWord(def.alphabet(), {}), 0.5), Error);
}

TEST_CASE("inverse word composition") {
  MapFamily def = catalog("definicija");
  CHECK(inverse_word_compose(def, FiniteWord(def.alphabet(), {1}), 0.5) ==
        doctest::Approx(0.25).epsilon(1e-12));
  MapFamily e3 = catalog("exx3");
  // Two negations cancel: f1^{-1} o f1^{-1} = id.
  CHECK(inverse_word_compose(e3, FiniteWord(e3.alphabet(), {1, 1}), 0.3) ==
        doctest::Approx(0.3).epsilon(1e-12));
  // Inverse word composition undoes the reversed forward composition.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ut(0.05, 0.95);
  for (int trial = 0; trial < 50; ++trial) {
    double t = ut(rng);
    FiniteWord fwd(def.alphabet(), {static_cast<int>(rng() % 3) + 1,
                                    static_cast<int>(rng() % 3) + 1,
                                    static_cast<int>(rng() % 3) + 1});
    double v = compose_word(def, fwd, t);
    FiniteWord back = reverse_prefix(fwd, fwd.size());
    CHECK(inverse_word_compose(def, back, v) == doctest::Approx(t).epsilon(1e-7));
  }
}

TEST_CASE("log-space evaluation agrees with direct evaluation") {
  MapFamily def = catalog("definicija");
  for (double t : {1e-3, 0.01, 0.1, 0.3, 0.6}) {
    for (int k : {1, 3})
      CHECK(def.map(k).eval_log(std::log(t)) ==
            doctest::Approx(std::log(def.map(k).eval(t))).epsilon(1e-12));
    // Halving branch is log-linear only on [0, 2/3].
    CHECK(def.map(2).eval_log(std::log(t)) ==
          doctest::Approx(std::log(def.map(2).eval(t))).epsilon(1e-12));
  }
  CHECK_THROWS_AS(def.map(2).eval_log(std::log(0.9)), Error);  // 2t-1 piece
  // Underflowed arguments still work where the lead piece is log-linear.
  double tiny = -800.0;  // exp(tiny) underflows to 0
  CHECK(def.map(1).eval_log(tiny) == doctest::Approx(0.5 * tiny).epsilon(1e-12));
  CHECK(compose_word_log(def, FiniteWord(def.alphabet(), {3, 3}), tiny) ==
        doctest::Approx(4.0 * tiny).epsilon(1e-12));
}

TEST_CASE("elementary expression inverses") {
  ElementaryExpr a = ElementaryExpr::affine(2.0, -1.0);
  CHECK(a.inverse().eval(a.eval(0.7)) == doctest::Approx(0.7).epsilon(1e-12));
  ElementaryExpr p = ElementaryExpr::power(1.0 / 3.0);
  CHECK(p.inverse().eval(p.eval(-0.4)) == doctest::Approx(-0.4).epsilon(1e-12));
  ElementaryExpr s = ElementaryExpr::scaled_power(0.5, 3.0, 0.25);
  CHECK(s.inverse().eval(s.eval(0.9)) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK_THROWS_AS(ElementaryExpr::affine(0.0, 1.0).inverse(), Error);
}

TEST_CASE("family construction rejects mismatched domains") {
  IntervalUnionDomain d01({Interval(0.0, 1.0)});
  IntervalUnionDomain d02({Interval(0.0, 2.0)});
  PiecewiseMap m1 = detail::single_piece(d01, ElementaryExpr::power(2.0), true);
  PiecewiseMap m2 = detail::single_piece(d02, ElementaryExpr::power(2.0), true);
  CHECK_THROWS_AS(MapFamily({m1, m2}), Error);
  // Pieces must cover the domain and agree at breakpoints.
  CHECK_THROWS_AS(PiecewiseMap(d01, {{Interval(0.0, 0.5), ElementaryExpr::power(1.0)}},
                               true),
                  Error);
  CHECK_THROWS_AS(PiecewiseMap(d01,
                               {{Interval(0.0, 0.5), ElementaryExpr::affine(1.0, 0.0)},
                                {Interval(0.5, 1.0), ElementaryExpr::affine(1.0, 0.25)}},
                               true),
                  Error);
}

TEST_CASE("JSON round trip preserves family behavior") {
  for (const char* name : {"definicija", "exx2", "exx3", "H", "tent"}) {
    MapFamily fam = catalog(name);
    MapFamily back = family_from_json(family_to_json(fam));
    REQUIRE(back.size() == fam.size());
    for (int k = 1; k <= fam.size(); ++k)
      for (const Interval& iv : fam.domain().intervals)
        for (int i = 0; i <= 32; ++i) {
          double t = iv.a + (iv.b - iv.a) * i / 32.0;
          CHECK(back.map(k).eval(t) == fam.map(k).eval(t));
        }
  }
  CHECK_THROWS_AS(family_from_json(nlohmann::json{{"domain", 3}}), Error);
}
