#include <catch_amalgamated.hpp>

#include "pimsner/groupoid.hpp"

#include <set>
#include <utility>

using namespace pimsner;

namespace {

using SXi = SubshiftXi<Rational>;
using Bim = SubshiftBimodule<Rational>;
using GFun = GroupoidFun<Rational>;

Rational rat(long long n, long long d = 1) { return rational_from(n, d); }

// Words hold raw 0-based symbol bytes.
Word wd(std::initializer_list<int> syms) {
  Word w;
  for (int s : syms) w.push_back(static_cast<char>(s));
  return w;
}

// Value of a locally constant function at a symbolic point.
Rational eval_fun_at(const Bim& bim, const CylFun<Rational>& f, const SymbolicPoint& p) {
  Word head;
  for (int i = 0; i < f.depth; ++i) {
    auto s = detail::view_symbol(p, 0, i);
    REQUIRE(s.has_value());
    head.push_back(static_cast<char>(*s));
  }
  return f.coeff[bim.word_index(head)];
}

}  // namespace

TEST_CASE("symbolic points validate their admissibility") {
  const SFTMatrix gm = make_golden_mean_shift();

  CHECK_NOTHROW(periodic_point(gm, wd({}), wd({0, 1})));
  CHECK_NOTHROW(periodic_point(gm, wd({1, 0}), wd({0})));
  CHECK_NOTHROW(free_point(gm, wd({0, 1}), 3));

  // 1 -> 1 is forbidden: inside the period, at the wrap, and at the junction.
  CHECK_THROWS_AS(periodic_point(gm, wd({}), wd({1, 1})), std::invalid_argument);
  CHECK_THROWS_AS(periodic_point(gm, wd({}), wd({1})), std::invalid_argument);
  CHECK_THROWS_AS(periodic_point(gm, wd({0, 1}), wd({1, 0})), std::invalid_argument);
  CHECK_THROWS_AS(free_point(gm, wd({1, 1}), 0), std::invalid_argument);
  CHECK_THROWS_AS(Tail::repeating(Word()), std::invalid_argument);
}

TEST_CASE("shifting and cylinder membership are symbol-exact") {
  const SFTMatrix gm = make_golden_mean_shift();
  const SymbolicPoint x = periodic_point(gm, wd({1, 0}), wd({0, 1}));  // 10 0101...

  SymbolicPoint s1 = shift_point(x, 1);
  CHECK(s1.prefix == wd({0}));
  CHECK(point_equal(shift_point(x, 2), periodic_point(gm, wd({}), wd({0, 1}))) == Trilean::True);
  // Shifting into the tail rotates the period.
  CHECK(point_equal(shift_point(x, 3), periodic_point(gm, wd({}), wd({1, 0}))) == Trilean::True);

  CHECK(in_cylinder(x, wd({1, 0, 0, 1})) == Trilean::True);
  CHECK(in_cylinder(x, wd({1, 0, 1})) == Trilean::False);

  const SymbolicPoint f = free_point(gm, wd({0, 1}), 7);
  CHECK(in_cylinder(f, wd({0, 1})) == Trilean::True);
  CHECK(in_cylinder(f, wd({0, 0})) == Trilean::False);
  CHECK(in_cylinder(f, wd({0, 1, 0})) == Trilean::Undecided);
  CHECK_THROWS_AS(shift_point(f, 3), UndecidedError);

  // Distinct representations of the same sequence compare equal.
  CHECK(point_equal(periodic_point(gm, wd({0}), wd({0, 0})),
                    periodic_point(gm, wd({}), wd({0}))) == Trilean::True);
  CHECK(point_equal(periodic_point(gm, wd({}), wd({0})),
                    periodic_point(gm, wd({}), wd({0, 1}))) == Trilean::False);
  CHECK(point_equal(free_point(gm, wd({0}), 1), free_point(gm, wd({0}), 2)) ==
        Trilean::Undecided);
}

TEST_CASE("minimal shift depth of an arrow") {
  const SFTMatrix gm = make_golden_mean_shift();
  const SFTMatrix f2 = make_full_shift(2);

  // Identity arrow.
  const SymbolicPoint z = periodic_point(gm, wd({}), wd({0}));
  CHECK(kappa_A_eval(gm, make_arrow(gm, z, 0, z)) == 0);

  // Pure prepend: x = (prefix)z, y = z, lag = |prefix|.
  const SymbolicPoint xz = periodic_point(gm, wd({1, 0}), wd({0}));
  CHECK(kappa_A_eval(gm, make_arrow(gm, xz, 2, z)) == 0);

  // Shared free tail with differing first letters: one shift aligns them.
  const SymbolicPoint a = free_point(f2, wd({0, 1}), 5);
  const SymbolicPoint b = free_point(f2, wd({1, 1}), 5);
  CHECK(kappa_A_eval(f2, make_arrow(f2, a, 0, b)) == 1);

  // Mismatch above the floor: 01000... vs 10000... agree from position 2 on.
  const SymbolicPoint p = periodic_point(gm, wd({0, 1}), wd({0}));
  const SymbolicPoint q = periodic_point(gm, wd({1, 0}), wd({0}));
  CHECK(kappa_A_eval(gm, make_arrow(gm, p, 0, q)) == 2);

  // Negative lag starts the search at its floor.
  const SymbolicPoint y2 = periodic_point(gm, wd({0, 1}), wd({0}));
  CHECK(kappa_A_eval(gm, make_arrow(gm, z, -2, y2)) == 2);

  // Depth always dominates the floor.
  for (int n = -2; n <= 2; ++n)
    CHECK(kappa_A_eval(gm, make_arrow(gm, shift_point(y2, std::max(0, n)),
                                      n, shift_point(y2, std::max(0, -n)))) >= std::max(0, -n));

  // Not shift-tail equivalent at any depth.
  const SymbolicPoint alt = periodic_point(gm, wd({}), wd({0, 1}));
  CHECK_THROWS_AS(kappa_A_eval(gm, make_arrow(gm, z, 0, alt)), std::invalid_argument);

  // Distinct opaque tails can never be compared.
  CHECK_THROWS_AS(kappa_A_eval(f2, make_arrow(f2, free_point(f2, wd({0}), 1), 0,
                                              free_point(f2, wd({0}), 2))),
                  UndecidedError);
  // A shared opaque tail entered at misaligned positions is undecidable too.
  CHECK_THROWS_AS(kappa_A_eval(f2, make_arrow(f2, free_point(f2, wd({0, 0}), 4), 0,
                                              free_point(f2, wd({}), 4))),
                  UndecidedError);
}

TEST_CASE("pair-cylinder bases of the lag/depth level sets") {
  const SFTMatrix gm = make_golden_mean_shift();
  const SFTMatrix f2 = make_full_shift(2);

  CHECK(basis_Rnk(f2, 1, 0, 1).size() == 2);

  // Diagonal level set: one element per admissible word.
  for (int m = 1; m <= 4; ++m) CHECK(basis_Rnk(f2, 0, 0, m).size() == (1u << m));
  const std::size_t fib[] = {2, 3, 5, 8};
  for (int m = 1; m <= 4; ++m) CHECK(basis_Rnk(gm, 0, 0, m).size() == fib[m - 1]);

  // Lag 0, depth index 1, two symbols of refinement: the only common
  // follower of distinct letters is 0.
  const auto b01 = basis_Rnk(gm, 0, 1, 2);
  REQUIRE(b01.size() == 2);
  std::set<std::pair<Word, Word>> got;
  for (const auto& e : b01) got.insert({e.x, e.y});
  CHECK(got == std::set<std::pair<Word, Word>>{{wd({0, 0}), wd({1, 0})},
                                               {wd({1, 0}), wd({0, 0})}});

  // The minimality clause drops pairs whose heads end alike.
  const auto b11 = basis_Rnk(gm, 1, 1, 2);
  CHECK(b11.size() == 3);
  for (const auto& e : b11) CHECK(e.head_x().back() != e.head_y().back());

  CHECK_THROWS_AS(basis_Rnk(gm, 0, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(basis_Rnk(gm, 2, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(basis_Rnk(gm, -1, 0, 4), std::domain_error);
}

TEST_CASE("basis functions refine consistently one level deeper") {
  const SFTMatrix gm = make_golden_mean_shift();
  const SXi xi(gm);
  const Bim& bim = xi.module();

  for (auto [n, k] : std::vector<std::pair<int, int>>{{0, 1}, {1, 0}, {-1, 1}, {1, 1}}) {
    const int m = std::max(k, n + k) + 1;
    std::size_t refined_total = 0;
    for (const RBasisElement& e : basis_Rnk(gm, n, k, m)) {
      GFun f = rbasis_fun(bim, e);
      GFun g = refine_fun(bim, f, m + 1);
      // The refinement is the sum of exactly the next-depth basis functions
      // with the same heads, and it is the same module element.
      std::size_t children = 0;
      for (const RBasisElement& e2 : basis_Rnk(gm, n, k, m + 1)) {
        if (e2.head_x() != e.head_x() || e2.head_y() != e.head_y()) continue;
        if (e2.shared().substr(0, e.shared().size()) != e.shared()) continue;
        ++children;
        CHECK(g.terms.count(CkSym{e2.x, e2.y}) == 1);
      }
      CHECK(g.terms.size() == children);
      refined_total += children;
      CHECK(xi.equal(f.terms, g.terms));
      CHECK(fun_equal(bim, f, g));
    }
    // Next-depth elements descending from this cell's heads are a partition.
    std::size_t with_same_heads = 0;
    std::set<std::pair<Word, Word>> heads;
    for (const RBasisElement& e : basis_Rnk(gm, n, k, m)) heads.insert({e.head_x(), e.head_y()});
    for (const RBasisElement& e2 : basis_Rnk(gm, n, k, m + 1))
      if (heads.count({e2.head_x(), e2.head_y()})) ++with_same_heads;
    CHECK(refined_total == with_same_heads);
  }
}

TEST_CASE("convolution composes arrows and matches the operator product") {
  const SFTMatrix gm = make_golden_mean_shift();
  const SFTMatrix f2 = make_full_shift(2);
  const SXi xgm(gm), xf2(f2);
  const Bim &bgm = xgm.module(), &bf2 = xf2.module();

  // Depth discipline: operands must be refined to a common depth first.
  GFun creation = pair_indicator<Rational>(bf2, wd({0}), wd({}));
  GFun annihilation = pair_indicator<Rational>(bf2, wd({}), wd({0}));
  CHECK_THROWS_AS(convolve(bf2, creation, annihilation), std::invalid_argument);

  // Range projection pattern.
  GFun proj = convolve(bf2, creation, refine_fun(bf2, annihilation, 1));
  CHECK(fun_equal(bf2, proj, pair_indicator<Rational>(bf2, wd({0}), wd({0}))));

  // Reduction with a leftover membership restriction: the only continuation
  // of symbol 1 is 0.
  GFun co = refine_fun(bgm, pair_indicator<Rational>(bgm, wd({}), wd({1})), 1);
  GFun gen = pair_indicator<Rational>(bgm, wd({1}), wd({}));
  CHECK(fun_equal(bgm, convolve(bgm, co, gen),
                  pair_indicator<Rational>(bgm, wd({0}), wd({0}))));

  // The diagonal indicator is a convolution idempotent.
  std::vector<std::pair<CkSym, Rational>> diag_terms;
  for (const Word& w : bgm.words(2)) diag_terms.push_back({CkSym{w, w}, rat(1)});
  GFun diag = groupoid_fun<Rational>(bgm, diag_terms);
  CHECK(fun_equal(bgm, convolve(bgm, diag, diag), diag));

  GroupoidFun<double> ddiag;
  ddiag.depth = 2;
  SubshiftBimodule<double> bd(gm);
  for (const Word& w : bd.words(2)) ddiag.terms[CkSym{w, w}] = 1.0;
  CHECK(fun_equal(bd, convolve(bd, ddiag, ddiag), ddiag));

  // Exhaustive cross-check against the operator product: both composition
  // rules must produce the same element for every short generator pair.
  for (const SXi* xi : {&xgm, &xf2}) {
    const Bim& bim = xi->module();
    std::vector<CkSym> gens;
    for (int lu = 0; lu <= 2; ++lu)
      for (int lv = 0; lv <= 2; ++lv)
        for (const Word& u : bim.words(lu))
          for (const Word& v : bim.words(lv)) gens.push_back(CkSym{u, v});
    std::size_t mismatches = 0;
    std::string first;
    for (const CkSym& s1 : gens)
      for (const CkSym& s2 : gens) {
        GFun a = groupoid_fun<Rational>(bim, {{s1, rat(1)}}, 2);
        GFun b = groupoid_fun<Rational>(bim, {{s2, rat(1)}}, 2);
        const auto got = convolve(bim, a, b).terms;
        const auto want = xi->mult(xi->single(s1), xi->single(s2));
        if (!xi->equal(got, want) && ++mismatches == 1)
          first = "(" + word_str(s1.x) + "," + word_str(s1.y) + ") * (" + word_str(s2.x) +
                  "," + word_str(s2.y) + ")";
      }
    INFO("first mismatching pair: " << first);
    CHECK(mismatches == 0);
  }

  // Linear combinations with exact coefficients.
  GFun fa = groupoid_fun<Rational>(
      bgm, {{CkSym{wd({0}), Word()}, rat(2)}, {CkSym{wd({1}), Word()}, rat(-1, 3)}}, 1);
  GFun fb = groupoid_fun<Rational>(bgm, {{CkSym{Word(), wd({0})}, rat(1, 2)}}, 1);
  const auto got = convolve(bgm, fa, fb).terms;
  const auto want =
      xgm.mult(xgm.add(xgm.scale(xgm.generator(0), rat(2)),
                       xgm.scale(xgm.generator(1), rat(-1, 3))),
               xgm.scale(xgm.star(xgm.generator(0)), rat(1, 2)));
  CHECK(xgm.equal(got, want));
}

TEST_CASE("diagonal restriction is the conditional expectation") {
  const SFTMatrix gm = make_golden_mean_shift();
  const SXi xi(gm);
  const Bim& bim = xi.module();

  // Off-diagonal lags restrict to zero.
  GFun off = pair_indicator<Rational>(bim, wd({0, 1}), wd({0}));
  CHECK(bim.is_zero(diagonal_restriction(bim, off)));

  // Distinct legs of equal length have disjoint diagonal support.
  GFun cross = pair_indicator<Rational>(bim, wd({0}), wd({1}));
  CHECK(bim.is_zero(diagonal_restriction(bim, cross)));

  // The full diagonal indicator restricts to the constant one.
  std::vector<std::pair<CkSym, Rational>> diag_terms;
  for (const Word& w : bim.words(3)) diag_terms.push_back({CkSym{w, w}, rat(1)});
  GFun diag = groupoid_fun<Rational>(bim, diag_terms);
  CHECK(bim.equal(diagonal_restriction(bim, diag), bim.unit(0)));

  // Agreement with the module-side expectation on all short pairs, before
  // and after refinement.
  for (int lu = 0; lu <= 3; ++lu)
    for (int lv = 0; lv <= 3; ++lv)
      for (const Word& u : bim.words(lu))
        for (const Word& v : bim.words(lv)) {
          GFun f = groupoid_fun<Rational>(bim, {{CkSym{u, v}, rat(1)}});
          const auto expect = xi.phi_infty(xi.single(CkSym{u, v}));
          CHECK(bim.equal(diagonal_restriction(bim, f), expect));
          GFun f4 = refine_fun(bim, f, 4);
          CHECK(bim.equal(diagonal_restriction(bim, f4), expect));
        }

  // Pointwise: the restriction evaluates f on the identity arrow.
  GFun combo = groupoid_fun<Rational>(
      bim, {{CkSym{wd({0, 1}), wd({0, 1})}, rat(3)},
            {CkSym{wd({0, 0}), wd({0, 0})}, rat(-1, 2)},
            {CkSym{wd({1, 0}), wd({0})}, rat(5)}});
  for (const SymbolicPoint& x : {periodic_point(gm, wd({}), wd({0, 1})),
                                 periodic_point(gm, wd({}), wd({0}))}) {
    const Rational lhs = eval_fun_at(bim, diagonal_restriction(bim, combo), x);
    const Rational rhs = evaluate_at(bim, combo, make_arrow(gm, x, 0, x));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("pointwise evaluation detects membership exactly") {
  const SFTMatrix gm = make_golden_mean_shift();
  const SXi xi(gm);
  const Bim& bim = xi.module();

  // An arrow inside the support evaluates to one, arrows elsewhere to zero.
  GFun f = pair_indicator<Rational>(bim, wd({1, 0}), wd({0}));  // lag 1
  const SymbolicPoint tail = periodic_point(gm, wd({}), wd({0}));
  const SymbolicPoint src = periodic_point(gm, wd({1}), wd({0}));
  CHECK(evaluate_at(bim, f, make_arrow(gm, src, 1, tail)) == rat(1));
  const SymbolicPoint other = periodic_point(gm, wd({0, 1}), wd({0}));
  CHECK(evaluate_at(bim, f, make_arrow(gm, other, 1, shift_point(other, 1))) == rat(0));
  // Lag mismatch short-circuits to zero.
  CHECK(evaluate_at(bim, f, make_arrow(gm, tail, 0, tail)) == rat(0));

  // Membership against an opaque tail is refused, not guessed.
  const SFTMatrix f2 = make_full_shift(2);
  SubshiftBimodule<Rational> bf2(f2);
  GFun g = pair_indicator<Rational>(bf2, wd({0, 1}), wd({0, 1}));
  CHECK_THROWS_AS(evaluate_at(bf2, g, make_arrow(f2, free_point(f2, wd({0}), 1), 0,
                                                 free_point(f2, wd({0}), 1))),
                  UndecidedError);
}

TEST_CASE("localization at a point lists the incoming basis arrows") {
  const SFTMatrix gm = make_golden_mean_shift();
  const SymbolicPoint x = periodic_point(gm, wd({}), wd({0, 1}));  // 0101...

  const auto fiber = localize_at_point(gm, x, -1, 1, 1, 4);
  REQUIRE(fiber.size() == 4);

  std::map<std::pair<int, int>, std::size_t> counts;
  for (const auto& e : fiber) ++counts[{e.n, e.k}];
  CHECK(counts == std::map<std::pair<int, int>, std::size_t>{
                      {{-1, 1}, 1}, {{0, 0}, 1}, {{1, 0}, 2}});

  for (const auto& e : fiber) {
    if (e.n == -1) {
      CHECK(e.x == wd({1, 0, 1, 0}));
      CHECK(e.y == wd({0, 1, 0, 1, 0}));
      CHECK(point_equal(e.source, shift_point(x, 1)) == Trilean::True);
    }
    if (e.n == 0) {
      // The diagonal element is always present and its arrow is the identity.
      CHECK(e.x == e.y);
      CHECK(point_equal(e.source, x) == Trilean::True);
    }
  }
  std::set<Word> lag1;
  for (const auto& e : fiber)
    if (e.n == 1) lag1.insert(e.x);
  CHECK(lag1 == std::set<Word>{wd({0, 0, 1, 0}), wd({1, 0, 1, 0})});

  // Localized eigenvalues: on a full shift every occupied cell of the window
  // appears in the fiber, so the weight spectra agree as sets.
  const SFTMatrix f2 = make_full_shift(2);
  const SXi xf2(f2);
  const PsiFunction psi = psi_default();
  const SymbolicPoint zero = periodic_point(f2, wd({}), wd({0}));
  const auto fiber2 = localize_at_point(f2, zero, -2, 2, 2, 4);
  std::set<Rational> fiber_spec, module_spec;
  for (const auto& e : fiber2) fiber_spec.insert(psi(e.n, e.k));
  for (int n = -2; n <= 2; ++n)
    for (int k = std::max(0, -n); k <= 2; ++k)
      if (cell_rank(xf2, n, k) > 0) module_spec.insert(psi(n, k));
  CHECK(fiber_spec == module_spec);

  // Undecidable membership is an error, and so is a bad window.
  CHECK_THROWS_AS(localize_at_point(f2, free_point(f2, wd({0, 1}), 9), -1, 1, 1, 4),
                  UndecidedError);
  CHECK_THROWS_AS(localize_at_point(gm, x, 1, -1, 1, 4), std::invalid_argument);
  CHECK_THROWS_AS(localize_at_point(gm, x, -1, 1, 1, 1), std::invalid_argument);
}

TEST_CASE("the two pictures agree across the comparison window") {
  for (const SFTMatrix& m : {make_golden_mean_shift(), make_full_shift(2)}) {
    const SXi xi(m);
    const ModelComparison rep = compare_models(xi, -2, 2, 2, 4);
    INFO(rep.failure);
    CHECK(rep.pass);
    CHECK(rep.failure.empty());
    CHECK(rep.basis_elements > 0);
    CHECK(rep.cells.size() == 12);
    CHECK(rep.kore_checks == rep.basis_elements);
    CHECK(rep.point_checks == rep.basis_elements);
    CHECK(rep.rank_checks == rep.cells.size());
    CHECK(rep.projector_checks == rep.basis_elements * rep.cells.size());
    for (const auto& c : rep.cells) CHECK(c.count > 0);
  }
}
