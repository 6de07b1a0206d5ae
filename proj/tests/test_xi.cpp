#include <catch_amalgamated.hpp>

#include "pimsner/gram.hpp"
#include "pimsner/xi.hpp"

#include <random>

using namespace pimsner;

namespace {

using GXi = GraphXi<Rational>;
using SXi = SubshiftXi<Rational>;

Rational rat(long long n, long long d = 1) { return rational_from(n, d); }

// random vector supported on the degree-n symbols with |nu| <= kmax
template <class Xi>
typename Xi::Vec random_graded(const Xi& xi, int n, int kmax, std::mt19937& rng) {
  typename Xi::Vec v;
  std::uniform_int_distribution<int> coeff(-3, 3);
  for (int k = 0; k <= kmax; ++k) {
    if (n + k < 0) continue;
    for (const auto& s : xi.spanning_syms(n, k)) Xi::add_term(v, s, rat(coeff(rng)));
  }
  return v;
}

template <class Xi>
typename Xi::Vec random_mixed(const Xi& xi, std::mt19937& rng) {
  typename Xi::Vec v;
  for (int n = -1; n <= 1; ++n) {
    auto g = random_graded(xi, n, 1, rng);
    v = xi.add(v, g);
  }
  return v;
}

}  // namespace

TEST_CASE("graph symbols: creation/annihilation product rules") {
  GXi xi(make_full_graph(2));
  auto s0 = xi.generator(0), s1 = xi.generator(1);

  // S_e^* S_f = delta_{ef} P_{s(e)}
  REQUIRE(xi.mult(xi.star(s0), s0) == xi.vertex_projection(0));
  REQUIRE(xi.mult(xi.star(s0), s1).empty());

  // vertex projections absorb matching ranges: P_v S_e = [r(e)=v] S_e
  REQUIRE(xi.mult(xi.vertex_projection(0), s0) == s0);

  // S_e S_e^* is the range projection symbol W_{e,e}
  Path e0{0, {0}}, e1{0, {1}};
  REQUIRE(xi.mult(s0, xi.star(s0)) == xi.single(xi.sym(e0, e0)));

  // a longer contraction: W_{e0,e0} . W_{e0e0, e0} = W_{e0e0, e0}
  Path e00{0, {0, 0}};
  auto w1 = xi.single(xi.sym(e0, e0));
  auto w2 = xi.single(xi.sym(e00, e0));
  REQUIRE(xi.mult(w1, w2) == w2);

  // unit really is the identity
  auto u = xi.unit();
  auto x = xi.add(w2, xi.scale(s1, rat(3)));
  REQUIRE(xi.mult(u, x) == x);
  REQUIRE(xi.mult(x, u) == x);

  // star is an involutive antihomomorphism (formal identity)
  std::mt19937 rng(20260816u);
  auto a = random_mixed(xi, rng), b = random_mixed(xi, rng), c = random_mixed(xi, rng);
  REQUIRE(xi.star(xi.star(a)) == a);
  REQUIRE(xi.star(xi.mult(a, b)) == xi.mult(xi.star(b), xi.star(a)));
  REQUIRE(xi.mult(xi.mult(a, b), c) == xi.mult(a, xi.mult(b, c)));
}

TEST_CASE("graph symbols: expectation weights and Fock isometry") {
  GXi xi(make_full_graph(2));
  const Graph& g = xi.graph();
  GraphBimodule<Rational> bim(make_full_graph(2));

  // Phi of a diagonal symbol carries the limit weight of its path
  Path e0{0, {0}};
  auto a = xi.phi_infty(xi.single(xi.sym(e0, e0)));
  REQUIRE(a.c[0] == rat(1, 2));

  // creation vectors are a module isometry: (W_x W_u^* | W_y W_u^*) = (x|y)
  std::mt19937 rng(7u);
  std::uniform_int_distribution<int> coeff(-3, 3);
  auto unit_pv = bim.tensor_frame(bim.canonical_frame(), 0).at(0);
  for (int deg = 1; deg <= 3; ++deg) {
    PathVector<Rational> x(deg), y(deg);
    for (const auto& p : enumerate_paths(g, deg)) {
      x.add_term(p, rat(coeff(rng)));
      y.add_term(p, rat(coeff(rng)));
    }
    auto wx = xi.make_W(x, unit_pv), wy = xi.make_W(y, unit_pv);
    REQUIRE(xi.xi_inner(wx, wy).c == bim.right_inner(x, y).c);
  }
}

TEST_CASE("graph symbols: the defining relation is a null vector") {
  auto check_relation = [](const Graph& g, const Path& mu, const Path& nu) {
    GXi xi(g);
    auto r = xi.single(xi.sym(mu, nu));
    for (int e : g.edges_out_of(source_of(g, mu))) {
      auto mue = concat(g, mu, Path{g.edge(e).r, {e}});
      auto nue = concat(g, nu, Path{g.edge(e).r, {e}});
      r = xi.sub(r, xi.single(xi.sym(*mue, *nue)));
    }
    REQUIRE(xi.is_zero(r));
    REQUIRE_FALSE(xi.is_zero(xi.single(xi.sym(mu, nu))));
  };

  Graph o2 = make_full_graph(2);
  check_relation(o2, Path{0, {}}, Path{0, {}});
  check_relation(o2, Path{0, {0, 1}}, Path{0, {1}});

  // non-regular graph with exact spectral data: [[2,2],[1,1]]
  Graph skew = Graph::from_matrix({{2, 2}, {1, 1}});
  check_relation(skew, Path{0, {}}, Path{0, {}});
  check_relation(skew, Path{1, {4}}, Path{1, {4}});

  // primitive irrational-eigenvalue graph in float mode
  GraphXi<double> xf(make_golden_mean_graph());
  const Graph& gm = xf.graph();
  auto r = xf.single(xf.sym(Path{0, {0}}, Path{0, {0}}));
  for (int e : gm.edges_out_of(0)) {
    auto ext = Path{gm.edge(e).r, {e}};
    r = xf.sub(r, xf.single(xf.sym(*concat(gm, Path{0, {0}}, ext), *concat(gm, Path{0, {0}}, ext))));
  }
  // float spectral data is accurate to ~1e-10 in the inner product, so the
  // norm (its square root) is only reliable to ~1e-5; observed ~1e-8
  REQUIRE(xf.norm(r) <= 1e-6);
}

TEST_CASE("graph symbols: closed-form grading projections") {
  GXi xi(make_full_graph(2));
  Path v{0, {}}, e0{0, {0}}, e1{0, {1}}, e00{0, {0, 0}};

  // hand-checked values
  auto q00 = xi.apply_Qnk(xi.single(xi.sym(e0, e0)), 0, 0);
  REQUIRE(q00 == xi.scale(xi.single(xi.sym(v, v)), rat(1, 2)));

  auto q10 = xi.apply_Qnk(xi.single(xi.sym(e00, e0)), 1, 0);
  REQUIRE(q10 == xi.scale(xi.single(xi.sym(e0, v)), rat(1, 2)));

  REQUIRE(xi.apply_Qnk(xi.single(xi.sym(e00, e0)), 1, 1) == xi.single(xi.sym(e00, e0)));
  REQUIRE(xi.apply_Qnk(xi.single(xi.sym(e0, e1)), 0, 0).empty());
  REQUIRE(xi.apply_Qnk(xi.single(xi.sym(e0, e1)), 0, 1) == xi.single(xi.sym(e0, e1)));

  // a cell vector reproduces itself under its own projection (formally)
  auto h = xi.sub(xi.scale(xi.single(xi.sym(e00, e0)), rat(2)), xi.single(xi.sym(e0, v)));
  REQUIRE(xi.apply_Pnk(h, 1, 1) == h);
  REQUIRE(xi.apply_Pnk(xi.single(xi.sym(e0, v)), 1, 0) == xi.single(xi.sym(e0, v)));

  REQUIRE_THROWS_AS(xi.apply_Pnk(h, 1, -1), std::domain_error);
  REQUIRE_THROWS_AS(xi.apply_Pnk(h, -1, 0), std::domain_error);
}

TEST_CASE("graph symbols: projections are idempotent, self-adjoint, ordered") {
  GXi xi(make_full_graph(2));
  std::mt19937 rng(11u);

  for (int n : {-1, 0, 1, 2}) {
    auto x = random_graded(xi, n, 2, rng);
    auto y = random_graded(xi, n, 2, rng);
    const int floor_k = std::max(0, -n);
    for (int k = floor_k; k <= 2; ++k) {
      auto qx = xi.apply_Qnk(x, n, k);
      // idempotent and self-adjoint for the module inner product
      REQUIRE(xi.equal(xi.apply_Qnk(qx, n, k), qx));
      REQUIRE(xi.xi_inner(qx, y).c == xi.xi_inner(x, xi.apply_Qnk(y, n, k)).c);
      // nested: the smaller projection absorbs
      if (k > floor_k) {
        auto qsmall = xi.apply_Qnk(x, n, k - 1);
        REQUIRE(xi.equal(xi.apply_Qnk(qsmall, n, k), qsmall));
      }
    }
    // the cell pieces telescope back to the largest projection
    typename GXi::Vec acc;
    for (int k = floor_k; k <= 2; ++k) acc = xi.add(acc, xi.apply_Pnk(x, n, k));
    REQUIRE(acc == xi.apply_Qnk(x, n, 2));
    // cells at different secondary index are orthogonal
    auto p1 = xi.apply_Pnk(x, n, floor_k + 1);
    auto p0 = xi.apply_Pnk(y, n, floor_k);
    REQUIRE(xi.xi_inner(p1, p0).is_zero(0.0));
  }
}

TEST_CASE("graph symbols: frame rank-one sums realise the projections") {
  std::mt19937 rng(20260816u);

  auto run = [&rng](Graph g) {
    GXi xi(g);
    GraphBimodule<Rational> bim(std::move(g));
    auto canonical = bim.canonical_frame();
    auto rotated = bim.rotated_frame();
    for (int n : {-1, 0, 1}) {
      auto x = random_graded(xi, n, 2, rng);
      for (int k = std::max(0, -n); k <= 2; ++k) {
        auto closed = xi.apply_Qnk(x, n, k);
        auto via_canonical = xi.qnk_rank_one_sum(x, n, k, bim.tensor_frame(canonical, n + k),
                                                 bim.tensor_frame(canonical, k));
        auto via_rotated = xi.qnk_rank_one_sum(x, n, k, bim.tensor_frame(rotated, n + k),
                                               bim.tensor_frame(rotated, k));
        REQUIRE(xi.equal(closed, via_canonical));
        REQUIRE(xi.equal(closed, via_rotated));
      }
    }
  };

  run(make_full_graph(2));
  run(make_cycle_graph(3));

  // without the central decomposition the frame realisation must refuse
  GXi skew(Graph::from_matrix({{2, 2}, {1, 1}}));
  GraphBimodule<Rational> skew_bim(Graph::from_matrix({{2, 2}, {1, 1}}));
  auto x = skew.generator(0);
  REQUIRE_THROWS_AS(skew.qnk_rank_one_sum(x, 1, 1, skew_bim.tensor_frame(skew_bim.canonical_frame(), 2),
                                          skew_bim.tensor_frame(skew_bim.canonical_frame(), 1)),
                    std::domain_error);
}

TEST_CASE("graph symbols: module actions interact with the inner product") {
  GXi xi(make_full_graph(3));
  std::mt19937 rng(5u);
  auto x = random_mixed(xi, rng), y = random_mixed(xi, rng);
  AlgElement<Rational> a = AlgElement<Rational>::unit_at(1, 0);
  a.c[0] = rat(2);

  // (x a | y) = conj(a) (x|y)
  auto lhs = xi.xi_inner(xi.act_right(x, a), y);
  auto rhs = a.conj() * xi.xi_inner(x, y);
  REQUIRE(lhs.c == rhs.c);
}

TEST_CASE("graph symbols: creation subspaces and explicit cell families") {
  GXi xi(make_full_graph(2));

  for (int n = 0; n <= 3; ++n) {
    auto fock = xi.fock_basis(n);
    REQUIRE(static_cast<int>(fock.size()) == (1 << n));
    auto g = gram_matrix(xi, fock);
    for (size_t i = 0; i < fock.size(); ++i)
      for (size_t j = 0; j < fock.size(); ++j)
        REQUIRE(g[i][j] == (i == j ? rat(1) : rat(0)));
  }

  // the explicit regular family and the projected spanning family agree on
  // the dimension of the (1,1) cell: 2^{1} (2^2 - 1) = 6
  auto fam = xi.cell_family_regular(1, 1);
  REQUIRE(matrix_rank(gram_matrix(xi, fam)) == 6);

  std::vector<GXi::Vec> proj;
  for (const auto& s : xi.spanning_syms(1, 1)) proj.push_back(xi.apply_Pnk(xi.single(s), 1, 1));
  REQUIRE(matrix_rank(gram_matrix(xi, proj)) == 6);

  // (0,1): 2^{0} (2^2-1) = 3, and (2,1): 2^{2} * 3 = 12
  REQUIRE(matrix_rank(gram_matrix(xi, xi.cell_family_regular(0, 1))) == 3);
  REQUIRE(matrix_rank(gram_matrix(xi, xi.cell_family_regular(2, 1))) == 12);

  // Gram matrices of cells are positive semidefinite
  REQUIRE(matrix_psd(gram_matrix(xi, fam)));
}

TEST_CASE("graph symbols: single-edge cycles have no cells above the floor") {
  GXi xi(make_cycle_graph(3));
  for (int n : {-2, -1, 0, 1, 2}) {
    const int floor_k = std::max(0, -n);
    for (int k = floor_k + 1; k <= floor_k + 2; ++k) {
      for (const auto& s : xi.spanning_syms(n, k)) {
        auto p = xi.apply_Pnk(xi.single(s), n, k);
        REQUIRE(xi.is_zero(p));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Subshift backend
// ---------------------------------------------------------------------------

TEST_CASE("subshift symbols: product rules") {
  SXi xi(make_golden_mean_shift());
  auto t0 = xi.generator(0), t1 = xi.generator(1);

  // T_0^* T_0 = chi_0 + chi_1 = 1; T_1^* T_1 = chi_0
  auto d0 = xi.mult(xi.star(t0), t0);
  SXi::Vec expect0;
  SXi::add_term(expect0, CkSym{Word(1, 0), Word(1, 0)}, rat(1));
  SXi::add_term(expect0, CkSym{Word(1, 1), Word(1, 1)}, rat(1));
  REQUIRE(d0 == expect0);
  REQUIRE(xi.equal(d0, xi.unit()));

  auto d1 = xi.mult(xi.star(t1), t1);
  REQUIRE(d1 == xi.single(CkSym{Word(1, 0), Word(1, 0)}));
  REQUIRE_FALSE(xi.equal(d1, xi.unit()));

  // T_1 T_0^* is a legitimate symbol, and T_0^* T_1 annihilates
  REQUIRE(xi.mult(t1, xi.star(t0)) == xi.single(CkSym{Word(1, 1), Word(1, 0)}));
  REQUIRE(xi.mult(xi.star(t0), t1).empty());

  // range projections: T_0 T_0^* = chi_{[0]}
  REQUIRE(xi.mult(t0, xi.star(t0)) == xi.single(CkSym{Word(1, 0), Word(1, 0)}));

  // star and associativity on random mixed vectors
  std::mt19937 rng(23u);
  auto a = random_mixed(xi, rng), b = random_mixed(xi, rng), c = random_mixed(xi, rng);
  REQUIRE(xi.star(xi.mult(a, b)) == xi.mult(xi.star(b), xi.star(a)));
  auto lhs = xi.mult(xi.mult(a, b), c), rhs = xi.mult(a, xi.mult(b, c));
  REQUIRE(xi.equal(lhs, rhs));
}

TEST_CASE("subshift symbols: exact zero detection") {
  SXi xi(make_golden_mean_shift());

  // refinement relation: W_{x,y} = sum over common continuations
  Word x(1, 0), y{};
  y.push_back(1);
  auto r = xi.single(xi.sym(x, y));
  for (int c = 0; c < 2; ++c) {
    if (!xi.matrix().allows(0, c) || !xi.matrix().allows(1, c)) continue;
    Word xc = x, yc = y;
    xc.push_back(char(c));
    yc.push_back(char(c));
    r = xi.sub(r, xi.single(xi.sym(xc, yc)));
  }
  REQUIRE(xi.is_zero(r));
  REQUIRE(xi.xi_inner(r, r).coeff == xi.module().zero_fun(0, xi.xi_inner(r, r).depth).coeff);

  // disjoint follower sets give a genuinely zero symbol
  SXi id2(SFTMatrix{{{1, 0}, {0, 1}}});
  auto z = id2.single(id2.sym(Word(1, 0), Word(1, 1)));
  REQUIRE(id2.is_zero(z));
  REQUIRE(id2.norm(z) == 0.0);

  // ...but not when a common continuation exists
  REQUIRE_FALSE(xi.is_zero(xi.single(xi.sym(Word(1, 0), Word(1, 1)))));
}

TEST_CASE("subshift symbols: expectation and Fock isometry") {
  SXi xi(make_golden_mean_shift());
  const auto& bim = xi.module();

  for (const auto& x : bim.words(2))
    for (const auto& y : bim.words(2)) {
      auto wx = xi.single(CkSym{x, Word()});
      auto wy = xi.single(CkSym{y, Word()});
      auto inner = xi.xi_inner(wx, wy);
      auto expected = bim.right_inner(bim.cylinder(x, 2), bim.cylinder(y, 2));
      REQUIRE(bim.equal(inner, expected));
    }
}

TEST_CASE("subshift symbols: representation depth does not matter") {
  SXi xi(make_golden_mean_shift());
  const auto& bim = xi.module();

  auto f = bim.cylinder(Word(1, 0), 1);           // depth 1, degree 1
  auto fr = bim.refine(f, 3);                     // same element, depth 3
  auto g = bim.cylinder(Word{0, 1}, 1);           // degree 1 with a genuine tail
  // refined input produces a finer but semantically equal symbol combination
  REQUIRE(xi.equal(xi.make_W(f, g), xi.make_W(fr, g)));

  // make_W with the unit reproduces plain creation symbols
  auto w = xi.make_W(f, bim.unit(0));
  REQUIRE(xi.equal(w, xi.generator(0)));
}

TEST_CASE("subshift symbols: grading projections and frame sums") {
  std::mt19937 rng(20260816u);

  auto run = [&rng](SFTMatrix m) {
    SXi xi(std::move(m));
    const auto& bim = xi.module();
    auto canonical = bim.canonical_frame();
    auto rotated = bim.rotated_frame();
    for (int n : {-1, 0, 1}) {
      auto x = random_graded(xi, n, 2, rng);
      for (int k = std::max(0, -n); k <= 2; ++k) {
        auto closed = xi.apply_Qnk(x, n, k);
        REQUIRE(xi.equal(xi.apply_Qnk(closed, n, k), closed));
        auto via_canonical = xi.qnk_rank_one_sum(x, n, k, bim.tensor_frame(canonical, n + k),
                                                 bim.tensor_frame(canonical, k));
        REQUIRE(xi.equal(closed, via_canonical));
        auto via_rotated = xi.qnk_rank_one_sum(x, n, k, bim.tensor_frame(rotated, n + k),
                                               bim.tensor_frame(rotated, k));
        REQUIRE(xi.equal(closed, via_rotated));
      }
      // telescoping to the largest projection
      typename SXi::Vec acc;
      for (int k = std::max(0, -n); k <= 2; ++k) acc = xi.add(acc, xi.apply_Pnk(x, n, k));
      REQUIRE(xi.equal(acc, xi.apply_Qnk(x, n, 2)));
    }
  };

  run(make_golden_mean_shift());
  run(make_full_shift(2));
}

TEST_CASE("subshift symbols: cell bases are orthogonal and match projections") {
  SXi xi(make_golden_mean_shift());

  for (int n : {-1, 0, 1}) {
    const int floor_k = std::max(0, -n);
    for (int k = floor_k; k <= floor_k + 2; ++k) {
      auto basis = xi.cell_basis(n, k);
      // projected spanning family has the same rank
      std::vector<SXi::Vec> proj;
      for (const auto& s : xi.spanning_syms(n, k))
        proj.push_back(xi.apply_Pnk(xi.single(s), n, k));
      auto gb = gram_matrix(xi, basis);
      REQUIRE(matrix_rank(gb) == static_cast<int>(basis.size()));
      REQUIRE(matrix_rank(gram_matrix(xi, proj)) == static_cast<int>(basis.size()));
      // orthogonality
      for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = i + 1; j < basis.size(); ++j) REQUIRE(gb[i][j] == rat(0));
      // each basis vector is reproduced by its cell projection
      for (const auto& b : basis) REQUIRE(xi.equal(xi.apply_Pnk(b, n, k), b));
    }
  }
}
