#pragma once

// The standard module over the algebra of a graph / subshift: finite linear
// combinations of two-sided symbols W_{mu,nu} ~ S_mu S_nu^* with the weighted
// expectation Phi_inf onto the coefficient algebra, the induced inner product
// (x|y) = Phi_inf(x* y), the degree grading, and the secondary grading
// projections Q_{n,k} / P_{n,k} realised both by a per-symbol closed formula
// and by frame rank-one sums. Everything is exact over rational scalars.
//
// Two backends share one method surface:
//   GraphXi<S>     -- symbols indexed by pairs of composable-source paths
//   SubshiftXi<S>  -- symbols indexed by pairs of admissible words

#include "pimsner/bimodule.hpp"
#include "pimsner/cylinder.hpp"
#include "pimsner/graph.hpp"
#include "pimsner/scalar.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pimsner {

// ---------------------------------------------------------------------------
// Graph-backend symbols
// ---------------------------------------------------------------------------

struct GraphSym {
  Path mu, nu;  // constraint: s(mu) == s(nu)

  bool operator==(const GraphSym& o) const { return mu == o.mu && nu == o.nu; }
  bool operator<(const GraphSym& o) const {
    if (!(mu == o.mu)) return mu < o.mu;
    return nu < o.nu;
  }
};

// "a is an initial segment of b" with the vertex-projection convention for
// empty paths: the empty path at v absorbs exactly the paths ranged at v.
inline bool path_prefix(const Graph& g, const Path& a, const Path& b) {
  if (a.length() > b.length()) return false;
  if (a.empty()) return range_of(g, b) == a.base_vertex;
  return std::equal(a.edges.begin(), a.edges.end(), b.edges.begin());
}

template <class S>
class GraphXi {
 public:
  using Scalar = S;
  using Sym = GraphSym;
  using Vec = std::map<GraphSym, S>;
  using AlgT = AlgElement<S>;
  using ModuleVec = PathVector<S>;

  explicit GraphXi(Graph g, double tol = kDefaultTol) : bim_(std::move(g), tol) {}
  explicit GraphXi(GraphBimodule<S> b) : bim_(std::move(b)) {}

  const GraphBimodule<S>& module() const { return bim_; }
  const Graph& graph() const { return bim_.graph(); }
  double tol() const { return bim_.tol(); }

  // ---- symbols and elementary vectors ------------------------------------

  Sym sym(Path mu, Path nu) const {
    if (source_of(graph(), mu) != source_of(graph(), nu))
      throw std::invalid_argument("symbol requires matching source vertices");
    return Sym{std::move(mu), std::move(nu)};
  }
  static int grade(const Sym& s) { return s.mu.length() - s.nu.length(); }

  Vec zero() const { return {}; }
  Vec single(const Sym& s, const S& c = ScalarTraits<S>::one()) const {
    Vec v;
    if (!ScalarTraits<S>::is_zero(c, 0.0)) v[s] = c;
    return v;
  }
  // Identity element: the sum of vertex projections.
  Vec unit() const {
    Vec v;
    for (int w = 0; w < graph().num_vertices(); ++w)
      v[Sym{Path{w, {}}, Path{w, {}}}] = ScalarTraits<S>::one();
    return v;
  }
  Vec vertex_projection(int v) const {
    return single(Sym{Path{v, {}}, Path{v, {}}});
  }
  // Generator indexed by an edge: W_{e, (s(e))}.
  Vec generator(int edge) const {
    const auto& e = graph().edge(edge);
    return single(Sym{Path{e.r, {edge}}, Path{e.s, {}}});
  }

  static void add_term(Vec& v, const Sym& s, const S& c) {
    auto it = v.find(s);
    if (it == v.end()) {
      if (!ScalarTraits<S>::is_zero(c, 0.0)) v[s] = c;
    } else {
      it->second += c;
      if (ScalarTraits<S>::is_zero(it->second, 0.0)) v.erase(it);
    }
  }
  Vec add(const Vec& a, const Vec& b) const {
    Vec r = a;
    for (const auto& [s, c] : b) add_term(r, s, c);
    return r;
  }
  Vec sub(const Vec& a, const Vec& b) const {
    Vec r = a;
    for (const auto& [s, c] : b) add_term(r, s, -c);
    return r;
  }
  Vec scale(const Vec& a, const S& f) const {
    Vec r;
    for (const auto& [s, c] : a) add_term(r, s, c * f);
    return r;
  }

  // ---- star algebra --------------------------------------------------------

  Vec star(const Vec& a) const {
    Vec r;
    for (const auto& [s, c] : a) add_term(r, Sym{s.nu, s.mu}, ScalarTraits<S>::conj(c));
    return r;
  }

  // S_mu S_nu^* . S_al S_be^* collapses to at most one symbol by the
  // prefix/suffix cancellation rules of the creation operators.
  Vec mult(const Vec& a, const Vec& b) const {
    Vec r;
    const Graph& g = graph();
    for (const auto& [s1, c1] : a)
      for (const auto& [s2, c2] : b) {
        const S c = c1 * c2;
        if (s1.nu.length() <= s2.mu.length()) {
          if (!path_prefix(g, s1.nu, s2.mu)) continue;
          Path tail = suffix_of(g, s2.mu, s1.nu.length());
          auto mu = concat(g, s1.mu, tail);
          if (!mu) continue;  // distinct source projections annihilate
          add_term(r, Sym{*mu, s2.nu}, c);
        } else {
          if (!path_prefix(g, s2.mu, s1.nu)) continue;
          Path tail = suffix_of(g, s1.nu, s2.mu.length());
          auto nu = concat(g, s2.nu, tail);
          if (!nu) continue;
          add_term(r, Sym{s1.mu, *nu}, c);
        }
      }
    return r;
  }

  // ---- expectation, inner product, norms -----------------------------------

  // Phi_inf(W_{mu,nu}) = [mu == nu] q(mu) at the range vertex.
  AlgT phi_infty(const Vec& a) const {
    AlgT out(graph().num_vertices());
    for (const auto& [s, c] : a) {
      if (!(s.mu == s.nu)) continue;
      out.c[range_of(graph(), s.mu)] += c * bim_.q_value(s.mu);
    }
    return out;
  }

  AlgT xi_inner(const Vec& x, const Vec& y) const { return phi_infty(mult(star(x), y)); }

  double norm(const Vec& x) const { return std::sqrt(xi_inner(x, x).norm_inf()); }

  bool is_zero(const Vec& x) const {
    if (x.empty()) return true;
    if constexpr (ScalarTraits<S>::exact)
      return xi_inner(x, x).is_zero(0.0);
    else
      return norm(x) <= bim_.tol();
  }
  bool equal(const Vec& x, const Vec& y) const { return is_zero(sub(x, y)); }

  // Right action of the coefficient algebra: W_{mu,nu} a = a(r(nu)) W_{mu,nu}.
  Vec act_right(const Vec& x, const AlgT& a) const {
    Vec r;
    for (const auto& [s, c] : x) add_term(r, s, c * a.c[range_of(graph(), s.nu)]);
    return r;
  }

  // ---- grading ---------------------------------------------------------------

  Vec grade_project(const Vec& x, int n) const {
    Vec r;
    for (const auto& [s, c] : x)
      if (grade(s) == n) r[s] = c;
    return r;
  }

  // W built from module vectors: bilinear over basis paths, conjugate-linear
  // in the second argument, zero on mismatched sources.
  Vec make_W(const ModuleVec& x, const ModuleVec& y) const {
    Vec r;
    const Graph& g = graph();
    for (const auto& [mu, cx] : x.terms)
      for (const auto& [nu, cy] : y.terms) {
        if (source_of(g, mu) != source_of(g, nu)) continue;
        add_term(r, Sym{mu, nu}, cx * ScalarTraits<S>::conj(cy));
      }
    return r;
  }

  // Closed form of the secondary grading projection Q_{n,k} on one symbol:
  // zero off the degree-n component; identity once k reaches |nu|; otherwise
  // cut both legs and weight by q of the (necessarily common) tail.
  Vec apply_Qnk(const Vec& x, int n, int k) const {
    check_nk(n, k);
    const Graph& g = graph();
    Vec r;
    for (const auto& [s, c] : x) {
      if (grade(s) != n) continue;
      if (k >= s.nu.length()) {
        add_term(r, s, c);
        continue;
      }
      Path mu_head = prefix_of(g, s.mu, n + k);
      Path mu_tail = suffix_of(g, s.mu, n + k);
      Path nu_head = prefix_of(g, s.nu, k);
      Path nu_tail = suffix_of(g, s.nu, k);
      if (!(mu_tail == nu_tail)) continue;
      add_term(r, Sym{mu_head, nu_head}, c * bim_.q_value(nu_tail));
    }
    return r;
  }

  // P_{n,k} = Q_{n,k} - Q_{n,k-1} above the floor k = max(0,-n); at the floor
  // it coincides with Q. Below the floor the cell is undefined.
  Vec apply_Pnk(const Vec& x, int n, int k) const {
    const int floor_k = std::max(0, -n);
    if (k < floor_k) throw std::domain_error("secondary index below its floor");
    if (k == floor_k) return apply_Qnk(x, n, k);
    return sub(apply_Qnk(x, n, k), apply_Qnk(x, n, k - 1));
  }

  // Frame realisation: Q_{n,k} x = sum over frame tensors f (degree n+k) and
  // g (degree k) of W(f,g) . c_k^{-1} (W(f,g)|x). Requires the multiplicative
  // decomposition of the limit operator at level k (the central weight c_k).
  Vec qnk_rank_one_sum(const Vec& x, int n, int k, const std::vector<ModuleVec>& frame_nk,
                       const std::vector<ModuleVec>& frame_k) const {
    check_nk(n, k);
    auto dec = bim_.decompose_q(k);
    if (!dec.success)
      throw std::domain_error(
          "frame realisation needs the central decomposition of the limit operator");
    AlgT c_inv = dec.c.inverse();
    Vec acc;
    for (const auto& f : frame_nk) {
      if (f.degree != n + k) throw std::invalid_argument("frame tensor degree mismatch");
      for (const auto& gv : frame_k) {
        if (gv.degree != k) throw std::invalid_argument("frame tensor degree mismatch");
        Vec w = make_W(f, gv);
        if (w.empty()) continue;
        AlgT weight = c_inv * xi_inner(w, x);
        acc = add(acc, act_right(w, weight));
      }
    }
    return acc;
  }

  // All degree-compatible symbols with |mu| = n+k, |nu| = k; they span the
  // range of Q_{n,k}.
  std::vector<Sym> spanning_syms(int n, int k) const {
    check_nk(n, k);
    std::vector<Sym> out;
    auto mus = enumerate_paths(graph(), n + k);
    auto nus = enumerate_paths(graph(), k);
    for (const auto& mu : mus)
      for (const auto& nu : nus)
        if (source_of(graph(), mu) == source_of(graph(), nu)) out.push_back(Sym{mu, nu});
    return out;
  }

  // Orthonormal generators of the depth-n creation subspace: {W_{mu, (s(mu))}}.
  std::vector<Vec> fock_basis(int n) const {
    std::vector<Vec> out;
    for (const auto& mu : enumerate_paths(graph(), n))
      out.push_back(single(Sym{mu, Path{source_of(graph(), mu), {}}}));
    return out;
  }

  // Explicit spanning family of the (n,k) cell for row-regular graphs with
  // k >= 1, n+k >= 1: N W_{mu e, nu f} - delta_{ef} W_{mu,nu} over compatible
  // edge pairs e,f leaving the common source of mu and nu.
  std::vector<Vec> cell_family_regular(int n, int k) const {
    auto reg = graph().constant_row_sum();
    if (!reg) throw std::domain_error("explicit cell family requires a regular graph");
    if (k < 1 || n + k < 1) throw std::invalid_argument("cell family needs k>=1 and n+k>=1");
    const S big_n = ScalarTraits<S>::from_int(*reg);
    const Graph& g = graph();
    std::vector<Vec> out;
    auto mus = enumerate_paths(g, n + k - 1);
    auto nus = enumerate_paths(g, k - 1);
    for (const auto& mu : mus)
      for (const auto& nu : nus) {
        if (source_of(g, mu) != source_of(g, nu)) continue;
        const int v = source_of(g, mu);
        for (int e : g.edges_out_of(v))
          for (int f : g.edges_out_of(v)) {
            if (g.edge(e).s != g.edge(f).s) continue;
            auto mue = concat(g, mu, Path{g.edge(e).r, {e}});
            auto nuf = concat(g, nu, Path{g.edge(f).r, {f}});
            Vec t = scale(single(Sym{*mue, *nuf}), big_n);
            if (e == f) t = sub(t, single(Sym{mu, nu}));
            out.push_back(std::move(t));
          }
      }
    return out;
  }

 private:
  static void check_nk(int n, int k) {
    if (k < 0 || n + k < 0) throw std::domain_error("grading indices out of range");
  }

  GraphBimodule<S> bim_;
};

// ---------------------------------------------------------------------------
// Subshift-backend symbols
// ---------------------------------------------------------------------------

// A pair of admissible words; the element T_x T_y^*. Splitting x = u tau,
// y = v tau at any shared tail gives the same element, so the pair itself is
// the canonical datum.
struct CkSym {
  Word x, y;

  bool operator==(const CkSym& o) const { return x == o.x && y == o.y; }
  bool operator<(const CkSym& o) const {
    if (x != o.x) return x < o.x;
    return y < o.y;
  }
};

template <class S>
class SubshiftXi {
 public:
  using Scalar = S;
  using Sym = CkSym;
  using Vec = std::map<CkSym, S>;
  using AlgT = CylFun<S>;
  using ModuleVec = CylFun<S>;

  explicit SubshiftXi(SFTMatrix m, double tol = kDefaultTol) : bim_(std::move(m), tol) {}

  const SubshiftBimodule<S>& module() const { return bim_; }
  const SFTMatrix& matrix() const { return bim_.matrix(); }
  double tol() const { return bim_.tol(); }

  // ---- symbols and elementary vectors ------------------------------------

  Sym sym(Word x, Word y) const {
    if (!word_admissible(matrix(), x) || !word_admissible(matrix(), y))
      throw std::invalid_argument("symbol words must be admissible");
    return Sym{std::move(x), std::move(y)};
  }
  static int grade(const Sym& s) {
    return static_cast<int>(s.x.size()) - static_cast<int>(s.y.size());
  }

  Vec zero() const { return {}; }
  Vec single(const Sym& s, const S& c = ScalarTraits<S>::one()) const {
    Vec v;
    if (!ScalarTraits<S>::is_zero(c, 0.0)) v[s] = c;
    return v;
  }
  Vec unit() const { return single(Sym{Word(), Word()}); }
  Vec generator(int symbol) const { return single(Sym{Word(1, char(symbol)), Word()}); }

  static void add_term(Vec& v, const Sym& s, const S& c) {
    auto it = v.find(s);
    if (it == v.end()) {
      if (!ScalarTraits<S>::is_zero(c, 0.0)) v[s] = c;
    } else {
      it->second += c;
      if (ScalarTraits<S>::is_zero(it->second, 0.0)) v.erase(it);
    }
  }
  Vec add(const Vec& a, const Vec& b) const {
    Vec r = a;
    for (const auto& [s, c] : b) add_term(r, s, c);
    return r;
  }
  Vec sub(const Vec& a, const Vec& b) const {
    Vec r = a;
    for (const auto& [s, c] : b) add_term(r, s, -c);
    return r;
  }
  Vec scale(const Vec& a, const S& f) const {
    Vec r;
    for (const auto& [s, c] : a) add_term(r, s, c * f);
    return r;
  }

  // ---- star algebra --------------------------------------------------------

  Vec star(const Vec& a) const {
    Vec r;
    for (const auto& [s, c] : a) add_term(r, Sym{s.y, s.x}, ScalarTraits<S>::conj(c));
    return r;
  }

  Vec mult(const Vec& a, const Vec& b) const {
    Vec r;
    for (const auto& [s1, c1] : a)
      for (const auto& [s2, c2] : b) mult_syms(r, s1, s2, c1 * c2);
    return r;
  }

  // ---- expectation, inner product, norms -----------------------------------

  // Phi_inf(T_x T_y^*) = [x == y] chi_x.
  AlgT phi_infty(const Vec& a) const {
    AlgT out = bim_.zero_fun(0, 0);
    for (const auto& [s, c] : a) {
      if (s.x != s.y) continue;
      out = bim_.add(out, bim_.scale(bim_.cylinder(s.x), c));
    }
    return out;
  }

  AlgT xi_inner(const Vec& x, const Vec& y) const { return phi_infty(mult(star(x), y)); }

  double norm(const Vec& x) const { return std::sqrt(bim_.norm_inf(xi_inner(x, x))); }

  // Exact zero test by refinement: group symbols by their fully reduced head
  // pair, refine shared tails to a common depth; independence of the refined
  // symbols makes emptiness equivalent to vanishing.
  bool is_zero(const Vec& x) const {
    if (x.empty()) return true;
    if constexpr (ScalarTraits<S>::exact)
      return normalize(x).empty();
    else
      return norm(x) <= bim_.tol();
  }
  bool equal(const Vec& x, const Vec& y) const { return is_zero(sub(x, y)); }

  // Right action: W_{x,y} chi_w = [compatible] W_{x wbar, y wbar}.
  Vec act_right(const Vec& v, const AlgT& a) const {
    Vec r;
    const SFTMatrix& m = matrix();
    for (const auto& [s, c] : v) {
      const int ylen = static_cast<int>(s.y.size());
      if (a.depth <= ylen) {
        Word pre = s.y.substr(0, a.depth);
        r_add(r, s, c * a.coeff[bim_.word_index(pre)]);
      } else {
        const auto& ws = bim_.words(a.depth);
        for (size_t i = 0; i < ws.size(); ++i) {
          if (ScalarTraits<S>::is_zero(a.coeff[i], 0.0)) continue;
          if (ws[i].compare(0, ylen, s.y) != 0) continue;
          Word tail = ws[i].substr(ylen);
          // tail joins y admissibly by construction; check the x side
          if (!s.x.empty() && !m.allows(static_cast<unsigned char>(s.x.back()),
                                        static_cast<unsigned char>(tail.front())))
            continue;
          r_add(r, Sym{s.x + tail, s.y + tail}, c * a.coeff[i]);
        }
      }
    }
    return r;
  }

  // ---- grading ---------------------------------------------------------------

  Vec grade_project(const Vec& x, int n) const {
    Vec r;
    for (const auto& [s, c] : x)
      if (grade(s) == n) r[s] = c;
    return r;
  }

  // W from module elements: for coefficient words, overlay the parts beyond
  // the declared degrees as a shared tail.
  Vec make_W(const ModuleVec& f0, const ModuleVec& g0) const {
    const ModuleVec f = f0.depth >= f0.degree ? f0 : bim_.refine(f0, f0.degree);
    const ModuleVec g = g0.depth >= g0.degree ? g0 : bim_.refine(g0, g0.degree);
    Vec r;
    const SFTMatrix& m = matrix();
    const auto& fw = bim_.words(f.depth);
    const auto& gw = bim_.words(g.depth);
    for (size_t i = 0; i < fw.size(); ++i) {
      if (ScalarTraits<S>::is_zero(f.coeff[i], 0.0)) continue;
      Word fx = fw[i].substr(0, f.degree), ft = fw[i].substr(f.degree);
      for (size_t j = 0; j < gw.size(); ++j) {
        if (ScalarTraits<S>::is_zero(g.coeff[j], 0.0)) continue;
        Word gx = gw[j].substr(0, g.degree), gt = gw[j].substr(g.degree);
        // tails must be nested; the longer one wins
        const Word* tail = nullptr;
        if (ft.size() <= gt.size() && gt.compare(0, ft.size(), ft) == 0)
          tail = &gt;
        else if (gt.size() < ft.size() && ft.compare(0, gt.size(), gt) == 0)
          tail = &ft;
        else
          continue;
        Word wx = fx + *tail, wy = gx + *tail;
        if (!word_admissible(m, wx) || !word_admissible(m, wy)) continue;
        add_term(r, Sym{wx, wy}, f.coeff[i] * ScalarTraits<S>::conj(g.coeff[j]));
      }
    }
    return r;
  }

  // Closed form: Q_{n,k} keeps a degree-n symbol iff the legs agree beyond
  // the split (n+k, k) (always true once k >= |y|).
  Vec apply_Qnk(const Vec& x, int n, int k) const {
    check_nk(n, k);
    Vec r;
    for (const auto& [s, c] : x) {
      if (grade(s) != n) continue;
      const int ylen = static_cast<int>(s.y.size());
      if (k >= ylen || s.x.substr(n + k) == s.y.substr(k)) add_term(r, s, c);
    }
    return r;
  }

  Vec apply_Pnk(const Vec& x, int n, int k) const {
    const int floor_k = std::max(0, -n);
    if (k < floor_k) throw std::domain_error("secondary index below its floor");
    if (k == floor_k) return apply_Qnk(x, n, k);
    return sub(apply_Qnk(x, n, k), apply_Qnk(x, n, k - 1));
  }

  Vec qnk_rank_one_sum(const Vec& x, int n, int k, const std::vector<ModuleVec>& frame_nk,
                       const std::vector<ModuleVec>& frame_k) const {
    check_nk(n, k);
    Vec acc;
    for (const auto& f : frame_nk) {
      if (f.degree != n + k) throw std::invalid_argument("frame tensor degree mismatch");
      for (const auto& gv : frame_k) {
        if (gv.degree != k) throw std::invalid_argument("frame tensor degree mismatch");
        Vec w = make_W(f, gv);
        if (w.empty()) continue;
        acc = add(acc, act_right(w, xi_inner(w, x)));
      }
    }
    return acc;
  }

  std::vector<Sym> spanning_syms(int n, int k) const {
    check_nk(n, k);
    std::vector<Sym> out;
    for (const auto& x : bim_.words(n + k))
      for (const auto& y : bim_.words(k)) out.push_back(Sym{x, y});
    return out;
  }

  std::vector<Vec> fock_basis(int n) const {
    std::vector<Vec> out;
    for (const auto& x : bim_.words(n)) out.push_back(single(Sym{x, Word()}));
    return out;
  }

  // The (n,k) cell has an orthogonal basis of non-reducible split pairs:
  // |x| = n+k, |y| = k, and the two last letters differ (k above its floor).
  std::vector<Vec> cell_basis(int n, int k) const {
    check_nk(n, k);
    std::vector<Vec> out;
    const int floor_k = std::max(0, -n);
    for (const auto& x : bim_.words(n + k))
      for (const auto& y : bim_.words(k)) {
        // above the floor, pairs with matching last letters reduce to a
        // shorter split and belong to lower cells
        if (k > floor_k && !x.empty() && !y.empty() && x.back() == y.back()) continue;
        // pairs with empty common continuation are the zero element
        if (!has_common_continuation(x, y)) continue;
        out.push_back(single(Sym{x, y}));
      }
    return out;
  }

 private:
  static void check_nk(int n, int k) {
    if (k < 0 || n + k < 0) throw std::domain_error("grading indices out of range");
  }
  static void r_add(Vec& v, const Sym& s, const S& c) { add_term(v, s, c); }

  bool has_common_continuation(const Word& x, const Word& y) const {
    if (x.empty() && y.empty()) return true;
    const SFTMatrix& m = matrix();
    for (int c = 0; c < m.alphabet(); ++c) {
      bool okx = x.empty() || m.allows(static_cast<unsigned char>(x.back()), c);
      bool oky = y.empty() || m.allows(static_cast<unsigned char>(y.back()), c);
      if (okx && oky) return true;
    }
    return false;
  }

  // product of two symbols, appended to r with coefficient c
  void mult_syms(Vec& r, const Sym& s1, const Sym& s2, const S& c) const {
    const SFTMatrix& m = matrix();
    const Word &x1 = s1.x, &y1 = s1.y, &x2 = s2.x, &y2 = s2.y;
    if (y1.size() <= x2.size()) {
      if (x2.compare(0, y1.size(), y1) != 0) return;
      Word xbar = x2.substr(y1.size());
      if (!xbar.empty()) {
        if (!x1.empty() && !m.allows(static_cast<unsigned char>(x1.back()),
                                     static_cast<unsigned char>(xbar.front())))
          return;
        add_term(r, Sym{x1 + xbar, y2}, c);
        return;
      }
      // y1 == x2: the middle is the unit (empty) or the domain projection of
      // the last letter of y1
      if (y1.empty()) {
        add_term(r, Sym{x1, y2}, c);
        return;
      }
      const unsigned char q = static_cast<unsigned char>(y1.back());
      // the domain projection is absorbed when either neighbour ends with q
      if ((!x1.empty() && static_cast<unsigned char>(x1.back()) == q) ||
          (!y2.empty() && static_cast<unsigned char>(y2.back()) == q)) {
        add_term(r, Sym{x1, y2}, c);
        return;
      }
      for (int ch = 0; ch < m.alphabet(); ++ch) {
        if (!m.allows(q, ch)) continue;
        if (!x1.empty() && !m.allows(static_cast<unsigned char>(x1.back()), ch)) continue;
        if (!y2.empty() && !m.allows(static_cast<unsigned char>(y2.back()), ch)) continue;
        add_term(r, Sym{x1 + Word(1, char(ch)), y2 + Word(1, char(ch))}, c);
      }
    } else {
      if (y1.compare(0, x2.size(), x2) != 0) return;
      Word ybar = y1.substr(x2.size());  // nonempty
      if (!y2.empty() && !m.allows(static_cast<unsigned char>(y2.back()),
                                   static_cast<unsigned char>(ybar.front())))
        return;
      add_term(r, Sym{x1, y2 + ybar}, c);
    }
  }

  // Fully reduced split of a pair: strip the longest common suffix usable as
  // a shared tail.
  static std::pair<int, int> reduced_split(const Sym& s) {
    int a = static_cast<int>(s.x.size()), b = static_cast<int>(s.y.size());
    while (a > 0 && b > 0 && s.x[a - 1] == s.y[b - 1]) {
      --a;
      --b;
    }
    return {a, b};
  }

  Vec normalize(const Vec& v) const {
    // group by reduced head pair
    std::map<std::pair<Word, Word>, std::vector<std::pair<Sym, S>>> classes;
    for (const auto& [s, c] : v) {
      auto [a, b] = reduced_split(s);
      classes[{s.x.substr(0, a), s.y.substr(0, b)}].push_back({s, c});
    }
    Vec out;
    const SFTMatrix& m = matrix();
    for (auto& [head, terms] : classes) {
      size_t max_tail = 0;
      for (const auto& [s, c] : terms) {
        auto [a, b] = reduced_split(s);
        max_tail = std::max(max_tail, s.x.size() - a);
      }
      for (const auto& [s, c] : terms) {
        auto [a, b] = reduced_split(s);
        size_t tail = s.x.size() - a;
        // expand the shared tail to the class depth over common continuations
        std::vector<Sym> frontier{s};
        for (size_t t = tail; t < max_tail; ++t) {
          std::vector<Sym> next;
          for (const auto& f : frontier)
            for (int ch = 0; ch < m.alphabet(); ++ch) {
              bool okx = f.x.empty() || m.allows(static_cast<unsigned char>(f.x.back()), ch);
              bool oky = f.y.empty() || m.allows(static_cast<unsigned char>(f.y.back()), ch);
              if (okx && oky)
                next.push_back(Sym{f.x + Word(1, char(ch)), f.y + Word(1, char(ch))});
            }
          frontier = std::move(next);
        }
        // drop tail-free pairs without any continuation: they are zero
        if (max_tail == 0 && !has_common_continuation(s.x, s.y)) continue;
        for (const auto& f : frontier) add_term(out, f, c);
      }
    }
    return out;
  }

  SubshiftBimodule<S> bim_;
};

}  // namespace pimsner
