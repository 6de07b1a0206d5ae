#pragma once

// Subshift backend: A = locally constant functions on the one-sided shift
// space, represented by coefficients over admissible cylinder words of a fixed
// depth. Module elements of every tensor degree are again such functions; the
// right inner product is an iterated transfer operator, the left inner product
// is a pointwise product. Index exponents are trivially 1 here, so the limit
// operator q is the identity and all of its certification is exact.

#include "pimsner/graph.hpp"
#include "pimsner/scalar.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace pimsner {

// A locally constant function together with its module degree. `coeff` is
// indexed by the admissible words of length `depth` in display order.
template <class S>
struct CylFun {
  int degree = 0;
  int depth = 0;
  std::vector<S> coeff;
};

template <class S>
class SubshiftBimodule {
 public:
  using Scalar = S;
  using Fun = CylFun<S>;

  explicit SubshiftBimodule(SFTMatrix m, double tol = kDefaultTol)
      : m_(SFTMatrix::validate(std::move(m.a))), tol_(tol) {}

  const SFTMatrix& matrix() const { return m_; }
  double tol() const { return tol_; }
  int alphabet() const { return m_.alphabet(); }

  const std::vector<Word>& words(int depth) const {
    auto it = words_.find(depth);
    if (it == words_.end()) it = words_.emplace(depth, enumerate_words(m_, depth)).first;
    return it->second;
  }
  int word_index(const Word& w) const {
    const auto& ws = words(static_cast<int>(w.size()));
    auto it = std::lower_bound(ws.begin(), ws.end(), w);
    if (it == ws.end() || *it != w) throw std::invalid_argument("word not admissible");
    return static_cast<int>(it - ws.begin());
  }

  // ---- constructors for functions -----------------------------------------

  Fun zero_fun(int degree = 0, int depth = 0) const {
    Fun f;
    f.degree = degree;
    f.depth = depth;
    f.coeff.assign(words(depth).size(), ScalarTraits<S>::zero());
    return f;
  }
  Fun unit(int degree = 0) const {
    Fun f = zero_fun(degree, 0);
    f.coeff[0] = ScalarTraits<S>::one();
    return f;
  }
  // Characteristic function of the cylinder [w], with a chosen module degree.
  Fun cylinder(const Word& w, int degree = 0) const {
    Fun f = zero_fun(degree, static_cast<int>(w.size()));
    f.coeff[word_index(w)] = ScalarTraits<S>::one();
    return f;
  }

  // ---- depth management -----------------------------------------------------

  Fun refine(const Fun& f, int depth) const {
    if (depth < f.depth) throw std::invalid_argument("refine: cannot coarsen");
    if (depth == f.depth) return f;
    Fun g = f;
    while (g.depth < depth) {
      const auto& src = words(g.depth);
      Fun h = zero_fun(f.degree, g.depth + 1);
      const auto& dst = words(g.depth + 1);
      for (size_t i = 0; i < dst.size(); ++i) {
        Word prefix = dst[i].substr(0, g.depth);
        // prefix of an admissible word is admissible
        auto it = std::lower_bound(src.begin(), src.end(), prefix);
        h.coeff[i] = g.coeff[it - src.begin()];
      }
      g = std::move(h);
    }
    return g;
  }

  void align(Fun& f, Fun& g) const {
    int d = std::max(f.depth, g.depth);
    if (f.depth < d) f = refine(f, d);
    if (g.depth < d) g = refine(g, d);
  }

  // ---- pointwise algebra -----------------------------------------------------

  Fun add(Fun f, Fun g) const {
    require_same_degree(f, g);
    align(f, g);
    for (size_t i = 0; i < f.coeff.size(); ++i) f.coeff[i] += g.coeff[i];
    return f;
  }
  Fun sub(Fun f, Fun g) const {
    require_same_degree(f, g);
    align(f, g);
    for (size_t i = 0; i < f.coeff.size(); ++i) f.coeff[i] -= g.coeff[i];
    return f;
  }
  // Pointwise product; the result inherits `degree`.
  Fun mul(Fun f, Fun g, int degree = 0) const {
    align(f, g);
    Fun r = f;
    r.degree = degree;
    for (size_t i = 0; i < r.coeff.size(); ++i) r.coeff[i] = f.coeff[i] * g.coeff[i];
    return r;
  }
  Fun scale(Fun f, const S& s) const {
    for (auto& c : f.coeff) c *= s;
    return f;
  }
  Fun conj(Fun f) const {
    for (auto& c : f.coeff) c = ScalarTraits<S>::conj(c);
    return f;
  }
  bool is_zero(const Fun& f, double tol = 0.0) const {
    for (const auto& c : f.coeff)
      if (!ScalarTraits<S>::is_zero(c, tol)) return false;
    return true;
  }
  bool equal(const Fun& f, const Fun& g, double tol = 0.0) const {
    Fun a = f, b = g;
    align(a, b);
    for (size_t i = 0; i < a.coeff.size(); ++i)
      if (!scalar_close(a.coeff[i], b.coeff[i], tol)) return false;
    return true;
  }
  double norm_inf(const Fun& f) const {
    double m = 0.0;
    for (const auto& c : f.coeff) m = std::max(m, ScalarTraits<S>::abs_double(c));
    return m;
  }

  // ---- module structure -------------------------------------------------------

  // Transfer operator: (Lf)(x) = sum over symbols j with jx admissible of f(jx).
  Fun transfer(const Fun& f) const {
    Fun g = refine(f, std::max(f.depth, 2));
    const auto& src = words(g.depth);
    Fun out = zero_fun(0, g.depth - 1);
    const auto& dst = words(g.depth - 1);
    for (size_t i = 0; i < src.size(); ++i) {
      Word tail = src[i].substr(1);
      auto it = std::lower_bound(dst.begin(), dst.end(), tail);
      out.coeff[it - dst.begin()] += g.coeff[i];
    }
    return out;
  }

  // f (x) g with deg f = a: (f (x) g)(x) = f(x) g(sigma^a x).
  Fun tensor(const Fun& f, const Fun& g) const {
    const int a = f.degree;
    const int depth = std::max(f.depth, a + g.depth);
    Fun fr = refine(f, depth);
    Fun r = zero_fun(a + g.degree, depth);
    const auto& ws = words(depth);
    const auto& gw = words(g.depth);
    for (size_t i = 0; i < ws.size(); ++i) {
      if (ScalarTraits<S>::is_zero(fr.coeff[i], 0.0)) continue;
      Word mid = ws[i].substr(a, g.depth);
      auto it = std::lower_bound(gw.begin(), gw.end(), mid);
      r.coeff[i] = fr.coeff[i] * g.coeff[it - gw.begin()];
    }
    return r;
  }

  Fun act_left(const Fun& a, const Fun& x) const { return mul(a, x, x.degree); }
  Fun act_right(const Fun& x, const Fun& a) const {
    Fun a0 = a;
    a0.degree = 0;
    return tensor_keep_degree(x, a0);
  }

  // (x|y) = L^degree(conj(x) y), a degree-0 function.
  Fun right_inner(const Fun& x, const Fun& y) const {
    require_same_degree(x, y);
    Fun p = mul(conj(x), y, 0);
    for (int i = 0; i < x.degree; ++i) p = transfer(p);
    return p;
  }
  // Left inner product is the plain pointwise product.
  Fun left_inner(const Fun& x, const Fun& y) const {
    require_same_degree(x, y);
    return mul(x, conj(y), 0);
  }

  double module_norm(const Fun& x) const { return std::sqrt(norm_inf(right_inner(x, x))); }

  // ---- frames -------------------------------------------------------------------

  // Canonical right frame of E: the alphabet cylinders in degree 1.
  std::vector<Fun> canonical_frame() const {
    std::vector<Fun> f;
    for (int j = 0; j < alphabet(); ++j) f.push_back(cylinder(Word(1, char(j)), 1));
    return f;
  }
  std::vector<Fun> rotated_frame() const {
    auto f = canonical_frame();
    if (f.size() < 2) return f;
    const S c = ScalarTraits<S>::from_int(3) / ScalarTraits<S>::from_int(5);
    const S s = ScalarTraits<S>::from_int(4) / ScalarTraits<S>::from_int(5);
    Fun a = add(scale(f[0], c), scale(f[1], s));
    Fun b = add(scale(f[0], -s), scale(f[1], c));
    f[0] = a;
    f[1] = b;
    return f;
  }
  // Left frames for degree l: the unit alone, or any cylinder partition.
  std::vector<Fun> left_frame_unit(int l) const { return {unit(l)}; }
  std::vector<Fun> left_frame_partition(int l) const {
    std::vector<Fun> f;
    for (int j = 0; j < alphabet(); ++j) f.push_back(cylinder(Word(1, char(j)), l));
    return f;
  }

  std::vector<Fun> tensor_frame(const std::vector<Fun>& frame, int l) const {
    if (l == 0) return {unit(0)};
    std::vector<Fun> cur = frame;
    for (int step = 1; step < l; ++step) {
      std::vector<Fun> next;
      for (const auto& x : cur)
        for (const auto& e : frame) next.push_back(tensor(x, e));
      cur = std::move(next);
    }
    return cur;
  }

  bool frame_reproduces(const std::vector<Fun>& frame_tensors, const Fun& x) const {
    Fun acc = zero_fun(x.degree, 0);
    for (const auto& f : frame_tensors) acc = add(acc, act_right(f, right_inner(f, x)));
    return is_zero(sub(acc, x), tol_);
  }
  bool left_frame_reproduces(const std::vector<Fun>& frame_tensors, const Fun& x) const {
    Fun acc = zero_fun(x.degree, 0);
    for (const auto& f : frame_tensors) acc = add(acc, act_left(left_inner(x, f), f));
    return is_zero(sub(acc, x), tol_);
  }

  // ---- trace, exponents, limit operator -------------------------------------------

  Fun phi_ell_frame(const std::function<Fun(const Fun&)>& t,
                    const std::vector<Fun>& frame_tensors) const {
    Fun acc = zero_fun(0, 0);
    for (const auto& f : frame_tensors) acc = add(acc, left_inner(t(f), f));
    return acc;
  }

  // The index exponent is the unit in every degree here.
  Fun beta_exp(int) const { return unit(0); }
  S q_value(const Word&) const { return ScalarTraits<S>::one(); }
  Fun q_apply(const Fun& x) const { return x; }
  bool certified() const { return true; }
  std::string cert_route_name() const { return "unital-exact"; }

 private:
  static void require_same_degree(const Fun& x, const Fun& y) {
    if (x.degree != y.degree) throw std::invalid_argument("degree mismatch");
  }
  Fun tensor_keep_degree(const Fun& x, const Fun& a0) const {
    Fun r = tensor(x, a0);
    r.degree = x.degree;
    return r;
  }

  SFTMatrix m_;
  double tol_;
  mutable std::map<int, std::vector<Word>> words_;
};

}  // namespace pimsner
