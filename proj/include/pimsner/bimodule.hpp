#pragma once

// Graph bimodule backend: A = functions on vertices, E = functions on edges,
// E^{(x)l} spanned by length-l paths. Provides the two inner products, frames,
// the fibered trace Phi_l, the index exponents e^{beta_l}, the limit operator
// q_l with its certification routes, and the multiplicative-decomposition
// detector q_l = c_l P_l.

#include "pimsner/graph.hpp"
#include "pimsner/scalar.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pimsner {

// ---------------------------------------------------------------------------
// Coefficient algebra elements (vertex-indexed functions)
// ---------------------------------------------------------------------------

template <class S>
struct AlgElement {
  std::vector<S> c;

  AlgElement() = default;
  explicit AlgElement(int n) : c(n, ScalarTraits<S>::zero()) {}

  static AlgElement one(int n) {
    AlgElement a(n);
    for (auto& x : a.c) x = ScalarTraits<S>::one();
    return a;
  }
  static AlgElement unit_at(int n, int v) {
    AlgElement a(n);
    a.c[v] = ScalarTraits<S>::one();
    return a;
  }

  int size() const { return static_cast<int>(c.size()); }

  AlgElement& operator+=(const AlgElement& o) {
    for (int i = 0; i < size(); ++i) c[i] += o.c[i];
    return *this;
  }
  AlgElement& operator-=(const AlgElement& o) {
    for (int i = 0; i < size(); ++i) c[i] -= o.c[i];
    return *this;
  }
  friend AlgElement operator+(AlgElement a, const AlgElement& b) { return a += b; }
  friend AlgElement operator-(AlgElement a, const AlgElement& b) { return a -= b; }
  friend AlgElement operator*(const AlgElement& a, const AlgElement& b) {
    AlgElement r(a.size());
    for (int i = 0; i < a.size(); ++i) r.c[i] = a.c[i] * b.c[i];
    return r;
  }
  AlgElement& operator*=(const S& s) {
    for (auto& x : c) x *= s;
    return *this;
  }
  friend AlgElement operator*(AlgElement a, const S& s) { return a *= s; }

  AlgElement conj() const {
    AlgElement r = *this;
    for (auto& x : r.c) x = ScalarTraits<S>::conj(x);
    return r;
  }
  AlgElement inverse() const {
    AlgElement r(size());
    for (int i = 0; i < size(); ++i) {
      if (ScalarTraits<S>::is_zero(c[i], 0.0))
        throw std::domain_error("algebra element not invertible");
      r.c[i] = ScalarTraits<S>::one() / c[i];
    }
    return r;
  }

  double norm_inf() const {
    double m = 0.0;
    for (const auto& x : c) m = std::max(m, ScalarTraits<S>::abs_double(x));
    return m;
  }
  bool is_zero(double tol = 0.0) const {
    for (const auto& x : c)
      if (!ScalarTraits<S>::is_zero(x, tol)) return false;
    return true;
  }
  bool is_one(double tol = 0.0) const {
    for (const auto& x : c)
      if (!ScalarTraits<S>::is_zero(x - ScalarTraits<S>::one(), tol)) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Module vectors: finitely supported combinations of basis paths of one degree
// ---------------------------------------------------------------------------

template <class S>
struct PathVector {
  int degree = 0;
  std::map<Path, S> terms;

  PathVector() = default;
  explicit PathVector(int deg) : degree(deg) {}
  static PathVector basis(const Path& p) {
    PathVector v(p.length());
    v.terms[p] = ScalarTraits<S>::one();
    return v;
  }

  void add_term(const Path& p, const S& s) {
    auto it = terms.find(p);
    if (it == terms.end()) {
      if (!ScalarTraits<S>::is_zero(s, 0.0)) terms[p] = s;
    } else {
      it->second += s;
      if (ScalarTraits<S>::is_zero(it->second, 0.0)) terms.erase(it);
    }
  }
  PathVector& operator+=(const PathVector& o) {
    for (const auto& [p, s] : o.terms) add_term(p, s);
    return *this;
  }
  PathVector& operator-=(const PathVector& o) {
    for (const auto& [p, s] : o.terms) add_term(p, -s);
    return *this;
  }
  PathVector& operator*=(const S& s) {
    if (ScalarTraits<S>::is_zero(s, 0.0)) {
      terms.clear();
      return *this;
    }
    for (auto& [p, c] : terms) c *= s;
    return *this;
  }
  friend PathVector operator+(PathVector a, const PathVector& b) { return a += b; }
  friend PathVector operator-(PathVector a, const PathVector& b) { return a -= b; }
  friend PathVector operator*(PathVector a, const S& s) { return a *= s; }

  bool empty() const { return terms.empty(); }
};

// ---------------------------------------------------------------------------
// Assumption verification reports
// ---------------------------------------------------------------------------

struct AssumptionOneReport {
  bool certified = false;
  std::string route;            // "scalar-index" | "perron-limit" | "none"
  std::vector<double> deviations;  // per n = l .. n_max
  bool exact_zero = false;
  double fitted_rate = 0.0;     // geometric decay ratio estimate (0 if exact)
  bool pass = false;
};

template <class S>
struct QDecomposition {
  int ell = 0;
  bool success = false;
  AlgElement<S> c;          // central invertible multiplier (when success)
  bool p_is_identity = true;
  // Failure certificate: two paths sharing a range vertex with distinct
  // q-eigenvalues.
  Path witness_a, witness_b;
  S witness_val_a{}, witness_val_b{};
};

struct QPropertiesReport {
  bool multiplicative = false;   // q_{m+l}(x (x) y) = q_l x (x) q_m y
  bool adjointable_both = false; // symmetric for both inner products
  bool trace_one = false;        // Phi_l(q_l) = identity
  bool positive = false;         // diagonal entries > 0
  bool pass() const { return multiplicative && adjointable_both && trace_one && positive; }
};

// ---------------------------------------------------------------------------
// The backend
// ---------------------------------------------------------------------------

template <class S>
class GraphBimodule {
 public:
  using Scalar = S;
  using Alg = AlgElement<S>;
  using PV = PathVector<S>;

  enum class CertRoute { scalar_index, perron, none };

  explicit GraphBimodule(Graph g, double tol = kDefaultTol) : g_(std::move(g)), tol_(tol) {
    if (auto n = g_.constant_row_sum()) {
      route_ = CertRoute::scalar_index;
      scalar_index_ = *n;
      if (scalar_index_ < 1) route_ = CertRoute::none;  // sink rows: no q machinery
    } else if (is_primitive(g_)) {
      route_ = CertRoute::perron;  // eigendata computed on first use
    } else {
      route_ = CertRoute::none;
    }
  }

  const Graph& graph() const { return g_; }
  double tol() const { return tol_; }
  CertRoute cert_route() const { return route_; }
  bool certified() const { return route_ != CertRoute::none; }
  std::string cert_route_name() const {
    switch (route_) {
      case CertRoute::scalar_index: return "scalar-index";
      case CertRoute::perron: return "perron-limit";
      default: return "none";
    }
  }
  // Spectral data for the perron-limit route. For exact scalars this throws
  // when the growth rate is irrational (use the float backend instead).
  const PerronData<S>& perron() const {
    if (route_ != CertRoute::perron)
      throw std::domain_error("spectral route not active for this graph");
    if (!perron_) perron_ = perron_data<S>(g_);
    return *perron_;
  }

  int num_vertices() const { return g_.num_vertices(); }

  // ---- elementary module structure ----------------------------------------

  // (x|y)_A(v) = sum over paths with source v of conj(x_p) y_p.
  Alg right_inner(const PV& x, const PV& y) const {
    require_same_degree(x, y);
    Alg a(num_vertices());
    for (const auto& [p, s] : x.terms) {
      auto it = y.terms.find(p);
      if (it == y.terms.end()) continue;
      a.c[source_of(g_, p)] += ScalarTraits<S>::conj(s) * it->second;
    }
    return a;
  }

  // _A(x|y)(v) = sum over paths with range v of x_p conj(y_p).
  Alg left_inner(const PV& x, const PV& y) const {
    require_same_degree(x, y);
    Alg a(num_vertices());
    for (const auto& [p, s] : x.terms) {
      auto it = y.terms.find(p);
      if (it == y.terms.end()) continue;
      a.c[range_of(g_, p)] += s * ScalarTraits<S>::conj(it->second);
    }
    return a;
  }

  PV act_left(const Alg& a, const PV& x) const {
    PV r(x.degree);
    for (const auto& [p, s] : x.terms) r.add_term(p, a.c[range_of(g_, p)] * s);
    return r;
  }
  PV act_right(const PV& x, const Alg& a) const {
    PV r(x.degree);
    for (const auto& [p, s] : x.terms) r.add_term(p, s * a.c[source_of(g_, p)]);
    return r;
  }

  PV tensor(const PV& x, const PV& y) const {
    PV r(x.degree + y.degree);
    for (const auto& [p, sp] : x.terms)
      for (const auto& [q, sq] : y.terms)
        if (auto pq = concat(g_, p, q)) r.add_term(*pq, sp * sq);
    return r;
  }

  double module_norm(const PV& x) const {  // sqrt of sup-norm of (x|x)_A
    return std::sqrt(right_inner(x, x).norm_inf());
  }

  // ---- frames --------------------------------------------------------------

  // Canonical frame of E (both a right and a left frame): the edge basis.
  std::vector<PV> canonical_frame() const {
    std::vector<PV> f;
    for (int i = 0; i < g_.num_edges(); ++i)
      f.push_back(PV::basis(Path{g_.edge(i).r, {i}}));
    return f;
  }

  // Rotated frame: orthogonal (3/5, 4/5) mixing of the first two edges keeps
  // everything exact while leaving no basis path fixed.
  std::vector<PV> rotated_frame() const {
    auto f = canonical_frame();
    if (f.size() < 2) return f;
    const S c = ScalarTraits<S>::from_int(3) / ScalarTraits<S>::from_int(5);
    const S s = ScalarTraits<S>::from_int(4) / ScalarTraits<S>::from_int(5);
    PV a = f[0] * c + f[1] * s;
    PV b = f[0] * (-s) + f[1] * c;
    f[0] = a;
    f[1] = b;
    return f;
  }

  // All l-fold tensors of frame elements (multi-indices), zero terms pruned.
  // l = 0 yields the unit of A viewed as the degree-0 module.
  std::vector<PV> tensor_frame(const std::vector<PV>& frame, int l) const {
    std::vector<PV> out;
    if (l == 0) {
      PV unit(0);
      for (int v = 0; v < num_vertices(); ++v)
        unit.add_term(Path{v, {}}, ScalarTraits<S>::one());
      out.push_back(unit);
      return out;
    }
    std::vector<PV> cur;
    for (const auto& e : frame) cur.push_back(e);
    for (int step = 1; step < l; ++step) {
      std::vector<PV> next;
      for (const auto& x : cur)
        for (const auto& e : frame) {
          PV t = tensor(x, e);
          next.push_back(std::move(t));
        }
      cur = std::move(next);
    }
    return cur;
  }

  // Frame identity check: sum_rho e_rho (e_rho | x)_A = x.
  bool frame_reproduces(const std::vector<PV>& frame_tensors, const PV& x) const {
    PV acc(x.degree);
    for (const auto& f : frame_tensors) acc += act_right(f, right_inner(f, x));
    PV diff = acc - x;
    for (const auto& [p, s] : diff.terms)
      if (!ScalarTraits<S>::is_zero(s, tol_)) return false;
    return true;
  }
  // Left frame identity: sum_rho {}_A(x|f_rho) f_rho = x.
  bool left_frame_reproduces(const std::vector<PV>& frame_tensors, const PV& x) const {
    PV acc(x.degree);
    for (const auto& f : frame_tensors) acc += act_left(left_inner(x, f), f);
    PV diff = acc - x;
    for (const auto& [p, s] : diff.terms)
      if (!ScalarTraits<S>::is_zero(s, tol_)) return false;
    return true;
  }

  // ---- Phi_l and beta exponents ---------------------------------------------

  // Fibered trace of an operator given densely on the path basis of E^{(x)l}.
  Alg phi_ell(const std::vector<std::vector<S>>& t, int l) const {
    auto paths = enumerate_paths(g_, l);
    if (t.size() != paths.size()) throw std::invalid_argument("phi_ell: matrix size mismatch");
    Alg a(num_vertices());
    for (size_t i = 0; i < paths.size(); ++i) a.c[range_of(g_, paths[i])] += t[i][i];
    return a;
  }

  // Same trace through an arbitrary frame of E^{(x)l}: sum _A(T f | f).
  Alg phi_ell_frame(const std::function<PV(const PV&)>& t,
                    const std::vector<PV>& frame_tensors) const {
    Alg a(num_vertices());
    for (const auto& f : frame_tensors) a += left_inner(t(f), f);
    return a;
  }

  // e^{beta_l}: row sums of adjacency^l as an algebra element.
  Alg beta_exp(int l) const {
    auto bs = beta_big(l);
    Alg a(num_vertices());
    for (int v = 0; v < num_vertices(); ++v) a.c[v] = big_to_scalar(bs[v]);
    return a;
  }

  // ---- the limit operator q ---------------------------------------------------

  // Diagonal eigenvalue of q_l on a basis path.
  S q_value(const Path& p) const {
    require_certified();
    const int l = p.length();
    if (route_ == CertRoute::scalar_index) {
      S n = ScalarTraits<S>::from_int(scalar_index_);
      S r = ScalarTraits<S>::one();
      for (int i = 0; i < l; ++i) r /= n;
      return r;
    }
    const auto& pd = perron();
    S r = pd.h[source_of(g_, p)] / pd.h[range_of(g_, p)];
    for (int i = 0; i < l; ++i) r /= pd.lambda;
    return r;
  }

  PV q_apply(const PV& x) const {
    PV r(x.degree);
    for (const auto& [p, s] : x.terms) r.add_term(p, q_value(p) * s);
    return r;
  }

  // Finite-stage operator e^{-beta_n} . e^{beta_(n-l)} on a basis path.
  S q_stage(const Path& p, int n) const {
    const int l = p.length();
    if (n < l) throw std::invalid_argument("q_stage: n < path length");
    auto num = beta_big(n - l);
    auto den = beta_big(n);
    if (den[range_of(g_, p)] == 0)
      throw std::domain_error("index exponent vanishes at range vertex (sink)");
    return big_to_scalar(num[source_of(g_, p)]) / big_to_scalar(den[range_of(g_, p)]);
  }

  AssumptionOneReport verify_assumption_one(const Path& nu, int n_max) const {
    AssumptionOneReport rep;
    rep.route = cert_route_name();
    rep.certified = certified();
    if (!rep.certified) return rep;
    const int l = nu.length();
    const S qv = q_value(nu);
    bool all_zero = true;
    for (int n = l; n <= n_max; ++n) {
      S dev = q_stage(nu, n) - qv;
      double d = ScalarTraits<S>::abs_double(dev);
      if (!ScalarTraits<S>::is_zero(dev, 0.0)) all_zero = false;
      rep.deviations.push_back(d);
    }
    rep.exact_zero = all_zero;
    // Float Perron data carries the limit's own iteration/rounding error, so
    // deviations at or below the comparison tolerance are resolution, not
    // signal: a final deviation at the floor means the stages converged, and
    // the decay rate is fitted on the above-floor prefix only. Exact scalars
    // keep a floor of zero.
    const double noise_floor = ScalarTraits<S>::exact ? 0.0 : tol_;
    const bool converged = all_zero || rep.deviations.back() <= noise_floor;
    std::vector<double> tail;
    for (double d : rep.deviations) {
      if (d <= noise_floor) {
        if (!tail.empty()) break;  // decayed into the floor: stop fitting
        continue;                  // skip leading zeros
      }
      tail.push_back(d);
    }
    // Geometric-rate fit; pass when converged, or when the tail is eventually
    // decreasing with fitted ratio below one.
    if (tail.size() >= 3) {
      double acc = 0.0;
      int cnt = 0;
      for (size_t i = 1; i < tail.size(); ++i) {
        acc += std::log(tail[i] / tail[i - 1]);
        ++cnt;
      }
      rep.fitted_rate = cnt ? std::exp(acc / cnt) : (converged ? 0.0 : 1.0);
    } else {
      rep.fitted_rate = converged ? 0.0 : 1.0;
    }
    if (converged) {
      rep.pass = true;
      return rep;
    }
    bool decreasing_tail = true;
    for (size_t i = tail.size() / 2; i + 1 < tail.size(); ++i)
      if (tail[i + 1] > tail[i] * (1.0 + 1e-9) + 1e-300) decreasing_tail = false;
    rep.pass = decreasing_tail && rep.fitted_rate < 1.0 - 1e-6;
    return rep;
  }

  QPropertiesReport verify_q_properties(int l_max) const {
    require_certified();
    QPropertiesReport rep;
    rep.positive = true;
    rep.multiplicative = true;
    rep.adjointable_both = true;
    rep.trace_one = true;
    std::vector<std::vector<Path>> paths(l_max + 1);
    for (int l = 0; l <= l_max; ++l) paths[l] = enumerate_paths(g_, l);
    for (int l = 0; l <= l_max; ++l)
      for (const auto& p : paths[l])
        if (ScalarTraits<S>::abs_double(q_value(p)) <= 0.0) rep.positive = false;
    // multiplicativity on composable basis tensors
    for (int l = 1; l < l_max; ++l)
      for (int m = 1; l + m <= l_max; ++m)
        for (const auto& p : paths[l])
          for (const auto& q : paths[m]) {
            auto pq = concat(g_, p, q);
            if (!pq) continue;
            S lhs = q_value(*pq);
            S rhs = q_value(p) * q_value(q);
            if (!scalar_close(lhs, rhs, tol_)) rep.multiplicative = false;
          }
    // adjointability for both inner products (diagonal, real: check symmetry)
    for (int l = 1; l <= l_max; ++l)
      for (const auto& p : paths[l])
        for (const auto& q : paths[l]) {
          PV bp = PV::basis(p), bq = PV::basis(q);
          auto r1 = right_inner(q_apply(bp), bq) - right_inner(bp, q_apply(bq));
          auto r2 = left_inner(q_apply(bp), bq) - left_inner(bp, q_apply(bq));
          if (!r1.is_zero(tol_) || !r2.is_zero(tol_)) rep.adjointable_both = false;
        }
    // Phi_l(q_l) = 1
    for (int l = 1; l <= l_max; ++l) {
      Alg tr(num_vertices());
      for (const auto& p : paths[l]) tr.c[range_of(g_, p)] += q_value(p);
      if (!tr.is_one(tol_)) rep.trace_one = false;
    }
    return rep;
  }

  // Multiplicative-decomposition detector: group the diagonal of q_l by range
  // vertex; success iff constant per group (then P_l = Id and c_l is the
  // group value, automatically Phi_l(P_l)^{-1}).
  QDecomposition<S> decompose_q(int l) const {
    require_certified();
    QDecomposition<S> d;
    d.ell = l;
    auto paths = enumerate_paths(g_, l);
    std::vector<std::optional<std::pair<Path, S>>> seen(num_vertices());
    d.success = true;
    for (const auto& p : paths) {
      const int v = range_of(g_, p);
      const S qv = q_value(p);
      if (!seen[v]) {
        seen[v] = std::make_pair(p, qv);
      } else if (!scalar_close(seen[v]->second, qv, tol_)) {
        d.success = false;
        d.witness_a = seen[v]->first;
        d.witness_b = p;
        d.witness_val_a = seen[v]->second;
        d.witness_val_b = qv;
        return d;
      }
    }
    d.c = Alg(num_vertices());
    for (int v = 0; v < num_vertices(); ++v) {
      if (!seen[v]) {  // no outgoing path: certification would have failed earlier
        d.success = false;
        return d;
      }
      d.c.c[v] = seen[v]->second;
    }
    d.p_is_identity = true;
    return d;
  }

  // c_l value at a vertex (for assumption-2-certified backends).
  S c_value(int l, int vertex) const {
    auto d = decompose_q(l);
    if (!d.success) throw std::domain_error("Assumption 2 decomposition unavailable");
    return d.c.c[vertex];
  }

 private:
  static void require_same_degree(const PV& x, const PV& y) {
    if (x.degree != y.degree) throw std::invalid_argument("degree mismatch");
  }
  void require_certified() const {
    if (!certified())
      throw std::domain_error(
          "Assumption 1 certification unavailable (non-primitive, non-constant row sums)");
  }

  std::vector<BigInt> beta_big(int l) const {
    auto it = beta_cache_.find(l);
    if (it != beta_cache_.end()) return it->second;
    const int n = num_vertices();
    std::vector<BigInt> v(n, BigInt(1));
    for (int step = 0; step < l; ++step) {
      std::vector<BigInt> nv(n, BigInt(0));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (g_.adjacency()[i][j]) nv[i] += BigInt(g_.adjacency()[i][j]) * v[j];
      v = std::move(nv);
    }
    beta_cache_[l] = v;
    return v;
  }

  static S big_to_scalar(const BigInt& b) {
    if constexpr (ScalarTraits<S>::exact)
      return Rational(b);
    else
      return b.convert_to<double>();
  }

  Graph g_;
  double tol_;
  CertRoute route_ = CertRoute::none;
  std::int64_t scalar_index_ = 0;
  mutable std::optional<PerronData<S>> perron_;
  mutable std::map<int, std::vector<BigInt>> beta_cache_;
};

}  // namespace pimsner
