#pragma once

// Finite directed graphs and subshift (0/1) matrices: validation, path/word
// enumeration, primitivity, and Perron eigendata. These are the combinatorial
// substrates for the two bimodule backends.

#include "pimsner/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace pimsner {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

struct Edge {
  std::string id;
  int r = 0;  // range vertex index
  int s = 0;  // source vertex index
};

namespace detail {
// Natural-order id comparison: maximal digit runs compare numerically, other
// characters lexicographically, so e2 sorts before e10.
inline bool id_less(const std::string& a, const std::string& b) {
  size_t i = 0, j = 0;
  auto digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      size_t ie = i, je = j;
      while (ie < a.size() && digit(a[ie])) ++ie;
      while (je < b.size() && digit(b[je])) ++je;
      std::string da = a.substr(i, ie - i), db = b.substr(j, je - j);
      // strip leading zeros for the numeric comparison
      size_t za = da.find_first_not_of('0'), zb = db.find_first_not_of('0');
      std::string na = (za == std::string::npos) ? "0" : da.substr(za);
      std::string nb = (zb == std::string::npos) ? "0" : db.substr(zb);
      if (na.size() != nb.size()) return na.size() < nb.size();
      if (na != nb) return na < nb;
      if (da != db) return da < db;  // same value, different zero padding
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}
}  // namespace detail

class Graph {
 public:
  // Builds and validates a graph from explicit edge data. Edges are reordered
  // lexicographically by id so every downstream basis is reproducible.
  static Graph from_edges(std::vector<std::string> vertex_names, std::vector<Edge> edges) {
    Graph g;
    g.vertex_names_ = std::move(vertex_names);
    if (g.vertex_names_.empty()) throw ValidationError("graph has no vertices");
    {
      std::set<std::string> seen;
      for (const auto& v : g.vertex_names_)
        if (!seen.insert(v).second) throw ValidationError("duplicate vertex id: " + v);
    }
    {
      std::set<std::string> seen;
      for (const auto& e : edges)
        if (!seen.insert(e.id).second) throw ValidationError("duplicate edge id: " + e.id);
    }
    const int nv = static_cast<int>(g.vertex_names_.size());
    for (const auto& e : edges) {
      if (e.r < 0 || e.r >= nv || e.s < 0 || e.s >= nv)
        throw ValidationError("dangling edge endpoint on edge " + e.id);
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return detail::id_less(a.id, b.id); });
    g.edges_ = std::move(edges);

    std::vector<bool> touched(nv, false);
    g.adj_.assign(nv, std::vector<std::int64_t>(nv, 0));
    g.out_of_.assign(nv, {});
    for (int i = 0; i < static_cast<int>(g.edges_.size()); ++i) {
      const Edge& e = g.edges_[i];
      touched[e.r] = true;
      touched[e.s] = true;
      g.adj_[e.r][e.s] += 1;
      g.out_of_[e.r].push_back(i);  // edges with range v, in id order
    }
    for (int v = 0; v < nv; ++v)
      if (!touched[v])
        throw ValidationError("isolated vertex: " + g.vertex_names_[v]);
    return g;
  }

  // Matrix form: entry (v,w) counts edges with range v and source w. Edge ids
  // are sequential integers in row-major order.
  static Graph from_matrix(const std::vector<std::vector<std::int64_t>>& m) {
    const int n = static_cast<int>(m.size());
    if (n == 0) throw ValidationError("graph has no vertices");
    std::vector<std::string> names;
    names.reserve(n);
    for (int v = 0; v < n; ++v) names.push_back(std::to_string(v));
    std::vector<Edge> edges;
    int next_id = 0;
    for (int v = 0; v < n; ++v) {
      if (static_cast<int>(m[v].size()) != n) throw ValidationError("adjacency matrix not square");
      for (int w = 0; w < n; ++w) {
        if (m[v][w] < 0) throw ValidationError("negative adjacency entry");
        for (std::int64_t j = 0; j < m[v][w]; ++j)
          edges.push_back(Edge{std::to_string(next_id++), v, w});
      }
    }
    return from_edges(std::move(names), std::move(edges));
  }

  int num_vertices() const { return static_cast<int>(vertex_names_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<std::string>& vertex_names() const { return vertex_names_; }
  const Edge& edge(int i) const { return edges_[i]; }
  const std::vector<std::vector<std::int64_t>>& adjacency() const { return adj_; }
  // Edge indices with range v, in id order.
  const std::vector<int>& edges_out_of(int v) const { return out_of_[v]; }

  std::vector<std::int64_t> row_sums() const {
    std::vector<std::int64_t> rs(num_vertices(), 0);
    for (int v = 0; v < num_vertices(); ++v)
      for (auto c : adj_[v]) rs[v] += c;
    return rs;
  }

  // All row sums equal (constant l-step index); empty optional otherwise.
  std::optional<std::int64_t> constant_row_sum() const {
    auto rs = row_sums();
    for (auto x : rs)
      if (x != rs[0]) return std::nullopt;
    return rs[0];
  }

 private:
  std::vector<std::string> vertex_names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::int64_t>> adj_;
  std::vector<std::vector<int>> out_of_;
};

// ---------------------------------------------------------------------------
// Paths (composable edge sequences; the degree-0 path carries its vertex)
// ---------------------------------------------------------------------------

struct Path {
  int base_vertex = 0;       // r(first edge), or the carried vertex if empty
  std::vector<int> edges;    // edge indices; consecutive edges compose s->r

  int length() const { return static_cast<int>(edges.size()); }
  bool empty() const { return edges.empty(); }

  bool operator==(const Path& o) const {
    return base_vertex == o.base_vertex && edges == o.edges;
  }
  bool operator<(const Path& o) const {
    if (edges.size() != o.edges.size()) return edges.size() < o.edges.size();
    if (edges != o.edges) return edges < o.edges;
    return base_vertex < o.base_vertex;
  }
};

inline int range_of(const Graph& g, const Path& p) {
  return p.empty() ? p.base_vertex : g.edge(p.edges.front()).r;
}
inline int source_of(const Graph& g, const Path& p) {
  return p.empty() ? p.base_vertex : g.edge(p.edges.back()).s;
}

// Concatenation mu.nu (requires s(mu) = r(nu)); empty optional if incomposable.
inline std::optional<Path> concat(const Graph& g, const Path& a, const Path& b) {
  if (source_of(g, a) != range_of(g, b)) return std::nullopt;
  Path p;
  p.base_vertex = range_of(g, a);
  p.edges = a.edges;
  p.edges.insert(p.edges.end(), b.edges.begin(), b.edges.end());
  return p;
}

inline Path prefix_of(const Graph& g, const Path& p, int len) {
  Path q;
  q.edges.assign(p.edges.begin(), p.edges.begin() + len);
  q.base_vertex = len > 0 ? g.edge(q.edges.front()).r : range_of(g, p);
  return q;
}
inline Path suffix_of(const Graph& g, const Path& p, int from) {
  Path q;
  q.edges.assign(p.edges.begin() + from, p.edges.end());
  q.base_vertex = from < p.length() ? g.edge(q.edges.front()).r : source_of(g, p);
  return q;
}

inline std::string path_str(const Graph& g, const Path& p) {
  if (p.empty()) return "(" + g.vertex_names()[p.base_vertex] + ")";
  std::string s;
  for (size_t i = 0; i < p.edges.size(); ++i) {
    if (i) s += ".";
    s += g.edge(p.edges[i]).id;
  }
  return s;
}

// All paths of the given edge-length in lexicographic (edge-id) order.
// Length 0 yields one empty path per vertex. Count = sum of entries of
// adjacency^length.
inline std::vector<Path> enumerate_paths(const Graph& g, int length) {
  if (length < 0) throw std::invalid_argument("negative path length");
  std::vector<Path> out;
  if (length == 0) {
    for (int v = 0; v < g.num_vertices(); ++v) out.push_back(Path{v, {}});
    return out;
  }
  Path cur;
  auto dfs = [&](auto&& self, int remaining, int at) -> void {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int ei : g.edges_out_of(at)) {
      cur.edges.push_back(ei);
      if (cur.edges.size() == 1) cur.base_vertex = g.edge(ei).r;
      self(self, remaining - 1, g.edge(ei).s);
      cur.edges.pop_back();
    }
  };
  for (int v = 0; v < g.num_vertices(); ++v) dfs(dfs, length, v);
  return out;
}

// ---------------------------------------------------------------------------
// Subshift matrices and admissible words
// ---------------------------------------------------------------------------

struct SFTMatrix {
  std::vector<std::vector<int>> a;  // 0/1 entries

  static SFTMatrix validate(std::vector<std::vector<int>> m) {
    const int n = static_cast<int>(m.size());
    if (n == 0) throw ValidationError("subshift matrix is empty");
    for (const auto& row : m)
      if (static_cast<int>(row.size()) != n) throw ValidationError("subshift matrix not square");
    for (const auto& row : m)
      for (int x : row)
        if (x != 0 && x != 1) throw ValidationError("subshift matrix entry not 0/1");
    for (int i = 0; i < n; ++i) {
      bool row_ok = false, col_ok = false;
      for (int j = 0; j < n; ++j) {
        row_ok = row_ok || m[i][j] == 1;
        col_ok = col_ok || m[j][i] == 1;
      }
      if (!row_ok) throw ValidationError("subshift matrix has a zero row");
      if (!col_ok) throw ValidationError("subshift matrix has a zero column");
    }
    SFTMatrix s;
    s.a = std::move(m);
    return s;
  }

  int alphabet() const { return static_cast<int>(a.size()); }
  bool allows(int i, int j) const { return a[i][j] == 1; }
};

// Words store 0-based symbol indices as raw bytes; displayed 1-based.
using Word = std::string;

inline bool word_admissible(const SFTMatrix& m, const Word& w) {
  for (size_t i = 0; i < w.size(); ++i) {
    if (static_cast<unsigned char>(w[i]) >= static_cast<unsigned>(m.alphabet())) return false;
    if (i + 1 < w.size() && !m.allows(w[i], w[i + 1])) return false;
  }
  return true;
}

inline std::string word_str(const Word& w) {
  if (w.empty()) return "()";
  std::string s;
  for (char c : w) s += std::to_string(static_cast<int>(c) + 1);
  return s;
}

inline std::vector<Word> enumerate_words(const SFTMatrix& m, int length) {
  if (length < 0) throw std::invalid_argument("negative word length");
  std::vector<Word> out;
  Word cur;
  auto dfs = [&](auto&& self, int remaining) -> void {
    if (remaining == 0) {
      out.push_back(cur);
      return;
    }
    for (int c = 0; c < m.alphabet(); ++c) {
      if (!cur.empty() && !m.allows(cur.back(), c)) continue;
      cur.push_back(static_cast<char>(c));
      self(self, remaining - 1);
      cur.pop_back();
    }
  };
  dfs(dfs, length);
  return out;
}

// ---------------------------------------------------------------------------
// Primitivity (Wielandt bound) and Perron data
// ---------------------------------------------------------------------------

inline bool is_primitive(const std::vector<std::vector<std::int64_t>>& a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return false;
  // Boolean matrix powers with saturation; Wielandt: primitive iff
  // A^((n-1)^2 + 1) is strictly positive.
  using BMat = std::vector<std::vector<char>>;
  BMat b(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b[i][j] = a[i][j] > 0 ? 1 : 0;
  auto mul = [n](const BMat& x, const BMat& y) {
    BMat z(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        if (x[i][k])
          for (int j = 0; j < n; ++j) z[i][j] = static_cast<char>(z[i][j] | y[k][j]);
    return z;
  };
  long long e = static_cast<long long>(n - 1) * (n - 1) + 1;
  BMat acc(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i) acc[i][i] = 1;
  BMat base = b;
  while (e > 0) {
    if (e & 1) acc = mul(acc, base);
    base = mul(base, base);
    e >>= 1;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!acc[i][j]) return false;
  return true;
}

inline bool is_primitive(const Graph& g) { return is_primitive(g.adjacency()); }
inline bool is_primitive(const SFTMatrix& m) {
  std::vector<std::vector<std::int64_t>> a(m.alphabet(),
                                           std::vector<std::int64_t>(m.alphabet(), 0));
  for (int i = 0; i < m.alphabet(); ++i)
    for (int j = 0; j < m.alphabet(); ++j) a[i][j] = m.a[i][j];
  return is_primitive(a);
}

template <class S>
struct PerronData {
  S lambda{};
  std::vector<S> h;  // entrywise positive right eigenvector, max entry 1
  bool exact = false;
};

namespace detail {
// Kernel of (A - lambda I) over the rationals; returns a basis.
inline std::vector<std::vector<Rational>> rational_kernel(
    const std::vector<std::vector<std::int64_t>>& a, const BigInt& lambda) {
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      m[i][j] = Rational(a[i][j]);
      if (i == j) m[i][j] -= Rational(lambda);
    }
  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < n && row < n; ++col) {
    int piv = -1;
    for (int r = row; r < n; ++r)
      if (m[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[row], m[piv]);
    const Rational d = m[row][col];
    for (int j = 0; j < n; ++j) m[row][j] /= d;
    for (int r = 0; r < n; ++r) {
      if (r == row || m[r][col] == 0) continue;
      const Rational f = m[r][col];
      for (int j = 0; j < n; ++j) m[r][j] -= f * m[row][j];
    }
    pivot_col.push_back(col);
    ++row;
  }
  std::vector<bool> is_pivot(n, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (int free_col = 0; free_col < n; ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<Rational> v(n, Rational(0));
    v[free_col] = 1;
    for (size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -m[r][free_col];
    basis.push_back(std::move(v));
  }
  return basis;
}
}  // namespace detail

// Exact Perron data. Requires primitivity; requires the Perron value to be an
// integer (a rational Perron root of a monic integer characteristic polynomial
// is an integer). Throws with guidance toward float mode otherwise.
inline PerronData<Rational> perron_data_exact(const Graph& g) {
  if (!is_primitive(g))
    throw ValidationError("Perron limit not guaranteed; Assumption 1 unverified");
  const auto& a = g.adjacency();
  std::int64_t max_rs = 0;
  for (const auto& row : a) {
    std::int64_t s = 0;
    for (auto x : row) s += x;
    max_rs = std::max(max_rs, s);
  }
  for (std::int64_t lam = max_rs; lam >= 1; --lam) {
    auto basis = detail::rational_kernel(a, BigInt(lam));
    if (basis.size() != 1) continue;
    auto& v = basis[0];
    bool pos = true, neg = true;
    for (const auto& x : v) {
      if (x <= 0) pos = false;
      if (x >= 0) neg = false;
    }
    if (!pos && !neg) continue;
    if (neg)
      for (auto& x : v) x = -x;
    Rational mx(0);
    for (const auto& x : v) mx = std::max(mx, x);
    for (auto& x : v) x /= mx;
    PerronData<Rational> pd;
    pd.lambda = Rational(lam);
    pd.h = std::move(v);
    pd.exact = true;
    return pd;
  }
  throw ValidationError(
      "Perron value is irrational (no integer eigenvalue with positive eigenvector); "
      "use float mode");
}

// Float Perron data by power iteration (primitive input converges
// geometrically). Residual tolerance 1e-10 * ||h||.
inline PerronData<double> perron_data_float(const Graph& g) {
  if (!is_primitive(g))
    throw ValidationError("Perron limit not guaranteed; Assumption 1 unverified");
  const auto& a = g.adjacency();
  const int n = g.num_vertices();
  std::vector<double> h(n, 1.0), next(n);
  double lambda = 0.0;
  for (int it = 0; it < 200000; ++it) {
    double mx = 0.0;
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += static_cast<double>(a[i][j]) * h[j];
      next[i] = s;
      mx = std::max(mx, s);
    }
    for (int i = 0; i < n; ++i) next[i] /= mx;
    double lam_new = mx;
    double diff = 0.0;
    for (int i = 0; i < n; ++i) diff = std::max(diff, std::fabs(next[i] - h[i]));
    h = next;
    const bool settled = diff < 1e-15 && std::fabs(lam_new - lambda) < 1e-13 * std::max(1.0, lam_new);
    lambda = lam_new;
    if (settled && it > 3) break;
  }
  // residual check
  double hn = 0.0, res = 0.0;
  for (int i = 0; i < n; ++i) hn = std::max(hn, std::fabs(h[i]));
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += static_cast<double>(a[i][j]) * h[j];
    res = std::max(res, std::fabs(s - lambda * h[i]));
  }
  if (res > 1e-10 * hn) throw std::runtime_error("power iteration failed to converge");
  PerronData<double> pd;
  pd.lambda = lambda;
  pd.h = std::move(h);
  pd.exact = false;
  return pd;
}

template <class S>
PerronData<S> perron_data(const Graph& g);
template <>
inline PerronData<Rational> perron_data<Rational>(const Graph& g) {
  return perron_data_exact(g);
}
template <>
inline PerronData<double> perron_data<double>(const Graph& g) {
  return perron_data_float(g);
}

// Convenience builders for standard examples.
inline Graph make_full_graph(int n_edges) {  // single vertex, N loops (Cuntz algebra O_N)
  std::vector<std::vector<std::int64_t>> m{{n_edges}};
  return Graph::from_matrix(m);
}
inline Graph make_cycle_graph(int order) {  // cyclic permutation graph
  std::vector<std::vector<std::int64_t>> m(order, std::vector<std::int64_t>(order, 0));
  for (int v = 0; v < order; ++v) m[v][(v + 1) % order] = 1;
  return Graph::from_matrix(m);
}
inline Graph make_golden_mean_graph() {  // loop at v0, 2-cycle between v0 and v1
  return Graph::from_matrix({{1, 1}, {1, 0}});
}
inline SFTMatrix make_full_shift(int n) {
  return SFTMatrix::validate(std::vector<std::vector<int>>(n, std::vector<int>(n, 1)));
}
inline SFTMatrix make_golden_mean_shift() {
  return SFTMatrix::validate({{1, 1}, {1, 0}});
}

}  // namespace pimsner
