#pragma once

// Gram-matrix machinery on top of the symbol module: scalarisation of the
// algebra-valued inner product by a faithful state, exact ranks and positive
// semidefiniteness over rational scalars, orthogonalisation, and dense
// eigenvalue helpers for floating-point verification.

#include "pimsner/xi.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace pimsner {

template <class S>
using DenseMatrix = std::vector<std::vector<S>>;

// Faithful state on the coefficient algebra: plain sum over vertices.
template <class S>
S tau_state(const GraphXi<S>& /*xi*/, const AlgElement<S>& a) {
  S acc = ScalarTraits<S>::zero();
  for (const auto& v : a.c) acc += v;
  return acc;
}

// Faithful state for cylinder functions: the Markov measure with uniform
// initial distribution and uniform transition weights. Its cylinder weights
// are consistent across refinement, so the value does not depend on the
// depth at which a function is represented.
template <class S>
S tau_state(const SubshiftXi<S>& xi, const CylFun<S>& f) {
  const SFTMatrix& m = xi.matrix();
  std::vector<int> row_sums(m.alphabet(), 0);
  for (int i = 0; i < m.alphabet(); ++i)
    for (int j = 0; j < m.alphabet(); ++j)
      if (m.allows(i, j)) ++row_sums[i];
  const auto& ws = xi.module().words(f.depth);
  S acc = ScalarTraits<S>::zero();
  for (size_t i = 0; i < ws.size(); ++i) {
    if (ScalarTraits<S>::is_zero(f.coeff[i], 0.0)) continue;
    S w = ScalarTraits<S>::one();
    if (!ws[i].empty()) {
      w = w / ScalarTraits<S>::from_int(m.alphabet());
      for (size_t p = 0; p + 1 < ws[i].size(); ++p)
        w = w / ScalarTraits<S>::from_int(row_sums[static_cast<unsigned char>(ws[i][p])]);
    }
    acc += f.coeff[i] * w;
  }
  return acc;
}

template <class Xi>
typename Xi::Scalar scalar_inner(const Xi& xi, const typename Xi::Vec& x,
                                 const typename Xi::Vec& y) {
  return tau_state(xi, xi.xi_inner(x, y));
}

template <class Xi>
DenseMatrix<typename Xi::Scalar> gram_matrix(const Xi& xi,
                                             const std::vector<typename Xi::Vec>& vs) {
  using S = typename Xi::Scalar;
  const size_t n = vs.size();
  DenseMatrix<S> g(n, std::vector<S>(n, ScalarTraits<S>::zero()));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i; j < n; ++j) {
      g[i][j] = scalar_inner(xi, vs[i], vs[j]);
      if (j != i) g[j][i] = ScalarTraits<S>::conj(g[i][j]);
    }
  return g;
}

// Gram matrix of the algebra-valued inner product evaluated at one vertex:
// the inner product of the fibre Hilbert space over that vertex.
template <class S>
DenseMatrix<S> gram_fiber(const GraphXi<S>& xi, const std::vector<typename GraphXi<S>::Vec>& vs,
                          int vertex) {
  const size_t n = vs.size();
  DenseMatrix<S> g(n, std::vector<S>(n, ScalarTraits<S>::zero()));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i; j < n; ++j) {
      g[i][j] = xi.xi_inner(vs[i], vs[j]).c[vertex];
      if (j != i) g[j][i] = ScalarTraits<S>::conj(g[i][j]);
    }
  return g;
}

// Row-echelon rank. Exact for rational scalars (tol ignored); for doubles,
// entries below tol * (largest absolute entry) count as zero.
template <class S>
int matrix_rank(DenseMatrix<S> m, double tol = kDefaultTol) {
  if (m.empty()) return 0;
  const size_t rows = m.size(), cols = m[0].size();
  double scale = 0.0;
  for (const auto& r : m)
    for (const auto& e : r) scale = std::max(scale, ScalarTraits<S>::abs_double(e));
  const double thresh = ScalarTraits<S>::exact ? 0.0 : tol * std::max(scale, 1.0);
  int rank = 0;
  size_t row = 0;
  for (size_t col = 0; col < cols && row < rows; ++col) {
    size_t piv = row;
    double best = ScalarTraits<S>::abs_double(m[row][col]);
    for (size_t r = row + 1; r < rows; ++r) {
      double a = ScalarTraits<S>::abs_double(m[r][col]);
      if (a > best) {
        best = a;
        piv = r;
      }
    }
    if (best <= thresh) continue;
    std::swap(m[row], m[piv]);
    for (size_t r = row + 1; r < rows; ++r) {
      if (ScalarTraits<S>::is_zero(m[r][col], 0.0)) continue;
      S f = m[r][col] / m[row][col];
      for (size_t c = col; c < cols; ++c) m[r][c] -= f * m[row][c];
    }
    ++row;
    ++rank;
  }
  return rank;
}

// Exact positive-semidefiniteness of a symmetric matrix by pivoted outer-
// product elimination: every step needs a nonnegative diagonal, and a zero
// diagonal entry forces its whole row to vanish.
template <class S>
bool matrix_psd(DenseMatrix<S> m) {
  const size_t n = m.size();
  std::vector<bool> done(n, false);
  for (size_t step = 0; step < n; ++step) {
    size_t piv = n;
    double best = -1.0;
    for (size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      if (ScalarTraits<S>::abs_double(m[i][i]) > best &&
          !ScalarTraits<S>::is_zero(m[i][i], 0.0)) {
        best = ScalarTraits<S>::abs_double(m[i][i]);
        piv = i;
      }
    }
    if (piv == n) {
      // all remaining diagonal entries vanish: matrix must be zero there
      for (size_t i = 0; i < n; ++i) {
        if (done[i]) continue;
        for (size_t j = 0; j < n; ++j)
          if (!done[j] && !ScalarTraits<S>::is_zero(m[i][j], 0.0)) return false;
      }
      return true;
    }
    if (m[piv][piv] < ScalarTraits<S>::zero()) return false;
    const S d = m[piv][piv];
    done[piv] = true;
    for (size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      if (ScalarTraits<S>::is_zero(m[i][piv], 0.0)) continue;
      const S f = m[i][piv] / d;
      for (size_t j = 0; j < n; ++j)
        if (!done[j]) m[i][j] -= f * m[piv][j];
    }
  }
  return true;
}

// Gram-Schmidt in the scalarised inner product. Returns the surviving
// orthogonal (unnormalised) vectors together with their squared norms;
// dependent directions drop out, so the count equals the Gram rank.
template <class Xi>
std::vector<std::pair<typename Xi::Vec, typename Xi::Scalar>> orthogonalize(
    const Xi& xi, const std::vector<typename Xi::Vec>& vs) {
  using S = typename Xi::Scalar;
  std::vector<std::pair<typename Xi::Vec, S>> basis;
  for (const auto& v : vs) {
    typename Xi::Vec w = v;
    for (const auto& [b, n2] : basis) {
      S proj = scalar_inner(xi, b, w) / n2;
      w = xi.sub(w, xi.scale(b, proj));
    }
    S n2 = scalar_inner(xi, w, w);
    if constexpr (ScalarTraits<S>::exact) {
      if (ScalarTraits<S>::is_zero(n2, 0.0)) continue;
    } else {
      if (ScalarTraits<S>::abs_double(n2) <= xi.tol()) continue;
    }
    basis.push_back({std::move(w), std::move(n2)});
  }
  return basis;
}

template <class S>
DenseMatrix<double> to_double_matrix(const DenseMatrix<S>& m) {
  DenseMatrix<double> out(m.size());
  for (size_t i = 0; i < m.size(); ++i) {
    out[i].reserve(m[i].size());
    for (const auto& e : m[i]) out[i].push_back(to_double(e));
  }
  return out;
}

inline Eigen::MatrixXd to_eigen(const DenseMatrix<double>& m) {
  const Eigen::Index n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd e(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) e(i, j) = m[i][j];
  return e;
}

inline std::vector<double> sym_eigenvalues(const DenseMatrix<double>& m) {
  if (m.empty()) return {};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(m));
  std::vector<double> out(es.eigenvalues().data(),
                          es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

// Largest generalized eigenvalue of K x = lambda G x restricted to the range
// of the (possibly singular) PSD matrix G.
inline double max_generalized_eig(const DenseMatrix<double>& k, const DenseMatrix<double>& g,
                                  double tol = 1e-12) {
  if (k.empty()) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_eigen(g));
  const auto& vals = es.eigenvalues();
  double scale = vals.size() ? std::abs(vals(vals.size() - 1)) : 0.0;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    if (vals(i) > tol * std::max(scale, 1.0)) keep.push_back(i);
  if (keep.empty()) return 0.0;
  Eigen::MatrixXd basis(vals.size(), static_cast<Eigen::Index>(keep.size()));
  for (size_t c = 0; c < keep.size(); ++c)
    basis.col(static_cast<Eigen::Index>(c)) =
        es.eigenvectors().col(keep[c]) / std::sqrt(vals(keep[c]));
  Eigen::MatrixXd kk = basis.transpose() * to_eigen(k) * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(kk);
  return es2.eigenvalues().maxCoeff();
}

}  // namespace pimsner
