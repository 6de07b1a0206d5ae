#pragma once

// Integer matrix normal forms and the K-groups of subshift algebras:
// K1 = coker(1 - A) and K0 = ker(1 - A) over the integers, computed through
// an exact Smith normal form with unimodular transform tracking.

#include "pimsner/graph.hpp"
#include "pimsner/scalar.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

namespace pimsner {

struct IntMatrix {
  int rows = 0, cols = 0;
  std::vector<BigInt> a;  // row-major

  IntMatrix() = default;
  IntMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, BigInt(0)) {}

  BigInt& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const BigInt& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

  static IntMatrix identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  IntMatrix operator*(const IntMatrix& o) const {
    if (cols != o.rows) throw std::invalid_argument("matrix shape mismatch");
    IntMatrix r(rows, o.cols);
    for (int i = 0; i < rows; ++i)
      for (int k = 0; k < cols; ++k) {
        if (at(i, k) == 0) continue;
        for (int j = 0; j < o.cols; ++j) r.at(i, j) += at(i, k) * o.at(k, j);
      }
    return r;
  }

  bool operator==(const IntMatrix& o) const {
    return rows == o.rows && cols == o.cols && a == o.a;
  }
};

struct SmithNormalForm {
  IntMatrix u, s, v;      // u * m * v == s, u and v unimodular
  int det_sign_u = 1;     // determinant of u (always +-1)
  int det_sign_v = 1;
};

// Smith normal form by exact elimination with minimal-absolute-value pivoting;
// divisibility chain enforced (s_ii | s_(i+1)(i+1)).
inline SmithNormalForm smith_normal_form(const IntMatrix& m) {
  SmithNormalForm f;
  f.s = m;
  f.u = IntMatrix::identity(m.rows);
  f.v = IntMatrix::identity(m.cols);
  IntMatrix& s = f.s;
  IntMatrix& u = f.u;
  IntMatrix& v = f.v;

  auto swap_rows = [&](int i, int j) {
    if (i == j) return;
    for (int c = 0; c < s.cols; ++c) std::swap(s.at(i, c), s.at(j, c));
    for (int c = 0; c < u.cols; ++c) std::swap(u.at(i, c), u.at(j, c));
    f.det_sign_u = -f.det_sign_u;
  };
  auto swap_cols = [&](int i, int j) {
    if (i == j) return;
    for (int r = 0; r < s.rows; ++r) std::swap(s.at(r, i), s.at(r, j));
    for (int r = 0; r < v.rows; ++r) std::swap(v.at(r, i), v.at(r, j));
    f.det_sign_v = -f.det_sign_v;
  };
  auto add_row = [&](int dst, int src, const BigInt& c) {  // row dst += c * row src
    for (int j = 0; j < s.cols; ++j) s.at(dst, j) += c * s.at(src, j);
    for (int j = 0; j < u.cols; ++j) u.at(dst, j) += c * u.at(src, j);
  };
  auto add_col = [&](int dst, int src, const BigInt& c) {  // col dst += c * col src
    for (int i = 0; i < s.rows; ++i) s.at(i, dst) += c * s.at(i, src);
    for (int i = 0; i < v.rows; ++i) v.at(i, dst) += c * v.at(i, src);
  };
  auto negate_row = [&](int i) {
    for (int j = 0; j < s.cols; ++j) s.at(i, j) = -s.at(i, j);
    for (int j = 0; j < u.cols; ++j) u.at(i, j) = -u.at(i, j);
    f.det_sign_u = -f.det_sign_u;
  };

  const int n = std::min(s.rows, s.cols);
  for (int t = 0; t < n; ++t) {
    // Find the nonzero entry of minimal absolute value in the trailing block.
    int pi = -1, pj = -1;
    BigInt best;
    for (int i = t; i < s.rows; ++i)
      for (int j = t; j < s.cols; ++j) {
        if (s.at(i, j) == 0) continue;
        BigInt m_abs = abs(s.at(i, j));
        if (pi < 0 || m_abs < best) {
          best = m_abs;
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) break;  // trailing block is zero
    swap_rows(t, pi);
    swap_cols(t, pj);

    // Clear row and column t; pivoting may need repeating when remainders pop up.
    bool dirty = true;
    while (dirty) {
      dirty = false;
      for (int i = t + 1; i < s.rows; ++i) {
        if (s.at(i, t) == 0) continue;
        BigInt q = s.at(i, t) / s.at(t, t);
        add_row(i, t, -q);
        if (s.at(i, t) != 0) {  // remainder smaller than pivot: promote it
          swap_rows(t, i);
          dirty = true;
        }
      }
      for (int j = t + 1; j < s.cols; ++j) {
        if (s.at(t, j) == 0) continue;
        BigInt q = s.at(t, j) / s.at(t, t);
        add_col(j, t, -q);
        if (s.at(t, j) != 0) {
          swap_cols(t, j);
          dirty = true;
        }
      }
    }
    if (s.at(t, t) < 0) negate_row(t);
  }

  // Enforce the divisibility chain d_t | d_{t+1}.
  for (int t = 0; t + 1 < n; ++t) {
    for (int k = t; k + 1 < n; ++k) {
      if (s.at(k, k) == 0 || s.at(k + 1, k + 1) % s.at(k, k) == 0) continue;
      // Fold entry (k+1,k+1) into column k, then re-reduce the 2x2 corner.
      add_col(k, k + 1, 1);
      bool dirty = true;
      while (dirty) {
        dirty = false;
        if (s.at(k + 1, k) != 0) {
          BigInt q = s.at(k + 1, k) / s.at(k, k);
          add_row(k + 1, k, -q);
          if (s.at(k + 1, k) != 0) {
            swap_rows(k, k + 1);
            dirty = true;
          }
        }
        if (s.at(k, k + 1) != 0) {
          BigInt q = s.at(k, k + 1) / s.at(k, k);
          add_col(k + 1, k, -q);
          if (s.at(k, k + 1) != 0) {
            swap_cols(k, k + 1);
            dirty = true;
          }
        }
      }
      if (s.at(k, k) < 0) negate_row(k);
      if (s.at(k + 1, k + 1) < 0) negate_row(k + 1);
    }
  }
  return f;
}

// Finitely generated abelian group in invariant-factor form.
struct AbelianGroup {
  int free_rank = 0;
  std::vector<BigInt> torsion;  // divisibility chain, entries >= 2

  bool trivial() const { return free_rank == 0 && torsion.empty(); }
  bool operator==(const AbelianGroup& o) const {
    return free_rank == o.free_rank && torsion == o.torsion;
  }
  std::string str() const {
    if (trivial()) return "0";
    std::string out;
    auto app = [&out](const std::string& p) {
      if (!out.empty()) out += " + ";
      out += p;
    };
    if (free_rank == 1) app("Z");
    if (free_rank > 1) app("Z^" + std::to_string(free_rank));
    for (const auto& d : torsion) app("Z/" + d.str());
    return out;
  }
};

inline IntMatrix one_minus(const SFTMatrix& m) {
  const int n = m.alphabet();
  IntMatrix r(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) r.at(i, j) = BigInt((i == j ? 1 : 0) - m.a[i][j]);
  return r;
}

inline AbelianGroup cokernel(const IntMatrix& m) {
  auto f = smith_normal_form(m);
  AbelianGroup g;
  const int n = std::min(m.rows, m.cols);
  int rank = 0;
  for (int i = 0; i < n; ++i) {
    const BigInt& d = f.s.at(i, i);
    if (d == 0) continue;
    ++rank;
    if (d >= 2) g.torsion.push_back(d);
  }
  g.free_rank = m.rows - rank;  // target rank minus image rank
  return g;
}

inline int kernel_rank(const IntMatrix& m) {
  auto f = smith_normal_form(m);
  const int n = std::min(m.rows, m.cols);
  int rank = 0;
  for (int i = 0; i < n; ++i)
    if (f.s.at(i, i) != 0) ++rank;
  return m.cols - rank;
}

// K1(O_A) = Z^N / (1-A) Z^N.
inline AbelianGroup pimsner_K1(const SFTMatrix& m) { return cokernel(one_minus(m)); }

// K0(O_A) = ker(1-A) (free part only; the full K0 is coker + ker glued by the
// exact sequence, and for these inputs the kernel is the free summand).
inline AbelianGroup pimsner_K0(const SFTMatrix& m) {
  AbelianGroup g;
  g.free_rank = kernel_rank(one_minus(m));
  return g;
}

// |det(1-A)| through the normal form (product of the invariant factors with
// the tracked transform signs); zero when singular.
inline BigInt det_one_minus_abs(const SFTMatrix& m) {
  auto f = smith_normal_form(one_minus(m));
  BigInt d(1);
  const int n = std::min(f.s.rows, f.s.cols);
  for (int i = 0; i < n; ++i) d *= f.s.at(i, i);
  return abs(d);
}

}  // namespace pimsner
