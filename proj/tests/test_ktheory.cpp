#include <catch_amalgamated.hpp>

#include "pimsner/graph.hpp"
#include "pimsner/ktheory.hpp"

using namespace pimsner;

namespace {

// Fraction-free determinant (Bareiss), used as an independent oracle for the
// unimodularity of the transformation matrices.
BigInt det_bareiss(IntMatrix m) {
  REQUIRE(m.rows == m.cols);
  const int n = m.rows;
  BigInt prev(1);
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m.at(k, k) == 0) {
      int piv = -1;
      for (int i = k + 1; i < n; ++i)
        if (m.at(i, k) != 0) {
          piv = i;
          break;
        }
      if (piv < 0) return BigInt(0);
      for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(piv, j));
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        m.at(i, j) = (m.at(i, j) * m.at(k, k) - m.at(i, k) * m.at(k, j)) / prev;
    prev = m.at(k, k);
  }
  return sign * m.at(n - 1, n - 1);
}

IntMatrix from_rows(const std::vector<std::vector<long long>>& rows) {
  IntMatrix m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) m.at(i, j) = BigInt(rows[i][j]);
  return m;
}

void check_snf_contract(const IntMatrix& m) {
  auto f = smith_normal_form(m);
  // shape
  REQUIRE(f.u.rows == m.rows);
  REQUIRE(f.u.cols == m.rows);
  REQUIRE(f.v.rows == m.cols);
  REQUIRE(f.v.cols == m.cols);
  // factorisation
  CHECK(f.u * m * f.v == f.s);
  // diagonality, nonnegativity, divisibility chain
  const int n = std::min(m.rows, m.cols);
  for (int i = 0; i < f.s.rows; ++i)
    for (int j = 0; j < f.s.cols; ++j)
      if (i != j) CHECK(f.s.at(i, j) == 0);
  for (int i = 0; i < n; ++i) CHECK(f.s.at(i, i) >= 0);
  for (int i = 0; i + 1 < n; ++i) {
    if (f.s.at(i + 1, i + 1) != 0) {
      REQUIRE(f.s.at(i, i) != 0);
      CHECK(f.s.at(i + 1, i + 1) % f.s.at(i, i) == 0);
    }
  }
  // unimodular transforms
  BigInt du = det_bareiss(f.u), dv = det_bareiss(f.v);
  CHECK((du == 1 || du == -1));
  CHECK((dv == 1 || dv == -1));
}

}  // namespace

TEST_CASE("Smith form satisfies its contract on assorted matrices") {
  check_snf_contract(from_rows({{2, 4}, {6, 8}}));
  check_snf_contract(from_rows({{0}}));
  check_snf_contract(from_rows({{5}}));
  check_snf_contract(from_rows({{2, 0, 0}, {0, 3, 0}}));
  check_snf_contract(from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}}));
  check_snf_contract(from_rows({{6, 10}, {15, 4}}));
  check_snf_contract(from_rows({{0, -1, -1}, {-1, 0, -1}, {-1, -1, 0}}));
  check_snf_contract(from_rows({{-7}}));
  check_snf_contract(from_rows({{0, 0}, {0, 0}}));
  check_snf_contract(from_rows({{1, 0}, {0, 1}}));
  check_snf_contract(from_rows({{2, 1, 0, 3}, {1, -4, 2, 0}, {0, 5, -1, 1}}));
}

TEST_CASE("divisibility chain is enforced") {
  auto f = smith_normal_form(from_rows({{2, 0}, {0, 3}}));
  CHECK(f.s.at(0, 0) == 1);
  CHECK(f.s.at(1, 1) == 6);
}

TEST_CASE("frozen Smith diagonals") {
  auto f = smith_normal_form(from_rows({{2, 4}, {6, 8}}));
  CHECK(f.s.at(0, 0) == 2);
  CHECK(f.s.at(1, 1) == 4);

  auto g = smith_normal_form(from_rows({{0, -1, -1}, {-1, 0, -1}, {-1, -1, 0}}));
  CHECK(g.s.at(0, 0) == 1);
  CHECK(g.s.at(1, 1) == 1);
  CHECK(g.s.at(2, 2) == 2);
}

TEST_CASE("K-groups of the full shifts") {
  for (int n = 2; n <= 6; ++n) {
    auto m = make_full_shift(n);
    AbelianGroup k1 = pimsner_K1(m);
    AbelianGroup k0 = pimsner_K0(m);
    if (n == 2) {
      CHECK(k1.trivial());
    } else {
      REQUIRE(k1.torsion.size() == 1);
      CHECK(k1.torsion[0] == n - 1);
      CHECK(k1.free_rank == 0);
    }
    CHECK(k0.trivial());
    CHECK(det_one_minus_abs(m) == n - 1);
  }
}

TEST_CASE("K-groups of the golden mean shift are trivial") {
  auto m = make_golden_mean_shift();
  CHECK(pimsner_K1(m).trivial());
  CHECK(pimsner_K0(m).trivial());
  CHECK(det_one_minus_abs(m) == 1);
}

TEST_CASE("period-two shift has free K-groups") {
  auto m = SFTMatrix::validate({{0, 1}, {1, 0}});
  AbelianGroup k1 = pimsner_K1(m);
  CHECK(k1.free_rank == 1);
  CHECK(k1.torsion.empty());
  AbelianGroup k0 = pimsner_K0(m);
  CHECK(k0.free_rank == 1);
  CHECK(k0.torsion.empty());
  CHECK(det_one_minus_abs(m) == 0);
}

TEST_CASE("three-symbol full shift with explicit matrix") {
  auto m = SFTMatrix::validate({{1, 1, 1}, {1, 1, 1}, {1, 1, 1}});
  AbelianGroup k1 = pimsner_K1(m);
  REQUIRE(k1.torsion.size() == 1);
  CHECK(k1.torsion[0] == 2);
  CHECK(k1.free_rank == 0);
  CHECK(det_one_minus_abs(m) == 2);
}

TEST_CASE("torsion order matches the determinant whenever it is nonzero") {
  const std::vector<std::vector<std::vector<int>>> mats = {
      {{1, 1}, {1, 0}},
      {{1, 1, 0}, {0, 1, 1}, {1, 0, 1}},
      {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}},
      {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}},
  };
  for (const auto& raw : mats) {
    auto m = SFTMatrix::validate(raw);
    BigInt d = det_one_minus_abs(m);
    if (d == 0) continue;
    AbelianGroup k1 = pimsner_K1(m);
    CHECK(k1.free_rank == 0);
    BigInt order(1);
    for (const auto& t : k1.torsion) order *= t;
    CHECK(order == d);
  }
}

TEST_CASE("group formatting") {
  AbelianGroup t;
  CHECK(t.trivial());
  AbelianGroup g;
  g.free_rank = 2;
  g.torsion = {BigInt(2), BigInt(6)};
  CHECK(g.str().find("Z") != std::string::npos);
  CHECK_FALSE(g == t);
}
