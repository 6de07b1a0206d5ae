#include <catch_amalgamated.hpp>

#include "pimsner/graph.hpp"

#include <Eigen/Dense>

using namespace pimsner;

namespace {

std::vector<std::vector<std::int64_t>> mat_pow(std::vector<std::vector<std::int64_t>> a, int p) {
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<std::int64_t>> r(n, std::vector<std::int64_t>(n, 0));
  for (int i = 0; i < n; ++i) r[i][i] = 1;
  for (int step = 0; step < p; ++step) {
    std::vector<std::vector<std::int64_t>> t(n, std::vector<std::int64_t>(n, 0));
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) t[i][j] += r[i][k] * a[k][j];
    r = std::move(t);
  }
  return r;
}

std::int64_t entry_sum(const std::vector<std::vector<std::int64_t>>& a) {
  std::int64_t s = 0;
  for (const auto& row : a)
    for (auto x : row) s += x;
  return s;
}

}  // namespace

TEST_CASE("graph construction validates its input") {
  CHECK_THROWS_AS(Graph::from_edges({}, {}), ValidationError);
  CHECK_THROWS_AS(Graph::from_edges({"v", "v"}, {{"e", 0, 1}}), ValidationError);
  CHECK_THROWS_AS(Graph::from_edges({"a", "b"}, {{"e", 0, 1}, {"e", 1, 0}}), ValidationError);
  CHECK_THROWS_AS(Graph::from_edges({"a", "b"}, {{"e", 0, 2}}), ValidationError);
  // isolated vertex
  CHECK_THROWS_AS(Graph::from_edges({"a", "b", "c"}, {{"e", 0, 1}, {"f", 1, 0}}),
                  ValidationError);
  // matrix with negative multiplicity
  CHECK_THROWS_AS(Graph::from_matrix({{-1}}), ValidationError);
}

TEST_CASE("edge ids sort numerically when possible") {
  Graph g = Graph::from_edges({"v"}, {{"e10", 0, 0}, {"e2", 0, 0}, {"e1", 0, 0}});
  CHECK(g.edge(0).id == "e1");
  CHECK(g.edge(1).id == "e2");
  CHECK(g.edge(2).id == "e10");
}

TEST_CASE("path enumeration matches adjacency powers") {
  struct Case {
    std::vector<std::vector<std::int64_t>> a;
    int lmax;
  };
  const std::vector<Case> cases = {
      {{{1, 1}, {1, 0}}, 6},
      {{{2}}, 5},
      {{{1, 1, 0}, {0, 1, 1}, {1, 0, 1}}, 5},
      {{{0, 1}, {1, 0}}, 6},
  };
  for (const auto& c : cases) {
    Graph g = Graph::from_matrix(c.a);
    for (int l = 0; l <= c.lmax; ++l) {
      auto paths = enumerate_paths(g, l);
      std::int64_t expected = (l == 0) ? static_cast<std::int64_t>(c.a.size())
                                       : entry_sum(mat_pow(c.a, l));
      CHECK(static_cast<std::int64_t>(paths.size()) == expected);
      for (const auto& p : paths) {
        REQUIRE(p.length() == l);
        for (size_t i = 0; i + 1 < p.edges.size(); ++i)
          CHECK(g.edge(p.edges[i]).s == g.edge(p.edges[i + 1]).r);
        if (l > 0) {
          CHECK(range_of(g, p) == g.edge(p.edges.front()).r);
          CHECK(source_of(g, p) == g.edge(p.edges.back()).s);
        }
      }
      // enumeration is strictly ordered, hence duplicate-free
      for (size_t i = 0; i + 1 < paths.size(); ++i) CHECK(paths[i] < paths[i + 1]);
    }
  }
}

TEST_CASE("frozen path counts for the golden-mean graph") {
  Graph g = make_golden_mean_graph();
  CHECK(enumerate_paths(g, 1).size() == 3);
  CHECK(enumerate_paths(g, 2).size() == 5);
  CHECK(enumerate_paths(g, 3).size() == 8);
}

TEST_CASE("frozen path counts for the full graph on two symbols") {
  Graph g = make_full_graph(2);
  CHECK(enumerate_paths(g, 3).size() == 8);
  CHECK(g.constant_row_sum().has_value());
  CHECK(*g.constant_row_sum() == 2);
}

TEST_CASE("path concatenation respects composability") {
  Graph g = make_golden_mean_graph();
  auto p1 = enumerate_paths(g, 1);
  int composable = 0;
  for (const auto& a : p1)
    for (const auto& b : p1) {
      auto c = concat(g, a, b);
      if (source_of(g, a) == range_of(g, b)) {
        REQUIRE(c.has_value());
        CHECK(c->length() == 2);
        ++composable;
      } else {
        CHECK(!c.has_value());
      }
    }
  CHECK(composable == 5);
}

TEST_CASE("primitivity detection") {
  CHECK(is_primitive(make_full_graph(2)));
  CHECK(is_primitive(make_golden_mean_graph()));
  CHECK(is_primitive(Graph::from_matrix({{1}})));
  CHECK_FALSE(is_primitive(Graph::from_matrix({{1, 1}, {0, 1}})));
  CHECK_FALSE(is_primitive(Graph::from_matrix({{0, 1}, {1, 0}})));
  CHECK_FALSE(is_primitive(make_cycle_graph(3)));
}

TEST_CASE("exact spectral data for integer-eigenvalue graphs") {
  SECTION("full graph") {
    auto pd = perron_data<Rational>(make_full_graph(3));
    CHECK(pd.lambda == Rational(3));
    for (const auto& h : pd.h) CHECK(h == Rational(1));
    CHECK(pd.exact);
  }
  SECTION("non-regular graph with integer growth rate") {
    auto pd = perron_data<Rational>(Graph::from_matrix({{2, 2}, {1, 1}}));
    CHECK(pd.lambda == Rational(3));
    CHECK(pd.h[0] == Rational(1));
    CHECK(pd.h[1] == Rational(1, 2));
  }
  SECTION("irrational growth rate is refused in exact mode") {
    CHECK_THROWS(perron_data<Rational>(make_golden_mean_graph()));
  }
  SECTION("non-primitive graphs are refused") {
    CHECK_THROWS(perron_data<Rational>(Graph::from_matrix({{1, 1}, {0, 1}})));
    CHECK_THROWS(perron_data<double>(Graph::from_matrix({{1, 1}, {0, 1}})));
  }
}

TEST_CASE("floating spectral data agrees with a dense eigensolver") {
  const std::vector<std::vector<std::vector<std::int64_t>>> mats = {
      {{1, 1}, {1, 0}},
      {{1, 1, 0}, {0, 1, 1}, {1, 0, 1}},
      {{2, 2}, {1, 1}},
  };
  for (const auto& a : mats) {
    Graph g = Graph::from_matrix(a);
    auto pd = perron_data<double>(g);
    const int n = static_cast<int>(a.size());
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = static_cast<double>(a[i][j]);
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    double lam = 0.0;
    for (int i = 0; i < n; ++i) lam = std::max(lam, es.eigenvalues()(i).real());
    CHECK(pd.lambda == Catch::Approx(lam).epsilon(1e-9));
    // eigenvector residual
    for (int i = 0; i < n; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += static_cast<double>(a[i][j]) * pd.h[j];
      CHECK(acc == Catch::Approx(pd.lambda * pd.h[i]).margin(1e-8));
    }
    double hmax = 0.0;
    for (double h : pd.h) hmax = std::max(hmax, h);
    CHECK(hmax == Catch::Approx(1.0));
  }
}

TEST_CASE("golden mean eigendata matches the closed form") {
  auto pd = perron_data<double>(make_golden_mean_graph());
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  CHECK(pd.lambda == Catch::Approx(phi).epsilon(1e-9));
  CHECK(pd.h[0] == Catch::Approx(1.0));
  CHECK(pd.h[1] == Catch::Approx(1.0 / phi).epsilon(1e-8));
}

TEST_CASE("shift matrices validate and enumerate words") {
  CHECK_THROWS_AS(SFTMatrix::validate({{1, 0}, {1, 0}}), ValidationError);  // zero column
  CHECK_THROWS_AS(SFTMatrix::validate({{0, 0}, {1, 1}}), ValidationError);  // zero row
  CHECK_THROWS_AS(SFTMatrix::validate({{2, 0}, {1, 1}}), ValidationError);  // not 0/1

  SFTMatrix gm = make_golden_mean_shift();
  CHECK(enumerate_words(gm, 0).size() == 1);
  CHECK(enumerate_words(gm, 1).size() == 2);
  CHECK(enumerate_words(gm, 2).size() == 3);
  CHECK(enumerate_words(gm, 3).size() == 5);
  CHECK(enumerate_words(gm, 4).size() == 8);
  CHECK(word_admissible(gm, Word({0, 1, 0})));
  CHECK_FALSE(word_admissible(gm, Word({1, 1})));

  SFTMatrix full = make_full_shift(2);
  for (int m = 0; m <= 5; ++m)
    CHECK(enumerate_words(full, m).size() == static_cast<size_t>(1) << m);
}

TEST_CASE("display helpers") {
  Graph g = make_golden_mean_graph();
  auto paths = enumerate_paths(g, 2);
  for (const auto& p : paths) CHECK(path_str(g, p).size() > 0);
  Path empty{1, {}};
  CHECK(path_str(g, empty) == "(1)");
  CHECK(word_str(Word({0, 1, 0})) == "121");
}
