// Worked example: spectral data of the grading operator on the two-letter
// one-vertex backend (two isometries with full range projections).
//
// Builds the module, lists the occupied (n,k) cells of a depth-4 window with
// their ranks and weights, aggregates the resolvent multiplicities, and
// reports the windowed commutator norm of one generator.

#include <pimsner/operators.hpp>
#include <pimsner/xi.hpp>

#include <cstdio>

using namespace pimsner;

int main() {
  GraphXi<Rational> xi(make_full_graph(2));
  const PsiFunction psi = psi_default();

  // Occupied cells, ordered by |weight| then (n, k).
  const auto dec = build_decomposition(xi, psi, 4);
  std::printf("occupied cells at depth 4 (weight %s):\n", dec.psi_name.c_str());
  std::printf("  %4s %4s %8s %8s\n", "n", "k", "rank", "weight");
  for (const auto& c : dec.cells)
    std::printf("  %4d %4d %8s %8s\n", c.n, c.k, c.rank.str().c_str(),
                scalar_str(c.psi).c_str());

  // Eigenvalue multiplicities of the truncated operator.
  std::printf("\nresolvent spectrum (eigenvalue -> multiplicity):\n");
  for (const auto& [value, mult] : resolvent_spectrum(dec))
    std::printf("  %8s -> %s\n", scalar_str(value).c_str(), mult.str().c_str());

  // The commutator with a generator stays below twice the generator norm.
  const auto rep = commutator_norm(xi, 0, psi, 5);
  std::printf("\ncommutator with generator 0 over a depth-5 window:\n");
  std::printf("  norm %.12g, bound %.12g, attained on cell (%d,%d)\n", rep.value, rep.bound,
              rep.att_n, rep.att_k);
  return 0;
}
