// pimsner-lab: command-line front end for the Cuntz-Pimsner toolkit.
//
// Subcommands: inspect, assumptions, decompose, spectrum, commutators,
// ktheory, kms, groupoid-check. Inputs are JSON files (graph or subshift
// matrix) or named presets (full-N, cycle-N, fibonacci, golden-mean).
// Exit codes: 0 pass, 1 usage/parse error, 2 mathematical check failure,
// 3 precondition failure (e.g. non-primitive graph).

#include <pimsner/groupoid.hpp>
#include <pimsner/io.hpp>
#include <pimsner/ktheory.hpp>
#include <pimsner/report.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

namespace {

using namespace pimsner;

struct MathFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct Precondition : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string input;
  std::string backend = "graph";  // graph | sft | smeb-test
  int depth = 3;
  int cyl_depth = 4;
  int n_min = -2;
  int n_max = 2;
  int k_max = 2;
  double tol = kDefaultTol;
  bool float_mode = false;
  std::string psi = "default";
  std::string format = "tsv";
};

// ---------------------------------------------------------------------------
// Input resolution: an existing file is parsed as JSON; otherwise the name is
// matched against the built-in presets.

int preset_size(const std::string& name, const std::string& stem) {
  if (name.rfind(stem, 0) != 0) return -1;
  const std::string num = name.substr(stem.size());
  if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos) return -1;
  return std::stoi(num);
}

Graph load_graph(const RunConfig& cfg) {
  if (cfg.backend == "smeb-test") return make_cycle_graph(3);
  if (cfg.input.empty()) throw ParseError("missing --input (file or preset)");
  if (std::filesystem::exists(cfg.input)) return parse_graph_json(load_json_file(cfg.input));
  if (int n = preset_size(cfg.input, "full-"); n > 0) return make_full_graph(n);
  if (int n = preset_size(cfg.input, "cycle-"); n > 1) return make_cycle_graph(n);
  if (cfg.input == "fibonacci") return make_golden_mean_graph();
  throw ParseError("\"" + cfg.input + "\" is neither a file nor a graph preset");
}

SFTMatrix load_sft(const RunConfig& cfg) {
  if (cfg.input.empty()) throw ParseError("missing --input (file or preset)");
  if (std::filesystem::exists(cfg.input)) return parse_sft_json(load_json_file(cfg.input));
  if (int n = preset_size(cfg.input, "full-"); n > 0) return make_full_shift(n);
  if (cfg.input == "golden-mean") return make_golden_mean_shift();
  throw ParseError("\"" + cfg.input + "\" is neither a file nor a subshift preset");
}

bool graph_backend(const RunConfig& cfg) {
  return cfg.backend == "graph" || cfg.backend == "smeb-test";
}

void emit(const RunConfig& cfg, const std::vector<Table>& tables) {
  print_tables(std::cout, tables, cfg.format);
}

void verdict(bool pass, const std::string& what) {
  std::cerr << what << (pass ? ": pass" : ": FAIL") << "\n";
  if (!pass) throw MathFailure(what + " failed");
}

template <class S>
std::string alg_str(const AlgElement<S>& a) {
  bool constant = true;
  for (const auto& v : a.c) constant = constant && v == a.c[0];
  if (constant && !a.c.empty()) return scalar_str(a.c[0]);
  std::string out = "[";
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    if (i) out += ",";
    out += scalar_str(a.c[i]);
  }
  return out + "]";
}

// ---------------------------------------------------------------------------
// inspect

template <class S>
void inspect_graph(const RunConfig& cfg, const Graph& g) {
  Table t("inspect", {"property", "value"});
  t.add_row("backend", cfg.backend);
  t.add_row("vertices", g.num_vertices());
  t.add_row("edges", g.num_edges());
  t.add_row("primitive", is_primitive(g));
  GraphBimodule<S> bim(g, cfg.tol);
  t.add_row("certification", bim.cert_route_name());
  if (auto n = g.constant_row_sum()) t.add_row("row-sum", static_cast<long long>(*n));
  if (is_primitive(g)) {
    try {
      auto pd = perron_data<S>(g);
      t.add_row("growth-rate", scalar_str(pd.lambda));
      std::string h;
      for (std::size_t i = 0; i < pd.h.size(); ++i)
        h += (i ? "," : "") + scalar_str(pd.h[i]);
      t.add_row("eigenvector", h);
    } catch (const ValidationError&) {
      auto pd = perron_data_float(g);
      t.add_row("growth-rate", std::string(scalar_str(pd.lambda)) + " (irrational; float)");
    }
  }
  emit(cfg, {t});
}

void inspect_sft(const RunConfig& cfg, const SFTMatrix& m) {
  Table t("inspect", {"property", "value"});
  t.add_row("backend", cfg.backend);
  t.add_row("alphabet", m.alphabet());
  for (int l = 1; l <= cfg.depth; ++l)
    t.add_row("words-" + std::to_string(l),
              static_cast<long long>(enumerate_words(m, l).size()));
  emit(cfg, {t});
}

int cmd_inspect(const RunConfig& cfg) {
  if (graph_backend(cfg)) {
    const Graph g = load_graph(cfg);
    if (cfg.float_mode)
      inspect_graph<double>(cfg, g);
    else
      inspect_graph<Rational>(cfg, g);
  } else {
    inspect_sft(cfg, load_sft(cfg));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// assumptions: decay of the Φ_n ratios and the multiplicative structure of q.

template <class S>
int assumptions_graph(const RunConfig& cfg, const Graph& g) {
  GraphBimodule<S> bim(g, cfg.tol);
  if (!bim.certified())
    throw Precondition("certification unavailable: graph is neither constant row-sum nor primitive");

  bool all = true;
  Table tq("q-properties", {"check", "pass"});
  const auto rep = bim.verify_q_properties(cfg.depth);
  tq.add_row("multiplicative", rep.multiplicative);
  tq.add_row("adjointable-both", rep.adjointable_both);
  tq.add_row("trace-identity", rep.trace_one);
  tq.add_row("positive", rep.positive);
  all = all && rep.pass();

  Table ta("ratio-decay", {"nu", "route", "exact", "rate", "pass"});
  for (int e = 0; e < g.num_edges(); ++e) {
    const Path nu{g.edge(e).r, {e}};
    const auto a1 = bim.verify_assumption_one(nu, cfg.depth + 6);
    ta.add_row(path_str(g, nu), a1.route, a1.exact_zero, a1.fitted_rate, a1.pass);
    all = all && a1.pass;
  }

  Table td("decomposition", {"l", "success", "c", "p-identity"});
  for (int l = 1; l <= cfg.depth; ++l) {
    const auto d = bim.decompose_q(l);
    td.add_row(l, d.success, d.success ? alg_str(d.c) : std::string("-"), d.p_is_identity);
    all = all && d.success;
  }

  emit(cfg, {tq, ta, td});
  verdict(all, "assumptions check");
  return 0;
}

int assumptions_sft(const RunConfig& cfg, const SFTMatrix& m) {
  SubshiftBimodule<Rational> bim(m, cfg.tol);
  bool all = true;
  Table t("assumptions", {"l", "index-identity", "q-identity"});
  for (int l = 1; l <= cfg.depth; ++l) {
    const bool beta_ok = bim.equal(bim.beta_exp(l), bim.unit(0));
    bool q_ok = true;
    for (const Word& w : enumerate_words(m, l))
      q_ok = q_ok && bim.equal(bim.q_apply(bim.cylinder(w, l)), bim.cylinder(w, l));
    t.add_row(l, beta_ok, q_ok);
    all = all && beta_ok && q_ok;
  }
  emit(cfg, {t});
  verdict(all, "assumptions check");
  return 0;
}

int cmd_assumptions(const RunConfig& cfg) {
  if (graph_backend(cfg)) {
    const Graph g = load_graph(cfg);
    return cfg.float_mode ? assumptions_graph<double>(cfg, g)
                          : assumptions_graph<Rational>(cfg, g);
  }
  return assumptions_sft(cfg, load_sft(cfg));
}

// ---------------------------------------------------------------------------
// decompose: q_l = c_l P_l detection per degree.

template <class S>
int decompose_graph(const RunConfig& cfg, const Graph& g) {
  GraphBimodule<S> bim(g, cfg.tol);
  if (!bim.certified())
    throw Precondition("certification unavailable: graph is neither constant row-sum nor primitive");
  bool all = true;
  Table t("decomposition", {"l", "success", "c", "p-identity", "witness"});
  for (int l = 1; l <= cfg.depth; ++l) {
    const auto d = bim.decompose_q(l);
    std::string witness;
    if (!d.success)
      witness = path_str(g, d.witness_a) + ":" + scalar_str(d.witness_val_a) + " vs " +
                path_str(g, d.witness_b) + ":" + scalar_str(d.witness_val_b);
    t.add_row(l, d.success, d.success ? alg_str(d.c) : std::string("-"), d.p_is_identity, witness);
    all = all && d.success;
  }
  emit(cfg, {t});
  verdict(all, "decomposition check");
  return 0;
}

int cmd_decompose(const RunConfig& cfg) {
  if (graph_backend(cfg)) {
    const Graph g = load_graph(cfg);
    return cfg.float_mode ? decompose_graph<double>(cfg, g)
                          : decompose_graph<Rational>(cfg, g);
  }
  const SFTMatrix m = load_sft(cfg);
  Table t("decomposition", {"l", "success", "c", "p-identity", "witness"});
  for (int l = 1; l <= cfg.depth; ++l) t.add_row(l, true, "1", true, "");
  emit(cfg, {t});
  verdict(true, "decomposition check");
  return 0;
}

// ---------------------------------------------------------------------------
// spectrum: occupied (n,k) cells with ranks and grading-weight values.

template <class Xi>
int spectrum_table(const RunConfig& cfg, const Xi& xi) {
  const auto dec = build_decomposition(xi, psi_by_name(cfg.psi), cfg.depth);
  Table t("spectrum", {"n", "k", "rank", "psi"});
  for (const auto& c : dec.cells) t.add_row(c.n, c.k, c.rank, c.psi);
  emit(cfg, {t});
  return 0;
}

int cmd_spectrum(const RunConfig& cfg) {
  if (graph_backend(cfg)) {
    const Graph g = load_graph(cfg);
    return cfg.float_mode ? spectrum_table(cfg, GraphXi<double>(g, cfg.tol))
                          : spectrum_table(cfg, GraphXi<Rational>(g, cfg.tol));
  }
  const SFTMatrix m = load_sft(cfg);
  return cfg.float_mode ? spectrum_table(cfg, SubshiftXi<double>(m, cfg.tol))
                        : spectrum_table(cfg, SubshiftXi<Rational>(m, cfg.tol));
}

// ---------------------------------------------------------------------------
// commutators: windowed norms of [D, S_e] per length-1 generator.

template <class Xi>
int commutator_tables(const RunConfig& cfg, const Xi& xi, const std::vector<std::string>& labels) {
  const PsiFunction psi = psi_by_name(cfg.psi);
  bool all = true;
  Table cells("commutator-cells", {"generator", "n", "k", "rank", "psi", "norm"});
  Table summary("commutator-summary",
                {"generator", "norm", "bound", "attained-n", "attained-k", "bounded"});
  for (std::size_t gidx = 0; gidx < labels.size(); ++gidx) {
    const auto rep = commutator_norm(xi, static_cast<int>(gidx), psi, cfg.depth);
    for (const auto& c : rep.cells)
      cells.add_row(labels[gidx], c.n, c.k, cell_rank(xi, c.n, c.k), psi(c.n, c.k), c.value);
    const bool ok = rep.value <= rep.bound + cfg.tol;
    summary.add_row(labels[gidx], rep.value, rep.bound, rep.att_n, rep.att_k, ok);
    all = all && ok;
  }
  emit(cfg, {cells, summary});
  verdict(all, "commutator bound check");
  return 0;
}

int cmd_commutators(const RunConfig& cfg) {
  if (graph_backend(cfg)) {
    const Graph g = load_graph(cfg);
    std::vector<std::string> labels;
    for (int e = 0; e < g.num_edges(); ++e) labels.push_back(g.edge(e).id);
    return cfg.float_mode ? commutator_tables(cfg, GraphXi<double>(g, cfg.tol), labels)
                          : commutator_tables(cfg, GraphXi<Rational>(g, cfg.tol), labels);
  }
  const SFTMatrix m = load_sft(cfg);
  std::vector<std::string> labels;
  for (int s = 0; s < m.alphabet(); ++s) labels.push_back(std::to_string(s + 1));
  return cfg.float_mode ? commutator_tables(cfg, SubshiftXi<double>(m, cfg.tol), labels)
                        : commutator_tables(cfg, SubshiftXi<Rational>(m, cfg.tol), labels);
}

// ---------------------------------------------------------------------------
// ktheory: K-groups of the boundary algebra from the subshift matrix.

int cmd_ktheory(const RunConfig& cfg) {
  SFTMatrix m;
  if (graph_backend(cfg)) {
    const Graph g = load_graph(cfg);
    std::vector<std::vector<int>> entries;
    for (const auto& row : g.adjacency()) {
      std::vector<int> r;
      for (auto v : row) {
        if (v != 0 && v != 1)
          throw Precondition("graph adjacency has multiple edges; K-groups need a 0/1 matrix "
                             "(use --backend sft with the symbol matrix)");
        r.push_back(static_cast<int>(v));
      }
      entries.push_back(std::move(r));
    }
    m = SFTMatrix::validate(std::move(entries));
  } else {
    m = load_sft(cfg);
  }

  const AbelianGroup k1 = pimsner_K1(m);
  const AbelianGroup k0 = pimsner_K0(m);
  const BigInt det = det_one_minus_abs(m);
  BigInt order(1);
  for (const auto& d : k1.torsion) order *= d;
  const bool order_ok = (det == 0) ? (k1.free_rank > 0) : (k1.free_rank == 0 && order == det);

  if (cfg.format == "json") {
    json out{{"K1", group_to_json(k1)},
             {"K0", group_to_json(k0)},
             {"det-abs", iodetail::bigint_to_json(det)},
             {"order-check", order_ok ? "pass" : "fail"}};
    std::cout << out.dump(2) << "\n";
  } else {
    Table t("ktheory", {"quantity", "value"});
    t.add_row("K1", k1.str());
    t.add_row("K0", k0.str());
    t.add_row("det-abs", det);
    t.add_row("order-check", order_ok ? "pass" : "fail");
    emit(cfg, {t});
  }
  verdict(order_ok, "torsion order cross-check");
  return 0;
}

// ---------------------------------------------------------------------------
// kms: gauge-equilibrium expectation values Φ_∞(S_μ S_ν*) against the closed
// form δ_{μν}·q(μ), computed through the full product machinery.

template <class S>
int kms_table(const RunConfig& cfg, const Graph& g) {
  GraphXi<S> xi(g, cfg.tol);
  std::vector<Path> paths;
  for (int l = 0; l <= cfg.depth; ++l)
    for (const Path& p : enumerate_paths(g, l)) paths.push_back(p);

  bool all = true;
  Table t("kms", {"mu", "nu", "value"});
  for (const Path& mu : paths)
    for (const Path& nu : paths) {
      const Path at_smu{source_of(g, mu), {}}, at_snu{source_of(g, nu), {}};
      const auto prod = xi.mult(xi.single(GraphSym{mu, at_smu}),
                                xi.star(xi.single(GraphSym{nu, at_snu})));
      const auto value = xi.phi_infty(prod);
      AlgElement<S> expected(g.num_vertices());
      if (mu == nu) expected.c[range_of(g, mu)] = xi.module().q_value(mu);
      bool match = true;
      for (int v = 0; v < g.num_vertices(); ++v)
        match = match && scalar_close(value.c[v], expected.c[v], cfg.tol);
      all = all && match;
      bool zero = true;
      for (const auto& v : value.c) zero = zero && ScalarTraits<S>::is_zero(v, cfg.tol);
      t.add_row(path_str(g, mu), path_str(g, nu),
                zero ? std::string("0") : scalar_str(value.c[range_of(g, mu)]));
    }
  emit(cfg, {t});
  verdict(all, "equilibrium expectation check");
  return 0;
}

int cmd_kms(const RunConfig& cfg) {
  if (!graph_backend(cfg))
    throw Precondition("equilibrium expectations are computed on the graph backend");
  const Graph g = load_graph(cfg);
  return cfg.float_mode ? kms_table<double>(cfg, g) : kms_table<Rational>(cfg, g);
}

// ---------------------------------------------------------------------------
// groupoid-check: the two-picture comparison on the subshift backend.

int cmd_groupoid_check(const RunConfig& cfg) {
  if (graph_backend(cfg))
    throw Precondition("the two-picture comparison runs on the subshift backend (--backend sft)");
  const int reach = std::max(cfg.k_max, cfg.n_max + cfg.k_max);
  if (cfg.cyl_depth < reach)
    throw Precondition("--cyl-depth must be at least the window reach (" + std::to_string(reach) +
                       ")");
  const SFTMatrix m = load_sft(cfg);
  SubshiftXi<Rational> xi(m, cfg.tol);
  const auto rep = compare_models(xi, cfg.n_min, cfg.n_max, cfg.k_max, cfg.cyl_depth);
  const std::string window = "window n in [" + std::to_string(cfg.n_min) + "," +
                             std::to_string(cfg.n_max) + "], k <= " + std::to_string(cfg.k_max) +
                             ", depth " + std::to_string(cfg.cyl_depth);

  Table counts("checks", {"check", "count"});
  counts.add_row("basis-elements", static_cast<long long>(rep.basis_elements));
  counts.add_row("projector-checks", static_cast<long long>(rep.projector_checks));
  counts.add_row("weight-checks", static_cast<long long>(rep.kore_checks));
  counts.add_row("point-checks", static_cast<long long>(rep.point_checks));
  counts.add_row("rank-checks", static_cast<long long>(rep.rank_checks));
  Table cells("cells", {"n", "k", "count"});
  for (const auto& c : rep.cells) cells.add_row(c.n, c.k, c.count);

  if (!rep.pass) {
    std::cerr << "comparison failed: " << rep.failure << "\n";
    throw MathFailure("two-picture comparison failed");
  }
  if (cfg.format == "json") {
    json out{{"result", "all checks passed"},
             {"window", {{"n-min", cfg.n_min}, {"n-max", cfg.n_max}, {"k-max", cfg.k_max},
                         {"depth", cfg.cyl_depth}}},
             {"tables", json::array({to_json(counts), to_json(cells)})}};
    std::cout << out.dump(2) << "\n";
  } else {
    std::cout << "all checks passed (" << window << ")\n";
    emit(cfg, {counts, cells});
  }
  return 0;
}

// ---------------------------------------------------------------------------

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const Precondition& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return 3;
  } catch (const MathFailure& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 2;
  } catch (const UndecidedError& e) {
    std::cerr << "precondition: undecidable on symbolic data: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return 3;
  } catch (const std::domain_error& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pimsner-lab: exact and numerical checks for Cuntz-Pimsner spectral data"};
  app.require_subcommand(1);

  RunConfig cfg;
  auto add_common = [&cfg](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "input JSON file or preset name");
    sub->add_option("--backend", cfg.backend, "computation backend")
        ->check(CLI::IsMember({"graph", "sft", "smeb-test"}))
        ->capture_default_str();
    sub->add_option("--depth", cfg.depth, "truncation depth d")
        ->check(CLI::Range(0, 16))
        ->capture_default_str();
    sub->add_option("--cyl-depth", cfg.cyl_depth, "cylinder refinement depth m")
        ->check(CLI::Range(0, 16))
        ->capture_default_str();
    sub->add_option("--n-min", cfg.n_min, "window lower bound for n")->capture_default_str();
    sub->add_option("--n-max", cfg.n_max, "window upper bound for n")->capture_default_str();
    sub->add_option("--k-max", cfg.k_max, "window upper bound for k")
        ->check(CLI::Range(0, 16))
        ->capture_default_str();
    sub->add_option("--tol", cfg.tol, "numerical tolerance")->capture_default_str();
    auto* fe = sub->add_flag("--exact", "exact rational scalars (default)");
    auto* ff = sub->add_flag("--float", cfg.float_mode, "floating-point scalars");
    fe->excludes(ff);
    ff->excludes(fe);
    sub->add_option("--psi", cfg.psi, "grading weight")
        ->check(CLI::IsMember({"default", "variant-a", "variant-b"}))
        ->capture_default_str();
    sub->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"tsv", "json"}))
        ->capture_default_str();
  };

  struct Cmd {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&);
  };
  const std::vector<Cmd> cmds{
      {"inspect", "structural facts about the input", cmd_inspect},
      {"assumptions", "ratio decay and q-operator structure", cmd_assumptions},
      {"decompose", "q_l = c_l P_l decomposition per degree", cmd_decompose},
      {"spectrum", "occupied (n,k) cells with ranks and weights", cmd_spectrum},
      {"commutators", "windowed generator commutator norms", cmd_commutators},
      {"ktheory", "K-groups from the subshift matrix", cmd_ktheory},
      {"kms", "gauge-equilibrium expectation table", cmd_kms},
      {"groupoid-check", "two-picture comparison on the subshift backend", cmd_groupoid_check},
  };
  for (const Cmd& c : cmds) add_common(app.add_subcommand(c.name, c.help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (cfg.n_min > cfg.n_max) {
    std::cerr << "usage error: --n-min exceeds --n-max\n";
    return 1;
  }
  for (const Cmd& c : cmds)
    if (app.got_subcommand(c.name)) return run_guarded([&] { return c.fn(cfg); });
  return 1;
}
