#pragma once

// JSON input/output layer: graphs and subshift matrices from files, module
// vectors, cylinder-pair basis elements, and abelian groups as JSON values.
// All emitters are deterministic (insertion-ordered objects, fixed number
// formatting) so outputs can be diffed byte-for-byte.

#include <pimsner/graph.hpp>
#include <pimsner/ktheory.hpp>
#include <pimsner/xi.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pimsner {

using json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Small JSON field helpers

namespace iodetail {

inline const json& require_field(const json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(std::string(what) + ": missing field \"" + key + "\"");
  return j.at(key);
}

inline std::string name_of(const json& j, const char* what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ParseError(std::string(what) + ": expected a string or integer label");
}

inline int require_int(const json& j, const char* what) {
  if (!j.is_number_integer()) throw ParseError(std::string(what) + ": expected an integer");
  return j.get<int>();
}

// BigInt round-trip: small values as JSON integers, large values as decimal
// strings; the parser accepts either form.
inline json bigint_to_json(const BigInt& v) {
  static const BigInt lo = BigInt(std::numeric_limits<std::int64_t>::min());
  static const BigInt hi = BigInt(std::numeric_limits<std::int64_t>::max());
  if (v >= lo && v <= hi) return json(v.convert_to<std::int64_t>());
  return json(v.str());
}

inline BigInt bigint_from_json(const json& j, const char* what) {
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      return BigInt(j.get<std::string>());
    } catch (const std::exception&) {
      throw ParseError(std::string(what) + ": invalid integer string");
    }
  }
  throw ParseError(std::string(what) + ": expected an integer or decimal string");
}

}  // namespace iodetail

// ---------------------------------------------------------------------------
// Graphs: {"vertices":[...], "edges":[{"id":..,"r":..,"s":..}]} or
// {"matrix":[[..]]} (edge-count adjacency).

inline std::vector<std::vector<std::int64_t>> parse_int_matrix(const json& j,
                                                               const char* what) {
  if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + ": expected a non-empty array of rows");
  std::vector<std::vector<std::int64_t>> m;
  for (const auto& row : j) {
    if (!row.is_array()) throw ParseError(std::string(what) + ": each row must be an array");
    std::vector<std::int64_t> r;
    for (const auto& v : row) {
      if (!v.is_number_integer()) throw ParseError(std::string(what) + ": entries must be integers");
      r.push_back(v.get<std::int64_t>());
    }
    m.push_back(std::move(r));
  }
  const std::size_t n = m.size();
  for (const auto& r : m)
    if (r.size() != n) throw ParseError(std::string(what) + ": matrix must be square");
  return m;
}

inline Graph parse_graph_json(const json& j) {
  if (j.is_object() && j.contains("matrix"))
    return Graph::from_matrix(parse_int_matrix(j.at("matrix"), "graph matrix"));
  if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
    throw ParseError("graph: expected {\"vertices\",\"edges\"} or {\"matrix\"}");

  const json& jv = j.at("vertices");
  if (!jv.is_array() || jv.empty()) throw ParseError("graph: \"vertices\" must be a non-empty array");
  std::vector<std::string> names;
  std::map<std::string, int> index;
  for (const auto& v : jv) {
    std::string name = iodetail::name_of(v, "graph vertex");
    if (!index.emplace(name, static_cast<int>(names.size())).second)
      throw ParseError("graph: duplicate vertex \"" + name + "\"");
    names.push_back(std::move(name));
  }

  auto vertex_ref = [&](const json& ref, const char* what) -> int {
    if (ref.is_number_integer()) {
      const int i = ref.get<int>();
      if (i < 0 || i >= static_cast<int>(names.size()))
        throw ParseError(std::string(what) + ": vertex index out of range");
      return i;
    }
    const std::string name = iodetail::name_of(ref, what);
    auto it = index.find(name);
    if (it == index.end()) throw ParseError(std::string(what) + ": unknown vertex \"" + name + "\"");
    return it->second;
  };

  const json& je = j.at("edges");
  if (!je.is_array()) throw ParseError("graph: \"edges\" must be an array");
  std::vector<Edge> edges;
  for (const auto& e : je) {
    Edge edge;
    edge.id = iodetail::name_of(iodetail::require_field(e, "id", "graph edge"), "graph edge id");
    edge.r = vertex_ref(iodetail::require_field(e, "r", "graph edge"), "graph edge r");
    edge.s = vertex_ref(iodetail::require_field(e, "s", "graph edge"), "graph edge s");
    edges.push_back(std::move(edge));
  }
  try {
    return Graph::from_edges(std::move(names), std::move(edges));
  } catch (const ValidationError& err) {
    throw ParseError(std::string("graph: ") + err.what());
  }
}

inline json graph_to_json(const Graph& g) {
  json edges = json::array();
  for (int i = 0; i < g.num_edges(); ++i) {
    const Edge& e = g.edge(i);
    edges.push_back(json{{"id", e.id},
                         {"r", g.vertex_names()[e.r]},
                         {"s", g.vertex_names()[e.s]}});
  }
  return json{{"vertices", g.vertex_names()}, {"edges", edges}};
}

inline SFTMatrix parse_sft_json(const json& j) {
  const json* jm = nullptr;
  if (j.is_array()) {
    jm = &j;
  } else if (j.is_object() && j.contains("matrix")) {
    jm = &j.at("matrix");
  } else {
    throw ParseError("subshift: expected {\"matrix\":[[0/1,..],..]}");
  }
  auto rows = parse_int_matrix(*jm, "subshift matrix");
  std::vector<std::vector<int>> entries;
  for (const auto& r : rows) {
    std::vector<int> row;
    for (std::int64_t v : r) {
      if (v != 0 && v != 1) throw ParseError("subshift matrix: entries must be 0 or 1");
      row.push_back(static_cast<int>(v));
    }
    entries.push_back(std::move(row));
  }
  try {
    return SFTMatrix::validate(std::move(entries));
  } catch (const std::exception& err) {
    throw ParseError(std::string("subshift: ") + err.what());
  }
}

inline json sft_to_json(const SFTMatrix& m) {
  json rows = json::array();
  for (const auto& r : m.a) rows.push_back(r);
  return json{{"matrix", rows}};
}

// ---------------------------------------------------------------------------
// Scalars: rationals as {"num":..,"den":..}, floats as JSON numbers.

inline json coeff_to_json(const Rational& c) {
  return json{{"num", iodetail::bigint_to_json(boost::multiprecision::numerator(c))},
              {"den", iodetail::bigint_to_json(boost::multiprecision::denominator(c))}};
}

inline json coeff_to_json(double c) { return json(c); }

inline void coeff_from_json(const json& j, Rational& out) {
  if (j.is_number_integer()) {
    out = Rational(j.get<std::int64_t>());
    return;
  }
  if (!j.is_object())
    throw ParseError("coefficient: expected {\"num\",\"den\"} in exact mode");
  const BigInt num = iodetail::bigint_from_json(iodetail::require_field(j, "num", "coefficient"),
                                                "coefficient num");
  const BigInt den = iodetail::bigint_from_json(iodetail::require_field(j, "den", "coefficient"),
                                                "coefficient den");
  if (den == 0) throw ParseError("coefficient: zero denominator");
  out = Rational(num, den);
}

inline void coeff_from_json(const json& j, double& out) {
  if (j.is_number()) {
    out = j.get<double>();
    return;
  }
  if (j.is_object()) {  // accept exact form in float mode
    Rational r;
    coeff_from_json(j, r);
    out = to_double(r);
    return;
  }
  throw ParseError("coefficient: expected a number");
}

// ---------------------------------------------------------------------------
// Module vectors over a graph: list of {mu:[edge ids], nu:[edge ids], coeff}.
// Legs are edge-id sequences; an empty leg takes its vertex from the other
// leg's source, and a degenerate term with two empty legs carries an explicit
// "v" vertex field.

template <class S>
json xi_vector_to_json(const Graph& g, const std::map<GraphSym, S>& x) {
  json out = json::array();
  for (const auto& [sym, c] : x) {
    json mu = json::array(), nu = json::array();
    for (int e : sym.mu.edges) mu.push_back(g.edge(e).id);
    for (int e : sym.nu.edges) nu.push_back(g.edge(e).id);
    json term{{"mu", mu}, {"nu", nu}, {"coeff", coeff_to_json(c)}};
    if (sym.mu.empty() && sym.nu.empty())
      term["v"] = g.vertex_names()[sym.mu.base_vertex];
    out.push_back(std::move(term));
  }
  return out;
}

template <class S>
std::map<GraphSym, S> parse_xi_vector_json(const Graph& g, const json& j) {
  if (!j.is_array()) throw ParseError("module vector: expected an array of terms");
  std::map<std::string, int> edge_index;
  for (int i = 0; i < g.num_edges(); ++i) edge_index[g.edge(i).id] = i;
  std::map<std::string, int> vertex_index;
  for (int i = 0; i < g.num_vertices(); ++i) vertex_index[g.vertex_names()[i]] = i;

  auto parse_leg = [&](const json& leg, const char* what) -> std::vector<int> {
    if (!leg.is_array()) throw ParseError(std::string(what) + ": expected an array of edge ids");
    std::vector<int> edges;
    for (const auto& id : leg) {
      const std::string name = iodetail::name_of(id, what);
      auto it = edge_index.find(name);
      if (it == edge_index.end())
        throw ParseError(std::string(what) + ": unknown edge \"" + name + "\"");
      edges.push_back(it->second);
    }
    for (std::size_t i = 1; i < edges.size(); ++i)
      if (g.edge(edges[i - 1]).s != g.edge(edges[i]).r)
        throw ParseError(std::string(what) + ": edges \"" + g.edge(edges[i - 1]).id + "\" and \"" +
                         g.edge(edges[i]).id + "\" do not compose");
    return edges;
  };

  std::map<GraphSym, S> out;
  for (const auto& term : j) {
    GraphSym sym;
    sym.mu.edges = parse_leg(iodetail::require_field(term, "mu", "module vector term"), "leg mu");
    sym.nu.edges = parse_leg(iodetail::require_field(term, "nu", "module vector term"), "leg nu");
    const bool mu_e = sym.mu.edges.empty(), nu_e = sym.nu.edges.empty();
    if (!mu_e) sym.mu.base_vertex = g.edge(sym.mu.edges.front()).r;
    if (!nu_e) sym.nu.base_vertex = g.edge(sym.nu.edges.front()).r;
    const int s_mu = mu_e ? -1 : g.edge(sym.mu.edges.back()).s;
    const int s_nu = nu_e ? -1 : g.edge(sym.nu.edges.back()).s;
    if (!mu_e && !nu_e && s_mu != s_nu)
      throw ParseError("module vector term: legs have different source vertices");
    if (mu_e) sym.mu.base_vertex = nu_e ? -1 : s_nu;
    if (nu_e) sym.nu.base_vertex = mu_e ? -1 : s_mu;
    if (mu_e && nu_e) {
      const std::string vname =
          iodetail::name_of(iodetail::require_field(term, "v", "module vector term"),
                            "module vector term v");
      auto it = vertex_index.find(vname);
      if (it == vertex_index.end())
        throw ParseError("module vector term: unknown vertex \"" + vname + "\"");
      sym.mu.base_vertex = sym.nu.base_vertex = it->second;
    }
    S c;
    coeff_from_json(iodetail::require_field(term, "coeff", "module vector term"), c);
    out[sym] += c;
  }
  for (auto it = out.begin(); it != out.end();)
    it = ScalarTraits<S>::is_zero(it->second) ? out.erase(it) : std::next(it);
  return out;
}

// ---------------------------------------------------------------------------
// Cylinder-pair basis elements: {"n":..,"k":..,"alpha":"..","beta":"..",
// "depth":m}. Words are written in display digits (first letter = "1").

struct CylinderPair {
  int n = 0;
  int k = 0;
  Word alpha, beta;
  int depth = 0;
};

inline std::string word_digits(const Word& w) {
  std::string s;
  for (char c : w) {
    const int v = static_cast<int>(c) + 1;
    if (v < 1 || v > 9) throw ParseError("word: only alphabets of size <= 9 serialize as digits");
    s += static_cast<char>('0' + v);
  }
  return s;
}

inline Word word_from_digits(const std::string& s) {
  Word w;
  for (char c : s) {
    if (c < '1' || c > '9') throw ParseError("word: expected digits 1..9");
    w += static_cast<char>(c - '1');
  }
  return w;
}

inline json cylinder_pair_to_json(const CylinderPair& p) {
  return json{{"n", p.n},
              {"k", p.k},
              {"alpha", word_digits(p.alpha)},
              {"beta", word_digits(p.beta)},
              {"depth", p.depth}};
}

inline CylinderPair parse_cylinder_pair_json(const json& j) {
  CylinderPair p;
  p.n = iodetail::require_int(iodetail::require_field(j, "n", "cylinder pair"), "cylinder pair n");
  p.k = iodetail::require_int(iodetail::require_field(j, "k", "cylinder pair"), "cylinder pair k");
  const json& ja = iodetail::require_field(j, "alpha", "cylinder pair");
  const json& jb = iodetail::require_field(j, "beta", "cylinder pair");
  if (!ja.is_string() || !jb.is_string())
    throw ParseError("cylinder pair: \"alpha\"/\"beta\" must be strings");
  p.alpha = word_from_digits(ja.get<std::string>());
  p.beta = word_from_digits(jb.get<std::string>());
  p.depth = iodetail::require_int(iodetail::require_field(j, "depth", "cylinder pair"),
                                  "cylinder pair depth");
  return p;
}

// ---------------------------------------------------------------------------
// Abelian groups: {"free_rank":r,"torsion":[d1,...]}.

inline json group_to_json(const AbelianGroup& g) {
  json torsion = json::array();
  for (const auto& d : g.torsion) torsion.push_back(iodetail::bigint_to_json(d));
  return json{{"free_rank", g.free_rank}, {"torsion", torsion}};
}

inline AbelianGroup parse_group_json(const json& j) {
  AbelianGroup g;
  g.free_rank =
      iodetail::require_int(iodetail::require_field(j, "free_rank", "group"), "group free_rank");
  const json& jt = iodetail::require_field(j, "torsion", "group");
  if (!jt.is_array()) throw ParseError("group: \"torsion\" must be an array");
  for (const auto& d : jt) g.torsion.push_back(iodetail::bigint_from_json(d, "group torsion"));
  return g;
}

// ---------------------------------------------------------------------------
// Files

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("\"" + path + "\": " + e.what());
  }
}

}  // namespace pimsner
