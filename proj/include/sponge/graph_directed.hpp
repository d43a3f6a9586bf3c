#pragma once

#include "sponge/dimensions.hpp"
#include "sponge/topology.hpp"

#include <set>
#include <string>
#include <vector>

namespace sponge {

/// Graph-directed IFS: K_v = union over edges e: v -> w of T_e(K_w).
struct GraphIFS {
  struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    DiagonalMap map;
    Digit label;  // digit the edge came from, empty for free-standing edges
  };

  std::vector<std::string> vertices;
  std::vector<Edge> edges;

  /// A[v][w] = number of edges v -> w.
  IntMatrix adjacency() const {
    IntMatrix a(vertices.size(), std::vector<std::int64_t>(vertices.size(), 0));
    for (const auto& e : edges) ++a[e.from][e.to];
    return a;
  }

  void validate() const {
    std::vector<bool> has_out(vertices.size(), false);
    for (const auto& e : edges) {
      if (e.from >= vertices.size() || e.to >= vertices.size()) throw SpecError("edge refers to an unknown vertex");
      if (!e.map.contracts_cube()) throw SpecError("edge map does not contract the cube into itself");
      has_out[e.from] = true;
    }
    for (std::size_t v = 0; v < vertices.size(); ++v)
      if (!has_out[v]) throw SpecError("vertex " + vertices[v] + " has no outgoing edge");
  }
};

/// Role partition of a carpet's digits for the two-vertex system (X, Y):
///   X = U_{J_XX} phi(X) u U_{J_XY} phi(Y),   Y = U_{J_YX} phi(X) u U_{J_YY} phi(Y).
struct ComponentSystem {
  std::vector<Digit> j_xx, j_xy, j_yx, j_yy;

  /// Missing J_XX / J_YX default to the complements D \ J_XY and D \ J_YY.
  static ComponentSystem from_roles(const SpongeSpec& spec, std::vector<Digit> j_xy, std::vector<Digit> j_yy,
                                    std::optional<std::vector<Digit>> j_xx = std::nullopt,
                                    std::optional<std::vector<Digit>> j_yx = std::nullopt) {
    auto complement = [&](const std::vector<Digit>& j) {
      std::vector<Digit> out;
      for (const auto& d : spec.digits())
        if (std::find(j.begin(), j.end(), d) == j.end()) out.push_back(d);
      return out;
    };
    ComponentSystem s;
    s.j_xx = j_xx ? std::move(*j_xx) : complement(j_xy);
    s.j_yx = j_yx ? std::move(*j_yx) : complement(j_yy);
    s.j_xy = std::move(j_xy);
    s.j_yy = std::move(j_yy);
    for (auto* j : {&s.j_xx, &s.j_xy, &s.j_yx, &s.j_yy}) std::sort(j->begin(), j->end());
    s.validate(spec);
    return s;
  }

  void validate(const SpongeSpec& spec) const {
    auto check = [&](const std::vector<Digit>& j, const char* name) {
      for (const auto& d : j)
        if (!spec.contains(d)) throw SpecError(std::string(name) + " contains " + to_string(d) + ", which is not in D");
    };
    check(j_xx, "J_XX");
    check(j_xy, "J_XY");
    check(j_yx, "J_YX");
    check(j_yy, "J_YY");
    auto disjoint = [](const std::vector<Digit>& a, const std::vector<Digit>& b, const char* vertex) {
      for (const auto& d : a)
        if (std::binary_search(b.begin(), b.end(), d))
          throw SpecError("digit " + to_string(d) + " has two roles on source vertex " + vertex);
    };
    disjoint(j_xx, j_xy, "S_X");
    disjoint(j_yx, j_yy, "S_Y");
    if (j_xx.empty() && j_xy.empty()) throw SpecError("vertex S_X has no outgoing edge");
    if (j_yx.empty() && j_yy.empty()) throw SpecError("vertex S_Y has no outgoing edge");
  }

  /// Layout of the displayed matrix: [[#J_XX, #J_YX], [#J_XY, #J_YY]].
  IntMatrix count_matrix() const {
    return {{static_cast<std::int64_t>(j_xx.size()), static_cast<std::int64_t>(j_yx.size())},
            {static_cast<std::int64_t>(j_xy.size()), static_cast<std::int64_t>(j_yy.size())}};
  }

  /// Per-row matrices A_0..A_{m-1} in the same layout, counting digits (x, j).
  std::vector<IntMatrix> row_matrices(int m) const {
    std::vector<IntMatrix> out(static_cast<std::size_t>(m), IntMatrix(2, std::vector<std::int64_t>(2, 0)));
    auto add = [&](const std::vector<Digit>& j, std::size_t r, std::size_t c) {
      for (const auto& d : j) ++out.at(static_cast<std::size_t>(d[1]))[r][c];
    };
    add(j_xx, 0, 0);
    add(j_yx, 0, 1);
    add(j_xy, 1, 0);
    add(j_yy, 1, 1);
    return out;
  }

  SoficSystem sofic(int m) const { return SoficSystem::make(row_matrices(m), count_matrix()); }
};

/// Empty when the counts agree; otherwise a description of the mismatch.
inline std::string compare_with_sofic(const ComponentSystem& s, const SoficSystem& printed) {
  auto counts = s.count_matrix();
  if (counts == printed.adjacency) return {};
  std::ostringstream os;
  os << "count matrix [[" << counts[0][0] << "," << counts[0][1] << "],[" << counts[1][0] << "," << counts[1][1]
     << "]] differs from the supplied adjacency matrix";
  return os.str();
}

inline GraphIFS build_graph_ifs(const SpongeSpec& spec, const ComponentSystem& s) {
  s.validate(spec);
  GraphIFS g;
  g.vertices = {"S_X", "S_Y"};
  auto add = [&](const std::vector<Digit>& j, std::size_t from, std::size_t to) {
    for (const auto& d : j) g.edges.push_back({from, to, DiagonalMap::of_digit(spec, d), d});
  };
  add(s.j_xx, 0, 0);
  add(s.j_xy, 0, 1);
  add(s.j_yx, 1, 0);
  add(s.j_yy, 1, 1);
  g.validate();
  return g;
}

struct InvariantApproximation {
  int depth = 0;
  std::vector<std::vector<std::vector<std::size_t>>> paths;  // per vertex: edge sequences
  std::vector<std::vector<Box>> cells;                       // per vertex: T_{e1} o ... o T_{ek}([0,1]^d)
  long double error = 0;                                     // Hausdorff distance bound to K_v
};

inline InvariantApproximation approximate_invariant_sets(const GraphIFS& g, int depth, std::size_t max_cells = std::size_t{1} << 20) {
  g.validate();
  if (depth < 0) throw SpecError("depth must be non-negative");
  const std::size_t d = g.edges.empty() ? 0 : g.edges.front().map.scale.size();
  std::vector<std::vector<std::size_t>> out_edges(g.vertices.size());
  for (std::size_t e = 0; e < g.edges.size(); ++e) out_edges[g.edges[e].from].push_back(e);

  InvariantApproximation a;
  a.depth = depth;
  a.paths.resize(g.vertices.size());
  a.cells.resize(g.vertices.size());
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    // (path, composite map, end vertex)
    struct Item {
      std::vector<std::size_t> path;
      DiagonalMap map;
      std::size_t end;
    };
    std::vector<Item> level{{{}, DiagonalMap{std::vector<Rational>(d, Rational(1)), std::vector<Rational>(d, Rational(0))}, v}};
    for (int t = 0; t < depth; ++t) {
      std::vector<Item> next;
      for (const auto& it : level)
        for (auto e : out_edges[it.end]) {
          if (next.size() >= max_cells) throw BudgetError("graph-directed approximation exceeds the cell budget");
          auto p = it.path;
          p.push_back(e);
          next.push_back({std::move(p), it.map.compose(g.edges[e].map), g.edges[e].to});
        }
      level.swap(next);
    }
    for (auto& it : level) {
      Box b;
      for (std::size_t j = 0; j < d; ++j) b.push_back({it.map.shift[j], it.map.shift[j] + it.map.scale[j]});
      a.cells[v].push_back(std::move(b));
      a.paths[v].push_back(std::move(it.path));
    }
  }
  long double rmax = 0;
  for (const auto& e : g.edges)
    for (const auto& s : e.map.scale) rmax = std::max(rmax, to_long_double(s));
  a.error = std::sqrt(static_cast<long double>(d)) * std::pow(rmax, static_cast<long double>(depth));
  return a;
}

// ---------------------------------------------------------------------------
// Finite-depth evidence for the component structure of a carpet
// ---------------------------------------------------------------------------

struct ComponentStructureReport {
  bool origin_in_y = false;  // (a)
  bool y_connected = false;  // (a)
  bool y_is_origin_component = false;  // (b)
  bool components_are_copies = false;  // (c)
  std::size_t y_cells = 0;
  std::size_t components = 0;
  std::size_t islands = 0;
  std::string counterexample;  // one entry per failed check, separated by "; "

  bool ok() const { return origin_in_y && y_connected && y_is_origin_component && components_are_copies; }
};

namespace detail {

// Words of the depth-k approximation of the vertex (0 = X, 1 = Y), as digit-index words.
inline std::set<IndexWord> vertex_words(const SpongeSpec& spec, const ComponentSystem& s, int vertex, int depth) {
  const std::vector<Digit>* to_x[2] = {&s.j_xx, &s.j_yx};
  const std::vector<Digit>* to_y[2] = {&s.j_xy, &s.j_yy};
  std::vector<std::pair<IndexWord, int>> level{{{}, vertex}};
  for (int t = 0; t < depth; ++t) {
    std::vector<std::pair<IndexWord, int>> next;
    for (const auto& [w, v] : level) {
      for (int target = 0; target < 2; ++target)
        for (const auto& d : *(target == 0 ? to_x : to_y)[v]) {
          auto nw = w;
          nw.push_back(static_cast<std::uint32_t>(*spec.digit_index(d)));
          next.emplace_back(std::move(nw), target);
        }
    }
    level.swap(next);
  }
  std::set<IndexWord> out;
  for (auto& [w, v] : level) out.insert(std::move(w));
  return out;
}

}  // namespace detail

/// Checks at depth k: (a) Y_k holds the origin cell and is connected; (b) Y_k is exactly the
/// component of K_k containing the origin cell; (c) each component of K_k equals P.Y_{k-|P|}
/// for the longest common prefix P of its words.
inline ComponentStructureReport verify_component_structure(const SpongeSpec& spec, const ComponentSystem& s, int depth,
                                                           const ApproximationOptions& opt = {}) {
  s.validate(spec);
  if (depth < 1) throw SpecError("depth must be positive");
  ComponentStructureReport r;
  auto report = [&](const std::string& msg) { r.counterexample += (r.counterexample.empty() ? "" : "; ") + msg; };
  const auto g = build_approximation(spec, depth, opt);
  r.components = g.components.size();
  r.islands = g.islands().size();

  std::vector<std::set<IndexWord>> y(static_cast<std::size_t>(depth) + 1);
  for (int t = 0; t <= depth; ++t) y[static_cast<std::size_t>(t)] = detail::vertex_words(spec, s, 1, t);
  const auto& yk = y.back();
  r.y_cells = yk.size();

  auto origin = spec.digit_index(Digit(spec.dimension(), 0));
  if (!origin) {
    report("the origin digit is not in D");
    return r;
  }
  const IndexWord origin_word(static_cast<std::size_t>(depth), static_cast<std::uint32_t>(*origin));
  r.origin_in_y = yk.count(origin_word) > 0;
  if (!r.origin_in_y) report("origin cell " + to_string(to_word(spec, origin_word)) + " is not in Y_k");

  {
    std::vector<IndexWord> words(yk.begin(), yk.end());
    const auto boxes = word_boxes(GridLayout(spec), words);
    const auto labels = component_labels(words.size(), intersecting_pairs(boxes, opt.threads));
    r.y_connected = count_labels(labels) == 1;
    if (!r.y_connected) {
      auto stray = std::find_if(labels.begin(), labels.end(), [](std::uint32_t l) { return l != 0; });
      report("Y_k splits into " + std::to_string(count_labels(labels)) + " components; " +
             to_string(to_word(spec, words[static_cast<std::size_t>(stray - labels.begin())])) + " is cut off from " +
             to_string(to_word(spec, words.front())));
    }
  }

  const auto& origin_comp = g.components[g.component_of[g.cell_index(origin_word)]];
  std::set<IndexWord> comp_words;
  for (auto c : origin_comp.members) comp_words.insert(g.index_word(c));
  r.y_is_origin_component = comp_words == yk;
  if (!r.y_is_origin_component) {
    std::vector<IndexWord> diff;
    std::set_symmetric_difference(yk.begin(), yk.end(), comp_words.begin(), comp_words.end(), std::back_inserter(diff));
    const auto& w = diff.front();
    bool in_y = yk.count(w) > 0;
    report("cell " + to_string(to_word(spec, w)) + (in_y ? " is in Y_k but not" : " is not in Y_k but is") +
           " in the origin component; first digit " + to_string(spec.digits()[w.front()]));
  }

  r.components_are_copies = true;
  for (const auto& comp : g.components) {
    IndexWord prefix = g.index_word(comp.members.front());
    for (auto c : comp.members) {
      auto w = g.index_word(c);
      std::size_t l = 0;
      while (l < prefix.size() && prefix[l] == w[l]) ++l;
      prefix.resize(l);
    }
    const auto& tail = y[static_cast<std::size_t>(depth) - prefix.size()];
    bool same = tail.size() == comp.members.size();
    for (auto c : comp.members) {
      if (!same) break;
      auto w = g.index_word(c);
      same = tail.count(IndexWord(w.begin() + static_cast<std::ptrdiff_t>(prefix.size()), w.end())) > 0;
    }
    if (!same) {
      r.components_are_copies = false;
      report("component of " + to_string(to_word(spec, g.index_word(comp.members.front()))) +
             " is not a copy of Y under prefix " + to_string(to_word(spec, prefix)));
      break;
    }
  }
  return r;
}

}  // namespace sponge
