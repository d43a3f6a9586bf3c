#pragma once

#include "sponge/grid.hpp"
#include "sponge/polygon.hpp"

#include <array>
#include <string>
#include <vector>

namespace sponge {

/// Planar IFS of similarities f_j(z) = r_j z + t_j without rotation, symbols 1..7.
struct PlanarSimilarIFS {
  std::vector<Rational> ratios;
  std::vector<Vec2> translations;
  std::vector<int> part_a{1, 2, 3, 4};
  std::vector<int> part_b{5, 6};
  std::vector<int> part_c{7};

  std::size_t size() const { return ratios.size(); }

  bool in_a(int s) const { return std::find(part_a.begin(), part_a.end(), s) != part_a.end(); }
  bool in_c(int s) const { return std::find(part_c.begin(), part_c.end(), s) != part_c.end(); }
};

/// The seven maps whose attractor has all its trivial points on L = {1} x [1/2, 1].
inline PlanarSimilarIFS counterexample_ifs() {
  PlanarSimilarIFS f;
  f.ratios = {Rational(2, 3), Rational(1, 3), Rational(1, 3), Rational(1, 6), Rational(1, 6), Rational(1, 3), Rational(1, 12)};
  f.translations = {{0, 0},
                    {0, Rational(2, 3)},
                    {Rational(1, 3), Rational(2, 3)},
                    {Rational(4, 6), Rational(5, 6)},
                    {Rational(5, 6), Rational(5, 6)},
                    {Rational(2, 3), Rational(1, 3)},
                    {Rational(22, 24), Rational(17, 24)}};
  return f;
}

/// Negative control: f_7 moved off the line x = 1.
inline PlanarSimilarIFS perturbed_counterexample_ifs() {
  auto f = counterexample_ifs();
  f.translations[6].x = Rational(21, 24);
  return f;
}

/// Convex hull of the attractor: vertices 0, i, 1 + i, 1 + i/2 (counter-clockwise).
inline Polygon trapezoid_h() { return {{0, 0}, {1, Rational(1, 2)}, {1, 1}, {0, 1}}; }

inline Polygon segment_l() { return {{1, Rational(1, 2)}, {1, 1}}; }

using SymbolWord = std::vector<int>;  // symbols 1..7

inline std::string symbols_to_string(const SymbolWord& w) {
  std::string out;
  for (int s : w) out += std::to_string(s);
  return out.empty() ? "()" : out;
}

struct Similarity {
  Rational ratio = 1;
  Vec2 shift{0, 0};
  Vec2 apply(const Vec2& p) const { return {ratio * p.x + shift.x, ratio * p.y + shift.y}; }
};

inline Similarity word_map(const PlanarSimilarIFS& f, const SymbolWord& w) {
  Similarity s;
  for (int sym : w) {
    auto j = static_cast<std::size_t>(sym - 1);
    s.shift = {s.shift.x + s.ratio * f.translations[j].x, s.shift.y + s.ratio * f.translations[j].y};
    s.ratio *= f.ratios[j];
  }
  return s;
}

inline Polygon image(const Similarity& s, const Polygon& p) {
  Polygon out;
  for (const auto& v : p) out.push_back(s.apply(v));
  return out;
}

/// Exact intersection point of two closed convex sets, if any (clipping).
inline std::optional<Polygon> intersection_witness(const Polygon& p, const Polygon& q) {
  Polygon r;
  if (p.size() >= 3) r = clip_convex(q, p);
  else if (q.size() >= 3) r = clip_convex(p, q);
  else return std::nullopt;
  if (r.empty()) return std::nullopt;
  return r;
}

// ---------------------------------------------------------------------------
// Depth-k cells f_w(H) on an integer grid. Every cell is a homothetic copy of H, so two cells
// (or a cell and L) meet iff their projections on x, y and u = 2y - x all overlap: these are
// the edge normals of H and of L. Projections are stored as 3-dimensional grid boxes.
// ---------------------------------------------------------------------------

struct CounterexampleLevel {
  int depth = 0;
  std::int64_t denominator = 1;
  std::vector<SymbolWord> words;  // lexicographic, index = base-7 number
  GridBoxes slabs;                // x, y, u projections of each cell
  std::vector<std::int64_t> l_lo, l_hi;  // projections of L
  std::vector<std::uint32_t> labels;     // components of the cells (without L)

  bool cell_meets_l(std::size_t c) const {
    for (std::size_t a = 0; a < 3; ++a)
      if (slabs.lo[c * 3 + a] > l_hi[a] || l_lo[a] > slabs.hi[c * 3 + a]) return false;
    return true;
  }

  std::size_t index_of(const SymbolWord& w) const {
    std::size_t i = 0;
    for (int s : w) i = i * 7 + static_cast<std::size_t>(s - 1);
    return i;
  }
};

inline std::int64_t rational_on_grid(const Rational& x, std::int64_t denom) {
  Rational v = x * denom;
  if (boost::multiprecision::denominator(v) != 1) throw InvariantError("value " + to_string(x) + " is off the grid");
  return checked_int64(boost::multiprecision::numerator(v));
}

inline CounterexampleLevel counterexample_level(const PlanarSimilarIFS& f, int depth, unsigned threads = 1,
                                                std::size_t max_cells = std::size_t{1} << 20) {
  if (f.size() != 7) throw SpecError("expected seven maps");
  CounterexampleLevel lv;
  lv.depth = depth;
  BigInt q = 1;
  for (std::size_t j = 0; j < f.size(); ++j) {
    q = lcm(q, boost::multiprecision::denominator(f.ratios[j]));
    q = lcm(q, boost::multiprecision::denominator(f.translations[j].x));
    q = lcm(q, boost::multiprecision::denominator(f.translations[j].y));
  }
  // 2 for the vertex 1 + i/2 of H
  BigInt denom = 2;
  for (int t = 0; t < depth; ++t) denom *= q;
  denom *= q;
  lv.denominator = checked_int64(denom);

  std::size_t count = 1;
  for (int t = 0; t < depth; ++t) {
    count *= 7;
    if (count > max_cells) throw BudgetError("7^" + std::to_string(depth) + " cells exceed the budget");
  }
  lv.slabs.dim = 3;
  std::vector<std::pair<SymbolWord, Similarity>> level{{{}, Similarity{}}};
  for (int t = 0; t < depth; ++t) {
    std::vector<std::pair<SymbolWord, Similarity>> next;
    next.reserve(level.size() * 7);
    for (const auto& [w, s] : level)
      for (int sym = 1; sym <= 7; ++sym) {
        auto j = static_cast<std::size_t>(sym - 1);
        auto nw = w;
        nw.push_back(sym);
        next.push_back({std::move(nw), Similarity{s.ratio * f.ratios[j],
                                                  {s.shift.x + s.ratio * f.translations[j].x, s.shift.y + s.ratio * f.translations[j].y}}});
      }
    level.swap(next);
  }
  for (const auto& [w, s] : level) {
    std::int64_t r = rational_on_grid(s.ratio, lv.denominator);
    std::int64_t x = rational_on_grid(s.shift.x, lv.denominator);
    std::int64_t y = rational_on_grid(s.shift.y, lv.denominator);
    std::int64_t lo[3] = {x, y, 2 * y - x};
    std::int64_t hi[3] = {x + r, y + r, 2 * y - x + 2 * r};
    lv.slabs.push(lo, hi);
    lv.words.push_back(w);
  }
  const std::int64_t dn = lv.denominator;
  lv.l_lo = {dn, dn / 2, 0};
  lv.l_hi = {dn, dn, dn};
  lv.labels = component_labels(lv.words.size(), intersecting_pairs(lv.slabs, threads));
  return lv;
}

struct EstarReport {
  bool connected = false;
  std::size_t cells = 0;
  std::size_t components = 0;  // of H_k alone
  std::size_t components_with_l = 0;
};

/// H_k together with L is connected.
inline EstarReport verify_estar_connected(const PlanarSimilarIFS& f, int depth, unsigned threads = 1) {
  auto lv = counterexample_level(f, depth, threads);
  EstarReport r;
  r.cells = lv.words.size();
  r.components = count_labels(lv.labels);
  std::vector<bool> reached(r.components, false);
  for (std::size_t c = 0; c < lv.words.size(); ++c)
    if (lv.cell_meets_l(c)) reached[lv.labels[c]] = true;
  std::size_t untouched = static_cast<std::size_t>(std::count(reached.begin(), reached.end(), false));
  bool any = std::find(reached.begin(), reached.end(), true) != reached.end();
  r.components_with_l = any ? untouched + 1 : r.components + 1;
  r.connected = r.components_with_l == 1;
  return r;
}

struct Lemma62Report {
  bool ok = false;
  std::size_t checked = 0;
  std::vector<std::string> failures;
  std::vector<std::string> witnesses;  // exact touching points behind the induction step
};

/// For every w with w_1..w_{k-1} in B and w_k in A, the cell f_w(H) lies in the component of the
/// origin cell of H_k. Also records the touching facts f_5 f_1(H) ~ f_4(H) and f_6 f_2(H) ~ f_1(H).
inline Lemma62Report verify_lemma62(const PlanarSimilarIFS& f, int depth, unsigned threads = 1) {
  if (depth < 1) throw SpecError("depth must be positive");
  Lemma62Report r;
  auto lv = counterexample_level(f, depth, threads);
  const auto origin = lv.labels[lv.index_of(SymbolWord(static_cast<std::size_t>(depth), 1))];

  std::vector<SymbolWord> words{{}};
  for (int t = 1; t <= depth; ++t) {
    const auto& alphabet = t < depth ? f.part_b : f.part_a;
    std::vector<SymbolWord> next;
    for (const auto& w : words)
      for (int s : alphabet) {
        next.push_back(w);
        next.back().push_back(s);
      }
    words.swap(next);
  }
  for (const auto& w : words) {
    ++r.checked;
    if (lv.labels[lv.index_of(w)] != origin) r.failures.push_back("cell " + symbols_to_string(w) + " is not in the component of 0");
  }

  const auto h = trapezoid_h();
  const std::pair<SymbolWord, SymbolWord> touching[] = {{{5, 1}, {4}}, {{6, 2}, {1}}};
  for (const auto& [a, b] : touching) {
    auto w = intersection_witness(image(word_map(f, a), h), image(word_map(f, b), h));
    if (!w) {
      r.failures.push_back("f_" + symbols_to_string(a) + "(H) and f_" + symbols_to_string(b) + "(H) are disjoint");
      continue;
    }
    std::string pts;
    for (const auto& p : *w) pts += (pts.empty() ? "" : " ") + to_string(p);
    r.witnesses.push_back("f_" + symbols_to_string(a) + "(H) meets f_" + symbols_to_string(b) + "(H) at " + pts);
  }
  r.ok = r.failures.empty();
  return r;
}

struct TrivialOnLReport {
  bool ok = false;
  std::size_t checked = 0;
  std::vector<std::string> violations;
};

/// Finite shadow of "every trivial point lies on L": a depth-k word without A-symbols must have its
/// cell meet L; a word whose first A-symbol sits at position a must be connected to the origin cell
/// inside the cylinder of its last C-symbol before a (cylinders of C-words are isolated, so this is
/// the depth-(k-i) graph after removing the prefix).
inline TrivialOnLReport trivial_points_on_l(const PlanarSimilarIFS& f, int depth, unsigned threads = 1) {
  if (depth < 1) throw SpecError("depth must be positive");
  std::vector<CounterexampleLevel> levels;
  for (int t = 0; t <= depth; ++t) levels.push_back(counterexample_level(f, t, threads));
  TrivialOnLReport r;
  const auto& top = levels.back();
  for (std::size_t c = 0; c < top.words.size(); ++c) {
    const auto& w = top.words[c];
    ++r.checked;
    auto first_a = std::find_if(w.begin(), w.end(), [&](int s) { return f.in_a(s); });
    if (first_a == w.end()) {
      if (!top.cell_meets_l(c)) r.violations.push_back("cell " + symbols_to_string(w) + " avoids A but misses L");
      continue;
    }
    std::size_t i = 0;  // length of the prefix up to the last C before the first A
    for (auto it = w.begin(); it != first_a; ++it)
      if (f.in_c(*it)) i = static_cast<std::size_t>(it - w.begin()) + 1;
    SymbolWord tail(w.begin() + static_cast<std::ptrdiff_t>(i), w.end());
    const auto& lv = levels[tail.size()];
    if (lv.labels[lv.index_of(tail)] != lv.labels[0])
      r.violations.push_back("cell " + symbols_to_string(w) + " is cut off from the origin cell of its cylinder");
  }
  r.ok = r.violations.empty();
  return r;
}

/// f_7(H) meets none of f_1(H), ..., f_6(H).
inline bool c_branch_isolated(const PlanarSimilarIFS& f) {
  const auto h = trapezoid_h();
  const auto c = image(word_map(f, {7}), h);
  for (int j = 1; j <= 6; ++j)
    if (polygons_meet(c, image(word_map(f, {j}), h))) return false;
  return true;
}

}  // namespace sponge
