#pragma once

#include "sponge/coding.hpp"
#include "sponge/grid.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sponge {

// Words over the digit set stored as digit indices (positions in the sorted digit list).
using IndexWord = std::vector<std::uint32_t>;

inline IndexWord to_index_word(const SpongeSpec& spec, const Word& w) {
  IndexWord out;
  for (const auto& d : w) {
    auto i = spec.digit_index(d);
    if (!i) throw SpecError("symbol " + to_string(d) + " is not in the digit set");
    out.push_back(static_cast<std::uint32_t>(*i));
  }
  return out;
}

inline Word to_word(const SpongeSpec& spec, const IndexWord& w) {
  Word out;
  for (auto i : w) out.push_back(spec.digits()[i]);
  return out;
}

struct ApproximationOptions {
  std::size_t max_cells = std::size_t{1} << 21;
  unsigned threads = 1;
};

inline std::size_t checked_cell_count(std::size_t digits, int depth, std::size_t max_cells) {
  std::size_t n = 1;
  for (int t = 0; t < depth; ++t) {
    if (n > max_cells / std::max<std::size_t>(digits, 1)) {
      throw BudgetError(std::to_string(digits) + "^" + std::to_string(depth) + " cells exceed the budget of " +
                        std::to_string(max_cells));
    }
    n *= digits;
  }
  if (n > max_cells) throw BudgetError("cell budget exceeded");
  return n;
}

// Boxes of a list of words, on the integer grid of the layout at the common depth.
inline GridBoxes word_boxes(const GridLayout& layout, const std::vector<IndexWord>& words) {
  GridBoxes boxes;
  boxes.dim = layout.dimension();
  std::vector<std::int64_t> lo(boxes.dim), hi(boxes.dim);
  for (const auto& w : words) {
    layout.cell(w, lo.data(), hi.data());
    boxes.push(lo.data(), hi.data());
  }
  return boxes;
}

struct Component {
  std::vector<std::uint32_t> members;  // cell indices, ascending
  std::vector<std::int64_t> lo;        // bounding box on the grid
  std::vector<std::int64_t> hi;
  bool touches_boundary = false;
};

/// The k-th approximation: all |D|^k cells, closed-box adjacency and connected components.
/// Cell i is the word whose digit indices are the base-|D| expansion of i, so index order is
/// lexicographic word order.
struct ApproximationGraph {
  int depth = 0;
  std::size_t digit_count = 0;
  std::vector<std::int64_t> scale;  // Q_i^k
  GridBoxes boxes;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> adjacency;
  std::vector<std::uint32_t> component_of;  // label per cell
  std::vector<Component> components;        // numbered by smallest member

  std::size_t size() const { return boxes.size(); }

  IndexWord index_word(std::size_t cell) const {
    IndexWord w(static_cast<std::size_t>(depth));
    for (int t = depth - 1; t >= 0; --t) {
      w[static_cast<std::size_t>(t)] = static_cast<std::uint32_t>(cell % digit_count);
      cell /= digit_count;
    }
    return w;
  }

  std::size_t cell_index(const IndexWord& w) const {
    std::size_t i = 0;
    for (auto s : w) i = i * digit_count + s;
    return i;
  }

  Box rational_box(std::size_t cell) const {
    Box b;
    for (std::size_t j = 0; j < boxes.dim; ++j)
      b.push_back({Rational(boxes.lo[cell * boxes.dim + j], scale[j]), Rational(boxes.hi[cell * boxes.dim + j], scale[j])});
    return b;
  }

  /// Indices of the components disjoint from the cube boundary.
  std::vector<std::size_t> islands() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < components.size(); ++c)
      if (!components[c].touches_boundary) out.push_back(c);
    return out;
  }
};

inline ApproximationGraph build_approximation(const SpongeSpec& spec, int depth, const ApproximationOptions& opt = {}) {
  if (depth < 0) throw SpecError("depth must be non-negative");
  const std::size_t count = checked_cell_count(spec.digit_count(), depth, opt.max_cells);
  const GridLayout layout(spec);
  const std::size_t d = spec.dimension();

  ApproximationGraph g;
  g.depth = depth;
  g.digit_count = spec.digit_count();
  g.scale = layout.scales(depth);
  g.boxes.dim = d;

  // Breadth-first expansion keeps index order equal to lexicographic word order.
  std::vector<GridLayout::Affine> level(d, GridLayout::Affine{0, 1}), next;
  for (int t = 0; t < depth; ++t) {
    const std::size_t parents = level.size() / d;
    next.assign(parents * g.digit_count * d, {});
    for (std::size_t p = 0; p < parents; ++p)
      for (std::size_t a = 0; a < g.digit_count; ++a)
        for (std::size_t i = 0; i < d; ++i) next[(p * g.digit_count + a) * d + i] = layout.extend(level[p * d + i], i, a);
    level.swap(next);
  }
  g.boxes.lo.resize(count * d);
  g.boxes.hi.resize(count * d);
  for (std::size_t c = 0; c < count * d; ++c) {
    g.boxes.lo[c] = level[c].shift;
    g.boxes.hi[c] = level[c].shift + level[c].extent;
  }

  g.adjacency = intersecting_pairs(g.boxes, opt.threads);
  g.component_of = component_labels(count, g.adjacency);
  g.components.resize(count_labels(g.component_of));
  for (std::uint32_t c = 0; c < count; ++c) {
    auto& comp = g.components[g.component_of[c]];
    const auto* lo = &g.boxes.lo[c * d];
    const auto* hi = &g.boxes.hi[c * d];
    if (comp.members.empty()) {
      comp.lo.assign(lo, lo + d);
      comp.hi.assign(hi, hi + d);
    }
    comp.members.push_back(c);
    for (std::size_t i = 0; i < d; ++i) {
      comp.lo[i] = std::min(comp.lo[i], lo[i]);
      comp.hi[i] = std::max(comp.hi[i], hi[i]);
      if (lo[i] == 0 || hi[i] == g.scale[i]) comp.touches_boundary = true;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Layer sets
// ---------------------------------------------------------------------------

struct LayerSet {
  Word anchor;
  std::uint32_t part_a = 0;  // coordinate mask A
  std::vector<Word> members;  // Sigma_sigma, lexicographic
  std::vector<Cell> cells;    // the cells whose union is H_sigma
};

namespace detail {

inline void require_sierpinski(const SpongeSpec& spec) {
  if (!spec.is_sierpinski())
    throw SpecError("layer sets are defined for Sierpinski sponges; transport the coding to the associated sponge first");
}

inline bool agrees_on(const Digit& a, const Digit& b, std::uint32_t mask) {
  for (std::size_t j = 0; j < a.size(); ++j)
    if (((mask >> j) & 1u) && a[j] != b[j]) return false;
  return true;
}

// Sigma_sigma as index words. With equal ratios 1/n_j, the corner pi_A(Phi_w(0)) is the base-n_j
// expansion of the A-entries of w, so membership is blockwise agreement on A.
inline std::vector<IndexWord> layer_members(const SpongeSpec& spec, const IndexWord& sigma, std::uint32_t mask,
                                            std::size_t max_cells) {
  std::vector<std::vector<std::uint32_t>> choices;
  std::size_t total = 1;
  for (auto s : sigma) {
    std::vector<std::uint32_t> c;
    for (std::uint32_t a = 0; a < spec.digit_count(); ++a)
      if (agrees_on(spec.digits()[a], spec.digits()[s], mask)) c.push_back(a);
    if (total > max_cells / c.size()) throw BudgetError("layer set exceeds the cell budget");
    total *= c.size();
    choices.push_back(std::move(c));
  }
  std::vector<IndexWord> out{IndexWord{}};
  for (const auto& c : choices) {
    std::vector<IndexWord> grown;
    grown.reserve(out.size() * c.size());
    for (const auto& w : out)
      for (auto a : c) {
        grown.push_back(w);
        grown.back().push_back(a);
      }
    out.swap(grown);
  }
  return out;
}

}  // namespace detail

inline LayerSet layer_set(const SpongeSpec& spec, const Word& sigma, std::uint32_t part_a) {
  detail::require_sierpinski(spec);
  LayerSet ls{sigma, part_a, {}, {}};
  for (const auto& w : detail::layer_members(spec, to_index_word(spec, sigma), part_a, ApproximationOptions{}.max_cells)) {
    ls.members.push_back(to_word(spec, w));
    ls.cells.push_back(cell_box(spec, ls.members.back()));
  }
  return ls;
}

// ---------------------------------------------------------------------------
// Trivial points
// ---------------------------------------------------------------------------

/// Shift selection. Takes the first component U of H_sigma (by smallest word) missing F,
/// minimizes the B0 corner sum, maximizes the B1 corner sum, then takes the least word.
/// Throws SpecError if H_sigma is connected and meets F, InvariantError if Phi_w*(z0) stays in F.
inline Word trivial_shift(const SpongeSpec& spec, const Word& sigma, const Face& face, const Point& z0) {
  detail::require_sierpinski(spec);
  const std::size_t d = spec.dimension();
  if (face.ambient != d || !face.valid()) throw SpecError("face does not belong to the cube of the sponge");
  const auto members = detail::layer_members(spec, to_index_word(spec, sigma), face.free, ApproximationOptions{}.max_cells);
  const GridLayout layout(spec);
  const auto scale = layout.scales(static_cast<int>(sigma.size()));
  const auto boxes = word_boxes(layout, members);
  const auto labels = component_labels(members.size(), intersecting_pairs(boxes));

  auto meets_face = [&](std::size_t c) {
    for (std::size_t j = 0; j < d; ++j) {
      if (face.is_free(j)) continue;
      std::int64_t b = face.offset(j) ? scale[j] : 0;
      if (boxes.lo[c * d + j] > b || boxes.hi[c * d + j] < b) return false;
    }
    return true;
  };
  const std::size_t ncomp = count_labels(labels);
  std::vector<bool> touches(ncomp, false);
  for (std::size_t c = 0; c < members.size(); ++c)
    if (meets_face(c)) touches[labels[c]] = true;
  auto free_comp = std::find(touches.begin(), touches.end(), false);
  if (free_comp == touches.end())
    throw SpecError("H_sigma is connected and meets F for sigma = " + to_string(sigma));
  const auto u = static_cast<std::uint32_t>(free_comp - touches.begin());

  std::optional<std::size_t> best;
  Rational best_alpha, best_beta;
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (labels[c] != u) continue;
    Rational alpha = 0, beta = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (face.is_free(j)) continue;
      Rational corner(boxes.lo[c * d + j], scale[j]);
      (face.offset(j) ? beta : alpha) += corner;
    }
    if (!best || alpha < best_alpha || (alpha == best_alpha && beta > best_beta)) {
      best = c;
      best_alpha = alpha;
      best_beta = beta;
    }
  }
  Word omega = to_word(spec, members[*best]);
  if (face.contains(apply_word(spec, omega, z0)))
    throw InvariantError("Phi_w*(z0) stays in F for w* = " + to_string(omega));
  return omega;
}

struct TrivialPointStage {
  enum class Case { LayerSet, SmallComponent };
  Case kind = Case::LayerSet;
  Word sigma;   // the word whose layer set was used
  Word omega;   // the shift w*
  Face before;
  Face after;
};

struct TrivialPointReport {
  Coding witness;         // z0
  Coding result;          // z* = Phi_{w*_s} ... Phi_{w*_1}(z0)
  Point point;            // z* in the input sponge
  Face initial_face;
  Face final_face;
  std::vector<TrivialPointStage> stages;
};

struct TrivialPointOptions {
  int max_depth = 6;   // depth scanned for layer sets and small components
  int max_stages = 32;
  ApproximationOptions approximation;
};

/// Pushes a trivial point off the cube boundary, one face dimension per stage, starting from z0 given by an eventually periodic coding.
/// z0 is not checked to be trivial; it must be asserted by the caller or come from an island.
/// Slicing inputs run on the associated Sierpinski sponge, which has the same codings and faces.
inline TrivialPointReport interior_trivial_point(const SpongeSpec& spec, const Coding& z0,
                                                 const TrivialPointOptions& opt = {}) {
  if (!spec.slicing()) throw SpecError("interior_trivial_point needs a slicing sponge");
  if (spec.degenerate()) throw SpecError("sponge is degenerate; reduce the dimension first");
  if (!z0.infinite()) throw SpecError("the witness coding must be eventually periodic");
  check_coding(spec, z0);
  const SpongeSpec k = spec.is_sierpinski() ? spec : spec.associated_sierpinski();
  const std::size_t d = k.dimension();

  TrivialPointReport rep;
  rep.witness = z0;
  Coding coding = z0;
  Point z = point_of(k, coding);
  Face face = containing_face(z);
  rep.initial_face = face;

  while (face.dim() < static_cast<int>(d)) {
    if (static_cast<int>(rep.stages.size()) >= opt.max_stages) throw BudgetError("stage budget exhausted");
    TrivialPointStage stage;
    stage.before = face;
    bool done = false;

    for (int depth = 1; depth <= opt.max_depth && !done; ++depth) {
      Word sigma = coding.take(static_cast<std::size_t>(depth));
      try {
        stage.omega = trivial_shift(k, sigma, face, z);
        stage.sigma = sigma;
        stage.kind = TrivialPointStage::Case::LayerSet;
        done = true;
      } catch (const SpecError&) {
        // H_sigma connected and meeting F; try the next depth
      }
    }
    for (int p = 1; p <= opt.max_depth && !done; ++p) {
      const auto graph = build_approximation(k, p, opt.approximation);
      const auto& comp = graph.components[graph.component_of[graph.cell_index(to_index_word(k, coding.take(static_cast<std::size_t>(p))))]];
      // diam(C_p) < 1/3 via the bounding-box diagonal
      Rational diag2 = 0;
      for (std::size_t j = 0; j < d; ++j) {
        Rational side(comp.hi[j] - comp.lo[j], graph.scale[j]);
        diag2 += side * side;
      }
      if (diag2 >= Rational(1, 9)) continue;
      std::optional<Digit> j;
      for (const auto& dg : k.digits())
        if (!face.meets(cell_box(k, Word{dg}).box)) {
          j = dg;
          break;
        }
      if (!j) throw InvariantError("every first-level cell meets F although the sponge is non-degenerate");
      Word sigma{*j};
      for (const auto& s : coding.take(static_cast<std::size_t>(p))) sigma.push_back(s);
      stage.omega = trivial_shift(k, sigma, face, z);
      stage.sigma = sigma;
      stage.kind = TrivialPointStage::Case::SmallComponent;
      done = true;
    }
    if (!done) throw BudgetError("no layer set or small component found up to depth " + std::to_string(opt.max_depth));

    coding = coding.prepend(stage.omega);
    z = point_of(k, coding);
    Face next = containing_face(z);
    if (next.dim() <= face.dim())
      throw InvariantError("face dimension did not increase: " + face.describe() + " -> " + next.describe());
    stage.after = next;
    face = next;
    rep.stages.push_back(std::move(stage));
  }
  rep.result = coding;
  rep.final_face = face;
  rep.point = point_of(spec, coding);
  return rep;
}

/// A coding through an island, hence of a trivial point: the periodic repetition of the
/// island's least word.
inline Coding island_witness(const SpongeSpec& spec, const ApproximationGraph& g, std::size_t island) {
  const auto& comp = g.components.at(island);
  if (comp.touches_boundary) throw SpecError("component " + std::to_string(island) + " is not an island");
  return Coding{{}, to_word(spec, g.index_word(comp.members.front()))};
}

// ---------------------------------------------------------------------------
// Connected-part cover
// ---------------------------------------------------------------------------

/// Drops degenerate coordinates; the remaining sponge is non-degenerate.
inline SpongeSpec reduce_degenerate(const SpongeSpec& spec, std::vector<std::size_t>* kept = nullptr) {
  const auto& drop = spec.degenerate_coordinates();
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < spec.dimension(); ++i)
    if (std::find(drop.begin(), drop.end(), i) == drop.end()) keep.push_back(i);
  if (kept) *kept = keep;
  if (drop.empty()) return spec;
  if (keep.empty()) throw SpecError("every coordinate is degenerate: the sponge is a single point");
  SpongeInput in;
  in.require_slicing = spec.slicing();
  for (auto i : keep) in.bases.push_back(spec.bases()[i]);
  for (const auto& dg : spec.digits()) {
    Digit p;
    for (auto i : keep) p.push_back(dg[i]);
    in.digits.push_back(std::move(p));
  }
  return SpongeSpec::make(std::move(in));
}

struct CoverDatum {
  bool found = false;
  int searched = 0;            // depth bound reached
  int k0 = 0;                  // iterate
  SpongeSpec spec;             // sponge the datum refers to (degenerate coordinates removed)
  std::vector<std::size_t> kept_coordinates;
  std::vector<Word> islands;   // J, words of length k0
  std::vector<Word> sub_ifs;   // D' = D^k0 \ J
};

inline CoverDatum connected_part_cover(const SpongeSpec& spec, int max_depth, const ApproximationOptions& opt = {}) {
  if (!spec.slicing()) throw SpecError("connected_part_cover needs a slicing sponge");
  std::vector<std::size_t> kept;
  SpongeSpec work = reduce_degenerate(spec, &kept);
  CoverDatum out{false, 0, 0, work, kept, {}, {}};
  for (int k = 1; k <= max_depth; ++k) {
    out.searched = k;
    const auto g = build_approximation(work, k, opt);
    const auto isl = g.islands();
    if (isl.empty()) continue;
    std::vector<bool> in_j(g.size(), false);
    for (auto c : isl)
      for (auto m : g.components[c].members) in_j[m] = true;
    for (std::size_t c = 0; c < g.size(); ++c) {
      auto w = to_word(work, g.index_word(c));
      (in_j[c] ? out.islands : out.sub_ifs).push_back(std::move(w));
    }
    out.found = true;
    out.k0 = k;
    return out;
  }
  return out;
}

/// Sub-IFS digit set of a depth-1 cover as a sponge on the same base IFSs.
inline SpongeSpec connected_part_sponge(const CoverDatum& datum) {
  if (!datum.found) throw SpecError("no island was found");
  if (datum.k0 != 1) throw SpecError("sub-IFS of an iterate; build it on the k0-th iterate");
  std::vector<Digit> digits;
  for (const auto& w : datum.sub_ifs) digits.push_back(w.front());
  return datum.spec.with_digits(std::move(digits));
}

struct CoverCheck {
  bool ok = false;
  std::string reason;
};

/// Finite-depth certificate for the cover: J must consist of k0-islands, and at depth m*k0 every
/// cell having a J-block has its whole component inside phi_P(J-cells), P being the blocks before
/// its first J-block. The remaining cells are words over D'.
inline CoverCheck cover_check(const CoverDatum& datum, int m, const ApproximationOptions& opt = {}) {
  if (!datum.found) return {true, "no island datum: nothing to certify"};
  if (m < 1) throw SpecError("m must be positive");
  const auto& spec = datum.spec;
  const std::size_t k0 = static_cast<std::size_t>(datum.k0);

  const auto base = build_approximation(spec, datum.k0, opt);
  std::vector<bool> in_j(base.size(), false);
  for (const auto& w : datum.islands) {
    if (w.size() != k0) return {false, "J word " + to_string(w) + " has the wrong length"};
    in_j[base.cell_index(to_index_word(spec, w))] = true;
  }
  for (std::size_t c = 0; c < base.size(); ++c) {
    if (!in_j[c]) continue;
    const auto& comp = base.components[base.component_of[c]];
    if (comp.touches_boundary)
      return {false, "J word " + to_string(to_word(spec, base.index_word(c))) + " lies in a component meeting the boundary"};
    for (auto mbr : comp.members)
      if (!in_j[mbr]) return {false, "island of " + to_string(to_word(spec, base.index_word(c))) + " is not contained in J"};
  }

  const auto g = build_approximation(spec, datum.k0 * m, opt);
  const std::size_t block = base.size();  // |D|^k0
  std::size_t blocks_total = static_cast<std::size_t>(m);
  // first J-block position of each cell, or m when there is none
  auto first_j = [&](std::size_t cell) {
    std::vector<std::size_t> parts(blocks_total);
    for (std::size_t t = blocks_total; t-- > 0;) {
      parts[t] = cell % block;
      cell /= block;
    }
    for (std::size_t t = 0; t < blocks_total; ++t)
      if (in_j[parts[t]]) return t;
    return blocks_total;
  };
  auto pow_block = [&](std::size_t e) {
    std::size_t p = 1;
    for (std::size_t t = 0; t < e; ++t) p *= block;
    return p;
  };
  for (std::size_t c = 0; c < g.size(); ++c) {
    std::size_t t = first_j(c);
    if (t == blocks_total) continue;
    // members must share the first t+1 blocks' prefix class: same P and a J-block at t
    const std::size_t tail = pow_block(blocks_total - t);
    const std::size_t prefix = c / tail;
    for (auto mbr : g.components[g.component_of[c]].members) {
      std::size_t mp = mbr / tail;
      std::size_t mj = (mbr / pow_block(blocks_total - t - 1)) % block;
      if (mp != prefix || !in_j[mj]) {
        return {false, "component of " + to_string(to_word(spec, g.index_word(c))) + " leaves the island copy via " +
                           to_string(to_word(spec, g.index_word(mbr)))};
      }
    }
  }
  return {true, "certified at depth " + std::to_string(datum.k0 * m)};
}

}  // namespace sponge
