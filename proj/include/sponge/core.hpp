#pragma once

#include "sponge/errors.hpp"
#include "sponge/rational.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sponge {

// One symbol of the digit set: a d-tuple of base-map indices.
using Digit = std::vector<int>;
// A finite word over the digit set, read left to right: phi_w = phi_{w1} o ... o phi_{wk}.
using Word = std::vector<Digit>;

inline std::string to_string(const Digit& digit) {
  std::string out = "(";
  for (std::size_t i = 0; i < digit.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(digit[i]);
  }
  return out + ")";
}

inline std::string to_string(const Word& word) {
  std::string out;
  for (const auto& d : word) out += to_string(d);
  return out.empty() ? "()" : out;
}

struct Interval {
  Rational lo;
  Rational hi;

  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool meets(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
  Rational length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

using Box = std::vector<Interval>;

inline bool boxes_meet(const Box& a, const Box& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i].meets(b[i])) return false;
  return true;
}

inline bool box_contains(const Box& b, const Point& p) {
  for (std::size_t i = 0; i < b.size(); ++i)
    if (!b[i].contains(p[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Base IFS in one coordinate: x -> ratios[j] * x + offsets[j].
// ---------------------------------------------------------------------------

struct BaseIFS {
  std::vector<Rational> ratios;
  std::vector<Rational> offsets;

  std::size_t size() const { return ratios.size(); }

  Rational apply(std::size_t j, const Rational& x) const { return ratios[j] * x + offsets[j]; }

  /// True iff the images of [0,1) partition [0,1) from left to right.
  bool is_slicing() const {
    if (ratios.size() != offsets.size() || ratios.empty()) return false;
    if (offsets[0] != 0) return false;
    for (std::size_t j = 0; j + 1 < size(); ++j)
      if (offsets[j + 1] != offsets[j] + ratios[j]) return false;
    return offsets.back() + ratios.back() == 1;
  }

  bool is_uniform() const {
    if (!is_slicing()) return false;
    Rational r(1, static_cast<int>(size()));
    return std::all_of(ratios.begin(), ratios.end(), [&](const Rational& x) { return x == r; });
  }

  static BaseIFS uniform(int n) {
    BaseIFS base;
    for (int j = 0; j < n; ++j) {
      base.ratios.emplace_back(1, n);
      base.offsets.emplace_back(j, n);
    }
    return base;
  }

  friend bool operator==(const BaseIFS&, const BaseIFS&) = default;
};

/// Raw, unvalidated description of a diagonal IFS.
struct SpongeInput {
  std::vector<BaseIFS> bases;
  std::vector<Digit> digits;
  bool require_slicing = true;
};

struct Validation;
Validation validate_spec(SpongeInput input);

// ---------------------------------------------------------------------------
// A validated diagonal IFS with its digit set, stored sorted lexicographically.
// ---------------------------------------------------------------------------

class SpongeSpec {
 public:
  /// Validates and throws SpecError with all diagnostics on failure.
  static SpongeSpec make(SpongeInput input);

  /// Sierpinski sponge K(M, D) with M = diag(n_1, ..., n_d).
  static SpongeSpec sierpinski(const std::vector<int>& n, std::vector<Digit> digits) {
    SpongeInput in;
    for (int ni : n) {
      if (ni < 1) throw SpecError("grid size must be positive");
      in.bases.push_back(BaseIFS::uniform(ni));
    }
    in.digits = std::move(digits);
    return make(std::move(in));
  }

  std::size_t dimension() const { return bases_.size(); }
  const std::vector<BaseIFS>& bases() const { return bases_; }
  const std::vector<Digit>& digits() const { return digits_; }
  std::size_t digit_count() const { return digits_.size(); }
  bool slicing() const { return slicing_; }
  bool degenerate() const { return !degenerate_coords_.empty(); }
  const std::vector<std::size_t>& degenerate_coordinates() const { return degenerate_coords_; }

  bool is_sierpinski() const {
    return std::all_of(bases_.begin(), bases_.end(), [](const BaseIFS& b) { return b.is_uniform(); });
  }

  /// Branch counts n_i of the base IFSs (the diagonal of M for the associated Sierpinski sponge).
  std::vector<int> branch_counts() const {
    std::vector<int> n;
    for (const auto& b : bases_) n.push_back(static_cast<int>(b.size()));
    return n;
  }

  std::optional<std::size_t> digit_index(const Digit& d) const {
    auto it = std::lower_bound(digits_.begin(), digits_.end(), d);
    if (it == digits_.end() || *it != d) return std::nullopt;
    return static_cast<std::size_t>(it - digits_.begin());
  }

  bool contains(const Digit& d) const { return digit_index(d).has_value(); }

  SpongeSpec associated_sierpinski() const {
    if (!slicing_) throw SpecError("associated Sierpinski sponge requires a slicing IFS");
    return sierpinski(branch_counts(), digits_);
  }

  /// Same base IFSs, different digit set.
  SpongeSpec with_digits(std::vector<Digit> digits) const {
    return make(SpongeInput{bases_, std::move(digits), slicing_});
  }

  Rational apply(const Digit& d, std::size_t coord, const Rational& x) const {
    return bases_[coord].apply(static_cast<std::size_t>(d[coord]), x);
  }

  Point apply(const Digit& d, const Point& z) const {
    Point out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = apply(d, i, z[i]);
    return out;
  }

  friend bool operator==(const SpongeSpec& a, const SpongeSpec& b) {
    return a.bases_ == b.bases_ && a.digits_ == b.digits_ && a.slicing_ == b.slicing_;
  }

 private:
  friend Validation validate_spec(SpongeInput input);
  SpongeSpec() = default;

  std::vector<BaseIFS> bases_;
  std::vector<Digit> digits_;
  bool slicing_ = false;
  std::vector<std::size_t> degenerate_coords_;
};

struct Validation {
  std::optional<SpongeSpec> spec;  // set iff diagnostics is empty
  std::vector<Diagnostic> diagnostics;
  bool slicing = false;
  bool degenerate = false;
  bool ok() const { return diagnostics.empty(); }
};

inline Validation validate_spec(SpongeInput input) {
  Validation v;
  auto diag = [&](std::string where, std::string msg) {
    v.diagnostics.push_back({std::move(where), std::move(msg)});
  };
  const std::size_t d = input.bases.size();
  if (d == 0) diag("", "dimension must be at least 1");
  if (d > 31) diag("", "dimension above 31 is not supported");

  bool all_slicing = true;
  for (std::size_t i = 0; i < d; ++i) {
    const auto& b = input.bases[i];
    const std::string where = "coordinate " + std::to_string(i + 1);
    if (b.ratios.size() != b.offsets.size()) {
      diag(where, "ratio and offset lists differ in length");
      all_slicing = false;
      continue;
    }
    if (b.size() < 1) diag(where, "base IFS is empty");
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::string wj = where + ", map " + std::to_string(j);
      if (b.ratios[j] <= 0 || b.ratios[j] >= 1) diag(wj, "ratio " + to_string(b.ratios[j]) + " outside (0,1)");
      if (b.offsets[j] < 0 || b.offsets[j] >= 1) diag(wj, "offset " + to_string(b.offsets[j]) + " outside [0,1)");
      if (b.ratios[j] + b.offsets[j] > 1) diag(wj, "image leaves [0,1]");
    }
    if (!b.is_slicing()) {
      all_slicing = false;
      if (input.require_slicing) {
        Rational total = 0;
        for (const auto& r : b.ratios) total += r;
        std::string detail = total != 1 ? "total length " + to_string(total) + " != 1"
                                        : "intervals overlap or leave gaps";
        diag(where, "base intervals do not partition [0,1) left to right (" + detail + ")");
      }
    }
  }

  if (input.digits.empty()) diag("digits", "digit set is empty");
  std::sort(input.digits.begin(), input.digits.end());
  for (std::size_t k = 0; k < input.digits.size(); ++k) {
    const auto& dg = input.digits[k];
    if (k > 0 && input.digits[k - 1] == dg) diag("digit " + to_string(dg), "duplicate digit");
    if (dg.size() != d) {
      diag("digit " + to_string(dg), "has " + std::to_string(dg.size()) + " entries, expected " + std::to_string(d));
      continue;
    }
    for (std::size_t i = 0; i < d; ++i)
      if (dg[i] < 0 || static_cast<std::size_t>(dg[i]) >= input.bases[i].size())
        diag("digit " + to_string(dg), "entry " + std::to_string(dg[i]) + " out of range in coordinate " + std::to_string(i + 1));
  }

  v.slicing = all_slicing && d > 0;
  if (!v.ok()) return v;

  SpongeSpec spec;
  // A coordinate is degenerate when every digit uses the same map and that map fixes 0 or 1:
  // the attractor then lies in the face x_i = 0 or x_i = 1.
  for (std::size_t i = 0; i < d; ++i) {
    int a = input.digits.front()[i];
    bool shared = std::all_of(input.digits.begin(), input.digits.end(), [&](const Digit& dg) { return dg[i] == a; });
    if (!shared) continue;
    const auto& b = input.bases[i];
    auto j = static_cast<std::size_t>(a);
    if (b.offsets[j] == 0 || b.offsets[j] + b.ratios[j] == 1) spec.degenerate_coords_.push_back(i);
  }
  v.degenerate = !spec.degenerate_coords_.empty();
  spec.bases_ = std::move(input.bases);
  spec.digits_ = std::move(input.digits);
  spec.slicing_ = v.slicing;
  v.spec = std::move(spec);
  return v;
}

inline SpongeSpec SpongeSpec::make(SpongeInput input) {
  auto v = validate_spec(std::move(input));
  if (!v.ok()) throw SpecError(v.diagnostics);
  return std::move(*v.spec);
}

// ---------------------------------------------------------------------------
// Cells
// ---------------------------------------------------------------------------

struct Cell {
  Word word;
  Box box;
};

/// Exact box phi_w([0,1]^d). Throws SpecError for symbols outside the digit set.
inline Cell cell_box(const SpongeSpec& spec, const Word& word) {
  const std::size_t d = spec.dimension();
  std::vector<Rational> scale(d, Rational(1)), shift(d, Rational(0));
  for (const auto& sym : word) {
    if (sym.size() != d || !spec.contains(sym)) throw SpecError("symbol " + to_string(sym) + " is not in the digit set");
    for (std::size_t i = 0; i < d; ++i) {
      const auto& b = spec.bases()[i];
      auto j = static_cast<std::size_t>(sym[i]);
      shift[i] += scale[i] * b.offsets[j];
      scale[i] *= b.ratios[j];
    }
  }
  Cell cell{word, Box(d)};
  for (std::size_t i = 0; i < d; ++i) cell.box[i] = {shift[i], shift[i] + scale[i]};
  return cell;
}

/// phi_w(z) for a finite word.
inline Point apply_word(const SpongeSpec& spec, const Word& word, Point z) {
  for (auto it = word.rbegin(); it != word.rend(); ++it) z = spec.apply(*it, z);
  return z;
}

// ---------------------------------------------------------------------------
// Faces of [0,1]^d, encoded as (free-coordinate mask, ones mask). A face is
// { x : x_j in [0,1] for j free, x_j = b_j for j fixed }.
// ---------------------------------------------------------------------------

struct Face {
  std::uint32_t ambient = 0;  // d
  std::uint32_t free = 0;     // A
  std::uint32_t ones = 0;     // b restricted to B; always disjoint from free

  static Face full(std::uint32_t d) { return Face{d, d >= 32 ? ~0u : ((1u << d) - 1u), 0}; }

  int dim() const { return std::popcount(free); }
  std::uint32_t fixed() const { return Face::full(ambient).free & ~free; }
  bool is_free(std::size_t j) const { return (free >> j) & 1u; }
  int offset(std::size_t j) const { return (ones >> j) & 1u; }
  bool valid() const { return (free & ones) == 0 && ((free | ones) & ~Face::full(ambient).free) == 0; }

  /// Closed-face membership.
  bool contains(const Point& p) const {
    for (std::size_t j = 0; j < ambient; ++j) {
      if (is_free(j)) {
        if (p[j] < 0 || p[j] > 1) return false;
      } else if (p[j] != offset(j)) {
        return false;
      }
    }
    return true;
  }

  /// Relative-interior membership.
  bool contains_relint(const Point& p) const {
    for (std::size_t j = 0; j < ambient; ++j) {
      if (is_free(j)) {
        if (p[j] <= 0 || p[j] >= 1) return false;
      } else if (p[j] != offset(j)) {
        return false;
      }
    }
    return true;
  }

  /// Closed face meets a closed box.
  bool meets(const Box& box) const {
    for (std::size_t j = 0; j < ambient; ++j)
      if (!is_free(j) && !box[j].contains(Rational(offset(j)))) return false;
    return true;
  }

  Point barycenter() const {
    Point p(ambient);
    for (std::size_t j = 0; j < ambient; ++j) p[j] = is_free(j) ? Rational(1, 2) : Rational(offset(j));
    return p;
  }

  std::vector<Point> vertices() const {
    std::vector<std::size_t> frees;
    for (std::size_t j = 0; j < ambient; ++j)
      if (is_free(j)) frees.push_back(j);
    std::vector<Point> out;
    for (std::uint32_t m = 0; m < (1u << frees.size()); ++m) {
      Point p = barycenter();
      for (std::size_t t = 0; t < frees.size(); ++t) p[frees[t]] = (m >> t) & 1u;
      out.push_back(std::move(p));
    }
    return out;
  }

  std::string describe() const {
    std::string out;
    for (std::size_t j = 0; j < ambient; ++j) {
      if (j) out += "x";
      out += is_free(j) ? "[0,1]" : (offset(j) ? "{1}" : "{0}");
    }
    return out;
  }

  friend bool operator==(const Face&, const Face&) = default;
};

/// Every face of [0,1]^d (3^d of them).
inline std::vector<Face> all_faces(std::uint32_t d) {
  std::vector<Face> out;
  std::uint32_t full = Face::full(d).free;
  for (std::uint32_t free = 0; free <= full; ++free) {
    if ((free & ~full) != 0) continue;
    std::uint32_t fixed = full & ~free;
    // enumerate subsets of fixed as the ones mask
    for (std::uint32_t ones = fixed;; ones = (ones - 1) & fixed) {
      out.push_back(Face{d, free, ones});
      if (ones == 0) break;
    }
  }
  return out;
}

/// The unique face having the point in its relative interior. Throws SpecError outside the cube.
inline Face containing_face(const Point& p) {
  Face f{static_cast<std::uint32_t>(p.size()), 0, 0};
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] < 0 || p[j] > 1) throw SpecError("point " + to_string(p) + " lies outside the unit cube");
    if (p[j] == 1) f.ones |= 1u << j;
    else if (p[j] > 0) f.free |= 1u << j;
  }
  return f;
}

/// Whether the relative interior of the face meets u + [0,1]^d, via u in b - T.
inline bool face_meets_translate(const Face& face, const std::vector<int>& u) {
  for (std::size_t j = 0; j < face.ambient; ++j) {
    if (face.is_free(j)) {
      if (u[j] != 0) return false;
    } else {
      int b = face.offset(j);
      if (u[j] != b && u[j] != b - 1) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Diagonal affine maps x_j -> scale_j x_j + shift_j.
// ---------------------------------------------------------------------------

struct DiagonalMap {
  std::vector<Rational> scale;
  std::vector<Rational> shift;

  Point apply(const Point& z) const {
    Point out(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) out[j] = scale[j] * z[j] + shift[j];
    return out;
  }

  /// Contracting in every coordinate and sending the cube into itself.
  bool contracts_cube() const {
    for (std::size_t j = 0; j < scale.size(); ++j) {
      if (scale[j] <= 0 || scale[j] >= 1) return false;
      if (shift[j] < 0 || scale[j] + shift[j] > 1) return false;
    }
    return true;
  }

  static DiagonalMap of_digit(const SpongeSpec& spec, const Digit& d) {
    DiagonalMap g;
    for (std::size_t i = 0; i < spec.dimension(); ++i) {
      const auto& b = spec.bases()[i];
      g.scale.push_back(b.ratios[static_cast<std::size_t>(d[i])]);
      g.shift.push_back(b.offsets[static_cast<std::size_t>(d[i])]);
    }
    return g;
  }

  /// this o other
  DiagonalMap compose(const DiagonalMap& other) const {
    DiagonalMap g;
    for (std::size_t j = 0; j < scale.size(); ++j) {
      g.scale.push_back(scale[j] * other.scale[j]);
      g.shift.push_back(scale[j] * other.shift[j] + shift[j]);
    }
    return g;
  }
};

/// Containing face of g(z0) for z0 in the relative interior of `face`. The image of the
/// whole face lies in the result, which is either `face` itself or of strictly higher dimension.
inline Face map_face(const DiagonalMap& g, const Face& face) {
  if (g.scale.size() != face.ambient || g.shift.size() != face.ambient)
    throw SpecError("map and face dimensions differ");
  if (!g.contracts_cube()) throw SpecError("map does not send [0,1]^d into itself");
  return containing_face(g.apply(face.barycenter()));
}

}  // namespace sponge
