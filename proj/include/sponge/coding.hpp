#pragma once

#include "sponge/core.hpp"

#include <cfloat>
#include <cmath>
#include <optional>
#include <vector>

namespace sponge {

/// An infinite word given as prefix followed by a repeating period, or a finite
/// word when the period is empty.
template <class Symbol>
struct EventuallyPeriodic {
  std::vector<Symbol> prefix;
  std::vector<Symbol> period;

  bool infinite() const { return !period.empty(); }

  /// Symbols available: unbounded for infinite words.
  std::size_t known_length() const { return infinite() ? SIZE_MAX : prefix.size(); }

  const Symbol& at(std::size_t k) const {
    if (k < prefix.size()) return prefix[k];
    if (!infinite()) throw SpecError("index past the end of a finite coding");
    return period[(k - prefix.size()) % period.size()];
  }

  std::vector<Symbol> take(std::size_t k) const {
    std::vector<Symbol> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(at(i));
    return out;
  }

  EventuallyPeriodic prepend(const std::vector<Symbol>& word) const {
    EventuallyPeriodic out{word, period};
    out.prefix.insert(out.prefix.end(), prefix.begin(), prefix.end());
    return out;
  }

  friend bool operator==(const EventuallyPeriodic&, const EventuallyPeriodic&) = default;
};

using Coding = EventuallyPeriodic<Digit>;
using SymbolSequence = EventuallyPeriodic<int>;

/// Coordinate projection of a d-dimensional coding.
inline SymbolSequence coordinate_sequence(const Coding& c, std::size_t coord) {
  SymbolSequence s;
  for (const auto& d : c.prefix) s.prefix.push_back(d[coord]);
  for (const auto& d : c.period) s.period.push_back(d[coord]);
  return s;
}

/// Truncated value, its truncation error bound, and the exact value when the word is
/// eventually periodic.
struct SeriesValue {
  Rational truncated;
  Rational error_bound;
  std::optional<Rational> exact;
};

inline Rational rational_pow(const Rational& base, std::size_t e) {
  Rational out = 1;
  for (std::size_t i = 0; i < e; ++i) out *= base;
  return out;
}

namespace detail {

// x -> slope * x + intercept for the composite of the one-dimensional maps along a word.
struct AffineLine {
  Rational slope = 1;
  Rational intercept = 0;
  void then_inner(const Rational& r, const Rational& b) {  // this o (r x + b)
    intercept += slope * b;
    slope *= r;
  }
};

inline Rational periodic_value(const SymbolSequence& h, const BaseIFS& base) {
  AffineLine pre, cyc;
  for (int s : h.prefix) pre.then_inner(base.ratios[static_cast<std::size_t>(s)], base.offsets[static_cast<std::size_t>(s)]);
  for (int s : h.period) cyc.then_inner(base.ratios[static_cast<std::size_t>(s)], base.offsets[static_cast<std::size_t>(s)]);
  Rational fixed = cyc.intercept / (1 - cyc.slope);
  return pre.slope * fixed + pre.intercept;
}

inline void check_symbols(const SymbolSequence& h, std::size_t n) {
  auto bad = [&](int s) { return s < 0 || static_cast<std::size_t>(s) >= n; };
  for (int s : h.prefix)
    if (bad(s)) throw SpecError("symbol " + std::to_string(s) + " outside {0.." + std::to_string(n - 1) + "}");
  for (int s : h.period)
    if (bad(s)) throw SpecError("symbol " + std::to_string(s) + " outside {0.." + std::to_string(n - 1) + "}");
}

}  // namespace detail

/// f(h) = sum_k h_k / n^k, truncated at `depth` terms (error <= n^-depth).
inline SeriesValue eval_f(const SymbolSequence& h, int n, std::size_t depth) {
  detail::check_symbols(h, static_cast<std::size_t>(n));
  SeriesValue out;
  Rational weight(1, n);
  std::size_t terms = std::min(depth, h.known_length());
  for (std::size_t k = 0; k < terms; ++k) {
    out.truncated += weight * h.at(k);
    weight /= n;
  }
  out.error_bound = rational_pow(Rational(1, n), depth);
  if (h.infinite()) out.exact = detail::periodic_value(h, BaseIFS::uniform(n));
  return out;
}

/// g(h) = sum_k r_{h_1} ... r_{h_{k-1}} b_{h_k}, truncated at `depth` terms (error <= (r*)^depth).
inline SeriesValue eval_g(const SymbolSequence& h, const BaseIFS& base, std::size_t depth) {
  detail::check_symbols(h, base.size());
  SeriesValue out;
  Rational product = 1;
  std::size_t terms = std::min(depth, h.known_length());
  for (std::size_t k = 0; k < terms; ++k) {
    auto s = static_cast<std::size_t>(h.at(k));
    out.truncated += product * base.offsets[s];
    product *= base.ratios[s];
  }
  Rational r_max = *std::max_element(base.ratios.begin(), base.ratios.end());
  out.error_bound = rational_pow(r_max, depth);
  if (h.infinite()) out.exact = detail::periodic_value(h, base);
  return out;
}

struct HolderCertificate {
  long double alpha = 0;
  Rational r_max;  // r^*
  Rational r_min;  // r_*
  int n = 0;
};

/// alpha = min{-log r^*/log n, -log n/log r_*}, rounded down so the two-sided bound stays valid.
inline HolderCertificate holder_exponent(const BaseIFS& base) {
  if (!base.is_slicing()) throw SpecError("Holder certificate requires a slicing base IFS");
  HolderCertificate c;
  c.n = static_cast<int>(base.size());
  c.r_max = *std::max_element(base.ratios.begin(), base.ratios.end());
  c.r_min = *std::min_element(base.ratios.begin(), base.ratios.end());
  if (c.r_max == c.r_min) {
    // Slicing with equal ratios forces r = 1/n, hence alpha = 1 exactly.
    c.alpha = 1;
    return c;
  }
  const long double log_n = std::log(static_cast<long double>(c.n));
  const long double a1 = -std::log(to_long_double(c.r_max)) / log_n;
  const long double a2 = -log_n / std::log(to_long_double(c.r_min));
  c.alpha = std::min(a1, a2) * (1.0L - 16 * LDBL_EPSILON);
  return c;
}

/// Every depth-k word whose cell contains the point. Throws SpecError when there is none.
inline std::vector<Word> codings_of_point(const SpongeSpec& spec, const Point& point, std::size_t depth) {
  const std::size_t d = spec.dimension();
  if (point.size() != d) throw SpecError("point dimension mismatch");
  std::vector<Word> out;
  Word word;
  // depth-first, pruning by exact box containment
  auto recurse = [&](auto&& self, const std::vector<Rational>& scale, const std::vector<Rational>& shift) -> void {
    if (word.size() == depth) {
      out.push_back(word);
      return;
    }
    for (const auto& dg : spec.digits()) {
      std::vector<Rational> sc(d), sh(d);
      bool inside = true;
      for (std::size_t i = 0; i < d && inside; ++i) {
        const auto& b = spec.bases()[i];
        auto j = static_cast<std::size_t>(dg[i]);
        sh[i] = shift[i] + scale[i] * b.offsets[j];
        sc[i] = scale[i] * b.ratios[j];
        inside = sh[i] <= point[i] && point[i] <= sh[i] + sc[i];
      }
      if (!inside) continue;
      word.push_back(dg);
      self(self, sc, sh);
      word.pop_back();
    }
  };
  recurse(recurse, std::vector<Rational>(d, Rational(1)), std::vector<Rational>(d, Rational(0)));
  if (out.empty()) throw SpecError("point " + to_string(point) + " is not covered at depth " + std::to_string(depth));
  return out;
}

inline std::vector<Word> sierpinski_codings_of_point(const SpongeSpec& spec, const Point& point, std::size_t depth) {
  if (!spec.is_sierpinski()) throw SpecError("expected a Sierpinski sponge (equal ratios 1/n_i)");
  return codings_of_point(spec, point, depth);
}

/// Exact point pi(c) of an eventually periodic coding.
inline Point point_of(const SpongeSpec& spec, const Coding& c) {
  if (!c.infinite()) throw SpecError("point_of needs an eventually periodic coding");
  Point p;
  for (std::size_t i = 0; i < spec.dimension(); ++i)
    p.push_back(detail::periodic_value(coordinate_sequence(c, i), spec.bases()[i]));
  return p;
}

inline void check_coding(const SpongeSpec& spec, const Coding& c) {
  for (const auto* part : {&c.prefix, &c.period})
    for (const auto& dg : *part)
      if (!spec.contains(dg)) throw SpecError("coding symbol " + to_string(dg) + " is not in the digit set");
}

// Image of a point of a slicing sponge in its associated Sierpinski sponge, given a coding.
struct HomeoImage {
  Box source;  // enclosure of pi(c) in the slicing sponge
  Box image;   // enclosure of pi'(c) in K(M, D)
  bool exact = false;
};

/// F = pi' o pi^{-1}, evaluated coordinatewise through f (image) and g (source).
inline HomeoImage homeo_F(const SpongeSpec& spec, const Coding& c, std::size_t depth) {
  if (!spec.slicing()) throw SpecError("the homeomorphism is defined for slicing sponges");
  check_coding(spec, c);
  HomeoImage out;
  out.exact = c.infinite();
  for (std::size_t i = 0; i < spec.dimension(); ++i) {
    auto h = coordinate_sequence(c, i);
    auto fv = eval_f(h, static_cast<int>(spec.bases()[i].size()), depth);
    auto gv = eval_g(h, spec.bases()[i], depth);
    if (out.exact) {
      out.image.push_back({*fv.exact, *fv.exact});
      out.source.push_back({*gv.exact, *gv.exact});
    } else {
      out.image.push_back({fv.truncated, fv.truncated + fv.error_bound});
      out.source.push_back({gv.truncated, gv.truncated + gv.error_bound});
    }
  }
  return out;
}

struct PointImage {
  std::vector<Word> codings;
  Box image;  // intersection of the per-coding enclosures
};

/// Image of a point given by coordinates. Every depth-k coding of the point is mapped and the
/// enclosures must share a point; otherwise InvariantError is thrown.
inline PointImage homeo_point(const SpongeSpec& spec, const Point& point, std::size_t depth) {
  if (!spec.slicing()) throw SpecError("the homeomorphism is defined for slicing sponges");
  PointImage out;
  out.codings = codings_of_point(spec, point, depth);
  for (const auto& w : out.codings) {
    auto img = homeo_F(spec, Coding{w, {}}, depth);
    if (out.image.empty()) {
      out.image = img.image;
      continue;
    }
    for (std::size_t i = 0; i < spec.dimension(); ++i) {
      out.image[i].lo = std::max(out.image[i].lo, img.image[i].lo);
      out.image[i].hi = std::min(out.image[i].hi, img.image[i].hi);
      if (out.image[i].lo > out.image[i].hi)
        throw InvariantError("codings of one point have disjoint images: " + to_string(w));
    }
  }
  return out;
}

}  // namespace sponge
