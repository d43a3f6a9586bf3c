#pragma once

#include "sponge/rational.hpp"

#include <string>
#include <vector>

namespace sponge {

struct Vec2 {
  Rational x;
  Rational y;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline std::string to_string(const Vec2& p) { return "(" + to_string(p.x) + ", " + to_string(p.y) + ")"; }

// Convex polygon, vertices counter-clockwise. Degenerate polygons (segments, points) are allowed.
using Polygon = std::vector<Vec2>;

inline Rational cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline Rational signed_area2(const Polygon& p) {
  Rational s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % p.size()];
    s += a.x * b.y - a.y * b.x;
  }
  return s;
}

/// Sutherland-Hodgman against a convex, counter-clockwise clip polygon with closed half-planes,
/// so touching inputs give a degenerate (segment or point) result instead of nothing.
inline Polygon clip_convex(Polygon subject, const Polygon& clip) {
  for (std::size_t e = 0; e < clip.size() && !subject.empty(); ++e) {
    const Vec2& a = clip[e];
    const Vec2& b = clip[(e + 1) % clip.size()];
    if (a == b) continue;
    Polygon out;
    for (std::size_t i = 0; i < subject.size(); ++i) {
      const Vec2& p = subject[i];
      const Vec2& q = subject[(i + 1) % subject.size()];
      Rational sp = cross(a, b, p), sq = cross(a, b, q);
      if (sp >= 0) out.push_back(p);
      if ((sp > 0 && sq < 0) || (sp < 0 && sq > 0)) {
        Rational t = sp / (sp - sq);
        out.push_back({p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)});
      }
    }
    // drop consecutive duplicates
    Polygon dedup;
    for (const auto& v : out)
      if (dedup.empty() || !(dedup.back() == v)) dedup.push_back(v);
    while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
    subject = std::move(dedup);
  }
  return subject;
}

/// Exact closed intersection test by separating axes over all edge normals (any convex polygons).
inline bool polygons_meet(const Polygon& p, const Polygon& q) {
  auto separated = [](const Polygon& a, const Polygon& b, const Polygon& edges_of) {
    for (std::size_t e = 0; e < edges_of.size(); ++e) {
      const Vec2& s = edges_of[e];
      const Vec2& t = edges_of[(e + 1) % edges_of.size()];
      Rational nx = -(t.y - s.y), ny = t.x - s.x;
      if (nx == 0 && ny == 0) continue;
      auto proj = [&](const Polygon& poly, Rational& lo, Rational& hi) {
        lo = hi = nx * poly[0].x + ny * poly[0].y;
        for (const auto& v : poly) {
          Rational d = nx * v.x + ny * v.y;
          if (d < lo) lo = d;
          if (d > hi) hi = d;
        }
      };
      Rational alo, ahi, blo, bhi;
      proj(a, alo, ahi);
      proj(b, blo, bhi);
      if (ahi < blo || bhi < alo) return true;
    }
    return false;
  };
  if (p.empty() || q.empty()) return false;
  // segments contribute their own normal plus the direction itself
  auto with_direction = [](const Polygon& poly) {
    Polygon out = poly;
    if (poly.size() == 2) out.push_back({poly[1].x + (poly[1].y - poly[0].y), poly[1].y - (poly[1].x - poly[0].x)});
    return out;
  };
  return !separated(p, q, with_direction(p)) && !separated(p, q, with_direction(q));
}

}  // namespace sponge
