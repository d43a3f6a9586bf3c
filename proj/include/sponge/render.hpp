#pragma once

#include "sponge/counterexample.hpp"
#include "sponge/topology.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace sponge {

struct RenderSettings {
  enum class Format { Ppm, Svg };
  Format format = Format::Ppm;
  int resolution = 256;
  int depth = 3;
  bool color_components = false;
  bool highlight_islands = false;
  bool highlight_l = false;

  void validate() const {
    if (resolution < 16) throw SpecError("resolution must be at least 16");
    if (depth < 0) throw SpecError("depth must be non-negative");
  }
};

// A linear functional c_x x + c_y y whose values on the scene are integers over `denominator`.
struct SceneAxis {
  std::int64_t cx = 1;
  std::int64_t cy = 0;
  std::int64_t denominator = 1;
};

struct SceneShape {
  std::vector<std::int64_t> lo, hi;  // slab per axis; the shape is their intersection
  Polygon outline;                   // exact vertices for vector output
  std::uint32_t rgb = 0;
};

struct SceneSegment {
  Vec2 a, b;  // axis-parallel
  std::uint32_t rgb = 0;
};

// Axes 0 and 1 must be x and y.
struct Scene {
  std::vector<SceneAxis> axes;
  std::vector<SceneShape> shapes;
  std::vector<SceneSegment> segments;
};

inline std::uint32_t component_color(std::uint32_t label) {
  std::uint64_t h = 1469598103934665603ull ^ (label + 1);
  h *= 1099511628211ull;
  h ^= h >> 29;
  h *= 0x9E3779B97F4A7C15ull;
  auto ch = [&](int shift) { return static_cast<std::uint32_t>(40 + ((h >> shift) & 0xff) % 176); };
  return (ch(8) << 16) | (ch(24) << 8) | ch(40);
}

constexpr std::uint32_t kInk = 0x000000;
constexpr std::uint32_t kIsland = 0xd62728;
constexpr std::uint32_t kSegment = 0x1f4fd6;

inline Scene sponge_scene(const SpongeSpec& spec, const RenderSettings& rs, const ApproximationOptions& opt = {}) {
  if (spec.dimension() != 2) throw SpecError("rendering supports two-dimensional sponges");
  const auto g = build_approximation(spec, rs.depth, opt);
  Scene s;
  s.axes = {{1, 0, g.scale[0]}, {0, 1, g.scale[1]}};
  for (std::size_t c = 0; c < g.size(); ++c) {
    SceneShape sh;
    sh.lo = {g.boxes.lo[c * 2], g.boxes.lo[c * 2 + 1]};
    sh.hi = {g.boxes.hi[c * 2], g.boxes.hi[c * 2 + 1]};
    const auto b = g.rational_box(c);
    sh.outline = {{b[0].lo, b[1].lo}, {b[0].hi, b[1].lo}, {b[0].hi, b[1].hi}, {b[0].lo, b[1].hi}};
    const auto& comp = g.components[g.component_of[c]];
    if (rs.highlight_islands && !comp.touches_boundary) sh.rgb = kIsland;
    else if (rs.color_components) sh.rgb = component_color(g.component_of[c]);
    else sh.rgb = kInk;
    s.shapes.push_back(std::move(sh));
  }
  return s;
}

inline Scene counterexample_scene(const PlanarSimilarIFS& f, const RenderSettings& rs, unsigned threads = 1) {
  const auto lv = counterexample_level(f, rs.depth, threads);
  const auto h = trapezoid_h();
  Scene s;
  s.axes = {{1, 0, lv.denominator}, {0, 1, lv.denominator}, {-1, 2, lv.denominator}};
  for (std::size_t c = 0; c < lv.words.size(); ++c) {
    SceneShape sh;
    sh.lo.assign(&lv.slabs.lo[c * 3], &lv.slabs.lo[c * 3] + 3);
    sh.hi.assign(&lv.slabs.hi[c * 3], &lv.slabs.hi[c * 3] + 3);
    sh.outline = image(word_map(f, lv.words[c]), h);
    sh.rgb = rs.color_components ? component_color(lv.labels[c]) : kInk;
    s.shapes.push_back(std::move(sh));
  }
  if (rs.highlight_l) {
    auto l = segment_l();
    s.segments.push_back({l[0], l[1], kSegment});
  }
  return s;
}

struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // row-major, top row first

  void set(int i, int row, std::uint32_t c) {
    auto* p = &rgb[(static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(i)) * 3];
    p[0] = static_cast<std::uint8_t>(c >> 16);
    p[1] = static_cast<std::uint8_t>(c >> 8);
    p[2] = static_cast<std::uint8_t>(c);
  }
};

/// Paints every pixel whose center lies in a shape (exact integer test, later shapes on top).
/// Segments cover the pixels whose closed squares they cross.
inline Raster rasterize(const Scene& s, int resolution) {
  using Wide = __int128;
  const int r = resolution;
  Raster img{r, r, std::vector<std::uint8_t>(static_cast<std::size_t>(r) * static_cast<std::size_t>(r) * 3, 0xff)};
  const Wide two_r = 2 * static_cast<Wide>(r);
  for (const auto& sh : s.shapes) {
    auto range = [&](std::size_t axis) {
      const auto den = static_cast<long double>(s.axes[axis].denominator);
      int a = static_cast<int>(std::floor(static_cast<long double>(sh.lo[axis]) / den * r)) - 1;
      int b = static_cast<int>(std::ceil(static_cast<long double>(sh.hi[axis]) / den * r)) + 1;
      return std::pair{std::max(a, 0), std::min(b, r - 1)};
    };
    auto [i0, i1] = range(0);
    auto [j0, j1] = range(1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        bool inside = true;
        for (std::size_t a = 0; a < s.axes.size() && inside; ++a) {
          const auto& ax = s.axes[a];
          // value at the pixel center, scaled by 2r * denominator
          Wide v = static_cast<Wide>(ax.denominator) * (static_cast<Wide>(ax.cx) * (2 * i + 1) + static_cast<Wide>(ax.cy) * (2 * j + 1));
          inside = static_cast<Wide>(sh.lo[a]) * two_r <= v && v <= static_cast<Wide>(sh.hi[a]) * two_r;
        }
        if (inside) img.set(i, r - 1 - j, sh.rgb);
      }
  }
  for (const auto& seg : s.segments) {
    if (seg.a.x != seg.b.x && seg.a.y != seg.b.y) throw SpecError("only axis-parallel segments are rendered");
    auto cell = [&](const Rational& v) {
      Rational t = v * r;
      BigInt q = boost::multiprecision::numerator(t) / boost::multiprecision::denominator(t);
      return std::clamp(static_cast<int>(q), 0, r - 1);
    };
    int i0 = cell(std::min(seg.a.x, seg.b.x)), i1 = cell(std::max(seg.a.x, seg.b.x));
    int j0 = cell(std::min(seg.a.y, seg.b.y)), j1 = cell(std::max(seg.a.y, seg.b.y));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) img.set(i, r - 1 - j, seg.rgb);
  }
  return img;
}

inline std::string to_ppm(const Raster& img) {
  std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(img.rgb.data()), img.rgb.size());
  return out;
}

inline std::string svg_number(const Rational& v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", static_cast<double>(to_long_double(v)));
  return buf;
}

inline std::string svg_color(std::uint32_t c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%06x", c & 0xffffffu);
  return buf;
}

inline std::string to_svg(const Scene& s, int resolution) {
  const Rational r(resolution);
  auto px = [&](const Vec2& p) { return svg_number(p.x * r) + " " + svg_number((1 - p.y) * r); };
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(resolution) + "\" height=\"" +
                    std::to_string(resolution) + "\" viewBox=\"0 0 " + std::to_string(resolution) + " " +
                    std::to_string(resolution) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (const auto& sh : s.shapes) {
    out += "<path d=\"M" + px(sh.outline[0]);
    for (std::size_t i = 1; i < sh.outline.size(); ++i) out += " L" + px(sh.outline[i]);
    out += " Z\" fill=\"" + svg_color(sh.rgb) + "\"/>\n";
  }
  for (const auto& seg : s.segments)
    out += "<path d=\"M" + px(seg.a) + " L" + px(seg.b) + "\" stroke=\"" + svg_color(seg.rgb) + "\" stroke-width=\"2\" fill=\"none\"/>\n";
  out += "</svg>\n";
  return out;
}

inline std::string render(const Scene& s, const RenderSettings& rs) {
  rs.validate();
  return rs.format == RenderSettings::Format::Ppm ? to_ppm(rasterize(s, rs.resolution)) : to_svg(s, rs.resolution);
}

/// FNV-1a, used for golden-file comparisons.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace sponge
