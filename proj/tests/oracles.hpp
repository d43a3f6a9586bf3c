#pragma once

// Independent reference computations for the tests. Nothing here calls the library's
// algorithm under test; only its value types are shared.

#include "sponge/core.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <deque>
#include <random>
#include <vector>

namespace oracle {

using sponge::Box;
using sponge::Face;
using sponge::Point;
using sponge::Rational;

/// relint(F) meets u + [0,1]^d, decided by looking for a witness point: free coordinates of
/// relint(F) range over (0,1), so 1/4, 1/2, 3/4 are enough candidates.
inline bool face_meets_translate(const Face& f, const std::vector<int>& u) {
  const std::size_t d = f.ambient;
  std::vector<std::vector<Rational>> choices(d);
  for (std::size_t j = 0; j < d; ++j) {
    if ((f.free >> j) & 1u) choices[j] = {Rational(1, 4), Rational(1, 2), Rational(3, 4)};
    else choices[j] = {Rational((f.ones >> j) & 1u)};
  }
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    bool inside = true;
    for (std::size_t j = 0; j < d && inside; ++j) {
      const Rational& x = choices[j][idx[j]];
      inside = u[j] <= x && x <= u[j] + 1;
    }
    if (inside) return true;
    std::size_t j = 0;
    while (j < d && ++idx[j] == choices[j].size()) idx[j++] = 0;
    if (j == d) return false;
  }
}

/// Connected components of closed boxes by breadth-first search over all pairs.
inline std::vector<int> flood_fill(const std::vector<Box>& boxes) {
  std::vector<int> label(boxes.size(), -1);
  int next = 0;
  for (std::size_t s = 0; s < boxes.size(); ++s) {
    if (label[s] >= 0) continue;
    std::deque<std::size_t> q{s};
    label[s] = next;
    while (!q.empty()) {
      auto a = q.front();
      q.pop_front();
      for (std::size_t b = 0; b < boxes.size(); ++b)
        if (label[b] < 0 && sponge::boxes_meet(boxes[a], boxes[b])) {
          label[b] = next;
          q.push_back(b);
        }
    }
    ++next;
  }
  return label;
}

/// Same partition, ignoring label names.
inline bool same_partition(const std::vector<int>& a, const std::vector<std::uint32_t>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
  return true;
}

/// Random slicing base with n maps: integer weights normalized to sum 1.
inline sponge::BaseIFS random_slicing_base(std::mt19937_64& rng, int n, int max_weight = 9) {
  std::uniform_int_distribution<int> w(1, max_weight);
  std::vector<int> ws;
  int total = 0;
  for (int j = 0; j < n; ++j) {
    ws.push_back(w(rng));
    total += ws.back();
  }
  sponge::BaseIFS b;
  Rational off = 0;
  for (int j = 0; j < n; ++j) {
    b.ratios.emplace_back(ws[static_cast<std::size_t>(j)], total);
    b.offsets.push_back(off);
    off += b.ratios.back();
  }
  return b;
}

/// g(h) for h = prefix period^infinity by Horner from the back: the tail value x solves
/// x = T_period(x), then the prefix maps are applied right to left.
inline Rational g_value(const sponge::BaseIFS& b, const std::vector<int>& prefix, const std::vector<int>& period) {
  Rational slope = 1, icpt = 0;  // T_period(x) = slope x + icpt, built right to left
  for (auto it = period.rbegin(); it != period.rend(); ++it) {
    auto j = static_cast<std::size_t>(*it);
    icpt = b.ratios[j] * icpt + b.offsets[j];
    slope = b.ratios[j] * slope;
  }
  Rational x = icpt / (1 - slope);
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) {
    auto j = static_cast<std::size_t>(*it);
    x = b.ratios[j] * x + b.offsets[j];
  }
  return x;
}

inline Rational f_value(int n, const std::vector<int>& prefix, const std::vector<int>& period) {
  return g_value(sponge::BaseIFS::uniform(n), prefix, period);
}

/// |x|^e for exact x, in 50-digit binary floating point.
using Float50 = boost::multiprecision::cpp_bin_float_50;
inline Float50 power(const Rational& x, long double e) {
  Float50 v = boost::multiprecision::abs(Float50(x));
  if (v == 0) return 0;
  return boost::multiprecision::exp(boost::multiprecision::log(v) * Float50(e));
}

}  // namespace oracle
