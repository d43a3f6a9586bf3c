#pragma once

#include "sponge/core.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <thread>
#include <utility>
#include <vector>

namespace sponge {

// Integer form of a spec: in coordinate i every ratio and offset is an integer over
// a common denominator Q_i, so depth-k cell endpoints are integers over Q_i^k.
class GridLayout {
 public:
  explicit GridLayout(const SpongeSpec& spec) : dim_(spec.dimension()) {
    for (const auto& base : spec.bases()) {
      BigInt q = 1;
      for (const auto& r : base.ratios) q = lcm(q, boost::multiprecision::denominator(r));
      for (const auto& b : base.offsets) q = lcm(q, boost::multiprecision::denominator(b));
      denominators_.push_back(checked_int64(q));
      std::vector<std::int64_t> rs, bs;
      for (const auto& r : base.ratios) rs.push_back(checked_int64(boost::multiprecision::numerator(r) * (q / boost::multiprecision::denominator(r))));
      for (const auto& b : base.offsets) bs.push_back(checked_int64(boost::multiprecision::numerator(b) * (q / boost::multiprecision::denominator(b))));
      ratio_num_.push_back(std::move(rs));
      offset_num_.push_back(std::move(bs));
    }
    for (const auto& dg : spec.digits()) digits_.push_back(dg);
  }

  std::size_t dimension() const { return dim_; }
  std::size_t digit_count() const { return digits_.size(); }

  /// Q_i^k, throwing std::overflow_error past 64 bits.
  std::int64_t scale(std::size_t coord, int depth) const {
    std::int64_t s = 1;
    for (int t = 0; t < depth; ++t) s = checked_mul(s, denominators_[coord]);
    return s;
  }

  std::vector<std::int64_t> scales(int depth) const {
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < dim_; ++i) out.push_back(scale(i, depth));
    return out;
  }

  // Offset/extent pair of phi_w in coordinate i at the current depth, over Q_i^depth.
  struct Affine {
    std::int64_t shift = 0;
    std::int64_t extent = 1;
  };

  /// Appends the digit with index `a` to a word whose coordinate-i map is `prefix`.
  Affine extend(const Affine& prefix, std::size_t coord, std::size_t a) const {
    auto j = static_cast<std::size_t>(digits_[a][coord]);
    return {checked_add(checked_mul(prefix.shift, denominators_[coord]), checked_mul(prefix.extent, offset_num_[coord][j])),
            checked_mul(prefix.extent, ratio_num_[coord][j])};
  }

  /// lo/hi of the cell of a word of digit indices, per coordinate, over Q_i^{|w|}.
  void cell(const std::vector<std::uint32_t>& word, std::int64_t* lo, std::int64_t* hi) const {
    for (std::size_t i = 0; i < dim_; ++i) {
      Affine a{0, 1};
      for (auto sym : word) a = extend(a, i, sym);
      lo[i] = a.shift;
      hi[i] = a.shift + a.extent;
    }
  }

 private:
  std::size_t dim_;
  std::vector<std::int64_t> denominators_;
  std::vector<std::vector<std::int64_t>> ratio_num_;
  std::vector<std::vector<std::int64_t>> offset_num_;
  std::vector<Digit> digits_;
};

// Flat array of closed integer boxes in a common grid.
struct GridBoxes {
  std::size_t dim = 0;
  std::vector<std::int64_t> lo;  // size() * dim
  std::vector<std::int64_t> hi;

  std::size_t size() const { return dim == 0 ? 0 : lo.size() / dim; }

  bool meet(std::size_t a, std::size_t b) const {
    for (std::size_t i = 0; i < dim; ++i)
      if (lo[a * dim + i] > hi[b * dim + i] || lo[b * dim + i] > hi[a * dim + i]) return false;
    return true;
  }

  void push(const std::int64_t* l, const std::int64_t* h) {
    lo.insert(lo.end(), l, l + dim);
    hi.insert(hi.end(), h, h + dim);
  }
};

/// Disjoint-set forest whose canonical root is always the smallest member index.
class MinUnionFind {
 public:
  explicit MinUnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::uint32_t{0}); }

  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[b] = a;
    else parent_[a] = b;
  }

 private:
  std::vector<std::uint32_t> parent_;
};

/// All intersecting pairs (i < j), sorted. Sweep along coordinate 0; threads split the sweep.
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> intersecting_pairs(const GridBoxes& boxes, unsigned threads = 1) {
  const std::size_t n = boxes.size();
  const std::size_t d = boxes.dim;
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), std::uint32_t{0});
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    auto la = boxes.lo[a * d], lb = boxes.lo[b * d];
    return la != lb ? la < lb : a < b;
  });

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, n / 1024))));
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> parts(threads);
  auto work = [&](unsigned t) {
    std::size_t begin = n * t / threads, end = n * (t + 1) / threads;
    auto& out = parts[t];
    for (std::size_t p = begin; p < end; ++p) {
      std::uint32_t a = order[p];
      for (std::size_t q = p + 1; q < n; ++q) {
        std::uint32_t b = order[q];
        if (boxes.lo[b * d] > boxes.hi[a * d]) break;
        if (boxes.meet(a, b)) out.emplace_back(std::min(a, b), std::max(a, b));
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (auto& part : parts) pairs.insert(pairs.end(), part.begin(), part.end());
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

/// Component label per box; labels are numbered by smallest member.
inline std::vector<std::uint32_t> component_labels(std::size_t n, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs) {
  MinUnionFind uf(n);
  for (auto [a, b] : pairs) uf.unite(a, b);
  std::vector<std::uint32_t> label(n), root_label(n, UINT32_MAX);
  std::uint32_t next = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    auto r = uf.find(i);
    if (root_label[r] == UINT32_MAX) root_label[r] = next++;
    label[i] = root_label[r];
  }
  return label;
}

inline std::size_t count_labels(const std::vector<std::uint32_t>& labels) {
  std::uint32_t mx = 0;
  for (auto l : labels) mx = std::max(mx, l + 1);
  return labels.empty() ? 0 : mx;
}

}  // namespace sponge
