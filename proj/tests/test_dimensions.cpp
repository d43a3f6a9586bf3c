#include "oracles.hpp"
#include "sponge/dimensions.hpp"
#include "sponge/fixtures.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sponge;
using oracle::Float50;

namespace {

Float50 log_base(const Float50& b, const Float50& x) { return boost::multiprecision::log(x) / boost::multiprecision::log(b); }

double to_d(const Float50& x) { return x.convert_to<double>(); }

BMCarpet carpet(const SpongeSpec& s) { return BMCarpet::from_spec(s); }

// Sum over all m^k words of ||A_{i_k} ... A_{i_1}||^{1/sigma}, by direct enumeration.
long double brute_sofic(const SoficSystem& sys, int n, int m, int k) {
  const std::size_t v = sys.vertices();
  const long double inv_sigma = std::log((long double)m) / std::log((long double)n);
  std::vector<int> word(static_cast<std::size_t>(k), 0);
  long double total = 0;
  while (true) {
    std::vector<long double> p(v * v, 0);
    for (std::size_t i = 0; i < v; ++i) p[i * v + i] = 1;
    for (int j : word) {
      const auto& a = sys.rows[static_cast<std::size_t>(j)];
      std::vector<long double> q(v * v, 0);
      for (std::size_t r = 0; r < v; ++r)
        for (std::size_t c = 0; c < v; ++c)
          for (std::size_t s = 0; s < v; ++s) q[r * v + c] += static_cast<long double>(a[r][s]) * p[s * v + c];
      p.swap(q);
    }
    long double norm = 0;
    for (auto x : p) norm += x;
    if (norm > 0) total += std::pow(norm, inv_sigma);
    std::size_t t = 0;
    while (t < word.size() && ++word[t] == m) word[t++] = 0;
    if (t == word.size()) break;
  }
  return std::log(total) / (std::log((long double)m) * k);
}

IntMatrix random_matrix(std::mt19937_64& rng, std::size_t v, int max) {
  IntMatrix a(v, std::vector<std::int64_t>(v));
  for (auto& row : a)
    for (auto& x : row) x = static_cast<std::int64_t>(rng() % static_cast<unsigned>(max + 1));
  return a;
}

}  // namespace

TEST(BedfordMcMullen, Trivial) {
  EXPECT_NEAR((double)bm_hausdorff(carpet(fixtures::full_grid(4, 3))), 2.0, 1e-15);
  EXPECT_NEAR((double)bm_box(carpet(fixtures::full_grid(4, 3))), 2.0, 1e-15);
  auto single = carpet(SpongeSpec::sierpinski({4, 3}, {{1, 2}}));
  EXPECT_NEAR((double)bm_hausdorff(single), 0.0, 1e-15);
  EXPECT_NEAR((double)bm_box(single), 0.0, 1e-15);
}

TEST(BedfordMcMullen, CarpetE) {
  auto c = carpet(fixtures::carpet_e());
  EXPECT_EQ(c.n, 8);
  EXPECT_EQ(c.m, 5);
  EXPECT_EQ(c.size(), 20u);
  EXPECT_EQ(c.occupied_rows(), 5);
  EXPECT_EQ(c.row_counts(), (std::vector<long long>{8, 1, 2, 1, 8}));
  const Float50 h = log_base(5, 12 + boost::multiprecision::cbrt(Float50(5)));
  const Float50 b = 1 + log_base(8, 4);
  EXPECT_NEAR((double)bm_hausdorff(c), to_d(h), 1e-12);
  EXPECT_NEAR((double)bm_box(c), to_d(b), 1e-12);
  EXPECT_NEAR((double)bm_hausdorff(c), 1.627, 5e-4);
  EXPECT_NEAR((double)bm_box(c), 1.667, 5e-4);
}

TEST(BedfordMcMullen, ConnectedPartOfEPrime) {
  auto c = carpet(fixtures::carpet_e_prime_connected_part());
  EXPECT_EQ(c.row_counts(), (std::vector<long long>{8, 1, 1, 1, 8}));
  EXPECT_NEAR((double)bm_hausdorff(c), to_d(log_base(5, 13)), 1e-12);
  EXPECT_NEAR((double)bm_box(c), to_d(1 + log_base(8, Float50(19) / 5)), 1e-12);
  EXPECT_NEAR((double)bm_box(c), 1.642, 5e-4);
}

TEST(BedfordMcMullen, TallGridIsTransposed) {
  auto wide = carpet(SpongeSpec::sierpinski({4, 2}, {{0, 0}, {3, 0}, {1, 1}}));
  auto tall = carpet(SpongeSpec::sierpinski({2, 4}, {{0, 0}, {0, 3}, {1, 1}}));
  EXPECT_EQ(tall.n, 4);
  EXPECT_EQ(tall.m, 2);
  EXPECT_EQ(tall.digits, wide.digits);
  EXPECT_EQ(bm_hausdorff(tall), bm_hausdorff(wide));
}

TEST(BedfordMcMullen, McMullenInequalityAndMonotonicity) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + trial % 4, n = m + 1 + trial % 3;
    std::vector<Digit> d;
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < m; ++y)
        if (rng() % 3 == 0) d.push_back({x, y});
    if (d.empty()) d.push_back({0, 0});
    auto c = carpet(SpongeSpec::sierpinski({n, m}, d));
    const auto h = bm_hausdorff(c), b = bm_box(c);
    EXPECT_LE(h, b + 1e-15L);
    auto t = c.row_counts();
    std::vector<long long> occupied;
    for (auto x : t)
      if (x > 0) occupied.push_back(x);
    if (std::adjacent_find(occupied.begin(), occupied.end(), std::not_equal_to<>()) != occupied.end()) {
      EXPECT_LT(h, b - 1e-12L);
    }
    // add one missing digit
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < m; ++y)
        if (std::find(d.begin(), d.end(), Digit{x, y}) == d.end()) {
          auto more = d;
          more.push_back({x, y});
          auto c2 = carpet(SpongeSpec::sierpinski({n, m}, more));
          EXPECT_GE(bm_hausdorff(c2), h - 1e-15L);
          EXPECT_GE(bm_box(c2), b - 1e-15L);
          x = n;
          break;
        }
  }
}

TEST(SpectralRadius, PrintedMatrix) {
  auto r = spectral_radius({{17, 14}, {3, 5}});
  const Float50 expect = (22 + boost::multiprecision::sqrt(Float50(312))) / 2;
  EXPECT_NEAR((double)r.value, to_d(expect), 1e-9);
  ASSERT_TRUE(r.closed_form);
  EXPECT_NEAR((double)*r.closed_form, to_d(expect), 1e-12);
  EXPECT_EQ(r.trace, 22);
  EXPECT_EQ(r.determinant, 43);
  EXPECT_NEAR((double)r.value, 19.83, 5e-3);
}

TEST(SpectralRadius, Trivial) {
  EXPECT_NEAR((double)spectral_radius({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}).value, 1.0, 1e-12);
  EXPECT_NEAR((double)spectral_radius({{20}}).value, 20.0, 1e-12);
  EXPECT_NEAR((double)spectral_radius({{0, 5}, {0, 0}}).value, 0.0, 1e-9);
  EXPECT_THROW(spectral_radius({{1, -1}, {0, 1}}), SpecError);
  EXPECT_THROW(spectral_radius({{1, 1}}), SpecError);
}

TEST(SpectralRadius, RowSumBracketAndPowerIteration) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t v = 1 + static_cast<std::size_t>(trial % 5);
    auto a = random_matrix(rng, v, 9);
    auto r = spectral_radius(a);
    long double lo = 1e300L, hi = 0;
    for (const auto& row : a) {
      long double s = 0;
      for (auto x : row) s += static_cast<long double>(x);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    EXPECT_GE(r.value, lo - 1e-9L);
    EXPECT_LE(r.value, hi + 1e-9L);
    // power iteration on A + I (same Perron vector, radius shifted by one)
    std::vector<long double> x(v, 1);
    long double rho = 0;
    for (int it = 0; it < 3000; ++it) {
      std::vector<long double> y(v, 0);
      for (std::size_t i = 0; i < v; ++i) {
        y[i] = x[i];
        for (std::size_t j = 0; j < v; ++j) y[i] += static_cast<long double>(a[i][j]) * x[j];
      }
      long double nrm = *std::max_element(y.begin(), y.end());
      rho = nrm / *std::max_element(x.begin(), x.end());
      for (auto& t : y) t /= nrm;
      x.swap(y);
    }
    EXPECT_NEAR((double)r.value, (double)(rho - 1), 1e-6) << trial;
  }
}

TEST(SoficBox, Formula) {
  const auto sys = fixtures::e_printed_sofic();
  const long double lambda = (22 + std::sqrt(312.0L)) / 2;
  const long double closed = std::log(lambda) / std::log(8.0L) + (1 / std::log(5.0L) - 1 / std::log(8.0L)) * std::log(5.0L);
  EXPECT_NEAR((double)sofic_box(sys, 8, 5, 5), (double)closed, 1e-9);
  // the printed 1.662 is the truncated value 1.66260...
  EXPECT_EQ(std::floor(sofic_box(sys, 8, 5, 5) * 1000), 1662);
  EXPECT_NEAR((double)sofic_box(1, 8, 5, 1), 0.0, 1e-15);
  EXPECT_THROW(sofic_box(1, 8, 5, 0), SpecError);
}

TEST(SoficBox, SingleVertexReducesToBedfordMcMullen) {
  auto c = carpet(fixtures::carpet_e());
  EXPECT_NEAR((double)sofic_box(SoficSystem::make({{{20}}}), 8, 5, 5), (double)bm_box(c), 1e-12);
}

TEST(SoficSystem, RejectsInconsistentSum) {
  IntMatrix a0{{8, 7}, {0, 1}}, a1{{0, 0}, {1, 1}};
  EXPECT_THROW(SoficSystem::make({a0, a1}, IntMatrix{{17, 14}, {3, 5}}), SpecError);
  EXPECT_THROW(SoficSystem::make({a0, {{1}}}), SpecError);
  EXPECT_EQ(fixtures::e_printed_sofic().adjacency, (IntMatrix{{17, 14}, {3, 5}}));
}

TEST(SoficHausdorff, SingleVertexFactorizes) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 2 + trial % 4, n = m + 1 + trial % 3;
    std::vector<Digit> d;
    std::vector<IntMatrix> rows(static_cast<std::size_t>(m), IntMatrix{{0}});
    for (int y = 0; y < m; ++y)
      for (int x = 0; x < n; ++x)
        if (rng() % 2 || (x == 0 && y == 0)) {
          d.push_back({x, y});
          ++rows[static_cast<std::size_t>(y)][0][0];
        }
    const auto h = bm_hausdorff(carpet(SpongeSpec::sierpinski({n, m}, d)));
    auto est = sofic_hausdorff(SoficSystem::make(rows), n, m, {10, 1000});
    for (auto a : est.raw) EXPECT_NEAR((double)a, (double)h, 1e-9);
    EXPECT_NEAR((double)est.value, (double)h, 1e-9);
  }
}

TEST(SoficHausdorff, MatchesBruteForceEnumeration) {
  const auto sys = fixtures::e_printed_sofic();
  auto est = sofic_hausdorff(sys, 8, 5, {6, 1'000'000});
  for (int k = 1; k <= 6; ++k) EXPECT_NEAR((double)est.raw[static_cast<std::size_t>(k - 1)], (double)brute_sofic(sys, 8, 5, k), 1e-12);
  // products are shared: far fewer than 5^k distinct matrices
  EXPECT_LT(est.table_sizes.back(), 15625u);
}

TEST(SoficHausdorff, SingleNonzeroEntryGivesZero) {
  auto est = sofic_hausdorff(SoficSystem::make({{{1}}, {{0}}, {{0}}}), 4, 3, {8, 1000});
  for (auto a : est.raw) EXPECT_NEAR((double)a, 0.0, 1e-15);
}

TEST(SoficHausdorff, CarpetE) {
  auto est = sofic_hausdorff(fixtures::e_printed_sofic(), 8, 5, {12, 1'000'000});
  EXPECT_GE(est.value, 1.59L);
  EXPECT_LE(est.value, 1.63L);
  EXPECT_NEAR((double)est.value, 1.61, 0.015);
  // decreasing raw sequence, extrapolant below it
  for (std::size_t k = 3; k < est.raw.size(); ++k) EXPECT_LT(est.raw[k], est.raw[k - 1]);
  EXPECT_LT(est.value, est.raw.back());
  EXPECT_LT(est.error, 0.01L);
}

TEST(SoficHausdorff, Budget) {
  EXPECT_THROW(sofic_hausdorff(fixtures::e_printed_sofic(), 8, 5, {15, 1000}), BudgetError);
  EXPECT_THROW(sofic_hausdorff(fixtures::e_printed_sofic(), 8, 4), SpecError);
}

TEST(Indices, EPrime) {
  auto c = BMCarpet::from_spec(fixtures::carpet_e_prime_connected_part());
  auto r = connectedness_indices(carpet(fixtures::carpet_e_prime()), {ConnectedPart::Kind::Carpet, c, std::nullopt, 0});
  EXPECT_NEAR((double)r.ind_h.value, std::log(13.0) / std::log(5.0), 1e-12);
  EXPECT_NEAR((double)r.ind_b.value, 1 + std::log(19.0 / 5) / std::log(8.0), 1e-12);
  EXPECT_NEAR((double)r.ind_b.value, 1.640, 5e-3);
  auto drop = dimension_drop_check(r);
  EXPECT_TRUE(drop.drop);
  EXPECT_TRUE(drop.resolved);
  EXPECT_GT(drop.margin_h, 1e-3L);
  EXPECT_GT(drop.margin_b, 1e-3L);
}

TEST(Indices, ESofic) {
  ConnectedPart part{ConnectedPart::Kind::Sofic, std::nullopt, fixtures::e_printed_sofic(), 5};
  auto r = connectedness_indices(carpet(fixtures::carpet_e()), part, {12, 1'000'000});
  EXPECT_EQ(r.ind_h.method, "limit-extrapolated");
  EXPECT_EQ(r.ind_b.method, "spectral");
  EXPECT_NEAR((double)r.ind_h.value, 1.61, 0.015);
  EXPECT_NEAR((double)r.ind_b.value, 1.6626, 1e-4);
  auto drop = dimension_drop_check(r);
  EXPECT_TRUE(drop.drop);
  EXPECT_TRUE(drop.resolved) << drop.note;
}

TEST(Indices, DegenerateCases) {
  auto whole = connectedness_indices(carpet(fixtures::full_grid(3, 2)), {});
  EXPECT_TRUE(whole.connected);
  EXPECT_FALSE(dimension_drop_check(whole).drop);
  auto empty = connectedness_indices(carpet(fixtures::island_4x4()), {ConnectedPart::Kind::Empty, {}, {}, 0});
  EXPECT_TRUE(empty.connected_part_empty);
  EXPECT_FALSE(dimension_drop_check(empty).drop);
  EXPECT_EQ(dimension_drop_check(empty).note, "connected part empty");
}

TEST(Csv, Format) {
  EXPECT_EQ(csv_header(), "name,dimH,dimB,indH,indB,marginH,marginB,method");
  EXPECT_EQ(format_number(1.0L / 3), "0.333333333333");
  EXPECT_EQ(format_number(2), "2");
  DimensionReport r;
  r.name = "cube";
  r.dim_h = {std::numeric_limits<long double>::quiet_NaN(), 0, "n/a"};
  r.dim_b = r.ind_h = r.ind_b = r.dim_h;
  EXPECT_EQ(csv_row(r), "cube,n/a: open problem,n/a: open problem,n/a: open problem,n/a: open problem,n/a,n/a,n/a/n/a/n/a/n/a");
  auto e = connectedness_indices(carpet(fixtures::carpet_e_prime()),
                                 {ConnectedPart::Kind::Carpet, BMCarpet::from_spec(fixtures::carpet_e_prime_connected_part()), {}, 0});
  e.name = "E'";
  EXPECT_EQ(csv_row(e).substr(0, 17), "E',1.62673174213,");
}
