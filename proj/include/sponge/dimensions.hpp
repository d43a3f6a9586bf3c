#pragma once

#include "sponge/core.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <locale>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace sponge {

// ---------------------------------------------------------------------------
// Bedford-McMullen carpets
// ---------------------------------------------------------------------------

/// Carpet on an n x m grid, n horizontal (the larger) and m vertical branches.
struct BMCarpet {
  int n = 0;
  int m = 0;
  std::vector<Digit> digits;  // (x, y)

  static BMCarpet from_spec(const SpongeSpec& spec) {
    if (spec.dimension() != 2 || !spec.is_sierpinski()) throw SpecError("expected a two-dimensional Sierpinski carpet");
    auto nm = spec.branch_counts();
    BMCarpet c{nm[0], nm[1], spec.digits()};
    if (c.n < c.m) {
      // stored with n >= m
      std::swap(c.n, c.m);
      for (auto& d : c.digits) std::swap(d[0], d[1]);
      std::sort(c.digits.begin(), c.digits.end());
    }
    return c;
  }

  std::size_t size() const { return digits.size(); }

  /// t_j for rows j = 0..m-1.
  std::vector<long long> row_counts() const {
    std::vector<long long> t(static_cast<std::size_t>(m), 0);
    for (const auto& d : digits) ++t.at(static_cast<std::size_t>(d[1]));
    return t;
  }

  long long occupied_rows() const {
    auto t = row_counts();
    return std::count_if(t.begin(), t.end(), [](long long x) { return x > 0; });
  }
};

inline void require_nonempty(const BMCarpet& c) {
  if (c.digits.empty()) throw SpecError("empty digit set");
  if (c.m < 2 || c.n < c.m) throw SpecError("carpet needs n >= m >= 2");
}

/// McMullen: log_m sum_j t_j^{log m / log n}.
inline long double bm_hausdorff(const BMCarpet& c) {
  require_nonempty(c);
  const long double e = std::log(static_cast<long double>(c.m)) / std::log(static_cast<long double>(c.n));
  long double sum = 0;
  for (auto t : c.row_counts())
    if (t > 0) sum += std::pow(static_cast<long double>(t), e);
  return std::log(sum) / std::log(static_cast<long double>(c.m));
}

/// log_m s + log_n (N / s).
inline long double bm_box(const BMCarpet& c) {
  require_nonempty(c);
  const auto s = static_cast<long double>(c.occupied_rows());
  const auto N = static_cast<long double>(c.size());
  return std::log(s) / std::log(static_cast<long double>(c.m)) + std::log(N / s) / std::log(static_cast<long double>(c.n));
}

// ---------------------------------------------------------------------------
// Spectral radius
// ---------------------------------------------------------------------------

using IntMatrix = std::vector<std::vector<std::int64_t>>;

inline void require_square_nonnegative(const IntMatrix& a) {
  if (a.empty()) throw SpecError("empty matrix");
  for (const auto& row : a) {
    if (row.size() != a.size()) throw SpecError("matrix is not square");
    for (auto x : row)
      if (x < 0) throw SpecError("matrix has a negative entry");
  }
}

struct SpectralRadius {
  long double value = 0;
  long double lower = 0;  // Collatz-Wielandt bracket
  long double upper = 0;
  std::optional<long double> closed_form;  // 2x2 only
  std::int64_t trace = 0;
  std::int64_t determinant = 0;  // 2x2 only

  long double error() const { return std::max(upper - value, value - lower); }
};

inline SpectralRadius spectral_radius(const IntMatrix& a) {
  require_square_nonnegative(a);
  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const auto n = static_cast<Eigen::Index>(a.size());
  Mat m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = static_cast<long double>(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);

  SpectralRadius r;
  Eigen::EigenSolver<Mat> es(m);
  Eigen::Index best = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(es.eigenvalues()[i]) > std::abs(es.eigenvalues()[best])) best = i;
  }
  r.value = std::abs(es.eigenvalues()[best]);

  // Collatz-Wielandt: for x > 0, min (Ax)_i/x_i <= rho <= max (Ax)_i/x_i.
  Eigen::Matrix<long double, Eigen::Dynamic, 1> x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = std::abs(es.eigenvectors()(i, best).real());
  x /= std::max(x.maxCoeff(), std::numeric_limits<long double>::min());
  x.array() += 1e-15L;
  Eigen::Matrix<long double, Eigen::Dynamic, 1> ax = m * x;
  r.lower = std::numeric_limits<long double>::infinity();
  r.upper = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    r.lower = std::min(r.lower, ax(i) / x(i));
    r.upper = std::max(r.upper, ax(i) / x(i));
  }
  r.value = std::clamp(r.value, r.lower, r.upper);

  for (std::size_t i = 0; i < a.size(); ++i) r.trace += a[i][i];
  if (a.size() == 2) {
    r.determinant = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    const auto tr = static_cast<long double>(r.trace);
    r.closed_form = (tr + std::sqrt(tr * tr - 4 * static_cast<long double>(r.determinant))) / 2;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Sofic systems
// ---------------------------------------------------------------------------

struct SoficSystem {
  std::vector<IntMatrix> rows;  // A_0 .. A_{m-1}
  IntMatrix adjacency;          // A = sum_j A_j

  /// Builds the system; the adjacency matrix defaults to the sum and must match when given.
  static SoficSystem make(std::vector<IntMatrix> rows, std::optional<IntMatrix> adjacency = std::nullopt) {
    if (rows.empty()) throw SpecError("sofic system needs at least one row matrix");
    const std::size_t v = rows.front().size();
    IntMatrix sum(v, std::vector<std::int64_t>(v, 0));
    for (std::size_t j = 0; j < rows.size(); ++j) {
      require_square_nonnegative(rows[j]);
      if (rows[j].size() != v) throw SpecError("row matrix A_" + std::to_string(j) + " has the wrong size");
      for (std::size_t a = 0; a < v; ++a)
        for (std::size_t b = 0; b < v; ++b) sum[a][b] = checked_add(sum[a][b], rows[j][a][b]);
    }
    if (adjacency && *adjacency != sum) throw SpecError("sum of the row matrices differs from the adjacency matrix");
    return SoficSystem{std::move(rows), std::move(sum)};
  }

  std::size_t vertices() const { return adjacency.size(); }
};

/// log lambda / log n + (1/log m - 1/log n) log s.
inline long double sofic_box(long double lambda, int n, int m, long long s) {
  if (s <= 0) throw SpecError("s must be positive");
  const long double ln = std::log(static_cast<long double>(n)), lm = std::log(static_cast<long double>(m));
  return std::log(lambda) / ln + (1 / lm - 1 / ln) * std::log(static_cast<long double>(s));
}

inline long double sofic_box(const SoficSystem& sys, int n, int m, long long s) {
  return sofic_box(spectral_radius(sys.adjacency).value, n, m, s);
}

struct SoficEstimate {
  std::vector<long double> raw;           // a_k, k = 1..K
  std::vector<std::size_t> table_sizes;   // distinct products at each k
  std::vector<long double> richardson;    // R_k = k a_k - (k-1) a_{k-1}, k = 2..K
  long double value = 0;                  // extrapolated limit
  long double error = 0;
};

struct SoficOptions {
  int max_k = 15;
  std::size_t max_entries = 1'000'000;
};

namespace detail {

using Wide = unsigned __int128;

struct WideMatrix {
  std::vector<Wide> e;
  friend bool operator==(const WideMatrix&, const WideMatrix&) = default;
};

struct WideMatrixHash {
  std::size_t operator()(const WideMatrix& m) const {
    std::uint64_t h = 1469598103934665603ull;
    for (Wide x : m.e) {
      for (int half = 0; half < 2; ++half) {
        h ^= static_cast<std::uint64_t>(x >> (64 * half));
        h *= 1099511628211ull;
      }
    }
    return static_cast<std::size_t>(h);
  }
};

inline Wide wide_mul(Wide a, Wide b) {
  Wide r;
  if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("matrix product overflows 128 bits");
  return r;
}

inline Wide wide_add(Wide a, Wide b) {
  Wide r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("matrix product overflows 128 bits");
  return r;
}

}  // namespace detail

/// (1/k) log_m sum over words of ||A_{i_k} ... A_{i_1}||^{1/sigma}, entrywise-sum norm, by
/// hash-consing distinct products with multiplicities. Extrapolates with Richardson on the 1/k
/// term and Aitken on the last three Richardson values.
inline SoficEstimate sofic_hausdorff(const SoficSystem& sys, int n, int m, const SoficOptions& opt = {}) {
  if (opt.max_k < 1) throw SpecError("max_k must be positive");
  if (static_cast<int>(sys.rows.size()) != m) throw SpecError("expected one row matrix per row of the grid");
  const std::size_t v = sys.vertices();
  const long double inv_sigma = std::log(static_cast<long double>(m)) / std::log(static_cast<long double>(n));
  const long double log_m = std::log(static_cast<long double>(m));

  // identical row matrices are merged with a weight
  std::vector<std::pair<detail::WideMatrix, std::uint64_t>> gens;
  for (const auto& a : sys.rows) {
    detail::WideMatrix w;
    for (const auto& row : a)
      for (auto x : row) w.e.push_back(static_cast<detail::Wide>(x));
    auto it = std::find_if(gens.begin(), gens.end(), [&](const auto& g) { return g.first == w; });
    if (it == gens.end()) gens.emplace_back(std::move(w), 1);
    else ++it->second;
  }

  SoficEstimate est;
  std::unordered_map<detail::WideMatrix, long double, detail::WideMatrixHash> level;
  detail::WideMatrix id;
  id.e.assign(v * v, 0);
  for (std::size_t i = 0; i < v; ++i) id.e[i * v + i] = 1;
  level.emplace(std::move(id), 1.0L);

  for (int k = 1; k <= opt.max_k; ++k) {
    std::unordered_map<detail::WideMatrix, long double, detail::WideMatrixHash> next;
    next.reserve(level.size() * gens.size());
    for (const auto& [p, mult] : level) {
      for (const auto& [a, weight] : gens) {
        detail::WideMatrix q;
        q.e.assign(v * v, 0);
        // newest factor on the left: A_j * P
        for (std::size_t r = 0; r < v; ++r)
          for (std::size_t t = 0; t < v; ++t) {
            detail::Wide acc = 0;
            for (std::size_t s = 0; s < v; ++s) acc = detail::wide_add(acc, detail::wide_mul(a.e[r * v + s], p.e[s * v + t]));
            q.e[r * v + t] = acc;
          }
        next[std::move(q)] += mult * static_cast<long double>(weight);
      }
      if (next.size() > opt.max_entries) throw BudgetError("product table exceeds " + std::to_string(opt.max_entries) + " entries at k=" + std::to_string(k));
    }
    level.swap(next);
    long double total = 0;
    for (const auto& [p, mult] : level) {
      long double norm = 0;
      for (auto x : p.e) norm += static_cast<long double>(x);
      if (norm > 0) total += mult * std::pow(norm, inv_sigma);
    }
    est.table_sizes.push_back(level.size());
    est.raw.push_back(total > 0 ? std::log(total) / (log_m * k) : 0.0L);
  }

  const auto& a = est.raw;
  for (std::size_t k = 2; k <= a.size(); ++k) est.richardson.push_back(k * a[k - 1] - (k - 1) * a[k - 2]);
  const auto& r = est.richardson;
  if (r.size() >= 3) {
    const long double r0 = r[r.size() - 3], r1 = r[r.size() - 2], r2 = r.back();
    const long double d1 = r1 - r0, d2 = r2 - r1;
    const long double denom = d2 - d1;
    est.value = std::abs(denom) > 1e-18L ? r2 - d2 * d2 / denom : r2;
    est.error = std::abs(d2) + std::abs(est.value - r2);
  } else if (!r.empty()) {
    est.value = r.back();
    est.error = r.size() >= 2 ? std::abs(r.back() - r[r.size() - 2]) : std::abs(r.back() - a.front());
  } else {
    est.value = a.back();
    est.error = std::numeric_limits<long double>::infinity();
  }
  return est;
}

// ---------------------------------------------------------------------------
// Connectedness indices
// ---------------------------------------------------------------------------

struct Quantity {
  long double value = std::numeric_limits<long double>::quiet_NaN();
  long double error = 0;
  std::string method;  // closed-form | spectral | limit-extrapolated | empty | n/a
};

struct DimensionReport {
  std::string name;
  Quantity dim_h, dim_b, ind_h, ind_b;
  bool connected_part_empty = false;
  bool connected = false;  // X_c = X
};

/// How the connected part of a carpet is known.
struct ConnectedPart {
  enum class Kind { Whole, Carpet, Sofic, Empty };
  Kind kind = Kind::Whole;
  std::optional<BMCarpet> carpet;  // Kind::Carpet
  std::optional<SoficSystem> sofic;  // Kind::Sofic
  long long sofic_rows = 0;  // s of the sofic box formula
};

inline DimensionReport connectedness_indices(const BMCarpet& whole, const ConnectedPart& part,
                                             const SoficOptions& opt = {}) {
  DimensionReport r;
  r.dim_h = {bm_hausdorff(whole), 0, "closed-form"};
  r.dim_b = {bm_box(whole), 0, "closed-form"};
  switch (part.kind) {
    case ConnectedPart::Kind::Whole:
      r.connected = true;
      r.ind_h = r.dim_h;
      r.ind_b = r.dim_b;
      break;
    case ConnectedPart::Kind::Empty:
      r.connected_part_empty = true;
      r.ind_h.method = r.ind_b.method = "empty";
      break;
    case ConnectedPart::Kind::Carpet:
      if (!part.carpet) throw SpecError("carpet connected part without a digit set");
      r.ind_h = {bm_hausdorff(*part.carpet), 0, "closed-form"};
      r.ind_b = {bm_box(*part.carpet), 0, "closed-form"};
      break;
    case ConnectedPart::Kind::Sofic: {
      if (!part.sofic) throw SpecError("sofic connected part without matrices");
      auto est = sofic_hausdorff(*part.sofic, whole.n, whole.m, opt);
      r.ind_h = {est.value, est.error, "limit-extrapolated"};
      auto rho = spectral_radius(part.sofic->adjacency);
      const long long s = part.sofic_rows > 0 ? part.sofic_rows : whole.occupied_rows();
      // d(box)/d(lambda) = 1/(lambda log n)
      r.ind_b = {sofic_box(rho.value, whole.n, whole.m, s), rho.error() / (rho.value * std::log(static_cast<long double>(whole.n))),
                 "spectral"};
      break;
    }
  }
  return r;
}

struct DropCheck {
  bool drop = false;          // both strict inequalities hold
  long double margin_h = 0;   // dim_H - ind_H
  long double margin_b = 0;
  bool resolved = false;      // both margins exceed the combined error estimates
  std::string note;
};

inline DropCheck dimension_drop_check(const DimensionReport& r) {
  DropCheck c;
  if (r.connected) {
    c.note = "connected part is the whole set: no trivial points";
    return c;
  }
  if (r.connected_part_empty) {
    c.note = "connected part empty";
    return c;
  }
  c.margin_h = r.dim_h.value - r.ind_h.value;
  c.margin_b = r.dim_b.value - r.ind_b.value;
  c.drop = c.margin_h > 0 && c.margin_b > 0;
  c.resolved = c.margin_h > r.dim_h.error + r.ind_h.error && c.margin_b > r.dim_b.error + r.ind_b.error;
  if (!c.resolved) c.note = "margin below the combined error estimate";
  return c;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline std::string format_number(long double x) {
  if (std::isnan(x)) return "n/a";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(12);
  os << static_cast<double>(x);
  return os.str();
}

inline std::string csv_header() { return "name,dimH,dimB,indH,indB,marginH,marginB,method"; }

inline std::string csv_row(const DimensionReport& r) {
  auto q = [](const Quantity& x) { return x.method == "n/a" ? std::string("n/a: open problem") : format_number(x.value); };
  std::string margin_h = "n/a", margin_b = "n/a";
  if (!std::isnan(r.ind_h.value) && !std::isnan(r.dim_h.value)) margin_h = format_number(r.dim_h.value - r.ind_h.value);
  if (!std::isnan(r.ind_b.value) && !std::isnan(r.dim_b.value)) margin_b = format_number(r.dim_b.value - r.ind_b.value);
  std::string method = r.dim_h.method + "/" + r.dim_b.method + "/" + r.ind_h.method + "/" + r.ind_b.method;
  return r.name + "," + q(r.dim_h) + "," + q(r.dim_b) + "," + q(r.ind_h) + "," + q(r.ind_b) + "," + margin_h + "," +
         margin_b + "," + method;
}

}  // namespace sponge
