#pragma once

#include "sponge/graph_directed.hpp"

#include <vector>

// Named carpets used throughout the tests and the CLI.
namespace sponge::fixtures {

inline std::vector<Digit> full_rows(int n, std::initializer_list<int> rows) {
  std::vector<Digit> d;
  for (int y : rows)
    for (int x = 0; x < n; ++x) d.push_back({x, y});
  return d;
}

/// E on the 8 x 5 grid: rows 0 and 4 full, the left spine (0,1..3), and (7,2).
inline SpongeSpec carpet_e() {
  auto d = full_rows(8, {0, 4});
  for (int y = 1; y <= 3; ++y) d.push_back({0, y});
  d.push_back({7, 2});
  return SpongeSpec::sierpinski({8, 5}, d);
}

/// E' on the 8 x 5 grid: rows 0 and 4 full, the right spine (7,1..3), and the island (3,2).
inline SpongeSpec carpet_e_prime() {
  auto d = full_rows(8, {0, 4});
  for (int y = 1; y <= 3; ++y) d.push_back({7, y});
  d.push_back({3, 2});
  return SpongeSpec::sierpinski({8, 5}, d);
}

/// Connected part of E': E' without its island digit.
inline SpongeSpec carpet_e_prime_connected_part() {
  auto d = full_rows(8, {0, 4});
  for (int y = 1; y <= 3; ++y) d.push_back({7, y});
  return SpongeSpec::sierpinski({8, 5}, d);
}

/// Two diagonal cells of a 4 x 4 grid; (1,1) is a first-level island.
inline SpongeSpec island_4x4() { return SpongeSpec::sierpinski({4, 4}, {{1, 1}, {3, 3}}); }

inline SpongeSpec full_grid(int n, int m) {
  std::vector<Digit> d;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < m; ++y) d.push_back({x, y});
  return SpongeSpec::sierpinski({n, m}, d);
}

inline const std::vector<Digit>& e_j_xy() {
  static const std::vector<Digit> j{{0, 1}, {0, 2}, {0, 3}};
  return j;
}

inline const std::vector<Digit>& e_j_yy() {
  static const std::vector<Digit> j{{7, 0}, {0, 1}, {0, 2}, {0, 3}, {7, 4}};
  return j;
}

/// Roles as written for E: J_XX = D \ J_XY and J_YX = D \ J_YY.
inline ComponentSystem e_roles_literal() { return ComponentSystem::from_roles(carpet_e(), e_j_xy(), e_j_yy()); }

/// Roles matching the displayed matrix [[17,14],[3,5]]: (7,2) carries no edge out of Y.
inline ComponentSystem e_roles() {
  const auto e = carpet_e();
  std::vector<Digit> yx;
  for (const auto& d : e.digits())
    if (std::find(e_j_yy().begin(), e_j_yy().end(), d) == e_j_yy().end() && d != Digit{7, 2}) yx.push_back(d);
  return ComponentSystem::from_roles(e, e_j_xy(), e_j_yy(), std::nullopt, yx);
}

/// A_0 .. A_4 and A as displayed for E.
inline SoficSystem e_printed_sofic() {
  IntMatrix a0{{8, 7}, {0, 1}}, a1{{0, 0}, {1, 1}}, a2{{1, 0}, {1, 1}};
  return SoficSystem::make({a0, a1, a2, a1, a0}, IntMatrix{{17, 14}, {3, 5}});
}

}  // namespace sponge::fixtures
