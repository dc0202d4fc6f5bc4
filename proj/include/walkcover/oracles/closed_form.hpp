#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "walkcover/errors.hpp"
#include "walkcover/rational.hpp"
#include "walkcover/tree.hpp"

namespace walkcover::oracles {

enum class Family { path, star };
enum class StartRole { endpoint, center };
enum class Quantity { cover_return, cover };

inline Rational harmonic(std::size_t k) {
  Rational h = 0;
  for (std::size_t i = 1; i <= k; ++i) h += Rational(1, i);
  return h;
}

// Path from an endpoint: 2(n-1)^2 and (n-1)^2. Star from its center:
// 2(n-1) H_{n-1} and 2(n-1) H_{n-1} - 1.
inline Rational closed_form_reference(Family family, std::size_t n, StartRole role,
                                      Quantity q = Quantity::cover_return) {
  if (n < 2) throw InputError("closed forms need n >= 2");
  const Rational m(n - 1);
  if (family == Family::path && role == StartRole::endpoint)
    return q == Quantity::cover_return ? Rational(2 * m * m) : Rational(m * m);
  if (family == Family::star && role == StartRole::center) {
    const Rational c = 2 * m * harmonic(n - 1);
    return q == Quantity::cover_return ? c : Rational(c - 1);
  }
  throw InputError("no closed form for this family and start role");
}

// Path v0 - v1 - ... - v{n-1}.
inline WeightedTree path_tree(std::size_t n) {
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("v" + std::to_string(i));
  for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, Rational(1)});
  return WeightedTree::build(std::move(labels), std::move(edges));
}

// Star with center v0 and leaves v1..v{n-1}.
inline WeightedTree star_tree(std::size_t n) {
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("v" + std::to_string(i));
  for (std::size_t i = 1; i < n; ++i) edges.push_back({0, i, Rational(1)});
  return WeightedTree::build(std::move(labels), std::move(edges));
}

}  // namespace walkcover::oracles
