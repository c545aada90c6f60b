#pragma once

#include <array>
#include <string>
#include <string_view>

#include "mdcf/core/error.hpp"

namespace mdcf {

enum class AlgorithmKind {
  Gauss,
  NearestIntegerGauss,
  Farey,
  JacobiPerron,
  NearestIntegerJacobiPerron,
  Brun,
  Selmer,
  Poincare,
  FullySubtractive,
};

/// A continued-fraction map together with the dimension d of the vector it
/// expands. Partial-quotient matrices have size d+1.
struct AlgorithmId {
  AlgorithmKind kind = AlgorithmKind::Gauss;
  int dim = 1;

  friend bool operator==(const AlgorithmId&, const AlgorithmId&) = default;
};

namespace detail {
struct AlgorithmName {
  AlgorithmKind kind;
  std::string_view name;
  bool one_dimensional;
};
inline constexpr std::array<AlgorithmName, 9> kAlgorithmNames{{
    {AlgorithmKind::Gauss, "gauss", true},
    {AlgorithmKind::NearestIntegerGauss, "nigauss", true},
    {AlgorithmKind::Farey, "farey", true},
    {AlgorithmKind::JacobiPerron, "jp", false},
    {AlgorithmKind::NearestIntegerJacobiPerron, "nijp", false},
    {AlgorithmKind::Brun, "brun", false},
    {AlgorithmKind::Selmer, "selmer", false},
    {AlgorithmKind::Poincare, "poincare", false},
    {AlgorithmKind::FullySubtractive, "fs", false},
}};
}  // namespace detail

inline bool is_one_dimensional(AlgorithmKind k) {
  for (const auto& e : detail::kAlgorithmNames)
    if (e.kind == k) return e.one_dimensional;
  return false;
}

inline bool is_sorted_subtractive(AlgorithmKind k) {
  return k == AlgorithmKind::Brun || k == AlgorithmKind::Selmer || k == AlgorithmKind::Poincare ||
         k == AlgorithmKind::FullySubtractive;
}

/// Maps whose partial-quotient matrices are entrywise nonnegative.
inline bool is_nonnegative(AlgorithmKind k) {
  return k != AlgorithmKind::NearestIntegerGauss && k != AlgorithmKind::NearestIntegerJacobiPerron;
}

inline std::string to_string(AlgorithmKind k) {
  for (const auto& e : detail::kAlgorithmNames)
    if (e.kind == k) return std::string(e.name);
  return "?";
}

inline std::string to_string(const AlgorithmId& id) { return to_string(id.kind); }

/// Looks up a map by name; throws DomainError for unknown names.
inline AlgorithmKind parse_algorithm_kind(std::string_view name) {
  for (const auto& e : detail::kAlgorithmNames)
    if (e.name == name) return e.kind;
  throw DomainError("unknown algorithm: " + std::string(name));
}

/// Builds an id from a name ("gauss", "nigauss", "farey", "jp", "nijp",
/// "brun", "selmer", "poincare", "fs") and a dimension. One-dimensional maps
/// accept only d = 1, the multidimensional ones d >= 2.
inline AlgorithmId make_algorithm(std::string_view name, int dim) {
  AlgorithmKind kind = parse_algorithm_kind(name);
  if (is_one_dimensional(kind) && dim != 1) throw DomainError(std::string(name) + " is one-dimensional");
  if (!is_one_dimensional(kind) && dim < 2) throw DomainError(std::string(name) + ": dimension too small");
  return {kind, dim};
}

}  // namespace mdcf
