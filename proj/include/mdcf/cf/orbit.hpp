#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdcf/cf/step.hpp"

namespace mdcf {

template <class T>
struct OrbitRecord {
  AlgorithmId algorithm;
  std::vector<T> start;
  std::vector<CfStep<T>> steps;
  /// Index of the step at which the map became undefined, if it did.
  std::optional<std::size_t> halt_index;

  [[nodiscard]] std::size_t length() const { return steps.size(); }
  [[nodiscard]] bool halted() const { return halt_index.has_value(); }
};

/// Runs up to n steps from x, stopping early when the orbit halts. Every
/// step's cocycle identity is re-checked against 2^(-precision/2) (exactly
/// in rational arithmetic); a failure raises ConsistencyError.
template <class T>
OrbitRecord<T> expand(const AlgorithmId& alg, std::span<const T> x, std::size_t n) {
  validate_domain(alg, x);
  OrbitRecord<T> rec;
  rec.algorithm = alg;
  rec.start.assign(x.begin(), x.end());
  rec.steps.reserve(n);
  std::vector<T> cur = rec.start;
  for (std::size_t k = 0; k < n; ++k) {
    CfStep<T> s;
    if (!apply_step<T>(alg, cur, s)) {
      rec.halt_index = k;
      break;
    }
    const double tol = verification_tolerance(cur[0]);
    const double res = cocycle_residual<T>(cur, s);
    if (scalar_traits<T>::exact ? res != 0.0 : !(res < tol)) {
      throw ConsistencyError(to_string(alg) + ": cocycle identity violated at step " + std::to_string(k));
    }
    cur = s.next;
    rec.steps.push_back(std::move(s));
  }
  return rec;
}

}  // namespace mdcf
