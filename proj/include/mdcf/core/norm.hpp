#pragma once

#include <string>
#include <string_view>

#include "mdcf/core/error.hpp"

namespace mdcf {

enum class Norm { Sup, Euclid };

inline Norm parse_norm(std::string_view s) {
  if (s == "sup") return Norm::Sup;
  if (s == "euclid") return Norm::Euclid;
  throw DomainError("unknown norm: " + std::string(s));
}

inline std::string to_string(Norm n) { return n == Norm::Sup ? "sup" : "euclid"; }

}  // namespace mdcf
