#include <string>

#include "gyw/estimator.hpp"
#include "gyw/weights.hpp"

namespace gyw {

std::string_view to_string(Normalization normalization) {
  switch (normalization) {
    case Normalization::none: return "none";
    case Normalization::row: return "row";
    case Normalization::column: return "column";
  }
  return "unknown";
}

Normalization parse_normalization(std::string_view text) {
  if (text == "none") return Normalization::none;
  if (text == "row") return Normalization::row;
  if (text == "column") return Normalization::column;
  throw InvalidArgument("unknown normalization '" + std::string(text) + "'");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::full: return "gyw";
    case Method::restricted: return "restricted";
    case Method::restricted_ridge: return "restricted_ridge";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "gyw" || text == "full") return Method::full;
  if (text == "restricted") return Method::restricted;
  if (text == "restricted_ridge" || text == "ridge") return Method::restricted_ridge;
  throw InvalidArgument("unknown estimator '" + std::string(text) + "'");
}

}  // namespace gyw
