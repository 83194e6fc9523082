#include "dyson/types.hpp"

namespace dyson {

std::string to_string(const ProcessKind& kind) {
  const char* tag = kind.family == Family::A ? "A" : kind.family == Family::C ? "C" : "D";
  return std::string(tag) + "(" + std::to_string(kind.size) + ")";
}

OrderedConfig OrderedConfig::make(ProcessKind kind, Vector<double> x) {
  if (x.size() != kind.size)
    throw ShapeError("OrderedConfig: expected " + std::to_string(kind.size) + " coordinates");
  if (!in_chamber(kind, x))
    throw DomainError("OrderedConfig: point outside the " + to_string(kind) + " chamber");
  return OrderedConfig{kind, std::move(x)};
}

}  // namespace dyson
