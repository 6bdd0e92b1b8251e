#include "cmg/precision.hpp"

#include "cmg/softfloat.hpp"

namespace cmg::softfloat {

int width_of(const PrecisionSpec& spec, int level, int finest) {
  if (level < 0 || finest < 0 || level > finest) {
    throw PrecisionError("level " + std::to_string(level) + " outside [0, " + std::to_string(finest) + "]");
  }
  long w = 0;
  switch (spec.scheme) {
    case Scheme::regressive:
      w = static_cast<long>(spec.k) * (finest - level) + spec.b;
      break;
    case Scheme::progressive:
      w = static_cast<long>(spec.k) * level + spec.b;
      break;
    case Scheme::fixed:
      w = spec.b;
      break;
  }
  if (w < kMinWidth || w > kMaxWidth) throw PrecisionError("width " + std::to_string(w) + " out of range");
  return static_cast<int>(w);
}

std::string to_string(const PrecisionSpec& spec) {
  switch (spec.scheme) {
    case Scheme::regressive:
      return "<+" + std::to_string(spec.k) + "," + std::to_string(spec.b) + ">";
    case Scheme::progressive:
      return "<" + std::to_string(spec.k) + "+," + std::to_string(spec.b) + ">";
    case Scheme::fixed:
      break;
  }
  return "<" + std::to_string(spec.b) + ">";
}

}  // namespace cmg::softfloat
