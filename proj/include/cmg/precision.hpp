#pragma once

#include <string>

namespace cmg::softfloat {

enum class Scheme { regressive, progressive, fixed };

// <+k, b>: width k(L - l) + b.  <k+, b>: width k*l + b.  fixed: width b.
struct PrecisionSpec {
  Scheme scheme = Scheme::fixed;
  int k = 0;
  int b = 2;

  static PrecisionSpec regressive(int k, int b) { return {Scheme::regressive, k, b}; }
  static PrecisionSpec progressive(int k, int b) { return {Scheme::progressive, k, b}; }
  static PrecisionSpec fixed(int b) { return {Scheme::fixed, 0, b}; }

  friend bool operator==(const PrecisionSpec&, const PrecisionSpec&) = default;
};

// Throws PrecisionError when level is outside [0, finest] or the result is
// not a usable width.
int width_of(const PrecisionSpec& spec, int level, int finest);

std::string to_string(const PrecisionSpec& spec);

}  // namespace cmg::softfloat
