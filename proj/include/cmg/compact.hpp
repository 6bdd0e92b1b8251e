#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "cmg/bfp.hpp"
#include "cmg/operator.hpp"
#include "cmg/precision.hpp"

namespace cmg::compact {

using bfp::BfpVector;
using fem::StencilOperator;
using softfloat::PrecisionSpec;
using softfloat::SoftScalar;

// Sections v_0..v_L of a multilevel vector; the represented fine-level vector
// is v_L + P_L(v_{L-1} + ... + P_1 v_0). Section l is stored in block floating
// point at width_of(spec, l, L).
class CompactVector {
 public:
  CompactVector() = default;
  CompactVector(PrecisionSpec spec, std::vector<BfpVector> sections);
  static CompactVector zeros(PrecisionSpec spec, std::span<const std::size_t> lengths);

  const PrecisionSpec& spec() const { return spec_; }
  int finest() const { return static_cast<int>(sections_.size()) - 1; }
  const BfpVector& section(int l) const { return sections_.at(static_cast<std::size_t>(l)); }
  const std::vector<BfpVector>& sections() const { return sections_; }
  int width(int l) const { return softfloat::width_of(spec_, l, finest()); }

  std::uint64_t mantissa_bits() const;
  std::uint64_t total_bits() const;

  friend bool operator==(const CompactVector&, const CompactVector&) = default;

 private:
  PrecisionSpec spec_;
  std::vector<BfpVector> sections_;
};

// Evaluates the fine-level vector coarse to fine with every rounding at
// `width`: v <- rnd(section_l + rnd(P_l v)). prolongations[l] maps level l-1
// to level l; entry 0 is ignored.
std::vector<SoftScalar> decode(const CompactVector& v, std::span<const StencilOperator> prolongations, int width);

// Section-wise y + alpha * x, formed exactly and rounded once into block
// floating point storage at each section width of y. x and y must share level count and section lengths.
CompactVector axpy(const SoftScalar& alpha, const CompactVector& x, const CompactVector& y);

// Appends a zero finest section of new_length entries; existing sections are
// widened exactly to their new widths.
CompactVector push_level(const CompactVector& v, std::size_t new_length);

// Upper bound on the mantissa storage of a vector with spec <+k, b> whose
// level sizes shrink by 2^d per level: (2^d/(2^d-1) b + 2^d/(2^d-1)^2 k) n_L.
double storage_bound(int dim, int k, int b, double finest_length);

// Binary dump: "CMV1", scheme, k, b, section count, then every section in
// the bfp binary layout.
void write_binary(std::ostream& out, const CompactVector& v);
CompactVector read_binary(std::istream& in);

}  // namespace cmg::compact
