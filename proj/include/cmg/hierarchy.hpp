#pragma once

#include <span>
#include <vector>

#include "cmg/operator.hpp"
#include "cmg/problem.hpp"

namespace cmg::fem {

// Load vector (f, phi_i) on level h = 2^-level at the given width. Gauss
// points per element start at p + 2 and double until two successive rules
// agree to 2^-(width/2) relative to the largest entry.
std::vector<SoftScalar> load_vector(const ProblemSpec& problem, int level, int width);

// Levels are numbered from the coarsest level with unknowns (solver level 0)
// to the finest. physical(l) is the h = 2^-physical(l) index.
class GridHierarchy {
 public:
  GridHierarchy(const ProblemSpec& problem, int finest_physical_level, int assembly_width = 256);

  const ProblemSpec& problem() const { return problem_; }
  int offset() const { return offset_; }
  int finest() const { return static_cast<int>(a_.size()) - 1; }
  int physical(int l) const { return l + offset_; }
  int assembly_width() const { return assembly_width_; }
  std::size_t dofs(int l) const { return a_.at(static_cast<std::size_t>(l)).rows(); }

  const ExactOperator& stiffness(int l) const { return a_.at(static_cast<std::size_t>(l)); }
  // Level l-1 to level l.
  const ExactOperator& prolongation(int l) const { return p_.at(static_cast<std::size_t>(l)); }
  // Level l to level l-1.
  const ExactOperator& restriction(int l) const { return r_.at(static_cast<std::size_t>(l)); }
  const std::vector<SoftScalar>& rhs(int l) const { return f_.at(static_cast<std::size_t>(l)); }

 private:
  ProblemSpec problem_;
  int offset_ = 0;
  int assembly_width_ = 256;
  std::vector<ExactOperator> a_;
  std::vector<ExactOperator> p_;  // p_[0] unused
  std::vector<ExactOperator> r_;
  std::vector<std::vector<SoftScalar>> f_;
};

// ||u_h - u||_{H^m} / ||u||_{H^m} for the manufactured solution, where u_h has
// the given coefficients on physical level `level`. All derivatives up to
// order m enter the norm. eval_width 0 picks 256 bits in 1D, 128 in 2D.
SoftScalar relative_hm_error(const ProblemSpec& problem, int level, std::span<const SoftScalar> coeffs,
                             int eval_width = 0);

}  // namespace cmg::fem
