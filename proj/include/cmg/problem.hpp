#pragma once

#include <cstddef>
#include <string>

namespace cmg::fem {

enum class Pde { poisson, biharmonic };

// Manufactured solutions:
//   Poisson 1D:   u = x(1-x)cos(pi x/2)
//   Poisson 2D:   u = g(x)g(y) with g the 1D solution
//   Biharmonic:   u = 1 - cos(2 pi x), clamped ends (u = u' = 0)
struct ProblemSpec {
  Pde pde = Pde::poisson;
  int dim = 1;
  int degree = 1;

  // Half the PDE order: 1 for Poisson, 2 for the biharmonic problem.
  int order() const { return pde == Pde::poisson ? 1 : 2; }
  // Unknowns per direction on level l (h = 2^-l) after removing the
  // order() boundary functions at each end of the open knot vector.
  long dofs_1d(int level) const { return (1L << level) + degree - 2 * order(); }
  std::size_t dofs(int level) const;
  // Smallest level with at least one unknown.
  int coarsest_level() const;
  std::string name() const;

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

// Throws std::invalid_argument for unsupported combinations.
void validate(const ProblemSpec& problem);

Pde parse_pde(const std::string& text);
std::string to_string(Pde pde);

}  // namespace cmg::fem
