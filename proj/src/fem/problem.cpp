#include "cmg/problem.hpp"

#include <stdexcept>

namespace cmg::fem {

std::size_t ProblemSpec::dofs(int level) const {
  long n = dofs_1d(level);
  if (n <= 0) return 0;
  std::size_t r = 1;
  for (int i = 0; i < dim; ++i) r *= static_cast<std::size_t>(n);
  return r;
}

int ProblemSpec::coarsest_level() const {
  int l = 0;
  while (dofs_1d(l) < 1) ++l;
  return l;
}

std::string ProblemSpec::name() const {
  return to_string(pde) + "-" + std::to_string(dim) + "d-p" + std::to_string(degree);
}

void validate(const ProblemSpec& problem) {
  const std::string what = problem.name();
  if (problem.pde == Pde::poisson) {
    if (problem.dim != 1 && problem.dim != 2) throw std::invalid_argument(what + ": Poisson needs d in {1,2}");
    if (problem.degree < 1 || problem.degree > 5) throw std::invalid_argument(what + ": Poisson needs p in 1..5");
  } else {
    if (problem.dim != 1) throw std::invalid_argument(what + ": biharmonic is one-dimensional only");
    if (problem.degree < 3 || problem.degree > 7) throw std::invalid_argument(what + ": biharmonic needs p in 3..7");
  }
}

Pde parse_pde(const std::string& text) {
  if (text == "poisson") return Pde::poisson;
  if (text == "biharmonic") return Pde::biharmonic;
  throw std::invalid_argument("unknown pde '" + text + "'");
}

std::string to_string(Pde pde) { return pde == Pde::poisson ? "poisson" : "biharmonic"; }

}  // namespace cmg::fem
