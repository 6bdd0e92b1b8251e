#include <algorithm>
#include <array>
#include <stdexcept>

#include "cmg/solver.hpp"

namespace cmg::solver {

namespace {

struct Row {
  fem::Pde pde;
  int dim;
  int degree;
  Constants c;
};

// N, b1, b2, b3, b4
constexpr std::array<Row, 15> kTable{{
    {fem::Pde::poisson, 1, 1, {4, 5, 3, 2, 2}},
    {fem::Pde::poisson, 1, 2, {3, 5, 4, 4, 2}},
    {fem::Pde::poisson, 1, 3, {4, 7, 4, 6, 2}},
    {fem::Pde::poisson, 1, 4, {5, 8, 4, 7, 2}},
    {fem::Pde::poisson, 1, 5, {9, 9, 5, 11, 4}},
    {fem::Pde::poisson, 2, 1, {3, 4, 4, 2, 2}},
    {fem::Pde::poisson, 2, 2, {2, 5, 4, 3, 2}},
    {fem::Pde::poisson, 2, 3, {4, 5, 4, 4, 2}},
    {fem::Pde::poisson, 2, 4, {7, 7, 5, 7, 2}},
    {fem::Pde::poisson, 2, 5, {9, 9, 6, 15, 2}},
    {fem::Pde::biharmonic, 1, 3, {6, 4, 4, 2, 3}},
    {fem::Pde::biharmonic, 1, 4, {4, 6, 4, 2, 2}},
    {fem::Pde::biharmonic, 1, 5, {5, 8, 5, 2, 2}},
    {fem::Pde::biharmonic, 1, 6, {5, 11, 5, 3, 2}},
    {fem::Pde::biharmonic, 1, 7, {11, 12, 6, 3, 2}},
}};

const Row* find_row(const ProblemSpec& problem) {
  for (const auto& r : kTable) {
    if (r.pde == problem.pde && r.dim == problem.dim && r.degree == problem.degree) return &r;
  }
  return nullptr;
}

}  // namespace

bool has_table3(const ProblemSpec& problem) { return find_row(problem) != nullptr; }

Constants table3(const ProblemSpec& problem) {
  const Row* r = find_row(problem);
  if (r == nullptr) throw std::invalid_argument("no tuned constants for " + problem.name());
  return r->c;
}

int working_width(int mat_width, int vec_coarsest_width) { return std::max(mat_width, vec_coarsest_width); }

PrecisionPolicy::PrecisionPolicy(const ProblemSpec& problem, Constants constants, int offset)
    : c_(constants), p_(problem.degree), m_(problem.order()), offset_(offset) {
  for (int b : {c_.b1, c_.b2, c_.b3, c_.b4}) {
    if (b < softfloat::kMinWidth) throw softfloat::PrecisionError("base widths must be at least 2");
  }
  if (c_.N < 1) throw std::invalid_argument("N must be positive");
  if (offset_ < 0) throw std::invalid_argument("negative level offset");
}

int PrecisionPolicy::u_width(int l, int L) const { return softfloat::width_of(u_spec(), l, L); }

int PrecisionPolicy::ry_width(int l, int L) const { return softfloat::width_of(ry_spec(), l, L); }

int PrecisionPolicy::resid_mat_width(int l) const {
  if (l < 0) throw softfloat::PrecisionError("negative level");
  int w = (p_ + m_ + 1) * (l + offset_) + c_.b3;
  softfloat::check_width(w);
  return w;
}

int PrecisionPolicy::vcycle_mat_width(int l) const {
  if (l < 0) throw softfloat::PrecisionError("negative level");
  int w = m_ * (l + offset_) + c_.b4;
  softfloat::check_width(w);
  return w;
}

int PrecisionPolicy::ut_width(int L) const {
  if (L < 0) throw softfloat::PrecisionError("negative level");
  int w = (p_ + 1) * (L + offset_) + c_.b1;
  softfloat::check_width(w);
  return w;
}

int required_assembly_width(const ProblemSpec& problem, const Constants& c, int finest_physical) {
  const int p = problem.degree;
  const int m = problem.order();
  int widest = std::max((p + m + 1) * finest_physical + c.b3, m * finest_physical + c.b4);
  return std::max(256, widest + 64);
}

}  // namespace cmg::solver
