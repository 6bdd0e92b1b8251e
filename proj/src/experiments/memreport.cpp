#include <cmath>
#include <cstdio>
#include <ostream>

#include "cmg/experiments.hpp"

namespace cmg::experiments {

const std::vector<std::string> kMemoryColumns = {
    "problem", "pde", "d", "p", "level", "dofs", "compact_vector_bits", "progressive_vector_bits", "saving_vector",
    "compact_solver_bits", "progressive_solver_bits", "saving_solver", "storage_bound_bits"};

namespace {

double dofs_at(const ProblemSpec& problem, int level) {
  const double n1 = std::ldexp(1.0, level) + problem.degree - 2 * problem.order();
  return n1 <= 0 ? 0 : std::pow(n1, problem.dim);
}

}  // namespace

MemoryRow memory_model(const ProblemSpec& problem, const Constants& c, int L) {
  const int p = problem.degree, m = problem.order(), d = problem.dim;
  const int ku = p + 1;
  MemoryRow row;
  row.problem = problem;
  row.level = L;
  row.dofs = dofs_at(problem, L);
  const double a_L = ku * L + c.b1;  // width of the u and t temporaries
  double regressive_u = 0, regressive_ry = 0, temporaries = 0, progressive_y = 0;
  for (int l = problem.coarsest_level(); l <= L; ++l) {
    const double n = dofs_at(problem, l);
    regressive_u += n * (ku * (L - l) + c.b1);
    regressive_ry += n * (m * (L - l) + c.b2);
    progressive_y += n * (m * l + c.b2);
    const double delta_a = std::max(1.0, fem::delta_estimate(2 * p + 1, n, d));
    const double delta_r = std::max(1.0, fem::delta_estimate(p + 2, n, d));
    temporaries += a_L * delta_a + a_L * delta_r + (m * l + c.b4) * delta_a;  // u, t and z
  }
  row.compact_vector_bits = regressive_u;
  row.progressive_vector_bits = row.dofs * a_L;
  row.compact_solver_bits = regressive_u + 2 * regressive_ry + temporaries;
  const double n_coarse = dofs_at(problem, L - 1);
  row.progressive_solver_bits =
      row.dofs * a_L + row.dofs * (m * L + c.b2) + n_coarse * (m * (L - 1) + c.b2) + progressive_y;
  row.storage_bound_bits = compact::storage_bound(d, ku, c.b1, row.dofs);
  return row;
}

std::vector<MemoryRow> run_memreport(double max_dofs) {
  std::vector<MemoryRow> rows;
  for (auto pde : {fem::Pde::poisson, fem::Pde::biharmonic}) {
    for (int d = 1; d <= 2; ++d) {
      for (int p = 1; p <= 7; ++p) {
        ProblemSpec problem{pde, d, p};
        if (!solver::has_table3(problem)) continue;
        const Constants c = solver::table3(problem);
        for (int L = problem.coarsest_level() + 1; dofs_at(problem, L) <= max_dofs; ++L) {
          rows.push_back(memory_model(problem, c, L));
        }
      }
    }
  }
  return rows;
}

void write_memory_csv(std::ostream& out, const std::vector<MemoryRow>& rows) {
  for (std::size_t i = 0; i < kMemoryColumns.size(); ++i) out << (i ? "," : "") << kMemoryColumns[i];
  out << '\n';
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%s,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.problem.name().c_str(), fem::to_string(r.problem.pde).c_str(), r.problem.dim, r.problem.degree,
                  r.level, r.dofs, r.compact_vector_bits, r.progressive_vector_bits, r.saving_vector(),
                  r.compact_solver_bits, r.progressive_solver_bits, r.saving_solver(), r.storage_bound_bits);
    out << buf;
  }
}

}  // namespace cmg::experiments
