#include <ostream>

#include "cmg/experiments.hpp"

namespace cmg::experiments {

const std::vector<std::string> kHockeyColumns = {"level", "p", "width", "rel_H1_error"};

std::vector<HockeyRow> run_hockey(const ExperimentConfig& config, int cycles) {
  validate(config);
  std::vector<HockeyRow> rows;
  for (int width : {24, 53}) {
    for (int p = 1; p <= 5; ++p) {
      ProblemSpec problem{fem::Pde::poisson, 1, p};
      auto res = reference::fmg_fixed_precision(problem, config.lmax, width, cycles);
      for (const auto& l : res.levels) rows.push_back({l.level, p, width, l.error});
    }
  }
  return rows;
}

void write_hockey_csv(std::ostream& out, const std::vector<HockeyRow>& rows) {
  for (std::size_t i = 0; i < kHockeyColumns.size(); ++i) out << (i ? "," : "") << kHockeyColumns[i];
  out << '\n';
  for (const auto& r : rows) out << r.level << ',' << r.p << ',' << r.width << ',' << format_error(r.error) << '\n';
}

}  // namespace cmg::experiments
