#include <ostream>

#include "cmg/experiments.hpp"

namespace cmg::experiments {

const std::vector<std::string> kSearchColumns = {"step", "parameter", "N", "b1", "b2", "b3", "b4", "pass", "note"};

int search_lmax(const ProblemSpec& problem) { return problem.dim == 1 ? 8 : 5; }

SearchResult coordinate_search(const CandidateCheck& check, const SearchLimits& limits) {
  SearchResult res;
  Constants c{12, 30, 1, 30, 30};
  auto trial = [&](const char* name) {
    SearchTrial t{name, c, false, {}};
    t.pass = check(c, t.note);
    res.trail.push_back(t);
    return t.pass;
  };
  // Smallest passing value from 1, then one more, grown further if the
  // margin does not hold.
  auto tune = [&](const char* name, int Constants::*field, int ceiling) {
    int& v = c.*field;
    for (v = 1; !trial(name); ++v) {
      if (v >= ceiling) return false;
    }
    for (++v; !trial(name); ++v) {
      if (v >= ceiling) return false;
    }
    return true;
  };
  const struct {
    const char* name;
    int Constants::*field;
    int ceiling;
  } order[] = {{"b2", &Constants::b2, limits.max_bits},
               {"b1", &Constants::b1, limits.max_bits},
               {"b4", &Constants::b4, limits.max_bits},
               {"b3", &Constants::b3, limits.max_bits},
               {"N", &Constants::N, limits.max_iterations}};
  for (const auto& o : order) {
    if (!tune(o.name, o.field, o.ceiling)) {
      res.exhausted = true;
      res.message = std::string(o.name) + " reached its ceiling of " + std::to_string(o.ceiling) +
                    " without meeting the criteria";
      break;
    }
  }
  res.constants = c;
  return res;
}

SearchResult run_search(const ExperimentConfig& config, const SearchLimits& limits) {
  fem::validate(config.problem);
  const auto& problem = config.problem;
  const int lmax = search_lmax(problem);
  reference::ReferenceConfig ref_cfg = reference::default_reference(problem);
  if (config.reference_bits > 0) ref_cfg.mantissa_bits = config.reference_bits;
  const int top = std::max(limits.max_bits, 30);
  const int assembly =
      std::max(solver::required_assembly_width(problem, {1, top, top, top, top}, lmax), ref_cfg.width() + 64);
  fem::GridHierarchy h(problem, lmax, assembly);
  const auto ref = reference::fmg_reference(h, ref_cfg, true);

  auto check = [&](const Constants& c, std::string& note) {
    std::vector<ConvergeRow> rows;
    solver::CfmgOptions opts;
    opts.constants = c;
    opts.streaming = config.streaming;
    opts.on_level = [&](int L, const compact::CompactVector& u, const solver::OperatorCache& ops) {
      ConvergeRow row;
      row.level = ops.physical(L);
      row.dofs = ops.dofs(L);
      row.error = fem::relative_hm_error(problem, row.level, solver::decode_exact(u, ops));
      row.reference_error = ref.levels.at(static_cast<std::size_t>(L)).error;
      rows.push_back(std::move(row));
    };
    try {
      solver::cfmg(h, opts);
    } catch (const std::exception& e) {
      note = e.what();
      return false;
    }
    bool ok = judge(rows, problem);
    if (!ok) {
      for (const auto& r : rows) {
        if (r.pass_accuracy == false || r.pass_order == false) {
          note = "level " + std::to_string(r.level) + (r.pass_accuracy == false ? " accuracy" : " order");
          break;
        }
      }
    }
    return ok;
  };
  return coordinate_search(check, limits);
}

void write_search_csv(std::ostream& out, const SearchResult& result) {
  for (std::size_t i = 0; i < kSearchColumns.size(); ++i) out << (i ? "," : "") << kSearchColumns[i];
  out << '\n';
  auto row = [&](std::size_t step, const std::string& name, const Constants& c, const std::string& pass,
                 const std::string& note) {
    std::string quoted = "\"";
    for (char ch : note) {
      if (ch == '"') quoted += '"';
      quoted += ch;
    }
    quoted += '"';
    out << step << ',' << name << ',' << c.N << ',' << c.b1 << ',' << c.b2 << ',' << c.b3 << ',' << c.b4 << ','
        << pass << ',' << quoted << '\n';
  };
  for (std::size_t i = 0; i < result.trail.size(); ++i) {
    const auto& t = result.trail[i];
    row(i + 1, t.parameter, t.constants, t.pass ? "true" : "false", t.note);
  }
  row(result.trail.size() + 1, "result", result.constants, result.exhausted ? "false" : "true", result.message);
}

}  // namespace cmg::experiments
