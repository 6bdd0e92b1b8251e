#include <algorithm>
#include <cstdio>
#include <ostream>

#include "cmg/experiments.hpp"

namespace cmg::experiments {

const std::vector<std::string> kConvergeColumns = {
    "level", "dofs", "rel_Hm_error", "observed_order", "ref_error", "pass_accuracy", "pass_order",
    "bits_u_finest", "bits_total_vectors"};

bool judge(std::vector<ConvergeRow>& rows, const ProblemSpec& problem) {
  bool all = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& r = rows[i];
    r.order.reset();
    r.pass_accuracy.reset();
    r.pass_order.reset();
    if (i > 0 && !rows[i - 1].error.is_zero() && !r.error.is_zero()) {
      r.order = observed_order(r.error, rows[i - 1].error);
    }
    if (r.level < kFirstJudgedLevel) continue;
    r.pass_accuracy = accuracy_ok(r.error, r.reference_error);
    r.pass_order = r.order.has_value() && order_ok(*r.order, problem);
    all = all && *r.pass_accuracy && *r.pass_order;
  }
  return all;
}

ConvergeResult run_converge(const ExperimentConfig& config) {
  validate(config);
  ConvergeResult result;
  result.constants = resolve_constants(config);
  const auto& problem = config.problem;
  reference::ReferenceConfig ref_cfg = reference::default_reference(problem);
  if (config.reference_bits > 0) ref_cfg.mantissa_bits = config.reference_bits;
  try {
    const int assembly =
        std::max(solver::required_assembly_width(problem, result.constants, config.lmax), ref_cfg.width() + 64);
    fem::GridHierarchy h(problem, config.lmax, assembly);
    auto ref = reference::fmg_reference(h, ref_cfg, true);

    solver::CfmgOptions opts;
    opts.constants = result.constants;
    opts.streaming = config.streaming;
    opts.on_level = [&](int L, const compact::CompactVector& u, const solver::OperatorCache& ops) {
      ConvergeRow row;
      row.level = ops.physical(L);
      row.dofs = ops.dofs(L);
      row.error = fem::relative_hm_error(problem, row.level, solver::decode_exact(u, ops));
      row.reference_error = ref.levels.at(static_cast<std::size_t>(L)).error;
      row.bits_u_finest = u.section(L).width();
      result.rows.push_back(std::move(row));
    };
    auto run = solver::cfmg(h, opts);
    for (std::size_t i = 0; i < run.levels.size(); ++i) {
      const auto& rec = run.levels[i];
      result.rows[i].bits_total_vectors = rec.u_total_bits + rec.r_total_bits + rec.y_total_bits;
    }
    result.records = std::move(run.levels);
  } catch (const std::exception& e) {
    result.pass = false;
    result.diagnostic = e.what();
  }
  const bool criteria = judge(result.rows, problem);
  result.pass = result.pass && criteria;
  return result;
}

namespace {

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string flag(const std::optional<bool>& v) {
  if (!v) return "n/a";
  return *v ? "true" : "false";
}

}  // namespace

void write_converge_csv(std::ostream& out, const ConvergeResult& result) {
  for (std::size_t i = 0; i < kConvergeColumns.size(); ++i) out << (i ? "," : "") << kConvergeColumns[i];
  out << '\n';
  char buf[64];
  for (const auto& r : result.rows) {
    std::string order = "n/a";
    if (r.order) {
      std::snprintf(buf, sizeof buf, "%.6f", *r.order);
      order = buf;
    }
    out << r.level << ',' << r.dofs << ',' << format_error(r.error) << ',' << order << ','
        << format_error(r.reference_error) << ',' << flag(r.pass_accuracy) << ',' << flag(r.pass_order) << ','
        << r.bits_u_finest << ',' << r.bits_total_vectors << '\n';
  }
  if (!result.diagnostic.empty()) out << "error,," << csv_quote(result.diagnostic) << ",,,,,,\n";
}

}  // namespace cmg::experiments
