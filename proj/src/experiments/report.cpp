#include <json.hpp>

#include "cmg/experiments.hpp"

namespace cmg::experiments {

std::string report_json(const ExperimentConfig& config, const ConvergeResult& result) {
  using nlohmann::json;
  json j;
  j["study"] = to_string(config.study);
  j["problem"] = {{"pde", fem::to_string(config.problem.pde)},
                  {"d", config.problem.dim},
                  {"p", config.problem.degree},
                  {"m", config.problem.order()}};
  j["lmax"] = config.lmax;
  const auto& c = result.constants;
  j["constants"] = {{"preset", config.table3}, {"N", c.N}, {"b1", c.b1}, {"b2", c.b2}, {"b3", c.b3}, {"b4", c.b4}};
  j["seed"] = config.seed;
  j["streaming"] = config.streaming;
  j["pass"] = result.pass;
  if (!result.diagnostic.empty()) j["diagnostic"] = result.diagnostic;
  json levels = json::array();
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& r = result.records[i];
    json l = {{"level", r.level},
              {"dofs", r.dofs},
              {"iterations", r.iterations},
              {"u_widths", r.u_widths},
              {"ry_widths", r.ry_widths},
              {"u_mantissa_bits", r.u_mantissa_bits},
              {"u_total_bits", r.u_total_bits},
              {"r_mantissa_bits", r.r_mantissa_bits},
              {"r_total_bits", r.r_total_bits},
              {"y_mantissa_bits", r.y_mantissa_bits},
              {"y_total_bits", r.y_total_bits},
              {"peak_buffer_bits", r.peak_buffer_bits},
              {"peak_z", r.peak_z},
              {"capacity_z", r.cap_z},
              {"peak_u", r.peak_u},
              {"capacity_u", r.cap_u},
              {"peak_t", r.peak_t},
              {"capacity_t", r.cap_t},
              {"seconds", r.seconds}};
    if (i < result.rows.size()) {
      const auto& row = result.rows[i];
      l["rel_Hm_error"] = format_error(row.error);
      l["ref_error"] = format_error(row.reference_error);
      l["observed_order"] = row.order ? json(*row.order) : json(nullptr);
      l["pass_accuracy"] = row.pass_accuracy ? json(*row.pass_accuracy) : json(nullptr);
      l["pass_order"] = row.pass_order ? json(*row.pass_order) : json(nullptr);
    }
    levels.push_back(std::move(l));
  }
  j["levels"] = std::move(levels);
  return j.dump(2);
}

}  // namespace cmg::experiments
