#include <charconv>
#include <cmath>
#include <stdexcept>

#include "cmg/experiments.hpp"

namespace cmg::experiments {

Study parse_study(std::string_view text) {
  if (text == "converge") return Study::converge;
  if (text == "hockey") return Study::hockey;
  if (text == "search") return Study::search;
  if (text == "memreport") return Study::memreport;
  throw std::invalid_argument("unknown study '" + std::string(text) + "'");
}

std::string to_string(Study study) {
  switch (study) {
    case Study::converge: return "converge";
    case Study::hockey: return "hockey";
    case Study::search: return "search";
    case Study::memreport: return "memreport";
  }
  return "?";
}

void parse_constants(std::string_view text, ExperimentConfig& config) {
  if (text == "table3") {
    config.table3 = true;
    return;
  }
  int v[5];
  std::size_t pos = 0;
  for (int k = 0; k < 5; ++k) {
    std::size_t end = text.find(',', pos);
    if ((k < 4) != (end != std::string_view::npos)) {
      throw std::invalid_argument("constants must be 'table3' or N,b1,b2,b3,b4");
    }
    std::string_view part = text.substr(pos, end == std::string_view::npos ? text.size() - pos : end - pos);
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v[k]);
    if (ec != std::errc() || p != part.data() + part.size()) {
      throw std::invalid_argument("bad integer '" + std::string(part) + "' in constants");
    }
    pos = end + 1;
  }
  config.table3 = false;
  config.constants = {v[0], v[1], v[2], v[3], v[4]};
}

std::string constants_string(const Constants& c) {
  return std::to_string(c.N) + "," + std::to_string(c.b1) + "," + std::to_string(c.b2) + "," +
         std::to_string(c.b3) + "," + std::to_string(c.b4);
}

void validate(const ExperimentConfig& config) {
  if (config.study == Study::memreport) return;
  if (config.study == Study::hockey) {
    if (config.problem.pde != fem::Pde::poisson || config.problem.dim != 1) {
      throw std::invalid_argument("hockey study runs on the 1D Poisson problem only");
    }
    if (config.lmax < 1 || config.lmax > 20) throw std::invalid_argument("hockey lmax must be in 1..20");
    return;
  }
  fem::validate(config.problem);
  const int top = config.problem.dim == 1 ? 24 : 12;
  if (config.lmax < config.problem.coarsest_level() || config.lmax > top) {
    throw std::invalid_argument("lmax must be in " + std::to_string(config.problem.coarsest_level()) + ".." +
                                std::to_string(top) + " for " + config.problem.name());
  }
  if (config.study == Study::converge) {
    Constants c = resolve_constants(config);
    if (c.N < 1) throw std::invalid_argument("N must be positive");
    for (int b : {c.b1, c.b2, c.b3, c.b4}) {
      if (b < softfloat::kMinWidth) throw std::invalid_argument("base widths must be at least 2");
    }
  }
  if (config.reference_bits != 0 && config.reference_bits < 24) {
    throw std::invalid_argument("reference needs at least 24 significand bits");
  }
}

Constants resolve_constants(const ExperimentConfig& config) {
  return config.table3 ? solver::table3(config.problem) : config.constants;
}

bool accuracy_ok(const SoftScalar& error, const SoftScalar& reference_error) {
  // error <= 2 * reference_error, compared exactly.
  return cmp(error.to_rational(), mpq_class(kAccuracyFactor) * reference_error.to_rational()) <= 0;
}

bool order_ok(double observed, const ProblemSpec& problem) {
  const double optimal = problem.degree - problem.order() + 1;
  return observed >= optimal - kOrderSlack;
}

double observed_order(const SoftScalar& error, const SoftScalar& previous) {
  const int w = std::max(error.width(), previous.width());
  SoftScalar ratio = softfloat::div(error, previous, w);
  mpfr_t l;
  mpfr_init2(l, 64);
  mpfr_log2(l, ratio.raw(), MPFR_RNDN);
  double v = -mpfr_get_d(l, MPFR_RNDN);
  mpfr_clear(l);
  return v;
}

std::string format_error(const SoftScalar& x) { return softfloat::to_string(x, 21); }

}  // namespace cmg::experiments
