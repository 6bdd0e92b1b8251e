#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "cmg/experiments.hpp"

namespace ex = cmg::experiments;
namespace fs = std::filesystem;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

template <class F>
void write_csv(const fs::path& path, F&& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  body(out);
}

void write_plot(const fs::path& csv, const ex::PlotScript& plot) {
  for (const auto& w : plot.warnings) std::cerr << "warning: " << w << '\n';
  write_file(fs::path(csv).replace_extension(".gp"), plot.text);
}

int run(const ex::ExperimentConfig& cfg) {
  fs::create_directories(cfg.out);
  const std::string tag = cfg.problem.name();
  switch (cfg.study) {
    case ex::Study::converge: {
      auto res = ex::run_converge(cfg);
      const fs::path csv = cfg.out / ("converge_" + tag + ".csv");
      write_csv(csv, [&](std::ostream& o) { ex::write_converge_csv(o, res); });
      write_file(cfg.out / ("converge_" + tag + ".json"), ex::report_json(cfg, res) + "\n");
      write_plot(csv, ex::converge_plot(csv, cfg.problem));
      if (!res.diagnostic.empty()) std::cerr << "error: " << res.diagnostic << '\n';
      std::cout << csv.string() << ": " << (res.pass ? "pass" : "FAIL") << '\n';
      return res.pass ? kPass : kFail;
    }
    case ex::Study::hockey: {
      auto rows = ex::run_hockey(cfg);
      const fs::path csv = cfg.out / "hockey.csv";
      write_csv(csv, [&](std::ostream& o) { ex::write_hockey_csv(o, rows); });
      write_plot(csv, ex::hockey_plot(csv));
      std::cout << csv.string() << '\n';
      return kPass;
    }
    case ex::Study::search: {
      auto res = ex::run_search(cfg);
      const fs::path csv = cfg.out / ("search_" + tag + ".csv");
      write_csv(csv, [&](std::ostream& o) { ex::write_search_csv(o, res); });
      std::cout << csv.string() << ": " << ex::constants_string(res.constants)
                << (res.exhausted ? " (" + res.message + ")" : "") << '\n';
      return res.exhausted ? kFail : kPass;
    }
    case ex::Study::memreport: {
      auto rows = ex::run_memreport();
      const fs::path csv = cfg.out / "memreport.csv";
      write_csv(csv, [&](std::ostream& o) { ex::write_memory_csv(o, rows); });
      write_plot(csv, ex::memory_plot(csv));
      std::cout << csv.string() << '\n';
      return kPass;
    }
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compact full multigrid experiments"};
  app.set_config("--config", "", "key = value file with any of the options below");
  std::string study = "converge", pde = "poisson", constants = "table3", out = ".";
  int d = 1, p = 1, lmax = 8, reference_bits = 0;
  std::uint64_t seed = 1;
  bool naive = false;
  app.add_option("--study", study, "converge | hockey | search | memreport")->capture_default_str();
  app.add_option("--pde", pde, "poisson | biharmonic")->capture_default_str();
  app.add_option("--d", d, "spatial dimension")->capture_default_str();
  app.add_option("--p", p, "B-spline degree")->capture_default_str();
  app.add_option("--lmax", lmax, "finest level")->capture_default_str();
  app.add_option("--constants", constants, "table3 or N,b1,b2,b3,b4")->capture_default_str();
  app.add_option("--out", out, "output directory")->capture_default_str();
  app.add_option("--seed", seed, "seed recorded with the run")->capture_default_str();
  app.add_option("--reference-bits", reference_bits, "significand bits of the reference solver (0: default)");
  app.add_flag("--naive", naive, "use the non-streaming kernels");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  ex::ExperimentConfig cfg;
  try {
    cfg.study = ex::parse_study(study);
    cfg.problem = {cmg::fem::parse_pde(pde), d, p};
    cfg.lmax = lmax;
    ex::parse_constants(constants, cfg);
    cfg.out = out;
    cfg.seed = seed;
    cfg.reference_bits = reference_bits;
    cfg.streaming = !naive;
    ex::validate(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  }
  try {
    return run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFail;
  }
}
