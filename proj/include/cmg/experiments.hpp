#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmg/reference.hpp"

namespace cmg::experiments {

using fem::ProblemSpec;
using softfloat::SoftScalar;
using solver::Constants;

enum class Study { converge, hockey, search, memreport };

Study parse_study(std::string_view text);
std::string to_string(Study study);

struct ExperimentConfig {
  Study study = Study::converge;
  ProblemSpec problem;
  int lmax = 8;
  bool table3 = true;  // constants from the preset instead of `constants`
  Constants constants;
  std::filesystem::path out = ".";
  std::uint64_t seed = 1;
  int reference_bits = 0;  // 0 picks the default for the problem
  bool streaming = true;
};

// "table3" or "N,b1,b2,b3,b4".
void parse_constants(std::string_view text, ExperimentConfig& config);
std::string constants_string(const Constants& c);
// Throws std::invalid_argument on an unsupported problem, a missing preset or
// out-of-range levels.
void validate(const ExperimentConfig& config);
Constants resolve_constants(const ExperimentConfig& config);

// Levels below this are preasymptotic and not judged.
constexpr int kFirstJudgedLevel = 4;
constexpr double kOrderSlack = 0.05;
constexpr double kAccuracyFactor = 2.0;

// Both judgements for one level.
bool accuracy_ok(const SoftScalar& error, const SoftScalar& reference_error);
bool order_ok(double observed_order, const ProblemSpec& problem);
// -log2(error / previous), computed from the full-width values.
double observed_order(const SoftScalar& error, const SoftScalar& previous);

struct ConvergeRow {
  int level = 0;
  std::size_t dofs = 0;
  SoftScalar error;
  std::optional<double> order;
  SoftScalar reference_error;
  std::optional<bool> pass_accuracy, pass_order;  // unset below kFirstJudgedLevel
  int bits_u_finest = 0;
  std::uint64_t bits_total_vectors = 0;
};

struct ConvergeResult {
  std::vector<ConvergeRow> rows;
  std::vector<solver::LevelRecord> records;
  Constants constants;
  bool pass = true;
  std::string diagnostic;  // set when the run failed
};

// Runs cfmg and the reference solver on the same hierarchy.
ConvergeResult run_converge(const ExperimentConfig& config);
// Judges an error sequence against reference errors; used by the converge
// study and the constant search.
bool judge(std::vector<ConvergeRow>& rows, const ProblemSpec& problem);

extern const std::vector<std::string> kConvergeColumns;
void write_converge_csv(std::ostream& out, const ConvergeResult& result);

struct HockeyRow {
  int level = 0;
  int p = 1;
  int width = 24;  // significand bits
  SoftScalar error;
};
// Poisson 1D, p = 1..5, single and double width, levels up to config.lmax.
std::vector<HockeyRow> run_hockey(const ExperimentConfig& config, int cycles = 3);
extern const std::vector<std::string> kHockeyColumns;
void write_hockey_csv(std::ostream& out, const std::vector<HockeyRow>& rows);

struct SearchTrial {
  std::string parameter;
  Constants constants;
  bool pass = false;
  std::string note;
};
struct SearchResult {
  Constants constants;
  std::vector<SearchTrial> trail;
  bool exhausted = false;
  std::string message;
};
struct SearchLimits {
  int max_bits = 64;
  int max_iterations = 32;
};
// Criteria of the search scale for one candidate.
using CandidateCheck = std::function<bool(const Constants&, std::string& note)>;
// Ordered coordinate search: b2 with the others fixed at 30 and N = 12, then
// b1, b4, b3 and N, each grown from 1 until the check passes, plus one.
SearchResult coordinate_search(const CandidateCheck& check, const SearchLimits& limits = {});
// The check for a problem: converge at the search scale (8 levels in 1D, 5
// in 2D), reference errors computed once.
SearchResult run_search(const ExperimentConfig& config, const SearchLimits& limits = {});
int search_lmax(const ProblemSpec& problem);
extern const std::vector<std::string> kSearchColumns;
void write_search_csv(std::ostream& out, const SearchResult& result);

// Closed-form storage model of the compact solver and of FMG in progressive
// block floating point precision.
struct MemoryRow {
  ProblemSpec problem;
  int level = 0;
  double dofs = 0;
  double compact_vector_bits = 0;
  double progressive_vector_bits = 0;
  double compact_solver_bits = 0;
  double progressive_solver_bits = 0;
  double storage_bound_bits = 0;
  double saving_vector() const { return progressive_vector_bits / compact_vector_bits; }
  double saving_solver() const { return progressive_solver_bits / compact_solver_bits; }
};
MemoryRow memory_model(const ProblemSpec& problem, const Constants& c, int level);
// Every preset configuration, levels 1 up to n = 1e16 unknowns.
std::vector<MemoryRow> run_memreport(double max_dofs = 1e16);
extern const std::vector<std::string> kMemoryColumns;
void write_memory_csv(std::ostream& out, const std::vector<MemoryRow>& rows);

// Plot scripts for an external plotting tool, built only from the CSV files.
// Throws std::runtime_error when a required column is missing; an empty CSV
// gives a script with an empty plot and a warning.
struct PlotScript {
  std::string text;
  std::vector<std::string> warnings;
};
PlotScript converge_plot(const std::filesystem::path& csv, const ProblemSpec& problem);
PlotScript hockey_plot(const std::filesystem::path& csv);
PlotScript memory_plot(const std::filesystem::path& csv);

// Machine-readable per-level instrumentation of a converge run.
std::string report_json(const ExperimentConfig& config, const ConvergeResult& result);

// Full-width decimal string with at least 20 significant digits.
std::string format_error(const SoftScalar& x);

}  // namespace cmg::experiments
