#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cmg/experiments.hpp"

namespace cmg::experiments {

namespace {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(cell);
      cell.clear();
    } else {
      cell += c;
    }
  }
  out.push_back(cell);
  return out;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Table t;
  std::string line;
  if (std::getline(in, line)) t.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty()) t.rows.push_back(split(line));
  }
  return t;
}

// 1-based column of name, as the plotting tool counts.
int column(const Table& t, const std::filesystem::path& path, const std::string& name) {
  auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end()) throw std::runtime_error(path.string() + ": missing column '" + name + "'");
  return static_cast<int>(it - t.header.begin()) + 1;
}

std::string preamble(const std::filesystem::path& csv, const std::string& size) {
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set terminal svg size " << size << " enhanced\n"
    << "set output '" << std::filesystem::path(csv).replace_extension(".svg").filename().string() << "'\n"
    << "data = '" << csv.filename().string() << "'\n";
  return s.str();
}

bool empty_table(const Table& t, const std::filesystem::path& csv, PlotScript& out) {
  if (!t.rows.empty() && !t.header.empty()) return false;
  out.warnings.push_back(csv.string() + " has no data rows; the plot is empty");
  return true;
}

}  // namespace

PlotScript converge_plot(const std::filesystem::path& csv, const ProblemSpec& problem) {
  Table t = read_csv(csv);
  PlotScript out;
  std::ostringstream s;
  s << preamble(csv, "640,480") << "set logscale y\n"
    << "set format y '10^{%T}'\n"
    << "set xlabel 'FMG level L'\n"
    << "set ylabel 'Relative H^" << problem.order() << "-error'\n"
    << "set title '" << problem.name() << "'\n";
  if (t.header.empty() || empty_table(t, csv, out)) {
    s << "set xrange [0:1]\nset yrange [1e-20:1]\nplot NaN notitle\n";
    out.text = s.str();
    return out;
  }
  const int level = column(t, csv, "level");
  const int err = column(t, csv, "rel_Hm_error");
  const int ref = column(t, csv, "ref_error");
  const int order = problem.degree - problem.order() + 1;
  s << "k = " << order << "\n"
    << "stats data every ::0::0 using " << level << ":" << err << " nooutput\n"
    << "l0 = STATS_min_x\n"
    << "e0 = STATS_min_y\n"
    << "guide(x) = e0 * 2**(-k * (x - l0))\n"
    << "set key bottom left\n"
    << "plot data using " << level << ":" << err << " with linespoints pt 7 title 'compact FMG', \\\n"
    << "     data using " << level << ":" << ref << " with lines dt 2 title 'reference', \\\n"
    << "     guide(x) with lines lc rgb 'black' dt 3 title sprintf('O(h^{%d})', k)\n";
  out.text = s.str();
  return out;
}

PlotScript hockey_plot(const std::filesystem::path& csv) {
  Table t = read_csv(csv);
  PlotScript out;
  std::ostringstream s;
  s << preamble(csv, "1000,420") << "set logscale y\n"
    << "set format y '10^{%T}'\n"
    << "set yrange [1e-15:10]\n"
    << "set xrange [1:15]\n"
    << "set xlabel 'FMG level L'\n"
    << "set multiplot layout 1,2\n";
  const bool empty = t.header.empty() || empty_table(t, csv, out);
  int level = 1, p = 2, width = 3, err = 4;
  if (!empty) {
    level = column(t, csv, "level");
    p = column(t, csv, "p");
    width = column(t, csv, "width");
    err = column(t, csv, "rel_H1_error");
  }
  const double guide[] = {0.60, 0.20, 0.10, 0.04, 0.02};
  for (int w : {24, 53}) {
    s << "set title '" << (w == 24 ? "Single precision" : "Double precision") << "'\n"
      << "set ylabel " << (w == 24 ? "'Relative H^1-error'" : "''") << "\n";
    if (empty) {
      s << "plot NaN notitle\n";
      continue;
    }
    s << "plot ";
    for (int q = 1; q <= 5; ++q) {
      s << "data using " << level << ":(($" << p << "==" << q << " && $" << width << "==" << w << ") ? $" << err
        << " : 1/0) with linespoints title 'p=" << q << "', \\\n     ";
    }
    for (int q = 1; q <= 5; ++q) {
      s << guide[q - 1] << "*0.5**(" << q << "*x) with lines lc rgb 'black' dt 2 "
        << (q == 1 ? "title 'O(h^p)'" : "notitle") << (q < 5 ? ", \\\n     " : "\n");
    }
  }
  s << "unset multiplot\n";
  out.text = s.str();
  return out;
}

PlotScript memory_plot(const std::filesystem::path& csv) {
  Table t = read_csv(csv);
  PlotScript out;
  std::ostringstream s;
  s << preamble(csv, "1000,420") << "set logscale x\n"
    << "set format x '10^{%T}'\n"
    << "set xrange [1:1e16]\n"
    << "set yrange [0:15]\n"
    << "set xlabel 'Degrees of freedom'\n"
    << "set key top left\n"
    << "set multiplot layout 1,2\n";
  const bool empty = t.header.empty() || empty_table(t, csv, out);
  std::vector<std::string> problems;
  int name = 1, dofs = 6, sv = 9, ss = 12;
  if (!empty) {
    name = column(t, csv, "problem");
    dofs = column(t, csv, "dofs");
    sv = column(t, csv, "saving_vector");
    ss = column(t, csv, "saving_solver");
    for (const auto& r : t.rows) {
      const auto& v = r.at(static_cast<std::size_t>(name - 1));
      if (std::find(problems.begin(), problems.end(), v) == problems.end()) problems.push_back(v);
    }
  }
  const std::pair<const char*, int> panels[] = {{"Solution vector", sv}, {"Entire FMG", ss}};
  for (const auto& [title, col] : panels) {
    s << "set title '" << title << "'\n"
      << "set ylabel " << (col == sv ? "'Storage saving'" : "''") << "\n";
    if (problems.empty()) {
      s << "plot NaN notitle\n";
      continue;
    }
    s << "plot ";
    for (std::size_t i = 0; i < problems.size(); ++i) {
      s << "data using " << dofs << ":(strcol(" << name << ") eq '" << problems[i] << "' ? $" << col
        << " : 1/0) with linespoints title '" << problems[i] << "'" << (i + 1 < problems.size() ? ", \\\n     " : "\n");
    }
  }
  s << "unset multiplot\n";
  out.text = s.str();
  return out;
}

}  // namespace cmg::experiments
