#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmc/morse.hpp"

namespace cmc::cli {

enum class Format { Csv, Json, Svg };

struct RunConfig {
  std::string command;
  std::string family;
  std::optional<double> t;
  double t_min = 0.0;
  double t_max = 0.0;
  int steps = 100;
  int k = 6;
  int n_per_unit = 400;
  int m_max = 8;
  double null_tol = 0.0;
  bool refine = true;
  std::string output;
  Format format = Format::Csv;
};

/// Runs one subcommand; `args` excludes the program name. Returns the exit
/// code: 0 ok, 1 verification failure, 2 input or usage error, 3 numeric error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count: hardware threads, capped by MORSE_SPECTRUM_THREADS.
int thread_count();

// Writers. Floats are printed with 17 significant digits.
std::string format_double(double x);
void write_json(std::ostream& os, const nlohmann::ordered_json& j);

nlohmann::ordered_json config_json(const RunConfig& cfg);
nlohmann::ordered_json curve_json(const EigenCurve& curve);
nlohmann::ordered_json events_json(const std::vector<JacobiEvent>& events);
nlohmann::ordered_json report_json(const RunConfig& cfg, const MorseReport& report);

void write_spectrum_csv(std::ostream& os, const SpectrumSlice& slice);
void write_curves_csv(std::ostream& os, const EigenCurve& curve);
void write_events_csv(std::ostream& os, const std::vector<JacobiEvent>& events);

struct Series {
  std::string label;
  bool dashed = false;
  std::vector<double> x;
  std::vector<double> y;
};

/// 800x500 SVG line plot; values are clipped to |y| <= 50. Markers are drawn
/// on the zero axis at each entry of `markers`.
std::string svg_plot(const std::vector<Series>& series, const std::vector<double>& markers,
                     const std::string& title);

/// Parses the `t,kind,k,value` CSV back into one series per (kind, k).
std::vector<Series> read_curves_csv(std::istream& is);
/// The t_star column of an events CSV.
std::vector<double> read_event_times(std::istream& is);

}  // namespace cmc::cli
