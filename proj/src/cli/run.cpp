#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "cmc/analytic.hpp"
#include "cmc/cli.hpp"
#include "cmc/errors.hpp"

namespace cmc::cli {

namespace {

struct UsageError : InputError {
  UsageError(const std::string& what, const CLI::App* app) : InputError(what), app(app) {}
  const CLI::App* app;
};

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  return Format::Svg;
}

std::vector<double> linspace(double a, double b, int steps) {
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (steps - 1);
  out.back() = b;
  return out;
}

TraceOptions trace_options(const RunConfig& cfg) {
  TraceOptions o;
  o.resolution.n_per_unit = cfg.n_per_unit;
  o.resolution.m_max = cfg.m_max;
  o.null_tol = cfg.null_tol;
  o.threads = thread_count();
  return o;
}

void emit(const RunConfig& cfg, const std::string& payload, std::ostream& out) {
  if (cfg.output.empty() || cfg.output == "-") {
    out << payload;
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!f) throw InputError("cannot open output file " + cfg.output);
  f << payload;
  if (!f) throw InputError("failed writing " + cfg.output);
}

std::string json_text(const nlohmann::ordered_json& j) {
  std::ostringstream os;
  write_json(os, j);
  return os.str();
}

std::string scalar_line(double v) { return format_double(v) + "\n"; }

}  // namespace

int thread_count() {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("MORSE_SPECTRUM_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1) {
      throw InputError("MORSE_SPECTRUM_THREADS must be an integer >= 1");
    }
    n = std::min<long>(n, cap);
  }
  return n;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dirichlet and volume-constrained stability spectra along CMC domain families", "morse-spectrum"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string format;
  bool no_refine = false;

  auto add_family = [&](CLI::App* sub) {
    sub->add_option("--family", cfg.family, "circle | gap | cylinder | sphere")->required();
    sub->add_option("--k", cfg.k, "eigenvalues per slice")->check(CLI::Range(1, 1000));
    sub->add_option("--n-per-unit", cfg.n_per_unit, "grid points per unit length")->check(CLI::Range(50, 1000000));
    sub->add_option("--m-max", cfg.m_max, "largest azimuthal mode (2D families)")->check(CLI::Range(0, 1000));
    sub->add_option("--null-tol", cfg.null_tol, "nullity tolerance (0 = automatic)")->check(CLI::NonNegativeNumber);
    sub->add_option("--output,-o", cfg.output, "output file (default stdout)");
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--t-min", cfg.t_min, "first parameter value (default: family range)");
    sub->add_option("--t-max", cfg.t_max, "last parameter value (default: family range)");
    sub->add_option("--steps", cfg.steps, "grid points")->check(CLI::Range(2, 1000000));
  };

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues at one t");
  add_family(spectrum);
  double t_value = 0.0;
  spectrum->add_option("--t", t_value, "parameter value")->required();
  spectrum->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  auto* curves = app.add_subcommand("curves", "eigenvalue curves over a t grid");
  add_family(curves);
  add_grid(curves);
  curves->add_option("--format", format, "csv | json | svg")->check(CLI::IsMember({"csv", "json", "svg"}));

  auto* events = app.add_subcommand("events", "zero crossings of the curves");
  add_family(events);
  add_grid(events);
  events->add_flag("--no-refine", no_refine, "report interpolated crossings without bisection");
  events->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  auto* verify_cmd = app.add_subcommand("verify", "full index and interlacing report (JSON)");
  add_family(verify_cmd);
  add_grid(verify_cmd);
  verify_cmd->add_flag("--no-refine", no_refine, "report interpolated crossings without bisection");
  verify_cmd->add_option("--format", format, "json")->check(CLI::IsMember({"json"}));

  auto* oracle = app.add_subcommand("oracle", "closed-form reference values");
  oracle->require_subcommand(1);
  int o_k = 1, o_m = 0, o_n = 1, o_count = 6;
  double o_t = 0.0;
  auto* o_circle = oracle->add_subcommand("circle-lambda", "k^2 pi^2 / t^2 - 1");
  o_circle->add_option("--k", o_k)->required()->check(CLI::PositiveNumber);
  o_circle->add_option("--t", o_t)->required()->check(CLI::PositiveNumber);
  auto* o_twisted = oracle->add_subcommand("twisted-lambda", "(l_k / t)^2 - 1");
  o_twisted->add_option("--k", o_k)->required()->check(CLI::PositiveNumber);
  o_twisted->add_option("--t", o_t)->required()->check(CLI::PositiveNumber);
  auto* o_psi = oracle->add_subcommand("psi", "2 - 2 cos t - t sin t");
  o_psi->add_option("--t", o_t)->required();
  auto* o_zeros = oracle->add_subcommand("psi-zeros", "first positive zeros of psi");
  o_zeros->add_option("--count", o_count)->check(CLI::Range(1, 10000));
  auto* o_bessel = oracle->add_subcommand("bessel-zero", "n-th positive zero of J_m");
  o_bessel->add_option("--m", o_m)->required()->check(CLI::NonNegativeNumber);
  o_bessel->add_option("--n", o_n)->required()->check(CLI::PositiveNumber);
  auto* o_gap = oracle->add_subcommand("gap-lambda1", "first eigenvalue of the flat gap family");
  o_gap->add_option("--t", o_t)->required();

  auto* plot = app.add_subcommand("plot", "SVG line plot of a curves CSV, or of psi");
  std::string plot_input, plot_events, plot_title;
  bool plot_psi = false;
  double psi_t_max = 25.0;
  plot->add_option("--input", plot_input, "curves CSV (t,kind,k,value)")->check(CLI::ExistingFile);
  plot->add_option("--events", plot_events, "events CSV for zero markers")->check(CLI::ExistingFile);
  plot->add_flag("--psi", plot_psi, "plot psi(t) with its zeros marked");
  plot->add_option("--t-max", psi_t_max, "right end of the psi plot")->check(CLI::PositiveNumber);
  plot->add_option("--title", plot_title, "plot title");
  plot->add_option("--output,-o", cfg.output, "output file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  const CLI::App* active = app.get_subcommands().front();
  try {
    cfg.command = active->get_name();
    cfg.refine = !no_refine;

    if (active == oracle) {
      const CLI::App* which = oracle->get_subcommands().front();
      std::string payload;
      if (which == o_circle) payload = scalar_line(analytic::circle_dirichlet_lambda(o_k, o_t));
      if (which == o_twisted) payload = scalar_line(analytic::circle_twisted_lambda(o_k, o_t));
      if (which == o_psi) payload = scalar_line(analytic::psi(o_t));
      if (which == o_bessel) payload = scalar_line(analytic::bessel_zero(o_m, o_n));
      if (which == o_gap) payload = scalar_line(analytic::gap_lambda1(o_t));
      if (which == o_zeros) {
        payload = "k,value\n";
        const auto zeros = analytic::psi_zeros(o_count);
        for (std::size_t i = 0; i < zeros.size(); ++i) {
          payload += std::to_string(i + 1) + "," + format_double(zeros[i]) + "\n";
        }
      }
      out << payload;
      return 0;
    }

    if (active == plot) {
      std::string svg;
      if (plot_psi) {
        Series s{"psi", false, {}, {}};
        const int samples = 1000;
        for (int i = 0; i <= samples; ++i) {
          const double t = psi_t_max * i / samples;
          s.x.push_back(t);
          s.y.push_back(analytic::psi(t));
        }
        std::vector<double> zeros;
        for (int k = 1; analytic::psi_zero(k) <= psi_t_max; ++k) zeros.push_back(analytic::psi_zero(k));
        svg = svg_plot({s}, zeros, plot_title.empty() ? "psi(t) = 2 - 2 cos t - t sin t" : plot_title);
      } else {
        if (plot_input.empty()) throw UsageError("plot needs --input or --psi", plot);
        std::ifstream in(plot_input);
        const auto series = read_curves_csv(in);
        std::vector<double> markers;
        if (!plot_events.empty()) {
          std::ifstream ev(plot_events);
          markers = read_event_times(ev);
        }
        svg = svg_plot(series, markers, plot_title.empty() ? plot_input : plot_title);
      }
      emit(cfg, svg, out);
      return 0;
    }

    FamilyKind kind;
    try {
      kind = parse_family_kind(cfg.family);
    } catch (const InputError& e) {
      throw UsageError(e.what(), active);
    }
    const TraceOptions opts = trace_options(cfg);
    const Format fmt = format.empty() ? (active == verify_cmd ? Format::Json : Format::Csv) : parse_format(format);
    cfg.format = fmt;

    if (active == spectrum) {
      cfg.t = t_value;
      const auto family = make_family(kind);
      const auto slice = spectrum_at(family, t_value, static_cast<std::size_t>(cfg.k), opts);
      std::ostringstream os;
      if (fmt == Format::Json) {
        nlohmann::ordered_json j;
        j["config"] = config_json(cfg);
        j["dirichlet"] = slice.dirichlet;
        j["twisted"] = slice.twisted;
        j["dirichlet_index"] = slice.dirichlet_index.index;
        j["dirichlet_nullity"] = slice.dirichlet_index.nullity;
        j["twisted_index"] = slice.twisted_index.index;
        j["twisted_nullity"] = slice.twisted_index.nullity;
        j["null_tol"] = slice.dirichlet_index.tol;
        j["modes_resolved"] = slice.modes_resolved;
        write_json(os, j);
      } else {
        write_spectrum_csv(os, slice);
      }
      emit(cfg, os.str(), out);
      return 0;
    }

    const auto defaults = make_family(kind);
    if (cfg.t_min <= 0.0) cfg.t_min = defaults.t_min;
    if (cfg.t_max <= 0.0) cfg.t_max = defaults.t_max;
    const auto family = make_family(kind, cfg.t_min, cfg.t_max);
    const auto grid = linspace(cfg.t_min, cfg.t_max, cfg.steps);
    const auto curve = trace_curves(family, grid, static_cast<std::size_t>(cfg.k), opts);

    std::ostringstream os;
    if (active == curves) {
      if (fmt == Format::Json) {
        nlohmann::ordered_json j;
        j["config"] = config_json(cfg);
        j["curve"] = curve_json(curve);
        write_json(os, j);
      } else if (fmt == Format::Svg) {
        std::vector<Series> series;
        for (const auto* rows : {&curve.dirichlet, &curve.twisted}) {
          const bool tw = rows == &curve.twisted;
          for (std::size_t r = 0; r < rows->size(); ++r) {
            series.push_back({std::string(tw ? "twisted " : "dirichlet ") + std::to_string(r + 1), tw, curve.t,
                              (*rows)[r]});
          }
        }
        os << svg_plot(series, {}, std::string(to_string(kind)) + " eigenvalue curves");
      } else {
        write_curves_csv(os, curve);
      }
      emit(cfg, os.str(), out);
      return 0;
    }

    const auto detection = detect_events(curve, cfg.refine);
    for (const auto& w : detection.warnings) err << "warning: " << w << "\n";
    if (active == events) {
      if (fmt == Format::Json) {
        nlohmann::ordered_json j;
        j["config"] = config_json(cfg);
        j["events"] = events_json(detection.events);
        j["warnings"] = detection.warnings;
        write_json(os, j);
      } else {
        write_events_csv(os, detection.events);
      }
      emit(cfg, os.str(), out);
      return 0;
    }

    const auto report = verify(curve, detection);
    emit(cfg, json_text(report_json(cfg, report)), out);
    for (const auto& c : report.checks) {
      if (!c.ok) err << (c.expected ? "expected violation: " : "check failed: ") << c.name << ": " << c.detail << "\n";
    }
    return report.all_ok() ? 0 : 1;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << e.app->help();
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << " (residual " << format_double(e.residual()) << ")\n";
    return 3;
  } catch (const ConsistencyError& e) {
    err << "consistency error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace cmc::cli
