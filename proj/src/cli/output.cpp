#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "cmc/cli.hpp"
#include "cmc/errors.hpp"

namespace cmc::cli {

using nlohmann::ordered_json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void emit(std::ostream& os, const ordered_json& j, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth + 1), ' ');
  const std::string close_pad(2 * static_cast<std::size_t>(depth), ' ');
  switch (j.type()) {
    case ordered_json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << pad << ordered_json(key).dump() << ": ";
        emit(os, value, depth + 1);
      }
      os << "\n" << close_pad << "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // arrays of scalars stay on one line
      const bool flat = std::none_of(j.begin(), j.end(), [](const ordered_json& e) { return e.is_structured(); });
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          emit(os, j[i], depth + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        emit(os, j[i], depth + 1);
      }
      os << "\n" << close_pad << "]";
      return;
    }
    case ordered_json::value_t::number_float: {
      const double x = j.get<double>();
      os << (std::isfinite(x) ? format_double(x) : "null");
      return;
    }
    default:
      os << j.dump();
  }
}

std::string kind_name(EventKind kind) { return kind == EventKind::DirichletZero ? "dirichlet" : "twisted"; }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_number(const std::string& s, std::size_t line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError("CSV line " + std::to_string(line) + ": not a number: '" + s + "'");
  }
}

}  // namespace

void write_json(std::ostream& os, const ordered_json& j) {
  emit(os, j, 0);
  os << "\n";
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j;
  j["command"] = cfg.command;
  j["family"] = cfg.family;
  if (cfg.t) {
    j["t"] = *cfg.t;
  } else {
    j["t_min"] = cfg.t_min;
    j["t_max"] = cfg.t_max;
    j["steps"] = cfg.steps;
  }
  j["k"] = cfg.k;
  j["n_per_unit"] = cfg.n_per_unit;
  j["m_max"] = cfg.m_max;
  j["null_tol"] = cfg.null_tol;
  j["refine"] = cfg.refine;
  return j;
}

ordered_json curve_json(const EigenCurve& curve) {
  ordered_json j;
  j["family"] = std::string(to_string(curve.family.kind));
  j["set_continuous"] = curve.family.set_continuous;
  j["k"] = curve.k;
  j["t"] = curve.t;
  j["h"] = curve.h;
  j["dirichlet"] = curve.dirichlet;
  j["twisted"] = curve.twisted;
  auto column = [&](const std::vector<IndexNullity>& v, auto field) {
    ordered_json a = ordered_json::array();
    for (const auto& x : v) a.push_back(field(x));
    return a;
  };
  j["dirichlet_index"] = column(curve.dirichlet_index, [](const IndexNullity& x) { return x.index; });
  j["dirichlet_nullity"] = column(curve.dirichlet_index, [](const IndexNullity& x) { return x.nullity; });
  j["twisted_index"] = column(curve.twisted_index, [](const IndexNullity& x) { return x.index; });
  j["twisted_nullity"] = column(curve.twisted_index, [](const IndexNullity& x) { return x.nullity; });
  j["null_tol"] = column(curve.dirichlet_index, [](const IndexNullity& x) { return x.tol; });
  ordered_json resolved = ordered_json::array();
  for (bool b : curve.modes_resolved) resolved.push_back(b);
  j["modes_resolved"] = resolved;
  return j;
}

ordered_json events_json(const std::vector<JacobiEvent>& events) {
  ordered_json a = ordered_json::array();
  for (const auto& e : events) {
    ordered_json j;
    j["t_star"] = e.t_star;
    j["kind"] = kind_name(e.kind);
    j["k"] = e.k;
    j["multiplicity"] = e.multiplicity;
    j["width"] = e.refined_width;
    a.push_back(j);
  }
  return a;
}

ordered_json report_json(const RunConfig& cfg, const MorseReport& report) {
  ordered_json j;
  j["config"] = config_json(cfg);
  j["curve"] = curve_json(report.curve);
  j["events"] = events_json(report.events);
  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks) {
    ordered_json cj;
    cj["name"] = c.name;
    cj["ok"] = c.ok;
    cj["expected"] = c.expected;
    cj["detail"] = c.detail;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  j["warnings"] = report.warnings;
  j["identity_ok"] = report.identity_ok;
  j["lemma_d_ok"] = report.lemma_d_ok;
  j["interlacing_ok"] = report.interlacing_ok;
  j["monotone_ok"] = report.monotone_ok;
  j["continuity_ok"] = report.continuity_ok;
  j["theorem_j_ok"] = report.theorem_j_ok;
  j["prop_5_1_ok"] = report.prop_5_1_ok;
  j["prop_5_1_strict"] = report.prop_5_1_strict;
  j["all_ok"] = report.all_ok();

  ordered_json identity = ordered_json::array();
  for (const auto& p : report.identity) {
    identity.push_back(ordered_json{{"r", p.r},
                                    {"twisted_index", p.twisted_index},
                                    {"twisted_nullity", p.twisted_nullity},
                                    {"events_below", p.events_below},
                                    {"ok", p.ok}});
  }
  j["identity"] = identity;
  ordered_json intervals = ordered_json::array();
  for (const auto& iv : report.theorem_j) {
    intervals.push_back(ordered_json{{"t_prev", iv.t_prev},
                                     {"t_cur", iv.t_cur},
                                     {"m_prev", iv.m_prev},
                                     {"m_cur", iv.m_cur},
                                     {"mu_half_open", iv.mu_half_open},
                                     {"mu_closed", iv.mu_closed},
                                     {"mu_point", iv.mu_point},
                                     {"half_open_ok", iv.half_open_ok},
                                     {"closed_ok", iv.closed_ok},
                                     {"point_ok", iv.point_ok}});
  }
  j["theorem_j"] = intervals;
  return j;
}

void write_spectrum_csv(std::ostream& os, const SpectrumSlice& slice) {
  os << "k,lambda,lambda_twisted\n";
  for (std::size_t i = 0; i < slice.dirichlet.size(); ++i) {
    os << i + 1 << ',' << format_double(slice.dirichlet[i]) << ',' << format_double(slice.twisted[i]) << '\n';
  }
}

void write_curves_csv(std::ostream& os, const EigenCurve& curve) {
  os << "t,kind,k,value\n";
  for (std::size_t i = 0; i < curve.t.size(); ++i) {
    for (const auto* rows : {&curve.dirichlet, &curve.twisted}) {
      const char* kind = rows == &curve.dirichlet ? "dirichlet" : "twisted";
      for (std::size_t r = 0; r < rows->size(); ++r) {
        os << format_double(curve.t[i]) << ',' << kind << ',' << r + 1 << ',' << format_double((*rows)[r][i])
           << '\n';
      }
    }
  }
}

void write_events_csv(std::ostream& os, const std::vector<JacobiEvent>& events) {
  os << "t_star,kind,k,multiplicity,width\n";
  for (const auto& e : events) {
    os << format_double(e.t_star) << ',' << kind_name(e.kind) << ',' << e.k << ',' << e.multiplicity << ','
       << format_double(e.refined_width) << '\n';
  }
}

std::string svg_plot(const std::vector<Series>& series, const std::vector<double>& markers,
                     const std::string& title) {
  constexpr double kWidth = 800.0, kHeight = 500.0;
  constexpr double kLeft = 70.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;
  auto clip = [](double y) { return std::clamp(y, -50.0, 50.0); };

  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = 0.0, y1 = 0.0;  // keep the zero axis in view
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, clip(s.y[i]));
      y1 = std::max(y1, clip(s.y[i]));
    }
  }
  if (!(x0 < x1)) {
    x0 = 0.0;
    x1 = 1.0;
  }
  if (!(y0 < y1)) y1 = y0 + 1.0;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); };
  auto py = [&](double y) { return kTop + (y1 - clip(y)) / (y1 - y0) * (kHeight - kTop - kBottom); };
  auto f = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  auto tick = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return std::string(buf);
  };
  auto escape = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      switch (c) {
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        case '&': o += "&amp;"; break;
        case '"': o += "&quot;"; break;
        default: o += c;
      }
    }
    return o;
  };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                  "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" height=\"500\" "
        "viewBox=\"0 0 800 500\">\n"
     << "<rect width=\"800\" height=\"500\" fill=\"white\"/>\n"
     << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     << escape(title) << "</text>\n";
  os << "<rect x=\"" << f(kLeft) << "\" y=\"" << f(kTop) << "\" width=\"" << f(kWidth - kLeft - kRight)
     << "\" height=\"" << f(kHeight - kTop - kBottom) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5.0;
    const double yv = y0 + (y1 - y0) * i / 5.0;
    os << "<text x=\"" << f(px(xv)) << "\" y=\"" << f(kHeight - kBottom + 18)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick(xv) << "</text>\n";
    os << "<text x=\"" << f(kLeft - 6) << "\" y=\"" << f(py(yv) + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick(yv) << "</text>\n";
  }
  os << "<text x=\"400\" y=\"" << f(kHeight - 10)
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">t</text>\n";
  os << "<line x1=\"" << f(kLeft) << "\" y1=\"" << f(py(0.0)) << "\" x2=\"" << f(kWidth - kRight) << "\" y2=\""
     << f(py(0.0)) << "\" stroke=\"black\" stroke-width=\"1\" stroke-dasharray=\"2,2\"/>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    os << "<polyline fill=\"none\" stroke=\"" << palette[s % 10] << "\" stroke-width=\"1.5\"";
    if (ser.dashed) os << " stroke-dasharray=\"6,3\"";
    os << " points=\"";
    bool first = true;
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      if (!first) os << ' ';
      first = false;
      os << f(px(ser.x[i])) << ',' << f(py(ser.y[i]));
    }
    os << "\"><title>" << escape(ser.label) << "</title></polyline>\n";
  }
  for (double m : markers) {
    if (m < x0 || m > x1) continue;
    os << "<circle cx=\"" << f(px(m)) << "\" cy=\"" << f(py(0.0))
       << "\" r=\"4\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::vector<Series> read_curves_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "t,kind,k,value") {
    throw InputError("expected a curves CSV with header t,kind,k,value");
  }
  std::map<std::pair<std::string, int>, Series> by_key;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 4) throw InputError("CSV line " + std::to_string(lineno) + ": expected 4 fields");
    if (cells[1] != "dirichlet" && cells[1] != "twisted") {
      throw InputError("CSV line " + std::to_string(lineno) + ": unknown kind '" + cells[1] + "'");
    }
    const int k = static_cast<int>(parse_number(cells[2], lineno));
    auto& s = by_key[{cells[1], k}];
    s.label = cells[1] + " " + std::to_string(k);
    s.dashed = cells[1] == "twisted";
    s.x.push_back(parse_number(cells[0], lineno));
    s.y.push_back(parse_number(cells[3], lineno));
  }
  std::vector<Series> out;
  for (auto& [key, s] : by_key) out.push_back(std::move(s));
  return out;
}

std::vector<double> read_event_times(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("t_star,", 0) != 0) {
    throw InputError("expected an events CSV with header t_star,kind,k,multiplicity,width");
  }
  std::vector<double> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    out.push_back(parse_number(split_csv_line(line).at(0), lineno));
  }
  return out;
}

}  // namespace cmc::cli
