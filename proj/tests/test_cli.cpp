#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "cmc/cli.hpp"

using namespace cmc;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("morse_spectrum_test_" + name);
}

}  // namespace

TEST_CASE("spectrum example") {
  const auto r = run_cli({"spectrum", "--family", "circle", "--t", "3.14159265", "--k", "4", "--n-per-unit", "600"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == std::vector<std::string>{"k", "lambda", "lambda_twisted"});
  CHECK(std::abs(std::stod(rows[1][1])) < 1e-4);
  CHECK(std::stod(rows[2][1]) == doctest::Approx(3.0).epsilon(1e-4));
}

TEST_CASE("spectrum as JSON embeds the configuration") {
  const auto r = run_cli({"spectrum", "--family", "sphere", "--t", "1.5707963267948966", "--k", "3", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["config"]["family"] == "sphere");
  CHECK(j["config"]["t"].get<double>() == doctest::Approx(std::numbers::pi / 2));
  CHECK(std::abs(j["dirichlet"][0].get<double>()) < 1e-3);
}

TEST_CASE("oracle subcommands") {
  auto r = run_cli({"oracle", "psi-zeros", "--count", "6"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 7);
  const double pi = std::numbers::pi;
  CHECK(std::abs(std::stod(rows[1][1]) - 2 * pi) < 1e-12);
  CHECK(std::abs(std::stod(rows[3][1]) - 4 * pi) < 1e-12);
  CHECK(std::abs(std::stod(rows[5][1]) - 6 * pi) < 1e-12);

  r = run_cli({"oracle", "bessel-zero", "--m", "0", "--n", "1"});
  CHECK(r.code == 0);
  CHECK(std::stod(r.out) == doctest::Approx(2.404825557695773).epsilon(1e-14));
  r = run_cli({"oracle", "circle-lambda", "--k", "2", "--t", "3.141592653589793"});
  CHECK(std::stod(r.out) == doctest::Approx(3.0));
  r = run_cli({"oracle", "twisted-lambda", "--k", "1", "--t", "6.283185307179586"});
  CHECK(std::abs(std::stod(r.out)) < 1e-14);
  r = run_cli({"oracle", "psi", "--t", "3.141592653589793"});
  CHECK(std::stod(r.out) == doctest::Approx(4.0));
  r = run_cli({"oracle", "gap-lambda1", "--t", "1"});
  CHECK(std::stod(r.out) == 0.25);
  CHECK(run_cli({"oracle", "gap-lambda1", "--t", "2"}).code == 2);
}

TEST_CASE("usage errors exit with 2") {
  auto r = run_cli({"spectrum", "--family", "torus", "--t", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(run_cli({"spectrum", "--family", "circle", "--t", "1", "--bogus"}).code == 2);
  CHECK(run_cli({"spectrum", "--family", "circle", "--t", "1", "--n-per-unit", "49"}).code == 2);
  CHECK(run_cli({"curves", "--family", "circle", "--steps", "1"}).code == 2);
  CHECK(run_cli({"curves", "--family", "cylinder", "--m-max", "-1"}).code == 2);
  CHECK(run_cli({"spectrum", "--family", "sphere", "--t", "3.5"}).code == 2);
  CHECK(run_cli({"curves", "--family", "sphere", "--t-min", "1", "--t-max", "3.5"}).code == 2);
  CHECK(run_cli({"verify", "--family", "circle", "--format", "csv"}).code == 2);
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({"plot"}).code == 2);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("curves CSV schema") {
  const auto r = run_cli({"curves", "--family", "circle", "--t-min", "1", "--t-max", "2", "--steps", "3", "--k", "2",
                          "--n-per-unit", "100"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  CHECK(rows[0] == std::vector<std::string>{"t", "kind", "k", "value"});
  REQUIRE(rows.size() == 1 + 3 * 2 * 2);
  CHECK(rows[1][1] == "dirichlet");
  CHECK(rows[3][1] == "twisted");
  CHECK(std::stod(rows[1][3]) == doctest::Approx(std::pow(std::numbers::pi, 2) - 1).epsilon(1e-3));
}

TEST_CASE("events CSV schema") {
  const auto r = run_cli({"events", "--family", "circle", "--t-min", "2", "--t-max", "7", "--steps", "20", "--k", "3"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  CHECK(rows[0] == std::vector<std::string>{"t_star", "kind", "k", "multiplicity", "width"});
  REQUIRE(rows.size() == 4);  // pi, 2 pi (both kinds)
  CHECK(std::stod(rows[1][0]) == doctest::Approx(std::numbers::pi).epsilon(1e-6));
  CHECK(rows[1][1] == "dirichlet");
}

TEST_CASE("verify report keys and determinism") {
  const std::vector<std::string> args{"verify", "--family", "cylinder", "--t-min", "1", "--t-max", "4.5",
                                      "--steps", "12", "--k", "4", "--n-per-unit", "100", "--m-max", "4"};
  setenv("MORSE_SPECTRUM_THREADS", "1", 1);
  const auto a = run_cli(args);
  setenv("MORSE_SPECTRUM_THREADS", "4", 1);
  const auto b = run_cli(args);
  unsetenv("MORSE_SPECTRUM_THREADS");
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = json::parse(a.out);
  for (const char* key : {"config", "curve", "events", "checks", "identity_ok", "lemma_d_ok", "interlacing_ok"}) {
    CHECK(j.contains(key));
  }
  for (const auto& c : j["checks"]) {
    CHECK(c.contains("name"));
    CHECK(c.contains("ok"));
    CHECK(c.contains("detail"));
  }
  CHECK(j["config"]["steps"] == 12);
  CHECK(j["config"]["m_max"] == 4);

  setenv("MORSE_SPECTRUM_THREADS", "zero", 1);
  CHECK(run_cli(args).code == 2);
  unsetenv("MORSE_SPECTRUM_THREADS");
}

TEST_CASE("floats carry 17 significant digits") {
  CHECK(cli::format_double(0.1) == "0.10000000000000001");
  std::ostringstream os;
  cli::write_json(os, nlohmann::ordered_json{{"x", 1.0 / 3.0}, {"n", 2}});
  CHECK(os.str() == "{\n  \"x\": 0.33333333333333331,\n  \"n\": 2\n}\n");
}

TEST_CASE("plot from CSV files and of psi") {
  const auto curves = temp_path("curves.csv");
  const auto events = temp_path("events.csv");
  const auto svg = temp_path("plot.svg");
  REQUIRE(run_cli({"curves", "--family", "circle", "--t-min", "2", "--t-max", "8", "--steps", "15", "--k", "3",
                   "--n-per-unit", "100", "-o", curves.string()})
              .code == 0);
  REQUIRE(run_cli({"events", "--family", "circle", "--t-min", "2", "--t-max", "8", "--steps", "15", "--k", "3",
                   "--n-per-unit", "100", "--no-refine", "-o", events.string()})
              .code == 0);
  REQUIRE(run_cli({"plot", "--input", curves.string(), "--events", events.string(), "-o", svg.string()}).code == 0);
  std::ifstream f(svg);
  const std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  CHECK(text.find("width=\"800\" height=\"500\"") != std::string::npos);
  CHECK(text.find("<polyline") != std::string::npos);
  CHECK(text.find("<circle") != std::string::npos);

  const auto r = run_cli({"plot", "--psi", "--t-max", "20"});
  CHECK(r.code == 0);
  CHECK(r.out.find("</svg>") != std::string::npos);

  std::ofstream(curves) << "not,a,curve\n";
  CHECK(run_cli({"plot", "--input", curves.string()}).code == 2);
  std::filesystem::remove(curves);
  std::filesystem::remove(events);
  std::filesystem::remove(svg);
}

TEST_CASE("SVG clipping keeps large values in the frame") {
  cli::Series s{"big", false, {0, 1, 2}, {-1000, 0, 1000}};
  const auto text = cli::svg_plot({s}, {}, "clip");
  CHECK(text.find("nan") == std::string::npos);
  // y pixel coordinates stay inside the 500 px viewport
  std::size_t pos = text.find("points=\"");
  REQUIRE(pos != std::string::npos);
  std::istringstream pts(text.substr(pos + 8, text.find('"', pos + 8) - pos - 8));
  std::string pair;
  while (pts >> pair) {
    const double y = std::stod(pair.substr(pair.find(',') + 1));
    CHECK(y >= 0.0);
    CHECK(y <= 500.0);
  }
}
