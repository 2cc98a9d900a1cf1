#include <sstream>

#include "doctest.h"
#include "pst/cli.hpp"

using namespace pst;

namespace {

struct Output {
  int code;
  std::string text;
};

Output invoke(RunConfig c) {
  std::ostringstream out;
  const int code = run(c, out);
  return {code, out.str()};
}

RunConfig config(const std::string& command, const std::string& model) {
  RunConfig c;
  c.command = command;
  c.model_path = model;
  return c;
}

std::string field(const std::string& text, const std::string& kind, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(kind + " ", 0) != 0) continue;
    const auto at = line.find(" " + key + "=");
    if (at == std::string::npos) continue;
    const auto start = at + key.size() + 2;
    return line.substr(start, line.find(' ', start) - start);
  }
  return {};
}

}  // namespace

TEST_CASE("peierls command reports 8/9 for the Ising fixture") {
  RunConfig c = config("peierls", "ising2d.model");
  c.kmax = 9;
  const Output o = invoke(c);
  CHECK(o.code == 0);
  CHECK(field(o.text, "peierls", "tau") == "8/9");
  CHECK(field(o.text, "status", "result") == "PASS");
}

TEST_CASE("zcontour agrees with zexact") {
  for (const char* model : {"ising2d.model", "hardsquare.model"}) {
    RunConfig c = config("zexact", model);
    c.box = 3;
    c.betas = {Rational(1), Rational(1, 2)};
    const Output exact = invoke(c);
    c.command = "zcontour";
    const Output contour = invoke(c);
    REQUIRE(exact.code == 0);
    REQUIRE(contour.code == 0);
    const double a = std::stod(field(exact.text, "zexact", "log_z"));
    const double b = std::stod(field(contour.text, "zcontour", "log_z"));
    CHECK(b == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("validate fails the equal-neighbor model with a witness") {
  const Output o = invoke(config("validate", "equalneighbor.model"));
  CHECK(o.code == 1);
  CHECK(field(o.text, "richness", "verdict") == "FAIL");
  CHECK(o.text.find("\nwitness ") != std::string::npos);
  CHECK(invoke(config("validate", "ising2d.model")).code == 0);
}

TEST_CASE("output is deterministic") {
  RunConfig c = config("freeenergy", "ising2d.model");
  c.betas = {Rational(2)};
  c.kmax = 10;
  const Output first = invoke(c);
  const Output second = invoke(c);
  CHECK(first.code == 0);
  CHECK(first.text == second.text);
  CHECK(field(first.text, "freeenergy", "tau") == "8/9");
}

TEST_CASE("errors carry a reason code") {
  const Output unknown = invoke(config("nope", "ising2d.model"));
  CHECK(unknown.code == 2);
  CHECK(field(unknown.text, "error", "code") == "invalid_input");

  const Output missing = invoke(config("peierls", "/nonexistent/file.model"));
  CHECK(missing.code == 2);

  RunConfig negative = config("zexact", "ising2d.model");
  negative.betas = {Rational(-1)};
  CHECK(invoke(negative).code == 2);

  RunConfig cap = config("zexact", "ising2d.model");
  cap.box = 4;
  cap.cap = 10;
  const Output capped = invoke(cap);
  CHECK(capped.code == 2);
  CHECK(field(capped.text, "error", "code") == "cap_exceeded");

  RunConfig outside = config("correlate", "ising2d.model");
  outside.flips = {"7,7"};
  CHECK(invoke(outside).code == 2);
}

TEST_CASE("table output") {
  RunConfig c = config("phases", "ising2d.model");
  c.betas = {Rational(2)};
  c.format = OutputFormat::kTable;
  const Output o = invoke(c);
  CHECK(o.code == 0);
  CHECK(o.text.find("[phase]") != std::string::npos);
  CHECK(o.text.find("stable") != std::string::npos);
}

TEST_CASE("reduce and correlate commands") {
  RunConfig r = config("reduce", "ising2d.model");
  const Output red = invoke(r);
  CHECK(red.code == 0);
  CHECK(field(red.text, "reduction", "block") == "2");

  RunConfig c = config("correlate", "ising2d.model");
  c.betas = {Rational(1, 2)};
  const Output cor = invoke(c);
  CHECK(cor.code == 0);
  CHECK(field(cor.text, "correlate", "exact") == field(cor.text, "correlate", "resummed"));
}
