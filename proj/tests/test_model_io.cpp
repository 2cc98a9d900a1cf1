#include <string>

#include "doctest.h"
#include "pst/error.hpp"
#include "pst/model_io.hpp"
#include "pst/models.hpp"

using namespace pst;

namespace {

std::string fixture(const std::string& name) { return std::string(PST_SOURCE_DIR) + "/models/" + name; }

int error_line(const std::string& text) {
  try {
    parse_model(text);
  } catch (const Error& e) {
    CHECK(e.code() == errc::kParse);
    const std::string msg = e.what();
    REQUIRE(msg.rfind("line ", 0) == 0);
    return std::stoi(msg.substr(5));
  }
  return -1;
}

const char* kHeader =
    "dimension 2\n"
    "basis 1 0\n"
    "basis 0 1\n"
    "spins a b\n";

}  // namespace

TEST_CASE("bundled fixtures match the built-in models") {
  CHECK(load_model(fixture("ising2d.model")) == models::ising());
  CHECK(load_model(fixture("hardsquare.model")) == models::hard_square());
  CHECK(load_model(fixture("equalneighbor.model")) == models::equal_neighbor());
  CHECK(load_model(fixture("hardsquare-honeycomb.model")) == models::honeycomb_hard_core());

  const Model ising = load_model(fixture("ising2d.model"));
  CHECK(ising.num_spins() == 2);
  CHECK(ising.terms.size() == 2);
  for (const auto& t : ising.terms) CHECK(t.support.size() == 2);
  const Model hs = load_model(fixture("hardsquare.model"));
  CHECK(hs.terms[0].values[3].is_infinite());
  CHECK(hs.terms[0].values[0].is_finite());
}

TEST_CASE("serialization round trip") {
  for (const Model& m : {models::ising(Rational(3, 2), Rational(-1, 10), 3), models::hard_square(), models::equal_neighbor(),
                         models::honeycomb_hard_core(Rational(1, 4)), models::antiferromagnet()}) {
    const std::string text = serialize_model(m);
    const Model back = parse_model(text);
    CHECK(back == m);
    CHECK(serialize_model(back) == text);
  }
  Model no_collar = models::ising();
  no_collar.collar.reset();
  CHECK(parse_model(serialize_model(no_collar)) == no_collar);
}

TEST_CASE("comments, defaults and decimals") {
  const Model m = parse_model(std::string(kHeader) +
                              "# a term\n"
                              "term\n"
                              "  site 0 0   # first\n"
                              "  site 1 0\n"
                              "  value a b 0.25\n"
                              "  default -1/2\n"
                              "end\n");
  REQUIRE(m.terms.size() == 1);
  CHECK(m.terms[0].values[1] == Energy(Rational(1, 4)));
  CHECK(m.terms[0].values[0] == Energy(Rational(-1, 2)));
  CHECK(m.geometry.is_cubic());
}

TEST_CASE("parse errors carry line numbers") {
  CHECK(error_line("dimension 2\nbasis 1 0\nbasis 0 1 5\nspins a b\n") == 3);
  CHECK(error_line("dimension 2\nbasis 1 0\nbasis 2 0\nspins a b\nterm\nsite 0 0\ndefault 0\nend\n") == 3);
  CHECK(error_line(std::string(kHeader) + "term\nsite 0 0\nvalue c 1\nend\n") == 7);
  CHECK(error_line(std::string(kHeader) + "term\nsite 2 0\ndefault 0\nend\n") == 6);
  CHECK(error_line(std::string(kHeader) + "term\nsite 0 0\nvalue a 1\nend\n") == 8);
  CHECK(error_line(std::string(kHeader) + "term\nsite 0 0\ndefault zero\nend\n") == 7);
  CHECK(error_line(std::string(kHeader) + "frobnicate\n") == 5);
  CHECK(error_line(std::string(kHeader) + "term\nsite 0 0\ndefault 0\n") == 5);
  CHECK(error_line("basis 1 0\n") == 1);
  CHECK(error_line(std::string(kHeader) + "offset 0 0 0\n") == 5);
  CHECK(error_line("dimension 2\nbasis 1 0\nbasis 0 1\noffset 0 0\noffset 1 0\nspins a\n") == 5);
  CHECK_THROWS_AS(load_model(fixture("missing.model")), Error);
}
