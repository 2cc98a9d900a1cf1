#include <optional>

#include "doctest.h"
#include "pst/error.hpp"
#include "pst/local_energy.hpp"
#include "pst/models.hpp"
#include "pst/reduction.hpp"

using namespace pst;

namespace {

std::vector<Spin> decode(std::uint64_t code, std::size_t n) {
  std::vector<Spin> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = (code >> (n - 1 - i)) & 1;
  return s;
}

}  // namespace

TEST_CASE("choose_block") {
  const Model m = models::ising();
  CHECK(choose_block(m, {constant_state(m, 0)}) == 2);
  const Model af = models::antiferromagnet();
  CHECK(choose_block(af, find_ground_states(af, 2).states) == 2);
  PeriodicState p2{PeriodicPattern{2, {0, 1, 1, 0}}, "a"}, p3{PeriodicPattern{3, std::vector<Spin>(9, 0)}, "b"};
  CHECK(choose_block(m, {p2, p3}) == 6);
  CHECK_THROWS_AS(choose_block(m, {}), Error);
}

TEST_CASE("block spin spaces") {
  CHECK(block_reduce(models::ising(), 2).target.num_spins() == 16);
  // Oracle: independent sets of the 4-cycle formed by a 2x2 block.
  std::size_t count = 0;
  for (int code = 0; code < 16; ++code) {
    const auto s = decode(code, 4);  // (0,0) (0,1) (1,0) (1,1)
    const bool clash = (s[0] && s[1]) || (s[0] && s[2]) || (s[1] && s[3]) || (s[2] && s[3]);
    count += !clash;
  }
  CHECK(block_reduce(models::hard_square(), 2).target.num_spins() == count);
  CHECK(count == 7);
  const auto eq = block_reduce(models::equal_neighbor(), 2);
  REQUIRE(eq.target.num_spins() == 2);
  bool forbids_mixed = true;
  for (const auto& t : eq.target.terms)
    if (t.support.size() == 2) forbids_mixed = forbids_mixed && t.values[1].is_infinite() && t.values[2].is_infinite();
  CHECK(forbids_mixed);
  CHECK(block_reduce(models::honeycomb_hard_core(), 1).target.num_spins() == 3);
}

TEST_CASE("target interactions stay inside the unit cube") {
  for (const Model& m : {models::ising(), models::hard_square(), models::antiferromagnet()}) {
    const auto code = block_reduce(m, 2);
    CHECK(code.target.radius() <= 2);
    CHECK_NOTHROW(code.target.validate());
  }
}

TEST_CASE("energies agree on block tori") {
  for (const Model& m : {models::ising(1, Rational(1, 3)), models::hard_square(), models::antiferromagnet()}) {
    const auto code = block_reduce(m, 2);
    for (const Cell& periods : {Cell{2, 2}, Cell{2, 4}, Cell{4, 4}}) {
      const Region torus = Region::torus(2, periods);
      const LocalEnergy source(m, torus, FreeBc{});
      const std::size_t n = torus.size();
      const std::uint64_t step = n > 12 ? 97 : 1;
      for (std::uint64_t c = 0; c < (std::uint64_t{1} << n); c += step) {
        const Configuration x{torus, decode(c, n), FreeBc{}};
        const Energy e = source.energy(x.spins);
        std::optional<Configuration> y;
        try {
          y = lift(code, x);
        } catch (const Error&) {
          CHECK(e.is_infinite());  // only inadmissible blocks refuse to lift
          continue;
        }
        CHECK(hamiltonian(code.target, *y) == e);
        CHECK(project(code, *y) == x);
      }
    }
  }
}

TEST_CASE("lift and project are inverse on a two-block box") {
  const Model m = models::hard_square();
  const auto code = block_reduce(m, 2);
  const Region target = Region::box(2, {0, 0}, {1, 2});
  for (Spin a = 0; a < code.target.num_spins(); ++a)
    for (Spin b = 0; b < code.target.num_spins(); ++b) {
      const Configuration t{target, {a, b}, constant_bc(0, code.target)};
      const Configuration s = project(code, t);
      CHECK(lift(code, s) == t);
      CHECK(is_admissible(m, s) == is_admissible(code.target, t));
    }
}

TEST_CASE("misaligned regions are rejected") {
  const auto code = block_reduce(models::ising(), 2);
  CHECK_THROWS_AS(lift(code, Configuration{Region::square(3), std::vector<Spin>(9, 0), FreeBc{}}), Error);
  CHECK_THROWS_AS(lift(code, Configuration{Region::torus(2, {3, 2}), std::vector<Spin>(6, 0), FreeBc{}}), Error);
}

TEST_CASE("reduced ground states are constants") {
  for (const Model& m : {models::ising(), models::antiferromagnet()}) {
    const auto gs = find_ground_states(m, 2);
    const auto code = block_reduce(m, choose_block(m, gs.states));
    const auto target_gs = find_ground_states(code.target, 1);
    REQUIRE(target_gs.states.size() == gs.states.size());
    for (const auto& s : gs.states) {
      const auto t = lift_state(code, s);
      CHECK(t.is_constant());
      CHECK(std::find(target_gs.states.begin(), target_gs.states.end(), t) != target_gs.states.end());
    }
  }
}
