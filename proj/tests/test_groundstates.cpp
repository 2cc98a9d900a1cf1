#include <algorithm>
#include <set>

#include "doctest.h"
#include "pst/animals.hpp"
#include "pst/error.hpp"
#include "pst/groundstates.hpp"
#include "pst/models.hpp"

using namespace pst;

namespace {

int sigma(Spin s) { return s == 0 ? 1 : -1; }

// Independent energy density of an L x L periodic Ising pattern with field h.
Rational ising_density(const std::vector<Spin>& s, int L, Rational J, Rational h) {
  Rational e = 0;
  for (int x = 0; x < L; ++x)
    for (int y = 0; y < L; ++y) {
      const int v = sigma(s[x * L + y]);
      e -= J * v * sigma(s[((x + 1) % L) * L + y]);
      e -= J * v * sigma(s[x * L + (y + 1) % L]);
      e -= h * v;
    }
  return e / (L * L);
}

std::set<std::vector<Spin>> oracle_minimisers(Rational J, Rational h) {
  std::set<std::vector<Spin>> best;
  Rational emin = 100;
  for (int code = 0; code < 16; ++code) {
    std::vector<Spin> s(4);
    for (int i = 0; i < 4; ++i) s[i] = (code >> (3 - i)) & 1;
    const Rational e = ising_density(s, 2, J, h);
    if (e < emin) {
      emin = e;
      best.clear();
    }
    if (e == emin) best.insert(s);
  }
  return best;
}

std::set<std::vector<Spin>> found(const GroundStateSearch& g) {
  std::set<std::vector<Spin>> out;
  for (const auto& st : g.states) {
    PeriodicPattern p = st.pattern;
    std::vector<Spin> full;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) full.push_back(p.at(make_site({x, y}), 2, 1));
    out.insert(full);
  }
  return out;
}

}  // namespace

TEST_CASE("fixed polyomino counts") {
  const AnimalEnumerator a(2, 1, 8, Connectivity::kL1);
  const std::uint64_t expected[] = {1, 2, 6, 19, 63, 216, 760, 2725};
  for (int n = 1; n <= 8; ++n) CHECK(a.count(make_site({3, -2}), n) == expected[n - 1]);
}

TEST_CASE("animals are connected, distinct and anchored") {
  const AnimalEnumerator a(2, 1, 5, Connectivity::kLinfty);
  std::set<std::vector<Site>> seen;
  const Site anchor = make_site({0, 0});
  a.run(anchor, [&](std::span<const Site> s) {
    std::vector<Site> v(s.begin(), s.end());
    std::sort(v.begin(), v.end());
    CHECK(v.front() == anchor);
    CHECK(seen.insert(v).second);
    return true;
  });
  CHECK(seen.size() > 100);
}

TEST_CASE("specific energies") {
  const Model m = models::ising();
  CHECK(specific_energy(constant_state(m, 0), m) == Rational(-2));
  CHECK(specific_energy(constant_state(m, 1), m) == Rational(-2));
  const Model hs = models::hard_square(1);
  CHECK(specific_energy(constant_state(hs, 0), hs) == Rational(0));
  const PeriodicState checker = make_state(models::antiferromagnet(), PeriodicPattern{2, {0, 1, 1, 0}});
  CHECK(specific_energy(checker, models::antiferromagnet()) == Rational(-2));
  const PeriodicState shifted = make_state(models::antiferromagnet(), PeriodicPattern{2, {1, 0, 0, 1}});
  CHECK(specific_energy(shifted, models::antiferromagnet()) == specific_energy(checker, models::antiferromagnet()));
  CHECK_THROWS_AS(specific_energy(make_state(hs, PeriodicPattern{1, {1}}), hs), Error);
}

TEST_CASE("ising ground states match the oracle") {
  const auto g0 = find_ground_states(models::ising(), 2);
  CHECK(g0.states.size() == 2);
  CHECK(found(g0) == oracle_minimisers(1, 0));
  CHECK(g0.warnings.empty());
  const auto gh = find_ground_states(models::ising(1, Rational(1, 10)), 2);
  REQUIRE(gh.states.size() == 1);
  CHECK(gh.states[0].label == "plus");
  CHECK(found(gh) == oracle_minimisers(1, Rational(1, 10)));
}

TEST_CASE("other ground-state sets") {
  const auto eq = find_ground_states(models::equal_neighbor(), 2);
  CHECK(eq.states.size() == 2);
  for (const auto& s : eq.states) CHECK(s.is_constant());
  const auto af = find_ground_states(models::antiferromagnet(), 3);
  REQUIRE(af.states.size() == 2);
  for (const auto& s : af.states) CHECK(s.period() == 2);
  CHECK(af.warnings.empty());
  const auto degenerate = find_ground_states(models::hard_square(0), 3);
  CHECK_FALSE(degenerate.warnings.empty());
}

TEST_CASE("ground-state verification") {
  const Model m = models::ising();
  CHECK(verify_ground_state(constant_state(m, 0), m, 4).pass);
  // A single flip in the all-minus state costs 8J - 2h: positive for small h.
  const Model weak = models::ising(1, Rational(1, 10));
  CHECK(verify_ground_state(constant_state(weak, 1), weak, 1).pass);
  const Model strong = models::ising(1, 5);
  const auto v = verify_ground_state(constant_state(strong, 1), strong, 1);
  CHECK_FALSE(v.pass);
  REQUIRE(v.witness);
  CHECK(v.witness->region.size() == 1);
  CHECK(v.witness->excited.value() - v.witness->ground.value() == Rational(8 - 10));
  CHECK(verify_ground_state(constant_state(m, 0), m, 0).pass);
}
