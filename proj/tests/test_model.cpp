#include <cmath>

#include "doctest.h"
#include "pst/error.hpp"
#include "pst/local_energy.hpp"
#include "pst/models.hpp"

using namespace pst;

namespace {

int sigma(Spin s) { return s == 0 ? 1 : -1; }

// Independent Ising energy: explicit bond list on a periodic L x L grid.
Rational ising_torus_energy(const std::vector<Spin>& spins, int L, Rational J) {
  Rational e = 0;
  for (int x = 0; x < L; ++x)
    for (int y = 0; y < L; ++y) {
      const int s = sigma(spins[x * L + y]);
      e -= J * s * sigma(spins[((x + 1) % L) * L + y]);
      e -= J * s * sigma(spins[x * L + (y + 1) % L]);
    }
  return e;
}

}  // namespace

TEST_CASE("ising torus energies") {
  const Model m = models::ising();
  const Region torus = Region::torus(2, {2, 2});
  Configuration c{torus, std::vector<Spin>(4, 0), FreeBc{}};
  CHECK(hamiltonian(m, c) == Energy(-8));
  for (int L : {2, 3}) {
    const Region t = Region::torus(2, {L, L});
    const int n = L * L;
    for (int code = 0; code < (1 << n); code += (L == 3 ? 7 : 1)) {
      std::vector<Spin> s(n);
      for (int i = 0; i < n; ++i) s[i] = (code >> (n - 1 - i)) & 1;
      CHECK(hamiltonian(m, Configuration{t, s, FreeBc{}}) == Energy(ising_torus_energy(s, L, 1)));
    }
  }
}

TEST_CASE("empty region has zero energy") {
  const Model m = models::ising();
  CHECK(hamiltonian(m, Configuration{Region(2, {}), {}, FreeBc{}}) == Energy(0));
}

TEST_CASE("hard squares") {
  const Model m = models::hard_square();
  const Region two(2, {make_site({0, 0}), make_site({1, 0})});
  CHECK(hamiltonian(m, Configuration{two, {1, 1}, FreeBc{}}).is_infinite());
  CHECK_FALSE(is_admissible(m, Configuration{two, {1, 1}, FreeBc{}}));
  CHECK(enumerate_admissible(m, two, FreeBc{}, 100).size() == 3);

  const Region box = Region::square(4);
  std::vector<Spin> checker(16);
  for (int i = 0; i < 16; ++i) checker[i] = ((i / 4) + (i % 4)) % 2;
  // Oracle: scan all adjacent pairs.
  bool clash = false;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y) {
      if (x + 1 < 4 && checker[x * 4 + y] && checker[(x + 1) * 4 + y]) clash = true;
      if (y + 1 < 4 && checker[x * 4 + y] && checker[x * 4 + y + 1]) clash = true;
    }
  CHECK_FALSE(clash);
  CHECK(is_admissible(m, Configuration{box, checker, FreeBc{}}));
}

TEST_CASE("enumeration counts") {
  const Region two(2, {make_site({0, 0}), make_site({0, 1})});
  CHECK(enumerate_admissible(models::ising(), two, FreeBc{}, 100).size() == 4);
  CHECK(enumerate_admissible(models::equal_neighbor(), Region::square(2), FreeBc{}, 100).size() == 2);
  CHECK_THROWS_AS(enumerate_admissible(models::ising(), Region::square(3), FreeBc{}, 100), Error);
}

TEST_CASE("enumeration agrees with brute force and is lexicographic") {
  const Model m = models::hard_square();
  for (int side : {2, 3}) {
    const Region box = Region::square(side);
    const int n = side * side;
    const auto all = enumerate_admissible(m, box, FreeBc{}, 1u << 20);
    std::size_t brute = 0;
    for (int code = 0; code < (1 << n); ++code) {
      std::vector<Spin> s(n);
      for (int i = 0; i < n; ++i) s[i] = (code >> (n - 1 - i)) & 1;
      brute += is_admissible(m, Configuration{box, s, FreeBc{}});
    }
    CHECK(all.size() == brute);
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].spins < all[i].spins);
  }
}

TEST_CASE("hamiltonian is finite exactly when admissible, with boundary spins") {
  const Model m = models::hard_square();
  const Region box = Region::square(3);
  for (Spin q : {Spin{0}, Spin{1}}) {
    const auto bc = constant_bc(q, m);
    const LocalEnergy local(m, box, bc);
    for (int code = 0; code < 512; ++code) {
      std::vector<Spin> s(9);
      for (int i = 0; i < 9; ++i) s[i] = (code >> (8 - i)) & 1;
      const Configuration c{box, s, bc};
      CHECK(hamiltonian(m, c).is_finite() == is_admissible(m, c));
      CHECK(local.admissible(s) == is_admissible(m, c));
    }
  }
}

TEST_CASE("locality: distant parts add up") {
  const Model m = models::ising(1, Rational(1, 3));
  std::vector<Site> a_sites{make_site({0, 0}), make_site({0, 1}), make_site({1, 0})};
  std::vector<Site> b_sites{make_site({5, 5}), make_site({5, 6})};
  std::vector<Site> both = a_sites;
  both.insert(both.end(), b_sites.begin(), b_sites.end());
  const std::vector<Spin> sa{0, 1, 1}, sb{1, 0};
  std::vector<Spin> sboth = sa;
  sboth.insert(sboth.end(), sb.begin(), sb.end());
  const Energy ea = hamiltonian(m, Configuration{Region(2, a_sites), sa, FreeBc{}});
  const Energy eb = hamiltonian(m, Configuration{Region(2, b_sites), sb, FreeBc{}});
  CHECK(hamiltonian(m, Configuration{Region(2, both), sboth, FreeBc{}}) == ea + eb);
}

TEST_CASE("explicit boundary conditions must cover the collar") {
  const Model m = models::ising();
  const Region one(2, {make_site({0, 0})});
  ExplicitBc bc;
  bc.spins[make_site({1, 0})] = 1;
  CHECK_THROWS_AS(hamiltonian(m, Configuration{one, {0}, bc}), Error);
  bc.spins[make_site({-1, 0})] = 1;
  bc.spins[make_site({0, 1})] = 0;
  bc.spins[make_site({0, -1})] = 0;
  CHECK(hamiltonian(m, Configuration{one, {0}, bc}) == Energy(0));
}

TEST_CASE("richness verdicts") {
  const auto ising = check_richness(models::ising(), 0, 4);
  CHECK(ising.pass);
  CHECK_FALSE(ising.partial);
  const auto hs = check_richness(models::hard_square(), 1, 4);
  CHECK(hs.pass);
  const auto eq = check_richness(models::equal_neighbor(), 1, 4);
  CHECK_FALSE(eq.pass);
  REQUIRE(eq.witness);
  CHECK_FALSE(eq.witness->no_inner_configuration);
  CHECK(eq.witness->inner_spins != std::vector<Spin>(eq.witness->inner_spins.size(), eq.witness->far_spins.at(0)));
}

TEST_CASE("model validation") {
  Model m = models::ising();
  CHECK_NOTHROW(m.validate());
  CHECK(m.radius() == 1);
  m.terms[0].values.pop_back();
  CHECK_THROWS_AS(m.validate(), Error);
  m = models::ising();
  m.terms[0].support[1].t[0] = 2;
  CHECK_THROWS_AS(m.validate(), Error);
  CHECK_NOTHROW(models::honeycomb_hard_core().validate());
}
