#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "pst/error.hpp"
#include "pst/exact.hpp"
#include "pst/models.hpp"
#include "pst/transfer.hpp"

using namespace pst;

namespace {

double as_double(const Real& r) { return r.convert_to<double>(); }

Region box2(int rows, int cols) { return Region::box(2, Cell{0, 0}, Cell{rows, cols}); }

// Ising energy of a box configuration with a constant outside spin, by bonds.
long ising_bonds(const std::vector<int>& sigma, int rows, int cols, int outside, int J2, int h10, long& field) {
  auto at = [&](int x, int y) {
    if (x < 0 || y < 0 || x >= rows || y >= cols) return outside;
    return sigma[x * cols + y];
  };
  long e = 0;
  field = 0;
  for (int x = -1; x < rows; ++x)
    for (int y = -1; y < cols; ++y) {
      const bool here = x >= 0 && y >= 0;
      if (y >= 0 && (here || x + 1 < rows)) e -= J2 * at(x, y) * at(x + 1, y);
      if (x >= 0 && (here || y + 1 < cols)) e -= J2 * at(x, y) * at(x, y + 1);
    }
  for (int v : sigma) field -= h10 * v;
  return e;
}

}  // namespace

TEST_CASE("partition functions of tiny instances") {
  const Model ising = models::ising();
  CHECK(as_double(z_exact(Region::torus(2, Cell{2, 2}), FreeBc{}, 0, ising).value) == doctest::Approx(std::log(16.0)));

  // Independent sets of the 2x2 torus, where each site sees its partner twice.
  int independent = 0;
  for (int code = 0; code < 16; ++code) {
    auto occ = [&](int x, int y) { return (code >> ((x % 2) * 2 + (y % 2))) & 1; };
    bool ok = true;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) ok = ok && !(occ(x, y) && (occ(x + 1, y) || occ(x, y + 1)));
    independent += ok;
  }
  const auto hs = z_exact(Region::torus(2, Cell{2, 2}), FreeBc{}, 0, models::hard_square(0));
  CHECK(hs.count == static_cast<std::uint64_t>(independent));
  CHECK(as_double(hs.value) == doctest::Approx(std::log(static_cast<double>(independent))));

  const auto single = z_exact(box2(1, 1), FreeBc{}, 1, ising);
  CHECK(as_double(single.value) == doctest::Approx(std::log(2.0)));
  CHECK(single.count == 2);
}

TEST_CASE("beta zero counts admissible configurations") {
  const Model m = models::hard_square();
  const Region r = box2(3, 3);
  const auto bc = constant_bc(0, m);
  const auto all = enumerate_admissible(m, r, bc, 1u << 20);
  CHECK(as_double(z_exact(r, bc, 0, m).value) == doctest::Approx(std::log(static_cast<double>(all.size()))));
}

TEST_CASE("Ising box partition function against a bond count") {
  for (int h10 : {0, 3}) {
    const Model m = models::ising(1, Rational(h10, 10));
    const int rows = 3, cols = 4;
    for (Spin q : {Spin{0}, Spin{1}}) {
      const Rational beta(7, 10);
      Real z = 0;
      for (int code = 0; code < (1 << (rows * cols)); ++code) {
        std::vector<int> sigma(rows * cols);
        for (int i = 0; i < rows * cols; ++i) sigma[i] = ((code >> (rows * cols - 1 - i)) & 1) ? -1 : 1;
        long field = 0;
        const long bonds = ising_bonds(sigma, rows, cols, q == 0 ? 1 : -1, 1, h10, field);
        z += exp(-Real(7) / 10 * (Real(bonds) + Real(field) / 10));
      }
      const Real got = z_exact(box2(rows, cols), constant_bc(q, m), beta, m).value;
      CHECK(abs(got - log(z)) < Real(1e-40));
    }
  }
}

TEST_CASE("Gibbs probabilities") {
  const Model m = models::ising();
  const Region r = box2(3, 3);
  const auto bc = constant_bc(0, m);
  const Event center = [](std::span<const Spin> s) { return s[4] == 1; };
  const Event not_center = [](std::span<const Spin> s) { return s[4] != 1; };
  const Real p = gibbs_probability(center, r, bc, 1, m);
  const Real q = gibbs_probability(not_center, r, bc, 1, m);
  CHECK(abs(p + q - 1) < Real(1e-45));
  CHECK(p > 0);
  CHECK(p < Real(0.5));
  CHECK(gibbs_probability([](std::span<const Spin>) { return true; }, r, bc, 1, m) == 1);
  CHECK(abs(gibbs_probability(center, r, bc, 0, m) - Real(0.5)) < Real(1e-45));
  const Real mag = gibbs_expectation([](std::span<const Spin> s) { return s[4] == 0 ? 1.0 : -1.0; }, r, bc, 1, m);
  CHECK(abs(mag - (1 - 2 * p)) < Real(1e-40));
}

TEST_CASE("raising an interaction value never raises Z") {
  const Region r = box2(3, 3);
  Model base = models::ising(1, Rational(1, 5));
  const auto bc = constant_bc(0, base);
  const Real z0 = z_exact(r, bc, 1, base).value;
  for (std::size_t t = 0; t < base.terms.size(); ++t)
    for (std::size_t v = 0; v < base.terms[t].values.size(); ++v) {
      Model up = base;
      up.terms[t].values[v] = up.terms[t].values[v].value() + Rational(1, 2);
      CHECK(z_exact(r, bc, 1, up).value <= z0);
    }
}

TEST_CASE("no admissible configuration gives minus infinity with a warning") {
  const Model m = models::equal_neighbor();
  const Region r = box2(1, 2);
  ExplicitBc bc;
  bc.spins[make_site({-1, 0})] = 0;
  bc.spins[make_site({-1, 1})] = 0;
  bc.spins[make_site({1, 0})] = 1;
  bc.spins[make_site({1, 1})] = 1;
  bc.spins[make_site({0, -1})] = 0;
  bc.spins[make_site({0, 2})] = 0;
  const auto rep = z_exact(r, bc, 1, m);
  CHECK(rep.count == 0);
  CHECK(isinf(rep.value));
  CHECK(rep.warnings.size() == 1);
}

TEST_CASE("histogram cache") {
  const auto dir = std::filesystem::temp_directory_path() / "pst-cache-test";
  std::filesystem::remove_all(dir);
  setenv("PST_CACHE_DIR", dir.c_str(), 1);
  const Model m = models::ising();
  const Region r = box2(3, 3);
  const auto bc = constant_bc(1, m);
  const EnergyHistogram first = energy_histogram(m, r, bc);
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    ++files;
    CHECK(entry.path().filename().string().find(".tmp") == std::string::npos);
  }
  CHECK(files == 1);
  const EnergyHistogram second = energy_histogram(m, r, bc);
  CHECK(second.counts == first.counts);
  CHECK(second.scale == first.scale);
  CHECK(first.total() == 512);

  for (const auto& entry : std::filesystem::directory_iterator(dir)) std::ofstream(entry.path()) << "garbage";
  CHECK(energy_histogram(m, r, bc).counts == first.counts);
  CHECK(instance_key(m, r, bc) != instance_key(m, r, constant_bc(0, m)));
  unsetenv("PST_CACHE_DIR");
  std::filesystem::remove_all(dir);
}

TEST_CASE("bounds check") {
  const auto ising = bounds_check(models::ising(), 1, 3);
  CHECK(ising.pass);
  CHECK(ising.volume_constant > 0);
  CHECK(ising.rows.size() == 3);
  CHECK(ising.rows[2].conditions == 4096);
  CHECK(ising.boundary_constant > 0);

  const auto hs = bounds_check(models::hard_square(), 1, 3);
  CHECK(hs.pass);
  CHECK(hs.volume_constant > 0);
  REQUIRE(hs.rows.size() == 1);
  CHECK(hs.rows[0].side == 3);

  const auto en = bounds_check(models::equal_neighbor(), 1, 3);
  CHECK_FALSE(en.pass);
  CHECK(en.witness.has_value());
  CHECK(en.volume_constant <= 0);
}

TEST_CASE("transfer matrices agree with enumeration") {
  const Rational beta(3, 4);
  for (const Model& m : {models::ising(), models::ising(1, Rational(1, 3)), models::hard_square(), models::hard_square(2)}) {
    for (auto [rows, cols] : {std::pair{4, 4}, std::pair{3, 5}, std::pair{2, 3}}) {
      const Real want = z_exact(Region::torus(2, Cell{rows, cols}), FreeBc{}, beta, m).value;
      CHECK(abs(TransferMatrix::torus(m, rows, cols, beta).log_partition() - want) < Real(1e-40));
      for (Spin q : {Spin{0}, Spin{1}}) {
        const PeriodicPattern bc = PeriodicPattern::constant(q, 2);
        const auto ex = z_exact(box2(rows, cols), bc, beta, m);
        const TransferMatrix tm = TransferMatrix::box(m, rows, cols, bc, beta);
        if (ex.count == 0) {
          CHECK(isinf(tm.log_partition()));
        } else {
          CHECK(abs(tm.log_partition() - ex.value) < Real(1e-40));
        }
      }
    }
  }
  // Checkerboard boundary on a 3x4 box.
  const Model m = models::ising(1, Rational(1, 7));
  const PeriodicPattern checker{2, {0, 1, 1, 0}};
  const Real want = z_exact(box2(3, 4), checker, beta, m).value;
  CHECK(abs(TransferMatrix::box(m, 3, 4, checker, beta).log_partition() - want) < Real(1e-40));
}

TEST_CASE("transfer-matrix row marginals") {
  const Model m = models::ising(1, Rational(1, 5));
  const Rational beta(1);
  const int rows = 4, cols = 3;
  const PeriodicPattern bc = PeriodicPattern::constant(1, 2);
  const TransferMatrix tm = TransferMatrix::box(m, rows, cols, bc, beta);
  for (int row = 0; row < rows; ++row) {
    const auto p = tm.row_marginal(row);
    Real total = 0;
    for (std::size_t a = 0; a < p.size(); ++a) {
      total += p[a];
      const Event e = [&](std::span<const Spin> s) {
        for (int c = 0; c < cols; ++c)
          if (s[row * cols + c] != tm.spin(a, c)) return false;
        return true;
      };
      CHECK(abs(p[a] - gibbs_probability(e, box2(rows, cols), bc, beta, m)) < Real(1e-40));
    }
    CHECK(abs(total - 1) < Real(1e-40));
  }
  const TransferMatrix torus = TransferMatrix::torus(m, 4, 3, beta);
  const auto p = torus.row_marginal(2);
  const Event e = [&](std::span<const Spin> s) { return s[3] == 0 && s[4] == 1 && s[5] == 1; };
  CHECK(abs(p[3] - gibbs_probability(e, Region::torus(2, Cell{4, 3}), FreeBc{}, beta, m)) < Real(1e-40));
}
