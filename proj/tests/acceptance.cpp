// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include "pst/contours.hpp"
#include "pst/error.hpp"
#include "pst/expansion.hpp"
#include "pst/groundstates.hpp"
#include "pst/local_energy.hpp"
#include "pst/models.hpp"
#include "pst/reduction.hpp"
#include "pst/transfer.hpp"

using namespace pst;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

Region box2(int side) { return Region::box(2, Cell{0, 0}, Cell{side, side}); }

std::string sci(const Real& r) { return r.str(3, std::ios_base::scientific); }

Real rel_error(const Real& a, const Real& b) { return abs(a - b) / abs(b); }

// Round trip and energy factorization for every admissible configuration,
// driven by the contour histogram pass; the histogram is returned for reuse.
struct BijectionStats {
  std::uint64_t configurations = 0;
  std::uint64_t round_trip_failures = 0;
  std::uint64_t energy_failures = 0;
  std::uint64_t contours = 0;
};

ContourHistogram checked_histogram(const ContourContext& ctx, const Region& r, Spin q, BijectionStats& st) {
  const LocalEnergy le(ctx.model, r, constant_bc(q, ctx.model));
  const std::int64_t ground = le.scaled(std::vector<Spin>(r.size(), q));
  Extractor ex(ctx, r, q);
  return contour_histogram(ctx, r, q, kDefaultEnumerationCap,
                           [&](std::span<const Spin> chi, const ContourFamily& f, std::int64_t phi, std::int64_t rem) {
                             ++st.configurations;
                             st.contours += f.contours.size();
                             const std::vector<Spin> back = ex.reconstruct(f);
                             if (!std::equal(back.begin(), back.end(), chi.begin(), chi.end())) ++st.round_trip_failures;
                             // H(chi) - H(ground), independently of the extractor.
                             if (le.scaled(chi) - ground != phi || rem != 0) ++st.energy_failures;
                           });
}

struct Instance {
  std::string name;
  Model model;
  int side;
  std::vector<Spin> signs;
  std::vector<Rational> betas;
  bool bijection;  // also part of criteria 1 and 2
};

std::vector<Instance> instances() {
  const std::vector<Rational> three = {Rational(1, 2), Rational(1), Rational(2)};
  return {{"ising 4x4", models::ising(), 4, {0, 1}, three, false},
          {"ising 5x5", models::ising(), 5, {0, 1}, three, true},
          {"hard-square 5x5", models::hard_square(), 5, {0}, {Rational(1, 2), Rational(1)}, false},
          {"hard-square 6x6", models::hard_square(), 6, {0}, {}, true}};
}

// Criteria 1-3 share the enumeration passes.
struct EnumerationResults {
  Verdict bijection, factorization, representation;
};

EnumerationResults run_enumerations() {
  EnumerationResults out;
  for (const auto& inst : instances()) {
    const ContourContext ctx = ContourContext::make(inst.model);
    const Region r = box2(inst.side);
    for (Spin q : inst.signs) {
      BijectionStats st;
      const ContourHistogram h = checked_histogram(ctx, r, q, st);
      const std::string label = inst.name + " bc " + inst.model.spins.symbol(q);
      if (inst.bijection && q == inst.signs.front()) {
        out.bijection.detail << " " << label << ": " << st.configurations << " configurations";
        out.bijection.require(st.round_trip_failures == 0, label + " round trip");
        out.factorization.detail << " " << label << ": " << st.configurations << " exact";
        out.factorization.require(st.energy_failures == 0, label + " energy");
      }
      for (const Rational& beta : inst.betas) {
        const OracleReport z = z_exact(r, constant_bc(q, inst.model), beta, inst.model);
        const Real err = rel_error(h.log_partition(beta), z.value);
        out.representation.require(err <= Real(1e-12), label + " beta " + to_string(beta));
        out.representation.detail << " " << label << " b=" << to_string(beta) << " err=" << sci(err) << ";";
      }
    }
  }
  return out;
}

Verdict reduction_equivalence() {
  Verdict v;
  for (const Model& m : {models::ising(), models::antiferromagnet()}) {
    const auto gs = find_ground_states(m, 2);
    const int l = choose_block(m, gs.states);
    v.require(l == 2, m.name + " block size");
    const BlockCode code = block_reduce(m, l);
    for (const auto& s : gs.states) v.require(lift_state(code, s).is_constant(), m.name + " reduced ground state");

    // Energy histograms, compared as exact rationals, on the 2x2-block torus.
    auto rational_counts = [](const EnergyHistogram& h) {
      std::map<Rational, std::uint64_t> out;
      for (const auto& [e, c] : h.counts) out[Rational(e, h.scale)] += c;
      return out;
    };
    const auto source = energy_histogram(m, Region::torus(2, Cell{4, 4}), FreeBc{});
    const auto target = energy_histogram(code.target, Region::torus(2, Cell{2, 2}), FreeBc{});
    v.require(rational_counts(source) == rational_counts(target), m.name + " 2x2-block histogram");

    // Transfer matrices on larger block tori.
    Real worst = 0;
    for (int rows = 2; rows <= 4; ++rows)
      for (const Rational beta : {Rational(1, 2), Rational(1)}) {
        const Real a = TransferMatrix::torus(m, l * rows, l * 2, beta).log_partition();
        const Real b = TransferMatrix::torus(code.target, rows, 2, beta).log_partition();
        worst = std::max<Real>(worst, rel_error(b, a));
      }
    v.require(worst <= Real(1e-12), m.name + " transfer");
    v.detail << " " << m.name << ": l=" << l << ", histogram on 2x2 blocks exact, blocks up to 4x2 err=" << sci(worst)
             << ";";
  }
  return v;
}

Verdict peierls() {
  Verdict v;
  const ContourContext ctx = ContourContext::make(models::ising());
  for (Spin q : ctx.ground) v.require(enumerate_contours(ctx, q, 8, Site{}).empty(), "kmax 8 not empty");
  const PeierlsReport p = peierls_estimate(ctx, 9);
  v.require(p.tau && *p.tau == Rational(8, 9), "tau");

  // Oracle: contours extracted from every configuration of a 4x4 window.
  std::optional<Rational> oracle;
  std::size_t smallest = 0;
  const Region r = box2(4);
  Extractor ex(ctx, r, 0);
  std::vector<Spin> chi(r.size());
  for (std::uint32_t code = 0; code < (1u << r.size()); ++code) {
    for (std::size_t i = 0; i < chi.size(); ++i) chi[i] = (code >> i) & 1;
    for (const auto& c : ex.extract(chi).contours) {
      if (smallest == 0 || c.support.size() < smallest) smallest = c.support.size();
      if (c.support.size() > 9) continue;
      const Rational density = ex.to_rational(ex.contour_energy(c)) / static_cast<std::int64_t>(c.support.size());
      if (!oracle || density < *oracle) oracle = density;
    }
  }
  v.require(smallest == 9, "smallest extracted support");
  v.require(oracle && p.tau && *oracle == *p.tau, "window oracle");
  v.detail << " tau(9)=" << (p.tau ? to_string(*p.tau) : "none") << ", window oracle "
           << (oracle ? to_string(*oracle) : "none") << ", smallest support " << smallest;
  return v;
}

Verdict richness() {
  Verdict v;
  const auto ising = check_richness(models::ising(), 0, 4);
  const auto hs = check_richness(models::hard_square(), 1, 4);
  const auto eq = check_richness(models::equal_neighbor(), 1, 4);
  v.require(ising.pass && !ising.partial, "ising richness");
  v.require(hs.pass && !hs.partial, "hard-square richness");
  v.require(!eq.pass && eq.witness.has_value(), "equal-neighbor richness");
  if (eq.witness) {
    v.detail << " equal-neighbor witness: inner";
    for (const auto& s : eq.witness->inner) v.detail << " (" << s.t[0] << "," << s.t[1] << ")";
    v.detail << " far spins";
    for (Spin s : eq.witness->far_spins) v.detail << " " << s;
    v.detail << ";";
  }
  for (const auto& [name, m] : {std::pair{"ising", models::ising()}, std::pair{"hard-square", models::hard_square()},
                                std::pair{"equal-neighbor", models::equal_neighbor()}}) {
    const BoundsReport b = bounds_check(m, 1, 3);
    const bool want = std::string(name) != "equal-neighbor";
    v.require(b.pass == want, std::string(name) + " bounds");
    v.detail << " bounds " << name << ": " << (b.pass ? "PASS" : "FAIL") << " c=" << sci(b.volume_constant) << ";";
  }
  return v;
}

Verdict convergence() {
  Verdict v;
  const ContourContext ctx = ContourContext::make(models::ising());
  const Rational beta(2);
  const Real bt = Real(2);
  // Oracles from the 8-periodic torus: the full torus and the strip difference.
  const Real z88 = TransferMatrix::torus(ctx.model, 8, 8, beta).log_partition();
  const Real z98 = TransferMatrix::torus(ctx.model, 9, 8, beta).log_partition();
  const Real f_torus = -z88 / (64 * bt);
  const Real f_strip = -(z98 - z88) / (8 * bt);
  std::vector<Real> err_torus, err_strip;
  for (int k = 9; k <= 12; ++k) {
    const auto plus = free_energy_truncated(ctx, 0, beta, k);
    const auto minus = free_energy_truncated(ctx, 1, beta, k);
    v.require(plus.free_energy == minus.free_energy && plus.series == minus.series, "bitwise symmetry at " +
                                                                                          std::to_string(k));
    err_torus.push_back(abs(plus.free_energy - f_torus));
    err_strip.push_back(abs(plus.free_energy - f_strip));
  }
  for (std::size_t i = 1; i < err_torus.size(); ++i) {
    v.require(err_torus[i] <= err_torus[i - 1], "torus error increases");
    v.require(err_strip[i] <= err_strip[i - 1], "strip error increases");
  }
  v.require(err_torus.back() < err_torus.front(), "torus error does not decrease");
  v.require(err_strip.back() < err_strip.front(), "strip error does not decrease");
  v.detail << " |f_k - f_torus8x8| k=9..12:";
  for (const auto& e : err_torus) v.detail << " " << sci(e);
  v.detail << "; |f_k - f_strip|:";
  for (const auto& e : err_strip) v.detail << " " << sci(e);
  v.detail << "; plus/minus bitwise equal";
  return v;
}

Verdict phases() {
  Verdict v;
  const Rational beta(2);
  const Model field = models::ising(1, Rational(1, 10));
  const auto biased = stable_phases(ContourContext::make(field, {0, 1}), beta, 9);
  v.require(biased.stable() == std::vector<Spin>{0}, "h=0.1 stable set");
  const auto sym = stable_phases(ContourContext::make(models::ising()), beta, 9);
  v.require(sym.stable() == std::vector<Spin>{0, 1}, "h=0 stable set");

  const Observable mag = [](std::span<const Spin> s) {
    double m = 0;
    for (Spin x : s) m += x == 0 ? 1 : -1;
    return m / static_cast<double>(s.size());
  };
  const Real m_plus = gibbs_expectation(mag, box2(4), constant_bc(0, field), beta, field);
  const Real m_minus = gibbs_expectation(mag, box2(4), constant_bc(1, field), beta, field);
  const TransferMatrix torus = TransferMatrix::torus(field, 8, 8, beta);
  const auto p = torus.row_marginal(0);
  Real m_torus = 0;
  for (std::size_t a = 0; a < p.size(); ++a)
    for (int c = 0; c < 8; ++c) m_torus += p[a] * (torus.spin(a, c) == 0 ? 1 : -1);
  m_torus /= 8;
  v.require(m_plus > 0, "plus-bc magnetization");
  v.require(m_torus > 0, "torus magnetization");
  v.detail << " h=0.1: stable {plus}, minus gap " << sci(biased.phases[1].gap) << "; m(plus bc 4x4)=" << sci(m_plus)
           << " m(minus bc 4x4)=" << sci(m_minus) << " m(torus 8x8)=" << sci(m_torus) << "; h=0: both stable";
  return v;
}

Verdict entropy() {
  Verdict v;
  std::uint64_t supports = 0;
  for (const Model& m : {models::ising(), models::hard_square()}) {
    const ContourContext ctx = ContourContext::make(m);
    for (int k = 1; k <= 9; ++k) {
      const PeierlsReport p = peierls_estimate(ctx, k);
      for (const auto& s : p.supports) {
        ++supports;
        double bound = 1;
        for (std::size_t i = 0; i < s.support.size(); ++i) bound *= static_cast<double>(m.num_spins());
        v.require(static_cast<double>(s.contours) <= bound, m.name + " support");
      }
      v.require(p.entropy_bound_holds, m.name + " report flag");
    }
  }
  v.detail << " " << supports << " contour supports up to size 9 checked";
  return v;
}

Verdict decay() {
  Verdict v;
  const DecayReport d = decay_diagnostic(models::ising(), 0, 1, 8, 8, {1, 2, 3, 4});
  v.require(d.determinate, "determinate");
  v.require(d.slope < 0, "slope");
  v.detail << " slope=" << d.slope << " residual_norm=" << d.residual_norm << " C(r):";
  for (const auto& c : d.correlations) v.detail << " " << sci(c);
  return v;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Verdict()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = f();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " error: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !v.pass;
    std::cout << "A" << id << " " << (v.pass ? "PASS" : "FAIL") << " " << name << ":" << v.detail.str() << " ("
              << static_cast<int>(secs) << "s)" << std::endl;
  };
  double shared_secs = 0;
  auto print = [&](int id, const std::string& name, const Verdict& v) {
    failures += !v.pass;
    std::cout << "A" << id << " " << (v.pass ? "PASS" : "FAIL") << " " << name << ":" << v.detail.str()
              << " (shared scan " << static_cast<int>(shared_secs) << "s)" << std::endl;
  };

  const auto t0 = std::chrono::steady_clock::now();
  EnumerationResults enums;
  try {
    enums = run_enumerations();
  } catch (const std::exception& e) {
    for (Verdict* v : {&enums.bijection, &enums.factorization, &enums.representation}) {
      v->pass = false;
      v->detail << " error: " << e.what();
    }
  }
  shared_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  print(1, "contour bijection", enums.bijection);
  print(2, "energy factorization", enums.factorization);
  print(3, "cluster representation", enums.representation);
  report(4, "reduction equivalence", reduction_equivalence);
  report(5, "Peierls estimate", peierls);
  report(6, "richness discrimination", richness);
  report(7, "expansion convergence", convergence);
  report(8, "phase diagnostics", phases);
  report(9, "entropy bound", entropy);
  report(10, "decay diagnostic", decay);
  return failures == 0 ? 0 : 1;
}
