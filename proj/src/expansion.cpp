#include "pst/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "pst/error.hpp"
#include "pst/groundstates.hpp"
#include "pst/local_energy.hpp"
#include "pst/energy.hpp"
#include "pst/transfer.hpp"

namespace pst {

namespace {

Real to_real(const Rational& r) { return Real(r.numerator()) / Real(r.denominator()); }

// Neumaier summation of terms ordered by increasing magnitude.
Real compensated_sum(std::vector<Real> terms) {
  std::sort(terms.begin(), terms.end(), [](const Real& a, const Real& b) { return abs(a) < abs(b); });
  Real sum = 0, carry = 0;
  for (const Real& t : terms) {
    const Real next = sum + t;
    if (abs(sum) >= abs(t)) {
      carry += (sum - next) + t;
    } else {
      carry += (t - next) + sum;
    }
    sum = next;
  }
  return sum + carry;
}

Real log_sum(const std::map<std::int64_t, std::uint64_t>& weights, const Rational& beta, std::int64_t scale) {
  if (weights.empty()) return -std::numeric_limits<Real>::infinity();
  const std::int64_t emin = weights.begin()->first;
  std::vector<Real> terms;
  for (const auto& [e, c] : weights) terms.push_back(boltzmann(beta, e - emin, scale) * c);
  return log(compensated_sum(std::move(terms))) - to_real(beta * Rational(emin, scale));
}

bool contains_all(const ContourFamily& f, const std::vector<Contour>& fam) {
  for (const auto& c : fam)
    if (std::find(f.contours.begin(), f.contours.end(), c) == f.contours.end()) return false;
  return true;
}

struct Member {
  std::size_t polymer;
  Cell shift;
  friend auto operator<=>(const Member&, const Member&) = default;
};
using Cluster = std::vector<Member>;

}  // namespace

// ---------------------------------------------------------------------------
// Resummation
// ---------------------------------------------------------------------------

Real ContourHistogram::log_partition(const Rational& beta) const {
  return log_sum(weights, beta, scale) - to_real(beta * Rational(ground, scale));
}

ContourHistogram contour_histogram(const ContourContext& ctx, const Region& region, Spin q, std::uint64_t cap,
                                   const FamilyVisitor& visit) {
  const Model& m = ctx.model;
  const LocalEnergy le(m, region, constant_bc(q, m));
  Extractor ex(ctx, region, q);
  ContourHistogram h;
  h.scale = ex.scale();
  h.ground = le.scaled(std::vector<Spin>(region.size(), q));
  if (h.ground == LocalEnergy::kInfinite) throw Error(errc::kInadmissible, "constant configuration is not admissible");
  std::unordered_map<std::int64_t, std::uint64_t> weights;
  le.for_each_admissible(cap, [&](std::span<const Spin> spins, std::int64_t) {
    Extractor::Weight w;
    const ContourFamily f = ex.extract(spins, w);
    const std::int64_t phi = w.phi, r = w.remainder;
    ++weights[phi + r];
    ++h.families;
    if (r != 0) ++h.remainder_nonzero;
    if (visit) visit(spins, f, phi, r);
  });
  h.weights.insert(weights.begin(), weights.end());
  return h;
}

PartitionReport contour_partition(const ContourContext& ctx, const Region& region, Spin q, const Rational& beta,
                                  std::uint64_t cap) {
  if (beta < Rational(0)) throw Error(errc::kInvalidInput, "beta must be nonnegative");
  const ContourHistogram h = contour_histogram(ctx, region, q, cap);
  PartitionReport r;
  r.log_z = h.log_partition(beta);
  r.log_ground = -to_real(beta * Rational(h.ground, h.scale));
  r.families = h.families;
  return r;
}

// ---------------------------------------------------------------------------
// Weights and clusters
// ---------------------------------------------------------------------------

Real log_dressed_weight(const ContourContext& ctx, const Contour& c, const Rational& beta, std::size_t max_interior) {
  Real lw = -to_real(beta * contour_energy(ctx, c));
  for (const auto& comp : c.interior) {
    if (comp.label == c.sign) continue;
    if (comp.sites.size() > max_interior)
      throw Error(errc::kCapExceeded, "interior of " + std::to_string(comp.sites.size()) +
                                          " sites is too large for exact evaluation; lower kmax");
    const Region inside(ctx.dimension(), comp.sites);
    lw += z_exact(inside, constant_bc(comp.label, ctx.model), beta, ctx.model).value -
          z_exact(inside, constant_bc(c.sign, ctx.model), beta, ctx.model).value;
  }
  return lw;
}

std::int64_t connected_subgraph_sum(const std::vector<std::uint32_t>& adjacency) {
  const std::size_t n = adjacency.size();
  if (n == 0) return 0;
  if (n > 20) throw Error(errc::kCapExceeded, "cluster too large for the Ursell coefficient");
  const std::uint32_t full = (1u << n) - 1;
  // g[S] = 1 when S spans no edge, c[S] = signed count of connected spanning subgraphs.
  std::vector<std::int8_t> g(full + 1, 0);
  for (std::uint32_t s = 0; s <= full; ++s) {
    bool independent = true;
    for (std::size_t v = 0; v < n && independent; ++v)
      if ((s >> v) & 1) independent = (adjacency[v] & s & ~(1u << v)) == 0;
    g[s] = independent;
  }
  std::vector<std::int64_t> c(full + 1, 0);
  for (std::uint32_t s = 1; s <= full; ++s) {
    const std::uint32_t low = s & (~s + 1);
    std::int64_t total = g[s];
    const std::uint32_t rest = s & ~low;
    for (std::uint32_t sub = rest;; sub = (sub - 1) & rest) {
      const std::uint32_t t = sub | low;
      if (t != s) total -= c[t] * g[s & ~t];
      if (sub == 0) break;
    }
    c[s] = total;
  }
  return c[full];
}

ClusterSum cluster_sum(const std::vector<Polymer>& catalog, int dimension, int max_size) {
  const int d = dimension;
  std::vector<std::vector<Site>> supports;
  for (const auto& p : catalog) {
    if (p.support.empty()) throw Error(errc::kInvalidInput, "polymer with empty support");
    std::vector<Site> s = p.support;
    std::sort(s.begin(), s.end());
    const Cell base = s.front().t;
    for (auto& x : s)
      for (int i = 0; i < d; ++i) x.t[i] -= base[i];
    supports.push_back(std::move(s));
  }
  auto sites_of = [&](const Member& mb) {
    std::vector<Site> out = supports[mb.polymer];
    for (auto& x : out)
      for (int i = 0; i < d; ++i) x.t[i] += mb.shift[i];
    return out;
  };
  auto size_of = [&](const Cluster& c) {
    std::size_t n = 0;
    for (const auto& mb : c) n += supports[mb.polymer].size();
    return n;
  };
  auto canonical = [&](Cluster c) {
    Site least = sites_of(c.front()).front();
    for (const auto& mb : c) least = std::min(least, sites_of(mb).front());
    for (auto& mb : c)
      for (int i = 0; i < d; ++i) mb.shift[i] -= least.t[i];
    std::sort(c.begin(), c.end());
    return c;
  };
  auto distance = [&](const std::vector<Site>& a, const std::vector<Site>& b) {
    int best = std::numeric_limits<int>::max();
    for (const auto& x : a)
      for (const auto& y : b) {
        int dist = 0;
        for (int i = 0; i < d; ++i) dist += std::abs(x.t[i] - y.t[i]);
        best = std::min(best, dist);
      }
    return best;
  };

  std::set<Cluster> seen;
  std::vector<Cluster> frontier;
  for (std::size_t p = 0; p < catalog.size(); ++p)
    if (static_cast<int>(supports[p].size()) <= max_size) {
      Cluster c = canonical({Member{p, Cell{}}});
      if (seen.insert(c).second) frontier.push_back(c);
    }
  while (!frontier.empty()) {
    std::vector<Cluster> next;
    for (const auto& c : frontier) {
      const std::size_t used = size_of(c);
      std::set<Site> halo;
      for (const auto& mb : c)
        for (const auto& x : sites_of(mb)) {
          halo.insert(x);
          for (int i = 0; i < d; ++i)
            for (int dir : {-1, 1}) {
              Site y = x;
              y.t[i] += dir;
              halo.insert(y);
            }
        }
      for (std::size_t p = 0; p < catalog.size(); ++p) {
        if (used + supports[p].size() > static_cast<std::size_t>(max_size)) continue;
        std::set<Cell> shifts;
        for (const auto& y : halo)
          for (const auto& a : supports[p]) {
            Cell s{};
            for (int i = 0; i < d; ++i) s[i] = y.t[i] - a.t[i];
            shifts.insert(s);
          }
        for (const auto& s : shifts) {
          Cluster grown = c;
          grown.push_back(Member{p, s});
          grown = canonical(std::move(grown));
          if (seen.insert(grown).second) next.push_back(std::move(grown));
        }
      }
    }
    frontier = std::move(next);
  }

  ClusterSum out;
  out.by_size.assign(static_cast<std::size_t>(std::max(max_size, 0)) + 1, Real(0));
  std::vector<Real> terms;
  std::vector<std::vector<Real>> terms_by_size(out.by_size.size());
  for (const auto& c : seen) {
    const std::size_t n = c.size();
    std::vector<std::vector<Site>> sites;
    for (const auto& mb : c) sites.push_back(sites_of(mb));
    std::vector<std::uint32_t> adj(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (distance(sites[i], sites[j]) <= 1) {
          adj[i] |= 1u << j;
          adj[j] |= 1u << i;
        }
    const std::int64_t ursell = connected_subgraph_sum(adj);
    if (ursell == 0) continue;
    Real multiplicity = 1;
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && c[j] == c[i]) ++j;
      for (std::size_t k = 2; k <= j - i; ++k) multiplicity *= static_cast<double>(k);
      i = j;
    }
    Real term = Real(ursell) / multiplicity;
    for (const auto& mb : c) term *= catalog[mb.polymer].weight;
    terms.push_back(term);
    terms_by_size[size_of(c)].push_back(term);
    ++out.clusters;
  }
  out.value = compensated_sum(std::move(terms));
  for (std::size_t k = 0; k < terms_by_size.size(); ++k) out.by_size[k] = compensated_sum(std::move(terms_by_size[k]));
  return out;
}

// ---------------------------------------------------------------------------
// Free energies
// ---------------------------------------------------------------------------

ConvergenceCheck kp_check(int dimension, std::size_t num_spins, const Rational& tau, const Rational& beta, int k0) {
  ConvergenceCheck out;
  out.formula = "(2d+1) sum_{k>=k0} k rho^k <= a, rho = e(2d-1)|S| exp(a - beta tau)";
  if (k0 < 1) return out;
  const double bt = to_double(beta * tau);
  const double c = std::exp(1.0) * (2.0 * dimension - 1) * static_cast<double>(num_spins);
  for (int j = 1; j <= 4000; ++j) {
    const double a = 1e-6 * std::pow(10.0, j / 500.0);
    const double rho = c * std::exp(a - bt);
    if (rho >= 1) break;
    const double tail = std::pow(rho, k0) * (k0 - (k0 - 1) * rho) / ((1 - rho) * (1 - rho));
    if ((2.0 * dimension + 1) * tail <= a) {
      out.certified = true;
      out.a = a;
      out.rho = rho;
      return out;
    }
  }
  return out;
}

FreeEnergyReport free_energy_truncated(const ContourContext& ctx, Spin q, const Rational& beta, int kmax) {
  if (!(beta > Rational(0))) throw Error(errc::kInvalidInput, "beta must be positive");
  if (!ctx.is_ground(q)) throw Error(errc::kInvalidInput, "label is not in the reference set");
  FreeEnergyReport r;
  r.label = q;
  r.beta = beta;
  r.kmax = kmax;
  r.ground_energy = specific_energy(constant_state(ctx.model, q), ctx.model);
  const auto contours = enumerate_contours(ctx, q, kmax, Site{});
  std::vector<Polymer> catalog;
  int k0 = 0;
  for (const auto& c : contours) {
    catalog.push_back(Polymer{c.support, exp(log_dressed_weight(ctx, c, beta))});
    const Rational density = contour_energy(ctx, c) / static_cast<std::int64_t>(c.support.size());
    if (!r.tau || density < *r.tau) r.tau = density;
    const int size = static_cast<int>(c.support.size());
    if (k0 == 0 || size < k0) k0 = size;
  }
  r.contours = contours.size();
  const ClusterSum cs = cluster_sum(catalog, ctx.dimension(), kmax);
  r.series = cs.value;
  r.clusters = cs.clusters;
  r.free_energy = to_real(r.ground_energy) - r.series / to_real(beta);
  if (r.tau) r.convergence = kp_check(ctx.dimension(), ctx.model.num_spins(), *r.tau, beta, k0);
  return r;
}

std::vector<Spin> PhaseReport::stable() const {
  std::vector<Spin> out;
  for (const auto& p : phases)
    if (p.stable) out.push_back(p.report.label);
  return out;
}

PhaseReport stable_phases(const ContourContext& ctx, const Rational& beta, int kmax, double tolerance) {
  PhaseReport out;
  out.tolerance = tolerance;
  for (Spin q : ctx.ground) out.phases.push_back(PhaseEntry{free_energy_truncated(ctx, q, beta, kmax), 0, false});
  if (out.phases.empty()) return out;
  Real best = out.phases.front().report.free_energy;
  for (const auto& p : out.phases) best = std::min(best, p.report.free_energy);
  for (auto& p : out.phases) {
    p.gap = p.report.free_energy - best;
    p.stable = p.gap <= Real(tolerance);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Correlations
// ---------------------------------------------------------------------------

CorrelationReport contour_correlation(const ContourContext& ctx, const std::vector<Contour>& fam, const Region& region,
                                      Spin q, const Rational& beta, std::uint64_t cap) {
  CorrelationReport out;
  if (fam.empty()) {
    out.exact = out.resummed = 1;
    return out;
  }
  Extractor ex(ctx, region, q);
  try {
    ContourFamily f{fam, region, q};
    std::sort(f.contours.begin(), f.contours.end(),
              [](const Contour& a, const Contour& b) { return a.support.front() < b.support.front(); });
    (void)ex.reconstruct(f);
  } catch (const Error& e) {
    out.exact = out.resummed = 0;
    out.warnings.push_back(std::string("family is not valid in the region: ") + e.what());
    return out;
  }
  out.exact = gibbs_probability(
      [&](std::span<const Spin> spins) { return contains_all(ex.extract(spins), fam); }, region,
      constant_bc(q, ctx.model), beta, ctx.model, cap);

  std::unordered_map<std::int64_t, std::uint64_t> hits;
  const ContourHistogram all =
      contour_histogram(ctx, region, q, cap, [&](std::span<const Spin>, const ContourFamily& f, std::int64_t phi,
                                                 std::int64_t r) {
        if (contains_all(f, fam)) ++hits[phi + r];
      });
  const std::map<std::int64_t, std::uint64_t> selected(hits.begin(), hits.end());
  if (selected.empty()) {
    out.resummed = 0;
  } else {
    out.resummed = exp(log_sum(selected, beta, all.scale) - log_sum(all.weights, beta, all.scale));
  }
  return out;
}

DecayReport decay_diagnostic(const Model& m, Spin q, const Rational& beta, int rows, int cols,
                             const std::vector<int>& distances) {
  std::set<int> distinct(distances.begin(), distances.end());
  if (distinct.size() < 3) throw Error(errc::kInvalidInput, "decay fit needs at least three distinct distances");
  if (*distinct.begin() < 1) throw Error(errc::kInvalidInput, "distances must be positive");
  DecayReport out;
  out.rows = rows;
  out.cols = cols;
  const int dmax = *distinct.rbegin();
  out.ref_row = rows / 2;
  out.ref_col = (cols - 1 - dmax) / 2;
  if (out.ref_col < 0) throw Error(errc::kInvalidInput, "box too narrow for the requested distances");
  const TransferMatrix tm = TransferMatrix::box(m, rows, cols, PeriodicPattern::constant(q, 2), beta);
  const auto p = tm.row_marginal(out.ref_row);
  auto indicator = [&](std::size_t a, int col) { return tm.spin(a, col) != q ? 1 : 0; };
  Real ref = 0;
  for (std::size_t a = 0; a < p.size(); ++a)
    if (indicator(a, out.ref_col)) ref += p[a];
  out.determinate = true;
  for (int r : distinct) {
    Real other = 0, both = 0;
    for (std::size_t a = 0; a < p.size(); ++a)
      if (indicator(a, out.ref_col + r)) {
        other += p[a];
        if (indicator(a, out.ref_col)) both += p[a];
      }
    const Real c = both - ref * other;
    out.distances.push_back(r);
    out.correlations.push_back(c);
    if (c == 0) out.determinate = false;
  }
  if (!out.determinate) return out;
  const std::size_t n = out.distances.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> ys;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = out.distances[i];
    const double y = log(abs(out.correlations[i])).convert_to<double>();
    ys.push_back(y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  out.intercept = (sy - out.slope * sx) / n;
  double res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (out.intercept + out.slope * out.distances[i]);
    res += e * e;
  }
  out.residual_norm = std::sqrt(res);
  return out;
}

}  // namespace pst
