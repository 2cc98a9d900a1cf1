#include "pst/groundstates.hpp"

#include <algorithm>
#include <map>

#include "pst/animals.hpp"
#include "pst/error.hpp"
#include "pst/local_energy.hpp"

namespace pst {

namespace {

Cell cube_extent(int period, int dimension) {
  Cell c{};
  for (int i = 0; i < dimension; ++i) c[i] = period;
  return c;
}

}  // namespace

PeriodicPattern minimal_period(const PeriodicPattern& p, int dimension, int num_offsets) {
  for (int q = 1; q < p.period; ++q) {
    if (p.period % q != 0) continue;
    const Region cells = Region::box(dimension, Cell{}, cube_extent(p.period, dimension), num_offsets);
    bool repeats = true;
    for (const auto& s : cells.sites()) {
      Site r = s;
      for (int i = 0; i < dimension; ++i) r.t[i] %= q;
      if (p.at(s, dimension, num_offsets) != p.at(r, dimension, num_offsets)) {
        repeats = false;
        break;
      }
    }
    if (!repeats) continue;
    PeriodicPattern out{q, {}};
    for (const auto& s : Region::box(dimension, Cell{}, cube_extent(q, dimension), num_offsets).sites())
      out.spins.push_back(p.at(s, dimension, num_offsets));
    return out;
  }
  return p;
}

PeriodicState make_state(const Model& m, PeriodicPattern pattern) {
  pattern = minimal_period(pattern, m.dimension(), m.num_offsets());
  PeriodicState st{pattern, {}};
  if (pattern.period == 1 && pattern.is_constant()) {
    st.label = m.spins.symbol(pattern.spins.front());
  } else {
    st.label = "p" + std::to_string(pattern.period) + ":";
    for (std::size_t i = 0; i < pattern.spins.size(); ++i)
      st.label += (i ? "," : "") + m.spins.symbol(pattern.spins[i]);
  }
  return st;
}

PeriodicState constant_state(const Model& m, Spin s) {
  return make_state(m, PeriodicPattern::constant(s, m.dimension(), m.num_offsets()));
}

Rational specific_energy(const PeriodicState& p, const Model& m) {
  const int d = m.dimension();
  const Region torus = Region::torus(d, cube_extent(p.period(), d), m.num_offsets());
  const Energy e = LocalEnergy(m, torus, FreeBc{}).energy(p.pattern.spins);
  if (e.is_infinite()) throw Error(errc::kInadmissible, "pattern " + p.label + " is not admissible on its period torus");
  return e.value() / static_cast<std::int64_t>(torus.size());
}

GroundStateSearch find_ground_states(const Model& m, int period_cap, std::uint64_t pattern_cap, int verify_cap) {
  if (period_cap < 1) throw Error(errc::kInvalidInput, "period cap must be positive");
  const int d = m.dimension();
  GroundStateSearch out;
  out.period_cap = period_cap;

  std::optional<Rational> best;
  std::vector<std::pair<int, PeriodicPattern>> minimal;  // (searched period, pattern)
  for (int l = 1; l <= period_cap; ++l) {
    const Region torus = Region::torus(d, cube_extent(l, d), m.num_offsets());
    const LocalEnergy local(m, torus, FreeBc{});
    const auto sites = static_cast<std::int64_t>(torus.size());
    local.for_each_admissible(pattern_cap, [&](std::span<const Spin> s, std::int64_t e) {
      const Rational density = local.to_rational(e) / sites;
      if (!best || density < *best) {
        best = density;
        minimal.clear();
      }
      if (density == *best) minimal.emplace_back(l, PeriodicPattern{l, std::vector<Spin>(s.begin(), s.end())});
    });
  }
  if (!best) throw Error(errc::kRichness, "no admissible periodic pattern up to the period cap");
  out.energy = *best;

  std::map<PeriodicPattern, int> distinct;  // reduced pattern -> first searched period
  for (const auto& [l, pat] : minimal) {
    const PeriodicPattern r = minimal_period(pat, d, m.num_offsets());
    distinct.emplace(r, l);
  }
  std::vector<PeriodicState> states;
  for (const auto& [pat, l] : distinct) states.push_back(make_state(m, pat));
  std::sort(states.begin(), states.end(), [](const PeriodicState& a, const PeriodicState& b) {
    return std::tie(a.pattern.period, a.pattern.spins) < std::tie(b.pattern.period, b.pattern.spins);
  });
  out.states = std::move(states);

  for (int l = 1; l <= period_cap; ++l) {
    std::size_t c = 0;
    for (const auto& st : out.states)
      if (l % st.period() == 0) ++c;
    out.count_by_period.push_back(c);
  }
  for (int l = 2; l <= period_cap; ++l) {
    const auto prev = out.count_by_period[l - 2], cur = out.count_by_period[l - 1];
    if (prev > 0 && cur > prev)
      out.warnings.push_back("ground-state ties grow from " + std::to_string(prev) + " to " + std::to_string(cur) +
                             " at period " + std::to_string(l) + "; suspected infinite degeneracy");
  }
  if (verify_cap > 0)
    for (const auto& st : out.states) {
      const auto v = verify_ground_state(st, m, verify_cap);
      if (!v.pass)
        out.warnings.push_back("state " + st.label + " minimises the energy density but fails the local check at " +
                               std::to_string(v.witness->region.size()) + " sites");
    }
  return out;
}

GroundStateVerdict verify_ground_state(const PeriodicState& p, const Model& m, int cap) {
  GroundStateVerdict verdict;
  verdict.cap = cap;
  if (cap <= 0) return verdict;
  const int d = m.dimension();
  const int K = m.num_offsets();
  const BoundaryCondition bc = p.pattern;
  const AnimalEnumerator animals(d, K, cap, Connectivity::kLinfty);
  for (const auto& anchor : Region::box(d, Cell{}, cube_extent(p.period(), d), K).sites()) {
    animals.run(anchor, [&](std::span<const Site> sites) {
      if (verdict.witness) return false;
      ++verdict.regions_checked;
      const Region region(d, std::vector<Site>(sites.begin(), sites.end()), std::nullopt, K);
      std::vector<Spin> ground;
      for (const auto& s : region.sites()) ground.push_back(p.pattern.at(s, d, K));
      const LocalEnergy local(m, region, bc);
      const std::int64_t e0 = local.scaled(ground);
      if (e0 == LocalEnergy::kInfinite)
        throw Error(errc::kInadmissible, "state " + p.label + " is not admissible");
      std::int64_t lowest = e0;
      std::vector<Spin> arg;
      local.for_each_admissible(std::uint64_t{1} << 26, [&](std::span<const Spin> s, std::int64_t e) {
        if (e < lowest) {
          lowest = e;
          arg.assign(s.begin(), s.end());
        }
      });
      if (lowest < e0) {
        verdict.pass = false;
        verdict.witness = GroundStateWitness{region.sites(), arg, Energy(local.to_rational(lowest)),
                                             Energy(local.to_rational(e0))};
        return false;
      }
      return true;
    });
    if (verdict.witness) break;
  }
  return verdict;
}

}  // namespace pst
