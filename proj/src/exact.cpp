#include "pst/exact.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "pst/error.hpp"
#include "pst/local_energy.hpp"
#include "pst/model_io.hpp"

namespace pst {

namespace {

Real to_real(const Rational& r) { return Real(r.numerator()) / Real(r.denominator()); }

Real negative_infinity() { return -std::numeric_limits<Real>::infinity(); }

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string site_text(const Site& s, int d) {
  std::string out = "(";
  for (int i = 0; i < d; ++i) out += (i ? "," : "") + std::to_string(s.t[i]);
  return out + ";" + std::to_string(s.k) + ")";
}

std::string full_instance_text(const Model& m, const Region& region, const BoundaryCondition& bc) {
  std::ostringstream os;
  const int d = m.dimension();
  os << serialize_model(m) << "region";
  if (region.is_torus()) {
    os << " torus";
    for (int i = 0; i < d; ++i) os << " " << (*region.periods())[i];
  }
  for (const auto& s : region.sites()) os << " " << site_text(s, d);
  os << "\nbc ";
  if (std::holds_alternative<FreeBc>(bc)) {
    os << "free";
  } else if (const auto* p = std::get_if<PeriodicPattern>(&bc)) {
    os << "periodic " << p->period;
    for (Spin s : p->spins) os << " " << s;
  } else {
    os << "explicit";
    for (const auto& [s, v] : std::get<ExplicitBc>(bc).spins) os << " " << site_text(s, d) << "=" << v;
  }
  os << "\n";
  return os.str();
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

std::optional<std::filesystem::path> cache_path(std::uint64_t key) {
  const char* dir = std::getenv("PST_CACHE_DIR");
  if (!dir || !*dir) return std::nullopt;
  return std::filesystem::path(dir) / ("hist-" + hex(key) + ".txt");
}

std::optional<EnergyHistogram> read_cache(const std::filesystem::path& path, std::uint64_t key) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string tag, key_text;
  int version = 0;
  EnergyHistogram h;
  if (!(in >> tag >> version) || tag != "pst-histogram" || version != 1) return std::nullopt;
  if (!(in >> tag >> key_text) || tag != "key" || key_text != hex(key)) return std::nullopt;
  if (!(in >> tag >> h.scale) || tag != "scale") return std::nullopt;
  std::int64_t e = 0;
  std::uint64_t c = 0;
  while (in >> e >> c) h.counts[e] = c;
  if (!in.eof()) return std::nullopt;
  return h;
}

void write_cache(const std::filesystem::path& path, std::uint64_t key, const EnergyHistogram& h) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) return;
    out << "pst-histogram 1\nkey " << hex(key) << "\nscale " << h.scale << "\n";
    for (const auto& [e, c] : h.counts) out << e << " " << c << "\n";
    if (!out) return;
  }
  std::filesystem::rename(tmp, path, ec);
}

EnergyHistogram enumerate_histogram(const Model& m, const Region& region, const BoundaryCondition& bc,
                                    std::uint64_t cap) {
  const LocalEnergy le(m, region, bc);
  std::unordered_map<std::int64_t, std::uint64_t> counts;
  le.for_each_admissible(cap, [&](std::span<const Spin>, std::int64_t e) { ++counts[e]; });
  EnergyHistogram h;
  h.scale = le.scale();
  h.counts.insert(counts.begin(), counts.end());
  return h;
}

// Sums of weights split by a per-configuration value.
struct WeightedSums {
  Real z = 0;
  Real selected = 0;
  std::uint64_t count = 0;
};

template <class Value>
WeightedSums weighted_sums(const Model& m, const Region& region, const BoundaryCondition& bc, const Rational& beta,
                           std::uint64_t cap, Value&& value) {
  const LocalEnergy le(m, region, bc);
  std::unordered_map<std::int64_t, std::pair<std::uint64_t, Real>> by_energy;
  le.for_each_admissible(cap, [&](std::span<const Spin> spins, std::int64_t e) {
    auto& slot = by_energy[e];
    ++slot.first;
    const double v = value(spins);
    if (v != 0) slot.second += v;
  });
  std::map<std::int64_t, std::pair<std::uint64_t, Real>> ordered(by_energy.begin(), by_energy.end());
  WeightedSums out;
  if (ordered.empty()) throw Error(errc::kInadmissible, "no admissible configuration");
  const std::int64_t emin = ordered.begin()->first;
  for (const auto& [e, slot] : ordered) {
    const Real w = boltzmann(beta, e - emin, le.scale());
    out.z += w * slot.first;
    out.selected += w * slot.second;
    out.count += slot.first;
  }
  return out;
}

}  // namespace

std::uint64_t EnergyHistogram::total() const {
  std::uint64_t n = 0;
  for (const auto& [e, c] : counts) n += c;
  return n;
}

Real boltzmann(const Rational& beta, std::int64_t scaled, std::int64_t scale) {
  const Rational exponent = -beta * Rational(scaled, scale);
  if (exponent.numerator() == 0) return Real(1);
  return exp(to_real(exponent));
}

Real EnergyHistogram::log_partition(const Rational& beta) const {
  if (counts.empty()) return negative_infinity();
  const std::int64_t emin = counts.begin()->first;
  Real sum = 0;
  for (const auto& [e, c] : counts) sum += boltzmann(beta, e - emin, scale) * c;
  return log(sum) - to_real(beta * Rational(emin, scale));
}

std::uint64_t instance_key(const Model& m, const Region& region, const BoundaryCondition& bc) {
  return fnv1a(full_instance_text(m, region, bc));
}

std::string describe(const Region& region, const BoundaryCondition& bc, const Model& m) {
  std::ostringstream os;
  os << "model=" << (m.name.empty() ? "unnamed" : m.name) << " sites=" << region.size();
  if (region.is_torus()) {
    os << " torus=";
    for (int i = 0; i < region.dimension(); ++i) os << (i ? "x" : "") << (*region.periods())[i];
  }
  os << " bc=";
  if (std::holds_alternative<FreeBc>(bc)) {
    os << "free";
  } else if (const auto* p = std::get_if<PeriodicPattern>(&bc)) {
    if (p->is_constant()) {
      os << m.spins.symbol(p->spins.front());
    } else {
      os << "periodic/" << p->period;
    }
  } else {
    os << "explicit/" << std::get<ExplicitBc>(bc).spins.size();
  }
  return os.str();
}

EnergyHistogram energy_histogram(const Model& m, const Region& region, const BoundaryCondition& bc,
                                 std::uint64_t cap) {
  const std::uint64_t key = instance_key(m, region, bc);
  const auto path = cache_path(key);
  if (path)
    if (auto cached = read_cache(*path, key)) return *cached;
  EnergyHistogram h = enumerate_histogram(m, region, bc, cap);
  if (path) write_cache(*path, key, h);
  return h;
}

OracleReport z_exact(const Region& region, const BoundaryCondition& bc, const Rational& beta, const Model& m,
                     std::uint64_t cap) {
  if (beta < Rational(0)) throw Error(errc::kInvalidInput, "beta must be nonnegative");
  const EnergyHistogram h = energy_histogram(m, region, bc, cap);
  OracleReport r;
  r.quantity = "log_z";
  r.instance = describe(region, bc, m) + " beta=" + to_string(beta);
  r.count = h.total();
  r.value = h.log_partition(beta);
  if (r.count == 0) r.warnings.push_back("no admissible configuration: the boundary condition cannot be extended (richness)");
  return r;
}

Real gibbs_probability(const Event& event, const Region& region, const BoundaryCondition& bc, const Rational& beta,
                       const Model& m, std::uint64_t cap) {
  const auto s = weighted_sums(m, region, bc, beta, cap, [&](std::span<const Spin> x) { return event(x) ? 1.0 : 0.0; });
  return s.selected / s.z;
}

Real gibbs_expectation(const Observable& f, const Region& region, const BoundaryCondition& bc, const Rational& beta,
                       const Model& m, std::uint64_t cap) {
  const auto s = weighted_sums(m, region, bc, beta, cap, f);
  return s.selected / s.z;
}

BoundsReport bounds_check(const Model& m, const Rational& beta, int max_side, std::uint64_t cap) {
  m.validate();
  if (max_side < 1) throw Error(errc::kInvalidInput, "window side must be positive");
  const int d = m.dimension();
  const int K = m.num_offsets();
  const std::size_t S = m.num_spins();
  BoundsReport report;
  report.beta = beta;
  report.max_side = std::max(max_side, 2 * m.richness_collar() + 1);
  report.volume_constant = std::numeric_limits<Real>::infinity();
  report.boundary_constant = 0;
  bool all_positive = true;

  // Cubes no wider than twice the collar may be frozen entirely by the boundary.
  const int min_side = 2 * m.richness_collar() + 1;
  for (int side = min_side; side <= std::max(max_side, min_side); ++side) {
    Cell extent{};
    for (int i = 0; i < d; ++i) extent[i] = side;
    const Region region = Region::box(d, Cell{}, extent, K);

    // Outside sites read by terms meeting the region.
    std::set<Site> collar_set;
    std::set<std::pair<std::size_t, Cell>> seen;
    for (const auto& x : region.sites())
      for (std::size_t ti = 0; ti < m.terms.size(); ++ti)
        for (const auto& a : m.terms[ti].support) {
          if (a.k != x.k) continue;
          Cell anchor = x.t;
          for (int i = 0; i < d; ++i) anchor[i] -= a.t[i];
          if (!seen.insert({ti, anchor}).second) continue;
          for (const auto& b : m.terms[ti].support) {
            Site s{anchor, b.k};
            for (int i = 0; i < d; ++i) s.t[i] += b.t[i];
            if (!region.contains(s)) collar_set.insert(s);
          }
        }
    const std::vector<Site> collar(collar_set.begin(), collar_set.end());
    // Term instances lying inside the collar decide whether an assignment is admissible.
    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> inside;
    std::set<std::pair<std::size_t, Cell>> seen_inside;
    for (const auto& y : collar)
      for (std::size_t ti = 0; ti < m.terms.size(); ++ti)
        for (const auto& a : m.terms[ti].support) {
          if (a.k != y.k) continue;
          Cell anchor = y.t;
          for (int i = 0; i < d; ++i) anchor[i] -= a.t[i];
          if (!seen_inside.insert({ti, anchor}).second) continue;
          std::vector<std::size_t> idx;
          for (const auto& b : m.terms[ti].support) {
            Site s{anchor, b.k};
            for (int i = 0; i < d; ++i) s.t[i] += b.t[i];
            auto it = collar_set.find(s);
            if (it == collar_set.end()) break;
            idx.push_back(static_cast<std::size_t>(std::distance(collar_set.begin(), it)));
          }
          if (idx.size() == m.terms[ti].support.size()) inside.emplace_back(ti, std::move(idx));
        }

    BoundsRow row;
    row.side = side;
    row.volume = region.size();
    row.boundary = region.is_torus() ? 0 : boundary_layer(region, 1).size();
    row.min_log_z = std::numeric_limits<Real>::infinity();
    row.max_log_z = -std::numeric_limits<Real>::infinity();
    std::vector<Spin> bc_spins(collar.size(), 0);
    std::uint64_t tried = 0;
    while (true) {
      if (++tried > cap) throw Error(errc::kCapExceeded, "boundary-condition enumeration cap exceeded");
      bool admissible = true;
      std::vector<Spin> pattern;
      for (const auto& [ti, idx] : inside) {
        pattern.clear();
        for (auto i : idx) pattern.push_back(bc_spins[i]);
        if (m.terms[ti](pattern, S).is_infinite()) {
          admissible = false;
          break;
        }
      }
      if (admissible) {
        ExplicitBc bc;
        for (std::size_t i = 0; i < collar.size(); ++i) bc.spins[collar[i]] = bc_spins[i];
        const EnergyHistogram h = enumerate_histogram(m, region, bc, cap);
        ++row.conditions;
        const Real lz = h.log_partition(beta);
        if (h.counts.empty()) {
          all_positive = false;
          if (!report.witness) {
            std::ostringstream os;
            os << "side " << side << " boundary";
            for (std::size_t i = 0; i < collar.size(); ++i)
              os << " " << site_text(collar[i], d) << "=" << m.spins.symbol(bc_spins[i]);
            os << " admits no configuration";
            report.witness = os.str();
          }
        } else {
          if (lz < row.min_log_z) row.min_log_z = lz;
          if (lz > row.max_log_z) row.max_log_z = lz;
          const Real per_site = lz / static_cast<double>(region.size());
          if (per_site < report.volume_constant) {
            report.volume_constant = per_site;
            if (all_positive) {
              std::ostringstream os;
              os << "side " << side << " boundary";
              for (std::size_t i = 0; i < collar.size(); ++i)
                os << " " << site_text(collar[i], d) << "=" << m.spins.symbol(bc_spins[i]);
              os << " log_z " << lz.str(17);
              report.witness = os.str();
            }
          }
        }
      }
      std::size_t j = bc_spins.size();
      while (j > 0 && ++bc_spins[j - 1] == S) bc_spins[--j] = 0;
      if (j == 0) break;
    }
    if (row.conditions > 0 && row.boundary > 0 && row.min_log_z <= row.max_log_z) {
      const Real ratio = (row.max_log_z - row.min_log_z) / static_cast<double>(row.boundary);
      if (ratio > report.boundary_constant) report.boundary_constant = ratio;
    }
    report.rows.push_back(row);
  }
  report.pass = all_positive && report.volume_constant > 0;
  if (!all_positive) {
    report.reason = "some admissible boundary condition admits no configuration";
  } else if (!(report.volume_constant > 0)) {
    report.reason = "log Z / |region| is not bounded away from zero";
  } else {
    report.reason = "every partition function exceeds exp(c |region|)";
  }
  return report;
}

}  // namespace pst
